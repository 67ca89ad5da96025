/*
 * Copyright 2026 The buildops Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "buildops/orchestrator/plan.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "buildops/error.hpp"

namespace buildops::orchestrator {

namespace {

[[noreturn]] void malformed(const std::string& why) { throw Error("MalformedLLMOutput", "plan: " + why); }
[[noreturn]] void invalid(const std::string& why) { throw Error("InvalidPlan", why); }

std::string text_field(const Json& obj, const char* key, bool required, const std::string& where) {
    if (!obj.contains(key) || obj[key].is_null()) {
        if (required) malformed(where + " has no '" + key + "'");
        return {};
    }
    const Json& v = obj[key];
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return v.dump();
    malformed(where + ": '" + key + "' must be text");
}

std::vector<std::string> string_list(const Json& obj, const char* key, const std::string& where) {
    std::vector<std::string> out;
    if (!obj.contains(key) || obj[key].is_null()) return out;
    const Json& v = obj[key];
    if (v.is_string()) {
        if (!v.get<std::string>().empty()) out.push_back(v.get<std::string>());
        return out;
    }
    if (!v.is_array()) malformed(where + ": '" + key + "' must be a list");
    for (const auto& item : v) {
        if (!item.is_string()) malformed(where + ": '" + key + "' entries must be text");
        out.push_back(item.get<std::string>());
    }
    return out;
}

Guidance parse_guidance(const Json& g, const std::string& where) {
    if (!g.is_object()) malformed(where + ": orchestrator_guidance must be an object");
    Guidance out;
    if (!g.contains("tool_instructions") || !g["tool_instructions"].is_array()) {
        malformed(where + ": orchestrator_guidance needs a tool_instructions list");
    }
    for (const auto& item : g["tool_instructions"]) {
        if (!item.is_object() || !item.contains("tool") || !item["tool"].is_string()) {
            malformed(where + ": every tool instruction needs a string 'tool'");
        }
        if (item.contains("parameters") && !item["parameters"].is_object() && !item["parameters"].is_null()) {
            malformed(where + ": parameters must be an object");
        }
        out.tool_instructions.push_back(item.get<agents::ToolInstruction>());
    }
    if (out.tool_instructions.empty()) malformed(where + ": tool_instructions is empty");
    out.validation = text_field(g, "validation", false, where);
    return out;
}

}  // namespace

std::string to_string(Mode m) {
    switch (m) {
        case Mode::C1: return "C1";
        case Mode::C2: return "C2";
        case Mode::D: return "D";
    }
    return "C1";
}

Mode mode_from_string(const std::string& s) {
    std::string t;
    for (char c : s) {
        if (c != '-' && c != '_') t += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    if (t == "C1") return Mode::C1;
    if (t == "C2") return Mode::C2;
    if (t == "D") return Mode::D;
    throw Error("InvalidArgument", "unknown mode '" + s + "' (expected c1, c2 or d)");
}

bool centralized(Mode m) { return m != Mode::D; }

ExecutionPlan parse_plan(const Json& reply, Mode mode, PlanStage stage) {
    if (!reply.is_object()) malformed("reply is not an object");
    if (!reply.contains("steps") || !reply["steps"].is_array()) malformed("no 'steps' list");
    if (reply["steps"].empty()) malformed("the plan has no steps");
    ExecutionPlan plan;
    plan.mode = mode;
    plan.understanding = text_field(reply, "understanding", false, "plan");
    plan.reasoning = text_field(reply, "reasoning", false, "plan");
    for (std::size_t i = 0; i < reply["steps"].size(); ++i) {
        const Json& s = reply["steps"][i];
        const std::string where = "step " + std::to_string(i + 1);
        if (!s.is_object()) malformed(where + " is not an object");
        PlanStep step;
        step.step_id = text_field(s, "step_id", true, where);
        step.agent_id = text_field(s, "agent_id", true, where);
        step.task = text_field(s, "task", true, where);
        step.depends_on = string_list(s, "depends_on", where);
        const bool has_guidance = s.contains("orchestrator_guidance") && !s["orchestrator_guidance"].is_null();
        if (mode == Mode::D) {
            if (has_guidance) plan.warnings.push_back("guidance on " + step.step_id + " ignored in D mode");
            step.expected_outcome = text_field(s, "expected_outcome", false, where);
        } else if (stage == PlanStage::Routing) {
            if (!s.contains("tools_to_use")) malformed(where + " has no 'tools_to_use'");
            step.tools_to_use = string_list(s, "tools_to_use", where);
        } else {
            if (!has_guidance) malformed(where + " has no orchestrator_guidance");
            step.guidance = parse_guidance(s["orchestrator_guidance"], where);
        }
        plan.steps.push_back(std::move(step));
    }
    return plan;
}

void validate_plan(const ExecutionPlan& plan, const agents::AgentPool& pool, const toolbus::ToolRegistry& registry,
                   PlanStage stage) {
    if (plan.steps.empty()) invalid("empty plan");
    std::set<std::string> ids;
    for (const auto& s : plan.steps) {
        if (!ids.insert(s.step_id).second) invalid("duplicate step_id '" + s.step_id + "'");
    }
    for (const auto& s : plan.steps) {
        const auto* agent = pool.find(s.agent_id);
        if (!agent) invalid("agent: step " + s.step_id + " names unknown agent '" + s.agent_id + "'");
        for (const auto& d : s.depends_on) {
            if (d == s.step_id) invalid("cycle: step " + s.step_id + " depends on itself");
            if (!ids.count(d)) invalid("dependency: step " + s.step_id + " depends on unknown step '" + d + "'");
        }
        auto check_tool = [&](const std::string& tool) {
            if (!registry.contains(tool)) invalid("tool: step " + s.step_id + " names unknown tool '" + tool + "'");
            if (!agent->allows(tool)) {
                invalid("whitelist: tool '" + tool + "' is not available to " + s.agent_id + " (step " + s.step_id + ")");
            }
        };
        if (stage == PlanStage::Routing && plan.mode == Mode::C2) {
            if (!s.tools_to_use || s.tools_to_use->empty()) invalid("empty tools_to_use in step " + s.step_id);
            for (const auto& t : *s.tools_to_use) check_tool(t);
        } else if (centralized(plan.mode)) {
            if (!s.guidance) invalid("step " + s.step_id + " has no guidance");
            for (const auto& ins : s.guidance->tool_instructions) check_tool(ins.tool);
        }
    }
    if (topological_order(plan).size() != plan.steps.size()) {
        std::string members;
        auto order = topological_order(plan);
        for (std::size_t i = 0; i < plan.steps.size(); ++i) {
            if (std::find(order.begin(), order.end(), i) == order.end()) {
                members += (members.empty() ? "" : ", ") + plan.steps[i].step_id;
            }
        }
        invalid("cycle: dependency loop among " + members);
    }
}

std::vector<std::size_t> topological_order(const ExecutionPlan& plan) {
    const std::size_t n = plan.steps.size();
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) index.emplace(plan.steps[i].step_id, i);
    std::vector<std::size_t> indegree(n, 0);
    std::vector<std::vector<std::size_t>> children(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& d : plan.steps[i].depends_on) {
            auto it = index.find(d);
            if (it == index.end()) continue;
            ++indegree[i];
            children[it->second].push_back(i);
        }
    }
    std::set<std::size_t> ready;  // ordered, so the lowest declaration index wins ties
    for (std::size_t i = 0; i < n; ++i) {
        if (indegree[i] == 0) ready.insert(i);
    }
    std::vector<std::size_t> order;
    while (!ready.empty()) {
        const std::size_t i = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(i);
        for (auto c : children[i]) {
            if (--indegree[c] == 0) ready.insert(c);
        }
    }
    return order;
}

void to_json(Json& j, const PlanStep& s) {
    j = Json{{"step_id", s.step_id}, {"agent_id", s.agent_id}, {"task", s.task}, {"depends_on", s.depends_on}};
    if (s.guidance) {
        j["orchestrator_guidance"] = {{"tool_instructions", s.guidance->tool_instructions},
                                      {"validation", s.guidance->validation}};
    }
    if (s.tools_to_use) j["tools_to_use"] = *s.tools_to_use;
    if (s.expected_outcome) j["expected_outcome"] = *s.expected_outcome;
}

void to_json(Json& j, const ExecutionPlan& p) {
    j = Json{{"understanding", p.understanding},
             {"reasoning", p.reasoning},
             {"mode", to_string(p.mode)},
             {"steps", p.steps},
             {"warnings", p.warnings}};
}

void from_json(const Json& j, ExecutionPlan& p) {
    const Mode mode = mode_from_string(j.value("mode", std::string("C1")));
    const bool routing = mode == Mode::C2 && !j["steps"].empty() && j["steps"][0].contains("tools_to_use") &&
                         !j["steps"][0].contains("orchestrator_guidance");
    p = parse_plan(j, mode, routing ? PlanStage::Routing : PlanStage::Final);
    if (j.contains("warnings")) p.warnings = j["warnings"].get<std::vector<std::string>>();
}

}  // namespace buildops::orchestrator
