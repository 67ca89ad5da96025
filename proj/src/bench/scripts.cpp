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


#include "buildops/bench/scripts.hpp"

#include <algorithm>

#include "buildops/orchestrator/orchestrator.hpp"

namespace buildops::bench {

using orchestrator::ExecutionPlan;
using orchestrator::Mode;

namespace {

Json rule(std::vector<std::string> substrings, Json response) {
    return Json{{"match", {{"substring", std::move(substrings)}}}, {"response", std::move(response)}};
}

// Writes `value` at a dotted path inside `params`.
void set_dotted(Json& params, const std::string& key, const Json& value) {
    Json* at = &params;
    std::size_t start = 0;
    for (std::size_t dot; (dot = key.find('.', start)) != std::string::npos; start = dot + 1) {
        at = &(*at)[key.substr(start, dot - start)];
    }
    (*at)[key.substr(start)] = value;
}

Json step_calls(const ExpectedStep& s, const Faults& faults, bool apply_drop) {
    Json calls = Json::array();
    for (const auto& t : s.required_tools) {
        if (apply_drop && faults.drop_tool == t) continue;
        Json params = s.expected_parameters.contains(t) ? s.expected_parameters.at(t) : Json::object();
        if (faults.perturb && faults.perturb->tool == t) set_dotted(params, faults.perturb->key, faults.perturb->value);
        calls.push_back(Json{{"tool", t}, {"parameters", params}});
    }
    return calls;
}

}  // namespace

std::string step_tag(int order) { return "[step_" + std::to_string(order) + "]"; }

std::string step_task(const TestCase& c, const ExpectedStep& s) {
    std::string tools;
    for (const auto& t : s.required_tools) tools += (tools.empty() ? "" : ", ") + t;
    return step_tag(s.step_order) + " " + c.name + ": use " + tools;
}

ExecutionPlan perfect_plan(const TestCase& c, Mode mode, const Faults& faults) {
    std::vector<ExpectedStep> steps = c.expected_steps;
    if (faults.swap_first_steps && steps.size() >= 2) std::swap(steps[0], steps[1]);

    ExecutionPlan plan;
    plan.mode = mode;
    plan.understanding = c.description.empty() ? c.name : c.description;
    plan.reasoning = "one step per expected action, chained in order";
    std::string previous;
    for (const auto& s : steps) {
        orchestrator::PlanStep p;
        p.step_id = "step_" + std::to_string(s.step_order);
        p.agent_id = s.agent_id;
        p.task = step_task(c, s);
        if (!previous.empty()) p.depends_on = {previous};
        previous = p.step_id;
        if (orchestrator::centralized(mode)) {
            orchestrator::Guidance g;
            for (const auto& call : step_calls(s, faults, false)) {
                g.tool_instructions.push_back({call.at("tool").get<std::string>(), call.at("parameters"), "success"});
            }
            g.validation = "every call succeeds";
            p.guidance = std::move(g);
        } else {
            p.expected_outcome = "tools succeed";
        }
        plan.steps.push_back(std::move(p));
    }
    return plan;
}

Json orchestrator_script(const TestCase& c, Mode mode, const Faults& faults) {
    Json rules = Json::array();
    rules.push_back(rule({"ROUTING layer", c.request}, std::string("Routing your request. ") + orchestrator::kRouteMarker));
    rules.push_back(rule({"ROUTING layer"}, "Hello! Tell me what you would like to configure, simulate or compare."));

    const ExecutionPlan plan = perfect_plan(c, mode, faults);
    Json full = plan;
    if (mode == Mode::C2) {
        Json stage1 = full;
        for (auto& s : stage1["steps"]) {
            Json tools = Json::array();
            for (const auto& i : s["orchestrator_guidance"]["tool_instructions"]) tools.push_back(i["tool"]);
            s.erase("orchestrator_guidance");
            s["tools_to_use"] = tools;
        }
        rules.push_back(rule({"Select which agents and tools to use"}, stage1.dump()));
        rules.push_back(rule({"Complete the execution plan with specific tool parameters"}, full.dump()));
    } else if (mode == Mode::C1) {
        rules.push_back(rule({"Create detailed execution plan for CENTRALIZED mode"}, full.dump()));
    } else {
        rules.push_back(rule({"Create high-level plan for DECENTRALIZED mode"}, full.dump()));
    }
    rules.push_back(rule({"Format this simulation result"},
                         Json{{"text", "Here is what the system found:\n"},
                              {"echo_after", "Result from system:\n"},
                              {"echo_before", "\n\nUser's request:"}}));
    return rules;
}

Json agent_script(const TestCase& c, Mode mode, const Faults& faults) {
    Json rules = Json::array();
    if (orchestrator::centralized(mode)) {
        if (faults.drop_tool) {
            for (const auto& s : c.expected_steps) {
                if (std::find(s.required_tools.begin(), s.required_tools.end(), *faults.drop_tool) ==
                    s.required_tools.end()) {
                    continue;
                }
                Json reply{{"validation", "needs_adjustment"},
                           {"reasoning", "one call is unnecessary"},
                           {"refined_instructions", step_calls(s, faults, true)}};
                rules.push_back(rule({"The orchestrator has provided", "Task: " + step_tag(s.step_order)}, reply.dump()));
            }
        }
        rules.push_back(rule({"The orchestrator has provided"},
                             Json{{"text", R"({"validation": "valid", "reasoning": "instructions fit the task", )"
                                           R"("refined_instructions": )"},
                                  {"echo_after", "Instructions: "},
                                  {"echo_before", "\n\nYour available tools"},
                                  {"suffix", "}"}}));
    } else {
        for (const auto& s : c.expected_steps) {
            Json reply{{"reasoning", "these tools cover the task"}, {"tool_calls", step_calls(s, faults, true)}};
            rules.push_back(rule({"plan which tools to use", "Task Request: " + step_tag(s.step_order)}, reply.dump()));
        }
    }
    rules.push_back(rule({"Tool results:"},
                         Json{{"text", "Completed."}, {"echo_after", "<<RESULTS"}, {"echo_before", "RESULTS>>"}}));
    return rules;
}

}  // namespace buildops::bench
