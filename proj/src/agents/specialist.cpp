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


#include "buildops/agents/specialist.hpp"

#include <sstream>

#include "buildops/error.hpp"

namespace buildops::agents {

namespace {

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i];
    }
    return out;
}

// Shared shape check for refined_instructions / tool_calls entries.
std::string check_calls(const Json& list, const char* field, const AgentCard& agent, bool allow_empty) {
    if (!list.is_array()) return std::string("'") + field + "' must be a list";
    if (list.empty() && !allow_empty) return std::string("'") + field + "' is empty";
    for (const auto& item : list) {
        if (!item.is_object() || !item.contains("tool") || !item["tool"].is_string()) {
            return std::string("every entry of '") + field + "' needs a string 'tool'";
        }
        const std::string tool = item["tool"].get<std::string>();
        if (!agent.allows(tool)) {
            return "tool '" + tool + "' is not in your available tools (" + join(agent.available_tools) + ")";
        }
        if (item.contains("parameters") && !item["parameters"].is_object() && !item["parameters"].is_null()) {
            return "parameters of '" + tool + "' must be an object";
        }
    }
    return {};
}

Json params_of(const Json& item) {
    if (item.contains("parameters") && item["parameters"].is_object()) return item["parameters"];
    return Json::object();
}

llm::CompletionParams params_for(const AgentCard& agent, const char* purpose) {
    llm::CompletionParams p;
    p.temperature = agent.temperature;
    p.role = llm::RoleTag::Agent;
    p.purpose = purpose;
    p.agent_id = agent.agent_id;
    return p;
}

void run_calls(const AgentCard& agent, toolbus::ToolClient& tools, const std::vector<PlannedCall>& calls,
               StepResult& out) {
    for (const auto& c : calls) {
        toolbus::ToolCall call;
        call.tool = c.tool;
        call.arguments = c.parameters;
        call.caller = agent.agent_id;
        out.executed_calls.push_back(tools.invoke(std::move(call)));
    }
    std::size_t ok = 0;
    for (const auto& r : out.executed_calls) ok += r.result.success ? 1 : 0;
    if (ok == out.executed_calls.size() && ok > 0) {
        out.status = StepStatus::Success;
    } else if (ok > 0) {
        out.status = StepStatus::Partial;
    } else {
        out.status = StepStatus::Failed;
        if (out.error.empty()) out.error = "every tool call failed";
    }
}

void synthesize(const AgentCard& agent, llm::Backend& backend, const PromptSet& prompts, const std::string& task,
                StepResult& out) {
    std::ostringstream results;
    for (const auto& r : out.executed_calls) {
        results << "- " << r.call.tool << ": " << Json(r.result).dump() << "\n";
    }
    const std::string prompt = prompts.render(
        prompt::kSpecialistSynthesis,
        {{"agent_name", agent.name}, {"agent_role", agent.role}, {"task", task}, {"tool_results", results.str()}});
    try {
        auto reply = backend.complete({{"user", prompt}}, params_for(agent, "specialist_synthesis"));
        out.usage.push_back(reply.usage);
        out.synthesis = reply.text;
    } catch (const Error& e) {
        out.error = std::string("synthesis failed: ") + e.what();
    }
}

StepResult begin(const AgentCard& agent, const std::string& task, const ExecOptions& options) {
    StepResult r;
    r.step_id = options.step_id;
    r.agent_id = agent.agent_id;
    r.task = task;
    r.start_s = toolbus::wall_clock_s();
    return r;
}

void finish(StepResult& r) {
    r.llm_calls = static_cast<int>(r.usage.size());
    r.end_s = std::max(toolbus::wall_clock_s(), r.start_s);
}

}  // namespace

void to_json(Json& j, const ToolInstruction& t) {
    j = Json{{"tool", t.tool}, {"parameters", t.parameters}, {"expected_output", t.expected_output}};
}

void from_json(const Json& j, ToolInstruction& t) {
    t.tool = j.at("tool").get<std::string>();
    t.parameters = j.contains("parameters") && j["parameters"].is_object() ? j["parameters"] : Json::object();
    t.expected_output = j.contains("expected_output") && j["expected_output"].is_string()
                            ? j["expected_output"].get<std::string>()
                            : std::string();
}

std::string to_string(StepStatus s) {
    switch (s) {
        case StepStatus::Success: return "success";
        case StepStatus::Partial: return "partial";
        case StepStatus::Failed: return "failed";
        case StepStatus::Skipped: return "skipped";
    }
    return "failed";
}

StepStatus step_status_from_string(const std::string& s) {
    for (auto v : {StepStatus::Success, StepStatus::Partial, StepStatus::Failed, StepStatus::Skipped}) {
        if (to_string(v) == s) return v;
    }
    throw Error("InvalidArgument", "unknown step status '" + s + "'");
}

void to_json(Json& j, const StepResult& r) {
    j = Json{{"step_id", r.step_id},
             {"agent_id", r.agent_id},
             {"task", r.task},
             {"status", to_string(r.status)},
             {"executed_calls", r.executed_calls},
             {"synthesis", r.synthesis},
             {"error", r.error},
             {"reasoning", r.reasoning},
             {"usage", r.usage},
             {"llm_calls", r.llm_calls},
             {"start_s", r.start_s},
             {"end_s", r.end_s}};
    if (r.validation) j["validation"] = *r.validation;
    if (r.deviation) {
        j["deviated"] = r.deviation->deviated();
        j["deviation"] = *r.deviation;
    }
}

StepResult execute_centralized(const AgentCard& agent, llm::Backend& backend, toolbus::ToolClient& tools,
                               const PromptSet& prompts, const std::string& task,
                               const std::vector<ToolInstruction>& instructions, const ExecOptions& options) {
    StepResult out = begin(agent, task, options);
    for (const auto& ins : instructions) {
        if (!agent.allows(ins.tool)) {
            out.status = StepStatus::Failed;
            out.error = "Unauthorized: instruction names tool '" + ins.tool + "' outside the whitelist of '" +
                        agent.agent_id + "'";
            finish(out);
            return out;
        }
    }

    const std::string prompt = prompts.render(prompt::kSpecialistCentralized,
                                              {{"agent_name", agent.name},
                                               {"agent_role", agent.role},
                                               {"task", task},
                                               {"tool_instructions", Json(instructions).dump(2)},
                                               {"available_tools", join(agent.available_tools)}});
    auto check = [&](const Json& v) -> std::string {
        if (!v.contains("validation") || !v["validation"].is_string()) return "missing 'validation'";
        const std::string verdict = v["validation"].get<std::string>();
        if (verdict != "valid" && verdict != "needs_adjustment") {
            return "'validation' must be \"valid\" or \"needs_adjustment\"";
        }
        if (!v.contains("refined_instructions")) return "missing 'refined_instructions'";
        return check_calls(v["refined_instructions"], "refined_instructions", agent, false);
    };
    JsonReply reply;
    try {
        reply = complete_json(backend, {{"user", prompt}}, params_for(agent, "specialist_validate"), check, out.usage,
                              options.json_retries);
    } catch (const Error& e) {
        out.status = StepStatus::Failed;
        out.error = e.what();
        finish(out);
        return out;
    }
    out.validation = reply.value["validation"].get<std::string>();
    if (reply.value.contains("reasoning") && reply.value["reasoning"].is_string()) {
        out.reasoning = reply.value["reasoning"].get<std::string>();
    }

    std::vector<PlannedCall> calls;
    for (const auto& item : reply.value["refined_instructions"]) {
        calls.push_back({item["tool"].get<std::string>(), params_of(item)});
    }
    run_calls(agent, tools, calls, out);

    std::vector<PlannedCall> planned;
    for (const auto& ins : instructions) planned.push_back({ins.tool, ins.parameters});
    out.deviation = classify_deviation(planned, calls);

    synthesize(agent, backend, prompts, task, out);
    finish(out);
    return out;
}

StepResult execute_decentralized(const AgentCard& agent, llm::Backend& backend, toolbus::ToolClient& tools,
                                 const PromptSet& prompts, const std::string& task, const ExecOptions& options) {
    StepResult out = begin(agent, task, options);
    if (agent.available_tools.empty()) {
        out.status = StepStatus::Failed;
        out.error = "agent '" + agent.agent_id + "' has no tools";
        finish(out);
        return out;
    }
    std::string schemas;
    try {
        for (const auto& t : agent.available_tools) schemas += "\n" + render_tool_schema(tools.describe(t));
    } catch (const Error& e) {
        out.status = StepStatus::Failed;
        out.error = e.what();
        finish(out);
        return out;
    }
    const std::string prompt = prompts.render(prompt::kSpecialistDecentralized, {{"agent_name", agent.name},
                                                                                {"agent_role", agent.role},
                                                                                {"tool_descriptions_with_schemas", schemas},
                                                                                {"request", task}});
    auto check = [&](const Json& v) -> std::string {
        if (!v.contains("tool_calls")) return "missing 'tool_calls'";
        return check_calls(v["tool_calls"], "tool_calls", agent, true);
    };
    JsonReply reply;
    try {
        reply = complete_json(backend, {{"user", prompt}}, params_for(agent, "specialist_plan"), check, out.usage,
                              options.json_retries);
    } catch (const Error& e) {
        out.status = StepStatus::Failed;
        out.error = e.what();
        finish(out);
        return out;
    }
    if (reply.value.contains("reasoning") && reply.value["reasoning"].is_string()) {
        out.reasoning = reply.value["reasoning"].get<std::string>();
    }
    std::vector<PlannedCall> calls;
    for (const auto& item : reply.value["tool_calls"]) calls.push_back({item["tool"].get<std::string>(), params_of(item)});
    if (calls.empty()) {
        out.status = StepStatus::Failed;
        out.error = "no tools planned";
        finish(out);
        return out;
    }
    run_calls(agent, tools, calls, out);
    synthesize(agent, backend, prompts, task, out);
    finish(out);
    return out;
}

}  // namespace buildops::agents
