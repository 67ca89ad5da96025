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


#include "buildops/orchestrator/orchestrator.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <sstream>

#include "buildops/agents/llm_json.hpp"
#include "buildops/error.hpp"

namespace buildops::orchestrator {

using agents::StepResult;
using agents::StepStatus;

namespace {

double now() { return toolbus::wall_clock_s(); }

std::string join(const std::vector<std::string>& items, const std::string& sep = ", ") {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

// Shape checks run inside the retry loop; structural validation happens after.
agents::ReplyCheck shape_check(Mode mode, PlanStage stage) {
    return [mode, stage](const Json& v) -> std::string {
        try {
            parse_plan(v, mode, stage);
            return {};
        } catch (const Error& e) {
            return e.what();
        }
    };
}

[[noreturn]] void bad_mod(const std::string& why) { throw Error("InvalidModification", why); }

StepResult skipped(const PlanStep& step, const std::string& reason) {
    StepResult r;
    r.step_id = step.step_id;
    r.agent_id = step.agent_id;
    r.task = step.task;
    r.status = StepStatus::Skipped;
    r.error = reason;
    r.start_s = r.end_s = now();
    return r;
}

Json phase_json(const PhaseTimes& p) { return Json{{"start", p.start}, {"end", p.end}, {"seconds", p.seconds()}}; }

}  // namespace

// ---------------------------------------------------------------------------
// Trace and HR types
// ---------------------------------------------------------------------------

std::vector<llm::UsageRecord> SessionTrace::all_usage() const {
    std::vector<llm::UsageRecord> out = usage;
    for (const auto& s : steps) out.insert(out.end(), s.usage.begin(), s.usage.end());
    return out;
}

void to_json(Json& j, const SessionTrace& t) {
    j = Json{{"request", t.request},
             {"context", t.context},
             {"concierge_reply", t.concierge_reply},
             {"routed", t.routed},
             {"mode", to_string(t.mode)},
             {"plan", t.plan ? Json(*t.plan) : Json(nullptr)},
             {"hr", t.hr ? Json(*t.hr) : Json(nullptr)},
             {"steps", t.steps},
             {"usage", t.usage},
             {"phases",
              {{"total", phase_json(t.total)},
               {"planning", phase_json(t.planning)},
               {"execution", phase_json(t.execution)},
               {"synthesis", phase_json(t.synthesis)}}},
             {"final_answer", t.final_answer},
             {"error", t.error}};
}

void save_trace(const SessionTrace& trace, const std::string& path) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw Error("InvalidArgument", "cannot write trace '" + path + "'");
    out << Json(trace).dump(2) << "\n";
}

void to_json(Json& j, const Modification& m) {
    j = Json{{"action", m.action}, {"agent_id", m.agent_id}, {"name", m.name},     {"role", m.role},
             {"description", m.description}, {"tools", m.tools}, {"reason", m.reason}};
    if (!m.remove_tools.empty()) j["remove_tools"] = m.remove_tools;
}

void to_json(Json& j, const HrAssessment& a) {
    j = Json{{"can_handle", a.can_handle}, {"analysis", a.analysis}, {"modifications", a.modifications}};
}

HrAssessment parse_hr_assessment(const Json& v) {
    if (!v.is_object() || !v.contains("can_handle")) throw Error("MalformedLLMOutput", "assessment has no can_handle");
    HrAssessment a;
    const Json& ch = v["can_handle"];
    if (ch.is_boolean()) {
        a.can_handle = ch.get<bool>();
    } else if (ch.is_string() && (ch == "true" || ch == "false")) {
        a.can_handle = ch == "true";
    } else {
        throw Error("MalformedLLMOutput", "can_handle must be true or false");
    }
    a.analysis = v.value("analysis", std::string());
    if (v.contains("modifications") && !v["modifications"].is_null()) {
        if (!v["modifications"].is_array()) throw Error("MalformedLLMOutput", "modifications must be a list");
        for (const auto& m : v["modifications"]) {
            if (!m.is_object()) throw Error("MalformedLLMOutput", "each modification must be an object");
            Modification mod;
            auto text = [&](const char* key) {
                return m.contains(key) && m[key].is_string() ? m[key].get<std::string>() : std::string();
            };
            mod.action = text("action");
            mod.agent_id = text("agent_id");
            mod.name = text("name");
            mod.role = text("role");
            mod.description = text("description");
            mod.reason = text("reason");
            if (m.contains("tools") && m["tools"].is_array()) {
                for (const auto& t : m["tools"]) {
                    if (t.is_string()) mod.tools.push_back(t.get<std::string>());
                }
            }
            if (m.contains("remove_tools") && m["remove_tools"].is_array()) {
                for (const auto& t : m["remove_tools"]) {
                    if (t.is_string()) mod.remove_tools.push_back(t.get<std::string>());
                }
            }
            a.modifications.push_back(std::move(mod));
        }
    }
    return a;
}

// ---------------------------------------------------------------------------
// Orchestrator
// ---------------------------------------------------------------------------

Orchestrator::Orchestrator(agents::PromptSet prompts, std::shared_ptr<llm::Backend> backend,
                           AgentBackendResolver agent_backend, toolbus::ToolClient& tools,
                           std::shared_ptr<const toolbus::ToolRegistry> registry, agents::AgentPool pool,
                           OrchestratorOptions options)
    : prompts_(std::move(prompts)),
      backend_(std::move(backend)),
      agent_backend_(std::move(agent_backend)),
      tools_(tools),
      registry_(std::move(registry)),
      pool_(std::move(pool)),
      options_(std::move(options)) {
    if (!backend_) throw Error("InvalidArgument", "orchestrator needs a backend");
    if (!registry_) throw Error("InvalidArgument", "orchestrator needs the tool registry");
    if (!agent_backend_) throw Error("InvalidArgument", "orchestrator needs an agent backend resolver");
}

llm::CompletionParams Orchestrator::params(const char* purpose) const {
    llm::CompletionParams p;
    p.temperature = options_.temperature;
    p.role = llm::RoleTag::Orchestrator;
    p.purpose = purpose;
    return p;
}

RouteDecision Orchestrator::concierge_route(const std::string& message, std::vector<llm::UsageRecord>& usage) {
    const std::string system = prompts_.render(agents::prompt::kConciergeSystem, {{"agent_info", pool_.brief_summary()}});
    auto reply = backend_->complete({{"system", system}, {"user", message}}, params("route"));
    usage.push_back(reply.usage);
    return RouteDecision{reply.text.find(kRouteMarker) != std::string::npos, reply.text};
}

std::string Orchestrator::render_c1_prompt(const std::string& request, const std::string& context) const {
    return prompts_.render(agents::prompt::kPlanC1, {{"user_request", request},
                                                    {"context", context},
                                                    {"agent_info", pool_.full_summary(*registry_)}});
}

std::string Orchestrator::render_c2_stage1_prompt(const std::string& request, const std::string& context) const {
    return prompts_.render(agents::prompt::kPlanC2Stage1,
                           {{"user_request", request}, {"context", context}, {"basic_agent_info", pool_.minimal_summary()}});
}

std::string Orchestrator::render_c2_stage2_prompt(const std::string& request, const ExecutionPlan& stage1) const {
    Json steps = Json::array();
    std::vector<std::string> selected;
    for (const auto& s : stage1.steps) {
        const auto tools = s.tools_to_use.value_or(std::vector<std::string>{});
        steps.push_back({{"step_id", s.step_id},
                         {"agent_id", s.agent_id},
                         {"task", s.task},
                         {"depends_on", s.depends_on},
                         {"selected_tools", tools}});
        for (const auto& t : tools) {
            if (std::find(selected.begin(), selected.end(), t) == selected.end()) selected.push_back(t);
        }
    }
    std::string schemas;
    for (const auto& t : selected) schemas += "\n" + agents::render_tool_schema(registry_->describe(t));
    return prompts_.render(agents::prompt::kPlanC2Stage2,
                           {{"user_request", request}, {"stage1_steps", steps.dump(2)}, {"detailed_tool_info", schemas}});
}

std::string Orchestrator::render_d_prompt(const std::string& request, const std::string& context) const {
    return prompts_.render(agents::prompt::kPlanD,
                           {{"user_request", request}, {"context", context}, {"agent_info", pool_.minimal_summary()}});
}

ExecutionPlan Orchestrator::plan_c1(const std::string& request, const std::string& context,
                                    std::vector<llm::UsageRecord>& usage) {
    if (pool_.empty()) throw Error("InvalidPlan", "agent pool is empty");
    auto reply = agents::complete_json(*backend_, {{"user", render_c1_prompt(request, context)}}, params("plan"),
                                       shape_check(Mode::C1, PlanStage::Final), usage, options_.json_retries);
    ExecutionPlan plan = parse_plan(reply.value, Mode::C1);
    validate_plan(plan, pool_, *registry_);
    return plan;
}

ExecutionPlan Orchestrator::plan_c2(const std::string& request, const std::string& context,
                                    std::vector<llm::UsageRecord>& usage) {
    if (pool_.empty()) throw Error("InvalidPlan", "agent pool is empty");
    auto first = agents::complete_json(*backend_, {{"user", render_c2_stage1_prompt(request, context)}},
                                       params("plan_stage1"), shape_check(Mode::C2, PlanStage::Routing), usage,
                                       options_.json_retries);
    ExecutionPlan stage1 = parse_plan(first.value, Mode::C2, PlanStage::Routing);
    validate_plan(stage1, pool_, *registry_, PlanStage::Routing);

    auto second = agents::complete_json(*backend_, {{"user", render_c2_stage2_prompt(request, stage1)}},
                                        params("plan_stage2"), shape_check(Mode::C2, PlanStage::Final), usage,
                                        options_.json_retries);
    ExecutionPlan plan = parse_plan(second.value, Mode::C2);
    if (plan.understanding.empty()) plan.understanding = stage1.understanding;
    if (plan.reasoning.empty()) plan.reasoning = stage1.reasoning;
    plan.warnings.insert(plan.warnings.begin(), stage1.warnings.begin(), stage1.warnings.end());
    validate_plan(plan, pool_, *registry_);
    return plan;
}

ExecutionPlan Orchestrator::plan_d(const std::string& request, const std::string& context,
                                   std::vector<llm::UsageRecord>& usage) {
    if (pool_.empty()) throw Error("InvalidPlan", "agent pool is empty");
    auto reply = agents::complete_json(*backend_, {{"user", render_d_prompt(request, context)}}, params("plan"),
                                       shape_check(Mode::D, PlanStage::Final), usage, options_.json_retries);
    ExecutionPlan plan = parse_plan(reply.value, Mode::D);
    validate_plan(plan, pool_, *registry_);
    return plan;
}

ExecutionPlan Orchestrator::plan(const std::string& request, const std::string& context,
                                 std::vector<llm::UsageRecord>& usage) {
    switch (options_.mode) {
        case Mode::C1: return plan_c1(request, context, usage);
        case Mode::C2: return plan_c2(request, context, usage);
        case Mode::D: return plan_d(request, context, usage);
    }
    return plan_c1(request, context, usage);
}

StepResult Orchestrator::run_step(const PlanStep& step, Mode mode) {
    agents::AgentCard card;
    {
        std::lock_guard lock(pool_mutex_);
        card = pool_.get(step.agent_id);
    }
    agents::ExecOptions exec;
    exec.step_id = step.step_id;
    exec.json_retries = options_.json_retries;
    try {
        llm::Backend& backend = agent_backend_(card);
        if (centralized(mode)) {
            return agents::execute_centralized(card, backend, tools_, prompts_, step.task,
                                               step.guidance ? step.guidance->tool_instructions
                                                             : std::vector<agents::ToolInstruction>{},
                                               exec);
        }
        return agents::execute_decentralized(card, backend, tools_, prompts_, step.task, exec);
    } catch (const std::exception& e) {
        StepResult r = skipped(step, e.what());
        r.status = StepStatus::Failed;
        return r;
    }
}

void Orchestrator::dispatch(const ExecutionPlan& plan, SessionTrace& trace) {
    trace.execution.start = now();
    std::map<std::string, StepStatus> done;
    auto blocked_by = [&](const PlanStep& s) -> std::string {
        for (const auto& d : s.depends_on) {
            auto it = done.find(d);
            if (it != done.end() && it->second != StepStatus::Success) return d;
        }
        return {};
    };

    if (!options_.parallel) {
        for (auto i : topological_order(plan)) {
            const auto& step = plan.steps[i];
            const std::string dep = blocked_by(step);
            StepResult r = dep.empty() ? run_step(step, plan.mode) : skipped(step, "dependency " + dep + " failed");
            done[step.step_id] = r.status;
            trace.steps.push_back(std::move(r));
        }
    } else {
        std::vector<bool> finished(plan.steps.size(), false);
        std::size_t remaining = plan.steps.size();
        while (remaining > 0) {
            std::vector<std::size_t> wave;
            std::set<std::string> busy_agents;
            bool progressed = false;
            for (std::size_t i = 0; i < plan.steps.size(); ++i) {
                if (finished[i]) continue;
                const auto& step = plan.steps[i];
                const bool deps_done = std::all_of(step.depends_on.begin(), step.depends_on.end(),
                                                   [&](const std::string& d) { return done.count(d) > 0; });
                if (!deps_done) continue;
                const std::string dep = blocked_by(step);
                if (!dep.empty()) {
                    StepResult r = skipped(step, "dependency " + dep + " failed");
                    done[step.step_id] = r.status;
                    trace.steps.push_back(std::move(r));
                    finished[i] = true;
                    --remaining;
                    progressed = true;
                    continue;
                }
                if (busy_agents.insert(step.agent_id).second) wave.push_back(i);
            }
            if (wave.empty()) {
                if (!progressed) break;  // unreachable for a validated plan
                continue;
            }
            std::vector<std::future<StepResult>> futures;
            for (auto i : wave) {
                futures.push_back(std::async(std::launch::async, [this, &plan, i] { return run_step(plan.steps[i], plan.mode); }));
            }
            for (std::size_t k = 0; k < wave.size(); ++k) {
                StepResult r = futures[k].get();
                done[plan.steps[wave[k]].step_id] = r.status;
                trace.steps.push_back(std::move(r));
                finished[wave[k]] = true;
                --remaining;
            }
        }
    }
    trace.execution.end = std::max(now(), trace.execution.start);
}

std::string Orchestrator::synthesize(SessionTrace& trace) {
    trace.synthesis.start = now();
    std::ostringstream result;
    const StepResult* first_failure = nullptr;
    bool any_success = false;
    for (const auto& s : trace.steps) {
        if (s.status == StepStatus::Success) any_success = true;
        if (!first_failure && (s.status == StepStatus::Failed || s.status == StepStatus::Skipped)) first_failure = &s;
    }
    std::string preface;
    if (trace.steps.empty() && !trace.error.empty()) {
        preface = "Planning failed: " + trace.error;
        result << "ERROR: " << preface << "\n\n";
    } else if (!any_success && first_failure) {
        preface = "Request failed at " + first_failure->step_id + " (" + first_failure->agent_id +
                  "): " + first_failure->error;
        result << "ERROR: " << preface << "\n\n";
    }
    for (const auto& s : trace.steps) {
        result << "[" << s.step_id << "] " << s.agent_id << " (" << agents::to_string(s.status) << ")\n";
        if (!s.synthesis.empty()) result << s.synthesis << "\n";
        if (!s.error.empty()) result << "error: " << s.error << "\n";
        result << "\n";
    }
    const std::string prompt = prompts_.render(agents::prompt::kConciergeFormatter,
                                               {{"result", result.str()}, {"request", trace.request}});
    std::string answer;
    try {
        auto reply = backend_->complete({{"user", prompt}}, params("synthesis"));
        trace.usage.push_back(reply.usage);
        answer = preface.empty() ? reply.text : preface + "\n" + reply.text;
    } catch (const Error& e) {
        trace.error = (trace.error.empty() ? "" : trace.error + "; ") + "synthesis failed: " + e.what();
        answer = result.str();
    }
    trace.final_answer = answer;
    trace.synthesis.end = std::max(now(), trace.synthesis.start);
    return answer;
}

HrAssessment Orchestrator::hr_assess(const std::string& request, const std::string& context,
                                     std::vector<llm::UsageRecord>& usage) {
    const auto unused = pool_.unassigned_tools(*registry_);
    const std::string prompt = prompts_.render(agents::prompt::kHrAssess,
                                               {{"user_request", request},
                                                {"context", context},
                                                {"agent_capabilities", pool_.capability_summary()},
                                                {"all_server_tools", join(registry_->names())},
                                                {"unused_tools", unused.empty() ? "none" : join(unused)}});
    auto check = [](const Json& v) -> std::string {
        try {
            parse_hr_assessment(v);
            return {};
        } catch (const Error& e) {
            return e.what();
        }
    };
    auto reply = agents::complete_json(*backend_, {{"user", prompt}}, params("hr"), check, usage, options_.json_retries);
    return parse_hr_assessment(reply.value);
}

void Orchestrator::hr_apply(const std::vector<Modification>& modifications) {
    std::lock_guard lock(pool_mutex_);
    agents::AgentPool next = pool_;
    std::vector<std::string> touched;
    for (const auto& m : modifications) {
        if (m.agent_id.empty()) bad_mod("modification without agent_id");
        for (const auto& t : m.tools) {
            if (!registry_->contains(t)) bad_mod("unknown tool '" + t + "' for " + m.agent_id);
        }
        if (m.action == "create") {
            if (next.find(m.agent_id)) bad_mod("agent '" + m.agent_id + "' already exists");
            if (m.tools.empty()) bad_mod("new agent '" + m.agent_id + "' has no tools");
            agents::AgentCard card;
            card.agent_id = m.agent_id;
            card.name = m.name;
            card.role = m.role;
            card.description = m.description;
            card.available_tools = m.tools;
            if (!m.reason.empty()) card.capabilities.push_back(m.reason);
            try {
                card = agents::load_agent_card(agents::dump_agent_card(card));
                if (card.name.empty() || card.role.empty()) throw Error("SchemaError", "name and role are required");
                next.add(card, *registry_);
            } catch (const Error& e) {
                bad_mod("agent '" + m.agent_id + "': " + e.what());
            }
        } else if (m.action == "revise") {
            if (!next.find(m.agent_id)) bad_mod("cannot revise unknown agent '" + m.agent_id + "'");
            if (!m.remove_tools.empty()) bad_mod("revisions may only add tools (" + m.agent_id + ")");
            next.extend_tools(m.agent_id, m.tools, *registry_);
        } else {
            bad_mod("unknown action '" + m.action + "'");
        }
        touched.push_back(m.agent_id);
    }
    if (!options_.cards_dir.empty()) {
        for (const auto& id : touched) agents::save_agent_card(next.get(id), options_.cards_dir);
    }
    pool_ = std::move(next);
}

SessionTrace Orchestrator::handle(const std::string& message, const std::string& context) {
    SessionTrace trace;
    trace.request = message;
    trace.context = context;
    trace.mode = options_.mode;
    trace.total.start = now();
    auto finish = [&] {
        trace.total.end = std::max(now(), trace.total.start);
        return trace;
    };

    try {
        auto route = concierge_route(message, trace.usage);
        trace.concierge_reply = route.reply;
        trace.routed = route.route;
        if (!route.route) {
            trace.final_answer = route.reply;
            return finish();
        }
    } catch (const Error& e) {
        trace.error = e.what();
        trace.final_answer = "The assistant is unavailable right now: " + std::string(e.what());
        return finish();
    }

    trace.planning.start = now();
    try {
        if (options_.hr_enabled) {
            trace.hr = hr_assess(message, context, trace.usage);
            if (!trace.hr->can_handle && !trace.hr->modifications.empty()) hr_apply(trace.hr->modifications);
        }
        trace.plan = plan(message, context, trace.usage);
    } catch (const Error& e) {
        trace.planning.end = std::max(now(), trace.planning.start);
        trace.error = e.what();
        trace.execution.start = trace.execution.end = trace.planning.end;
        synthesize(trace);
        return finish();
    }
    trace.planning.end = std::max(now(), trace.planning.start);

    dispatch(*trace.plan, trace);
    synthesize(trace);
    return finish();
}

}  // namespace buildops::orchestrator
