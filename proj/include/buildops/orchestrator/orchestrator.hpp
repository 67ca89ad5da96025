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


#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "buildops/agents/card.hpp"
#include "buildops/agents/prompts.hpp"
#include "buildops/agents/specialist.hpp"
#include "buildops/llm/backend.hpp"
#include "buildops/orchestrator/plan.hpp"
#include "buildops/toolbus/bus.hpp"

namespace buildops::orchestrator {

inline constexpr const char* kRouteMarker = "ACTION: ROUTE_TO_ORCHESTRATOR";

struct RouteDecision {
    bool route = false;
    std::string reply;
};

struct Modification {
    std::string action;  // create | revise
    std::string agent_id;
    std::string name;
    std::string role;
    std::string description;
    std::vector<std::string> tools;
    std::vector<std::string> remove_tools;  // always rejected; revisions only add
    std::string reason;
};

struct HrAssessment {
    bool can_handle = true;
    std::string analysis;
    std::vector<Modification> modifications;
};

void to_json(Json& j, const Modification& m);
void to_json(Json& j, const HrAssessment& a);
HrAssessment parse_hr_assessment(const Json& reply);

struct PhaseTimes {
    double start = 0.0;
    double end = 0.0;
    double seconds() const { return end > start ? end - start : 0.0; }
};

struct SessionTrace {
    std::string request;
    std::string context;
    std::string concierge_reply;
    bool routed = false;
    Mode mode = Mode::C1;
    std::optional<ExecutionPlan> plan;
    std::optional<HrAssessment> hr;
    std::vector<agents::StepResult> steps;  // dispatch order, skips included
    std::vector<llm::UsageRecord> usage;    // orchestrator-side calls
    PhaseTimes total, planning, execution, synthesis;
    std::string final_answer;
    std::string error;  // set when planning failed or synthesis failed

    /// Orchestrator records followed by every step's agent records.
    std::vector<llm::UsageRecord> all_usage() const;
    bool ok() const { return error.empty(); }
};

void to_json(Json& j, const SessionTrace& t);
void save_trace(const SessionTrace& trace, const std::string& path);

/// Picks the backend that runs a given specialist.
using AgentBackendResolver = std::function<llm::Backend&(const agents::AgentCard&)>;

struct OrchestratorOptions {
    Mode mode = Mode::C2;
    bool parallel = false;      // run dependency-independent steps together
    bool hr_enabled = false;
    std::string cards_dir;      // where HR writes cards; empty keeps them in memory
    int json_retries = agents::kDefaultJsonRetries;
    double temperature = 0.2;
};

class Orchestrator {
public:
    Orchestrator(agents::PromptSet prompts, std::shared_ptr<llm::Backend> backend, AgentBackendResolver agent_backend,
                 toolbus::ToolClient& tools, std::shared_ptr<const toolbus::ToolRegistry> registry,
                 agents::AgentPool pool, OrchestratorOptions options = {});

    /// Routes iff the reply carries kRouteMarker.
    RouteDecision concierge_route(const std::string& message, std::vector<llm::UsageRecord>& usage);

    /// Throws Error("MalformedLLMOutput"), Error("InvalidPlan") or backend errors.
    ExecutionPlan plan_c1(const std::string& request, const std::string& context, std::vector<llm::UsageRecord>& usage);
    ExecutionPlan plan_c2(const std::string& request, const std::string& context, std::vector<llm::UsageRecord>& usage);
    ExecutionPlan plan_d(const std::string& request, const std::string& context, std::vector<llm::UsageRecord>& usage);
    ExecutionPlan plan(const std::string& request, const std::string& context, std::vector<llm::UsageRecord>& usage);

    /// Never throws for step failures; they are recorded in the trace.
    void dispatch(const ExecutionPlan& plan, SessionTrace& trace);

    /// Formats the outcome through the concierge formatter.
    std::string synthesize(SessionTrace& trace);

    HrAssessment hr_assess(const std::string& request, const std::string& context, std::vector<llm::UsageRecord>& usage);
    /// All-or-nothing. Throws Error("InvalidModification").
    void hr_apply(const std::vector<Modification>& modifications);

    /// Route, optionally adapt the pool, plan, dispatch, synthesize.
    SessionTrace handle(const std::string& message, const std::string& context = {});

    // Rendered prompts, exposed for inspection.
    std::string render_c1_prompt(const std::string& request, const std::string& context) const;
    std::string render_c2_stage1_prompt(const std::string& request, const std::string& context) const;
    std::string render_c2_stage2_prompt(const std::string& request, const ExecutionPlan& stage1) const;
    std::string render_d_prompt(const std::string& request, const std::string& context) const;

    const agents::AgentPool& pool() const { return pool_; }
    const OrchestratorOptions& options() const { return options_; }
    void set_mode(Mode mode) { options_.mode = mode; }

private:
    llm::CompletionParams params(const char* purpose) const;
    agents::StepResult run_step(const PlanStep& step, Mode mode);

    agents::PromptSet prompts_;
    std::shared_ptr<llm::Backend> backend_;
    AgentBackendResolver agent_backend_;
    toolbus::ToolClient& tools_;
    std::shared_ptr<const toolbus::ToolRegistry> registry_;
    agents::AgentPool pool_;
    OrchestratorOptions options_;
    std::mutex pool_mutex_;
};

}  // namespace buildops::orchestrator
