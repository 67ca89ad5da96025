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

#include <optional>
#include <string>
#include <vector>

#include "buildops/agents/card.hpp"
#include "buildops/agents/specialist.hpp"

namespace buildops::orchestrator {

using Json = nlohmann::json;

enum class Mode { C1, C2, D };

std::string to_string(Mode m);
/// Accepts "C1"/"c1"/"C-1" and so on. Throws Error("InvalidArgument").
Mode mode_from_string(const std::string& s);
bool centralized(Mode m);

struct Guidance {
    std::vector<agents::ToolInstruction> tool_instructions;
    std::string validation;
};

struct PlanStep {
    std::string step_id;
    std::string agent_id;
    std::string task;
    std::vector<std::string> depends_on;
    std::optional<Guidance> guidance;                     // C1, C2
    std::optional<std::vector<std::string>> tools_to_use;  // C2 stage 1
    std::optional<std::string> expected_outcome;          // D
};

struct ExecutionPlan {
    std::string understanding;
    std::string reasoning;
    Mode mode = Mode::C1;
    std::vector<PlanStep> steps;
    std::vector<std::string> warnings;
};

enum class PlanStage { Final, Routing };

/// Shape check of a model reply. Throws Error("MalformedLLMOutput") when the
/// reply is not a plan at all: no steps, an empty list, a step without
/// step_id/agent_id/task, or (centralized final stage) a step without
/// orchestrator_guidance. In D mode guidance is dropped with a warning.
ExecutionPlan parse_plan(const Json& reply, Mode mode, PlanStage stage = PlanStage::Final);

/// Structural validation against the pool and registry. Throws
/// Error("InvalidPlan") naming the first violation: duplicate step id,
/// unknown agent, unknown dependency, dependency cycle, unknown tool, tool
/// outside the agent's whitelist, empty tools_to_use.
void validate_plan(const ExecutionPlan& plan, const agents::AgentPool& pool, const toolbus::ToolRegistry& registry,
                   PlanStage stage = PlanStage::Final);

/// Step indices in dependency order; ties go to declaration order. Assumes
/// a validated plan.
std::vector<std::size_t> topological_order(const ExecutionPlan& plan);

void to_json(Json& j, const PlanStep& s);
void to_json(Json& j, const ExecutionPlan& p);
void from_json(const Json& j, ExecutionPlan& p);

}  // namespace buildops::orchestrator
