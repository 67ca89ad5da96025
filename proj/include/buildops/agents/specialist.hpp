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

#include "buildops/agents/adherence.hpp"
#include "buildops/agents/card.hpp"
#include "buildops/agents/llm_json.hpp"
#include "buildops/agents/prompts.hpp"
#include "buildops/llm/backend.hpp"
#include "buildops/toolbus/bus.hpp"

namespace buildops::agents {

struct ToolInstruction {
    std::string tool;
    Json parameters = Json::object();
    std::string expected_output;
};

void to_json(Json& j, const ToolInstruction& t);
void from_json(const Json& j, ToolInstruction& t);

enum class StepStatus { Success, Partial, Failed, Skipped };

std::string to_string(StepStatus s);
StepStatus step_status_from_string(const std::string& s);

struct StepResult {
    std::string step_id;
    std::string agent_id;
    std::string task;
    StepStatus status = StepStatus::Failed;
    std::vector<toolbus::CallRecord> executed_calls;
    std::string synthesis;
    std::string error;          // diagnostic when the step failed or was skipped
    std::string reasoning;      // the specialist's own account
    std::optional<std::string> validation;        // centralized only
    std::optional<DeviationReport> deviation;     // centralized only
    std::vector<llm::UsageRecord> usage;
    int llm_calls = 0;
    double start_s = 0.0;
    double end_s = 0.0;

    bool deviated() const { return deviation && deviation->deviated(); }
};

void to_json(Json& j, const StepResult& r);

struct ExecOptions {
    std::string step_id;
    int json_retries = kDefaultJsonRetries;
};

/// Validate, execute, synthesize. Instructions naming a tool outside the
/// agent's whitelist fail the step before any model or tool call.
StepResult execute_centralized(const AgentCard& agent, llm::Backend& backend, toolbus::ToolClient& tools,
                               const PromptSet& prompts, const std::string& task,
                               const std::vector<ToolInstruction>& instructions, const ExecOptions& options = {});

/// Plan, execute, synthesize with no orchestrator instructions.
StepResult execute_decentralized(const AgentCard& agent, llm::Backend& backend, toolbus::ToolClient& tools,
                                 const PromptSet& prompts, const std::string& task,
                                 const ExecOptions& options = {});

}  // namespace buildops::agents
