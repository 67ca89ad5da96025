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

#include <string>
#include <vector>

#include <json.hpp>

#include "buildops/bench/metrics.hpp"

namespace buildops::toolbus {
class ToolRegistry;
}
namespace buildops::agents {
class AgentPool;
}

namespace buildops::bench {

struct ExpectedStep {
    int step_order = 1;
    std::string agent_id;
    std::vector<std::string> required_tools;
    Json expected_parameters = Json::object();  // tool -> {key: value}
};

struct TestCase {
    std::string test_id;
    std::string name;
    std::string category;  // SAST | SAMT | MAST | MAMT
    std::string request;
    std::vector<std::string> expected_agents;
    std::vector<std::string> expected_tools;
    std::vector<ExpectedStep> expected_steps;
    std::string description;

    /// Every expected call in step order, parameters from expected_parameters.
    std::vector<Call> expected_calls() const;
    std::vector<StepSig> expected_signature() const;
    bool has_expected_params() const;
};

void to_json(Json& j, const ExpectedStep& s);
void from_json(const Json& j, ExpectedStep& s);
void to_json(Json& j, const TestCase& c);
void from_json(const Json& j, TestCase& c);

inline const std::vector<std::string>& categories() {
    static const std::vector<std::string> c{"SAST", "SAMT", "MAST", "MAMT"};
    return c;
}

/// Schema invariants: known category, test_id prefixed by it, step_order
/// strictly increasing, step agents within expected_agents, required tools
/// within expected_tools. Throws Error("InvalidCase").
void validate_case(const TestCase& c);

/// Same, plus every agent exists in the pool, owns its step's tools, and
/// every expected parameter key is declared by the tool schema.
void validate_case(const TestCase& c, const agents::AgentPool& pool, const toolbus::ToolRegistry& registry);

/// One TestCase per non-blank line. Throws Error("BadCaseFile", "<line>: why").
std::vector<TestCase> parse_cases(const std::string& jsonl);
std::vector<TestCase> load_cases(const std::string& path);

}  // namespace buildops::bench
