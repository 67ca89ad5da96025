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

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace buildops::bench {

using Json = nlohmann::json;

/// Recall is the default; Jaccard divides by the union instead.
enum class ToolMetric { Recall, Jaccard };

std::string to_string(ToolMetric m);
ToolMetric tool_metric_from_string(const std::string& s);

/// |exp ∩ act| / |exp|. Throws Error("EmptyExpected").
double acc_tool(const std::set<std::string>& expected, const std::set<std::string>& actual,
                ToolMetric metric = ToolMetric::Recall);

/// Same ratio over agent ids. Throws Error("EmptyExpected").
double acc_agent(const std::set<std::string>& expected, const std::set<std::string>& actual);

struct StepSig {
    std::string agent_id;
    std::set<std::string> tools;
};

/// An expected step matches an executed one with the same agent whose tools
/// cover the expected tools.
bool step_matches(const StepSig& expected, const StepSig& actual);

/// Largest number of expected steps matched in chronological order (no
/// crossings, each executed step used once), over N. Throws
/// Error("EmptyExpected").
double acc_plan(const std::vector<StepSig>& expected, const std::vector<StepSig>& actual);

/// First-fit variant: each expected step takes the first later executed step
/// that matches. Can undercount when an early expected step grabs a late
/// executed one, e.g. expected [A, B, C] against executed [B, C, A].
double acc_plan_greedy(const std::vector<StepSig>& expected, const std::vector<StepSig>& actual);

struct Call {
    std::string tool;
    Json parameters = Json::object();
};

struct ParamScore {
    long expected_keys = 0;
    long matched_keys = 0;
    long matched_values = 0;
    double acc_key() const { return expected_keys ? double(matched_keys) / double(expected_keys) : 0.0; }
    double acc_val() const { return expected_keys ? double(matched_values) / double(expected_keys) : 0.0; }
};

/// Index of the executed call that best matches `expected`: most shared
/// keys, then most matching values, then earliest. -1 when the tool was
/// never called.
int best_match(const Call& expected, const std::vector<Call>& executed);

/// Key and value accuracy over every expected (tool, dotted key) pair. Keys
/// of a tool that was never called count as misses. Throws
/// Error("NoExpectedParams") when no expected call has parameters.
ParamScore acc_params(const std::vector<Call>& expected, const std::vector<Call>& executed);

/// Mean of plan, agent, tool and the mean of key and value accuracy.
double acc_combined(double plan, double agent, double tool, double key, double val);

}  // namespace buildops::bench
