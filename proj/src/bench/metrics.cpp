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


#include "buildops/bench/metrics.hpp"

#include <algorithm>

#include "buildops/agents/adherence.hpp"
#include "buildops/error.hpp"

namespace buildops::bench {

std::string to_string(ToolMetric m) { return m == ToolMetric::Jaccard ? "jaccard" : "recall"; }

ToolMetric tool_metric_from_string(const std::string& s) {
    if (s == "recall") return ToolMetric::Recall;
    if (s == "jaccard") return ToolMetric::Jaccard;
    throw Error("InvalidArgument", "unknown tool metric '" + s + "'");
}

namespace {

std::size_t intersection_size(const std::set<std::string>& a, const std::set<std::string>& b) {
    std::size_t n = 0;
    for (const auto& x : a) n += b.count(x);
    return n;
}

}  // namespace

double acc_tool(const std::set<std::string>& expected, const std::set<std::string>& actual, ToolMetric metric) {
    if (expected.empty()) throw Error("EmptyExpected", "no expected tools");
    const double hit = double(intersection_size(expected, actual));
    if (metric == ToolMetric::Jaccard) {
        return hit / double(expected.size() + actual.size() - intersection_size(expected, actual));
    }
    return hit / double(expected.size());
}

double acc_agent(const std::set<std::string>& expected, const std::set<std::string>& actual) {
    if (expected.empty()) throw Error("EmptyExpected", "no expected agents");
    return double(intersection_size(expected, actual)) / double(expected.size());
}

bool step_matches(const StepSig& e, const StepSig& a) {
    return a.agent_id == e.agent_id && std::includes(a.tools.begin(), a.tools.end(), e.tools.begin(), e.tools.end());
}

double acc_plan(const std::vector<StepSig>& expected, const std::vector<StepSig>& actual) {
    if (expected.empty()) throw Error("EmptyExpected", "no expected steps");
    // Longest common subsequence under the match relation.
    const std::size_t n = expected.size(), m = actual.size();
    std::vector<std::vector<std::size_t>> best(n + 1, std::vector<std::size_t>(m + 1, 0));
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            best[i][j] = std::max(best[i - 1][j], best[i][j - 1]);
            if (step_matches(expected[i - 1], actual[j - 1])) best[i][j] = std::max(best[i][j], best[i - 1][j - 1] + 1);
        }
    }
    return double(best[n][m]) / double(n);
}

double acc_plan_greedy(const std::vector<StepSig>& expected, const std::vector<StepSig>& actual) {
    if (expected.empty()) throw Error("EmptyExpected", "no expected steps");
    std::size_t j = 0, matched = 0;
    for (const auto& e : expected) {
        for (std::size_t k = j; k < actual.size(); ++k) {
            if (step_matches(e, actual[k])) {
                ++matched;
                j = k + 1;
                break;
            }
        }
    }
    return double(matched) / double(expected.size());
}

namespace {

std::pair<long, long> overlap(const std::map<std::string, Json>& exp, const std::map<std::string, Json>& act) {
    long keys = 0, values = 0;
    for (const auto& [k, v] : exp) {
        auto it = act.find(k);
        if (it == act.end()) continue;
        ++keys;
        values += agents::values_match(v, it->second);
    }
    return {keys, values};
}

}  // namespace

int best_match(const Call& expected, const std::vector<Call>& executed) {
    const auto exp = agents::flatten_params(expected.parameters);
    int best = -1;
    std::pair<long, long> best_score{-1, -1};
    for (std::size_t i = 0; i < executed.size(); ++i) {
        if (executed[i].tool != expected.tool) continue;
        const auto score = overlap(exp, agents::flatten_params(executed[i].parameters));
        if (score > best_score) {
            best_score = score;
            best = int(i);
        }
    }
    return best;
}

ParamScore acc_params(const std::vector<Call>& expected, const std::vector<Call>& executed) {
    ParamScore s;
    for (const auto& e : expected) {
        const auto exp = agents::flatten_params(e.parameters);
        s.expected_keys += long(exp.size());
        const int i = best_match(e, executed);
        if (i < 0) continue;
        const auto [keys, values] = overlap(exp, agents::flatten_params(executed[std::size_t(i)].parameters));
        s.matched_keys += keys;
        s.matched_values += values;
    }
    if (s.expected_keys == 0) throw Error("NoExpectedParams", "no expected parameters");
    return s;
}

double acc_combined(double plan, double agent, double tool, double key, double val) {
    return (plan + agent + tool + (key + val) / 2.0) / 4.0;
}

}  // namespace buildops::bench
