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


// Brute-force reference implementations of the benchmark metrics, written
// without reusing any library code so they can check it.

#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "buildops/bench/metrics.hpp"

namespace oracle {

using Json = nlohmann::json;
using Ratio = std::pair<long, long>;  // numerator, denominator

inline bool same_ratio(double value, Ratio r) {
    // Exact: both sides are the same IEEE division of small integers.
    return value == double(r.first) / double(r.second);
}

inline Ratio recall(std::vector<std::string> expected, std::vector<std::string> actual) {
    std::sort(expected.begin(), expected.end());
    expected.erase(std::unique(expected.begin(), expected.end()), expected.end());
    long hit = 0;
    for (const auto& e : expected) {
        bool found = false;
        for (const auto& a : actual) found = found || a == e;
        hit += found;
    }
    return {hit, long(expected.size())};
}

inline Ratio jaccard(std::vector<std::string> expected, std::vector<std::string> actual) {
    std::vector<std::string> all = expected;
    all.insert(all.end(), actual.begin(), actual.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    long both = 0;
    for (const auto& x : all) {
        both += std::count(expected.begin(), expected.end(), x) > 0 && std::count(actual.begin(), actual.end(), x) > 0;
    }
    return {both, long(all.size())};
}

inline bool covers(const buildops::bench::StepSig& e, const buildops::bench::StepSig& a) {
    if (e.agent_id != a.agent_id) return false;
    for (const auto& t : e.tools) {
        if (!a.tools.count(t)) return false;
    }
    return true;
}

// Every order-preserving partial assignment of expected steps to distinct
// executed steps; returns the largest size.
inline long best_alignment(const std::vector<buildops::bench::StepSig>& e,
                           const std::vector<buildops::bench::StepSig>& a, std::size_t i = 0, std::size_t from = 0) {
    if (i == e.size()) return 0;
    long best = best_alignment(e, a, i + 1, from);  // leave step i unmatched
    for (std::size_t j = from; j < a.size(); ++j) {
        if (covers(e[i], a[j])) best = std::max(best, 1 + best_alignment(e, a, i + 1, j + 1));
    }
    return best;
}

inline void flatten(const Json& v, const std::string& prefix, std::map<std::string, Json>& out) {
    if (v.is_object() && !v.empty()) {
        for (auto it = v.begin(); it != v.end(); ++it) {
            flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
        }
    } else {
        out[prefix] = v;
    }
}

struct ParamCounts {
    long expected = 0, keys = 0, values = 0;
};

// Values generated by the tests are exactly typed, so plain equality is the
// type-aware comparison.
inline ParamCounts params(const std::vector<buildops::bench::Call>& expected,
                          const std::vector<buildops::bench::Call>& executed) {
    ParamCounts c;
    for (const auto& e : expected) {
        std::map<std::string, Json> fe;
        for (auto it = e.parameters.begin(); it != e.parameters.end(); ++it) flatten(it.value(), it.key(), fe);
        c.expected += long(fe.size());
        long bk = -1, bv = -1;
        for (const auto& x : executed) {
            if (x.tool != e.tool) continue;
            std::map<std::string, Json> fx;
            for (auto it = x.parameters.begin(); it != x.parameters.end(); ++it) flatten(it.value(), it.key(), fx);
            long k = 0, v = 0;
            for (const auto& [key, val] : fe) {
                if (!fx.count(key)) continue;
                ++k;
                v += fx.at(key) == val;
            }
            if (k > bk || (k == bk && v > bv)) {
                bk = k;
                bv = v;
            }
        }
        if (bk > 0) {
            c.keys += bk;
            c.values += bv;
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// Random (expected, actual) pairs on a small alphabet.

struct TracePair {
    std::vector<std::string> exp_tools, act_tools, exp_agents, act_agents;
    std::vector<buildops::bench::StepSig> exp_steps, act_steps;
    std::vector<buildops::bench::Call> exp_calls, act_calls;
};

class Generator {
public:
    explicit Generator(unsigned seed, int agents = 3, int tools = 6) : rng_(seed), agents_(agents), tools_(tools) {}

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

    std::string agent() { return "agent_" + std::to_string(pick(agents_)); }
    std::string tool() { return "tool_" + std::to_string(pick(tools_)); }

    std::set<std::string> tool_set() {
        std::set<std::string> s;
        const int n = 1 + pick(3);
        for (int i = 0; i < n; ++i) s.insert(tool());
        return s;
    }

    Json value() {
        switch (pick(4)) {
            case 0: return pick(5);
            case 1: return std::string(1, char('a' + pick(3)));
            case 2: return pick(2) == 1;
            default: return Json{{"x", pick(3)}, {"y", std::string(1, char('p' + pick(2)))}};
        }
    }

    Json params() {
        Json p = Json::object();
        const int n = pick(4);
        for (int i = 0; i < n; ++i) p["k" + std::to_string(pick(4))] = value();
        return p;
    }

    std::vector<buildops::bench::StepSig> steps(int max) {
        std::vector<buildops::bench::StepSig> s;
        const int n = pick(max + 1);
        for (int i = 0; i < n; ++i) s.push_back({agent(), tool_set()});
        return s;
    }

    TracePair pair() {
        TracePair t;
        for (int i = 0, n = 1 + pick(4); i < n; ++i) t.exp_tools.push_back(tool());
        for (int i = 0, n = pick(6); i < n; ++i) t.act_tools.push_back(tool());
        for (int i = 0, n = 1 + pick(3); i < n; ++i) t.exp_agents.push_back(agent());
        for (int i = 0, n = pick(4); i < n; ++i) t.act_agents.push_back(agent());
        do t.exp_steps = steps(4);
        while (t.exp_steps.empty());
        t.act_steps = steps(5);
        for (int i = 0, n = 1 + pick(3); i < n; ++i) {
            Json p = params();
            if (p.empty()) p["k0"] = value();
            t.exp_calls.push_back({tool(), p});
        }
        for (int i = 0, n = pick(5); i < n; ++i) {
            // Bias executed calls towards the expected ones so matches occur.
            if (pick(2) == 0 && !t.exp_calls.empty()) {
                auto c = t.exp_calls[std::size_t(pick(int(t.exp_calls.size())))];
                if (pick(2) == 0) c.parameters["k" + std::to_string(pick(4))] = value();
                t.act_calls.push_back(c);
            } else {
                t.act_calls.push_back({tool(), params()});
            }
        }
        return t;
    }

private:
    std::mt19937 rng_;
    int agents_, tools_;
};

}  // namespace oracle
