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


#include "buildops/agents/adherence.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "buildops/error.hpp"

namespace buildops::agents {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::optional<double> as_number(const Json& v) {
    if (v.is_number()) return v.get<double>();
    if (!v.is_string()) return std::nullopt;
    const std::string t = trim(v.get<std::string>());
    if (t.empty()) return std::nullopt;
    double out = 0.0;
    const char* begin = t.data();
    if (*begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, t.data() + t.size(), out);
    if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
    return out;
}

std::optional<bool> as_bool(const Json& v) {
    if (v.is_boolean()) return v.get<bool>();
    if (!v.is_string()) return std::nullopt;
    const std::string t = trim(v.get<std::string>());
    if (t == "true") return true;
    if (t == "false") return false;
    return std::nullopt;
}

void flatten_into(const Json& v, const std::string& prefix, std::map<std::string, Json>& out) {
    if (v.is_object() && !v.empty()) {
        for (auto it = v.begin(); it != v.end(); ++it) {
            flatten_into(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
        }
        return;
    }
    out[prefix] = v;
}

}  // namespace

std::map<std::string, Json> flatten_params(const Json& params) {
    std::map<std::string, Json> out;
    if (params.is_object()) {
        for (auto it = params.begin(); it != params.end(); ++it) flatten_into(it.value(), it.key(), out);
    }
    return out;
}

bool values_match(const Json& expected, const Json& actual) {
    if (expected.is_number() || actual.is_number()) {
        auto e = as_number(expected);
        auto a = as_number(actual);
        if (!e || !a) return false;
        if (*e == *a) return true;
        return std::fabs(*e - *a) <= 1e-6 * std::max(std::fabs(*e), std::fabs(*a));
    }
    if (expected.is_boolean() || actual.is_boolean()) {
        auto e = as_bool(expected);
        auto a = as_bool(actual);
        return e && a && *e == *a;
    }
    if (expected.is_string() && actual.is_string()) {
        return trim(expected.get<std::string>()) == trim(actual.get<std::string>());
    }
    if (expected.is_array() && actual.is_array()) {
        if (expected.size() != actual.size()) return false;
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (!values_match(expected[i], actual[i])) return false;
        }
        return true;
    }
    if (expected.is_object() && actual.is_object()) return params_equal(expected, actual);
    return expected.is_null() && actual.is_null();
}

bool params_equal(const Json& planned, const Json& executed) {
    const auto p = flatten_params(planned);
    const auto e = flatten_params(executed);
    if (p.size() != e.size()) return false;
    for (const auto& [key, value] : p) {
        auto it = e.find(key);
        if (it == e.end() || !values_match(value, it->second)) return false;
    }
    return true;
}

std::string to_string(Adherence a) {
    switch (a) {
        case Adherence::Followed: return "followed";
        case Adherence::ToolRemoval: return "tool_removal";
        case Adherence::ToolAddition: return "tool_addition";
        case Adherence::ParameterModification: return "parameter_modification";
        case Adherence::Mixed: return "mixed";
    }
    return "followed";
}

Adherence adherence_from_string(const std::string& s) {
    for (auto a : {Adherence::Followed, Adherence::ToolRemoval, Adherence::ToolAddition,
                   Adherence::ParameterModification, Adherence::Mixed}) {
        if (to_string(a) == s) return a;
    }
    throw Error("InvalidArgument", "unknown adherence '" + s + "'");
}

void to_json(Json& j, const DeviationReport& r) {
    j = Json{{"type", to_string(r.type)}, {"removed", r.removed}, {"added", r.added}, {"modified", r.modified}};
}

DeviationReport classify_deviation(const std::vector<PlannedCall>& planned, const std::vector<PlannedCall>& executed) {
    std::map<std::string, std::vector<const Json*>> by_plan;
    std::map<std::string, std::vector<const Json*>> by_exec;
    std::vector<std::string> order;  // first-seen tool order, for stable reports
    auto note = [&](const std::string& tool) {
        if (std::find(order.begin(), order.end(), tool) == order.end()) order.push_back(tool);
    };
    for (const auto& c : planned) {
        by_plan[c.tool].push_back(&c.parameters);
        note(c.tool);
    }
    for (const auto& c : executed) {
        by_exec[c.tool].push_back(&c.parameters);
        note(c.tool);
    }
    DeviationReport r;
    for (const auto& tool : order) {
        const auto& p = by_plan[tool];
        const auto& e = by_exec[tool];
        const std::size_t pairs = std::min(p.size(), e.size());
        bool changed = false;
        for (std::size_t i = 0; i < pairs; ++i) {
            if (!params_equal(*p[i], *e[i])) changed = true;
        }
        if (changed) r.modified.push_back(tool);
        for (std::size_t i = pairs; i < p.size(); ++i) r.removed.push_back(tool);
        for (std::size_t i = pairs; i < e.size(); ++i) r.added.push_back(tool);
    }
    const int kinds = int(!r.removed.empty()) + int(!r.added.empty()) + int(!r.modified.empty());
    if (kinds == 0) {
        r.type = Adherence::Followed;
    } else if (kinds > 1) {
        r.type = Adherence::Mixed;
    } else if (!r.removed.empty()) {
        r.type = Adherence::ToolRemoval;
    } else if (!r.added.empty()) {
        r.type = Adherence::ToolAddition;
    } else {
        r.type = Adherence::ParameterModification;
    }
    return r;
}

}  // namespace buildops::agents
