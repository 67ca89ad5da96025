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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace buildops::agents {

using Json = nlohmann::json;

/// Nested objects flattened to dotted keys: {a:{b:1}} -> {"a.b": 1}. Arrays
/// and scalars are leaves.
std::map<std::string, Json> flatten_params(const Json& params);

/// Type-aware comparison: numbers (and numeric strings) within relative
/// tolerance 1e-6, "true"/"false" against booleans, strings trimmed and
/// case-sensitive, arrays element-wise, objects after flattening.
bool values_match(const Json& expected, const Json& actual);

/// Same flattened key set and every value matching.
bool params_equal(const Json& planned, const Json& executed);

enum class Adherence { Followed, ToolRemoval, ToolAddition, ParameterModification, Mixed };

std::string to_string(Adherence a);
Adherence adherence_from_string(const std::string& s);

struct PlannedCall {
    std::string tool;
    Json parameters = Json::object();
};

struct DeviationReport {
    Adherence type = Adherence::Followed;
    std::vector<std::string> removed;   // planned tools never executed
    std::vector<std::string> added;     // executed tools never planned
    std::vector<std::string> modified;  // tools executed with other parameters

    bool deviated() const { return type != Adherence::Followed; }
};

void to_json(Json& j, const DeviationReport& r);

/// Multiset comparison of planned against executed calls. Same-named calls
/// pair up in order of appearance; a pair whose parameters differ counts as a
/// modification.
DeviationReport classify_deviation(const std::vector<PlannedCall>& planned,
                                   const std::vector<PlannedCall>& executed);

}  // namespace buildops::agents
