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

#include "buildops/toolbus/tool_spec.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <set>

#include "buildops/error.hpp"

namespace buildops::toolbus {

namespace {

bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    auto head = static_cast<unsigned char>(s.front());
    if (!(std::isalpha(head) || head == '_')) return false;
    for (char c : s) {
        auto u = static_cast<unsigned char>(c);
        if (!(std::isalnum(u) || u == '_')) return false;
    }
    return true;
}

std::optional<double> parse_double(const std::string& text) {
    if (text.empty()) return std::nullopt;
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<long long> parse_integer(const std::string& text) {
    if (text.empty()) return std::nullopt;
    char* end = nullptr;
    long long v = std::strtoll(text.c_str(), &end, 10);
    if (end != text.c_str() + text.size()) return std::nullopt;
    return v;
}

std::string type_name(const Json& v) {
    return std::string(v.type_name());
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

void validate_param(const ParamSpec& p, const std::string& path) {
    if (!is_identifier(p.name)) {
        throw Error("InvalidSpec", "param name '" + path + "' is not an identifier");
    }
    if (p.kind == ParamKind::Enum && p.enum_values.empty()) {
        throw Error("InvalidSpec", "enum param '" + path + "' has no enum_values");
    }
    if (p.required && p.default_value) {
        throw Error("InvalidSpec", "required param '" + path + "' must not have a default");
    }
    if (!p.fields.empty() && p.kind != ParamKind::Map) {
        throw Error("InvalidSpec", "param '" + path + "' declares fields but is not a map");
    }
    std::set<std::string> seen;
    for (const auto& f : p.fields) {
        if (!seen.insert(f.name).second) {
            throw Error("InvalidSpec", "duplicate field '" + path + "." + f.name + "'");
        }
        validate_param(f, path + "." + f.name);
    }
}

void check_value(const ParamSpec& p, const Json& v, const std::string& path,
                 std::vector<std::string>& out);

void check_object(const std::vector<ParamSpec>& params, const Json& args, const std::string& prefix,
                  std::vector<std::string>& out) {
    for (const auto& p : params) {
        auto it = args.find(p.name);
        bool present = it != args.end() && !it->is_null();
        if (!present) {
            if (p.required) out.push_back("missing required " + prefix + p.name);
            continue;
        }
        check_value(p, *it, prefix + p.name, out);
    }
    for (auto it = args.begin(); it != args.end(); ++it) {
        bool known = false;
        for (const auto& p : params) {
            if (p.name == it.key()) {
                known = true;
                break;
            }
        }
        if (!known) out.push_back("unknown param " + prefix + it.key());
    }
}

void check_value(const ParamSpec& p, const Json& v, const std::string& path,
                 std::vector<std::string>& out) {
    auto mismatch = [&](std::string_view expected) {
        out.push_back("type mismatch for " + path + ": expected " + std::string(expected) + ", got " +
                      type_name(v));
    };
    switch (p.kind) {
        case ParamKind::String:
            if (!v.is_string()) mismatch("string");
            break;
        case ParamKind::Number:
            if (!v.is_number() && !(v.is_string() && parse_double(v.get<std::string>()))) {
                mismatch("number");
            }
            break;
        case ParamKind::Integer: {
            bool ok = v.is_number_integer() ||
                      (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>()) ||
                      (v.is_string() && parse_integer(v.get<std::string>()));
            if (!ok) mismatch("integer");
            break;
        }
        case ParamKind::Boolean:
            if (!v.is_boolean() &&
                !(v.is_string() && (v.get<std::string>() == "true" || v.get<std::string>() == "false"))) {
                mismatch("boolean");
            }
            break;
        case ParamKind::Enum: {
            if (!v.is_string()) {
                mismatch("enum string");
                break;
            }
            const auto s = v.get<std::string>();
            bool found = false;
            for (const auto& e : p.enum_values) found = found || e == s;
            if (!found) {
                out.push_back("enum violation for " + path + ": '" + s + "' not in {" +
                              join(p.enum_values, ", ") + "}");
            }
            break;
        }
        case ParamKind::Map:
            if (!v.is_object()) {
                mismatch("map");
            } else if (!p.fields.empty()) {
                check_object(p.fields, v, path + ".", out);
            }
            break;
        case ParamKind::List:
            if (!v.is_array()) mismatch("list");
            break;
    }
}

Json coerce_value(const ParamSpec& p, const Json& v) {
    switch (p.kind) {
        case ParamKind::Number:
            if (v.is_string()) {
                if (auto d = parse_double(v.get<std::string>())) return *d;
            }
            return v;
        case ParamKind::Integer:
            if (v.is_string()) {
                if (auto i = parse_integer(v.get<std::string>())) return *i;
            }
            if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>()) {
                return static_cast<long long>(v.get<double>());
            }
            return v;
        case ParamKind::Boolean:
            if (v.is_string()) return v.get<std::string>() == "true";
            return v;
        case ParamKind::Map: {
            if (!v.is_object() || p.fields.empty()) return v;
            Json out = Json::object();
            for (auto it = v.begin(); it != v.end(); ++it) {
                const ParamSpec* f = nullptr;
                for (const auto& c : p.fields) {
                    if (c.name == it.key()) f = &c;
                }
                out[it.key()] = f ? coerce_value(*f, *it) : *it;
            }
            return out;
        }
        default:
            return v;
    }
}

}  // namespace

std::string_view to_string(ParamKind kind) {
    switch (kind) {
        case ParamKind::String: return "string";
        case ParamKind::Number: return "number";
        case ParamKind::Integer: return "integer";
        case ParamKind::Boolean: return "boolean";
        case ParamKind::Enum: return "enum";
        case ParamKind::Map: return "map";
        case ParamKind::List: return "list";
    }
    return "string";
}

ParamKind param_kind_from_string(std::string_view text) {
    for (auto k : {ParamKind::String, ParamKind::Number, ParamKind::Integer, ParamKind::Boolean,
                   ParamKind::Enum, ParamKind::Map, ParamKind::List}) {
        if (to_string(k) == text) return k;
    }
    throw Error("InvalidSpec", "unknown param kind '" + std::string(text) + "'");
}

const ParamSpec* ToolSpec::param(std::string_view param_name) const {
    for (const auto& p : params) {
        if (p.name == param_name) return &p;
    }
    return nullptr;
}

void validate_spec(const ToolSpec& spec) {
    if (!is_identifier(spec.name)) {
        throw Error("InvalidSpec", "tool name '" + spec.name + "' is not an identifier");
    }
    if (spec.category.empty()) {
        throw Error("InvalidSpec", "tool '" + spec.name + "' has no category");
    }
    std::set<std::string> seen;
    for (const auto& p : spec.params) {
        if (!seen.insert(p.name).second) {
            throw Error("InvalidSpec", "tool '" + spec.name + "' repeats param '" + p.name + "'");
        }
        validate_param(p, p.name);
    }
}

std::vector<std::string> validate_args(const ToolSpec& spec, const Json& arguments) {
    std::vector<std::string> out;
    if (arguments.is_null()) {
        check_object(spec.params, Json::object(), "", out);
        return out;
    }
    if (!arguments.is_object()) {
        out.push_back("arguments must be a map, got " + type_name(arguments));
        return out;
    }
    check_object(spec.params, arguments, "", out);
    return out;
}

Json coerce_args(const ToolSpec& spec, const Json& arguments) {
    Json out = Json::object();
    if (!arguments.is_object()) return out;
    for (auto it = arguments.begin(); it != arguments.end(); ++it) {
        if (it->is_null()) continue;
        const ParamSpec* p = spec.param(it.key());
        out[it.key()] = p ? coerce_value(*p, *it) : *it;
    }
    return out;
}

void to_json(Json& out, const ParamSpec& param) {
    out = Json{{"name", param.name},
               {"kind", std::string(to_string(param.kind))},
               {"required", param.required},
               {"description", param.description}};
    if (!param.enum_values.empty()) out["enum_values"] = param.enum_values;
    if (param.default_value) out["default"] = *param.default_value;
    if (!param.fields.empty()) out["fields"] = param.fields;
}

void from_json(const Json& in, ParamSpec& param) {
    param.name = in.at("name").get<std::string>();
    param.kind = param_kind_from_string(in.at("kind").get<std::string>());
    param.required = in.value("required", false);
    param.description = in.value("description", "");
    param.enum_values = in.value("enum_values", std::vector<std::string>{});
    param.default_value.reset();
    if (in.contains("default")) param.default_value = in.at("default");
    param.fields = in.value("fields", std::vector<ParamSpec>{});
}

void to_json(Json& out, const ToolSpec& spec) {
    out = Json{{"name", spec.name},
               {"description", spec.description},
               {"category", spec.category},
               {"params", spec.params}};
}

void from_json(const Json& in, ToolSpec& spec) {
    spec.name = in.at("name").get<std::string>();
    spec.description = in.value("description", "");
    spec.category = in.value("category", "");
    spec.params = in.value("params", std::vector<ParamSpec>{});
}

ToolResult ToolResult::ok(Json data, std::string message) {
    ToolResult r;
    r.success = true;
    r.data = std::move(data);
    r.message = std::move(message);
    return r;
}

ToolResult ToolResult::fail(std::string error) {
    ToolResult r;
    r.success = false;
    r.error = std::move(error);
    return r;
}

void to_json(Json& out, const ToolResult& result) {
    out = Json{{"success", result.success}};
    if (result.success) {
        if (result.data) out["data"] = *result.data;
        if (result.message) out["message"] = *result.message;
    } else {
        out["error"] = result.error.value_or("unknown error");
    }
}

void from_json(const Json& in, ToolResult& result) {
    result = ToolResult{};
    result.success = in.at("success").get<bool>();
    if (result.success) {
        if (in.contains("data")) result.data = in.at("data");
        if (in.contains("message")) result.message = in.at("message").get<std::string>();
    } else {
        result.error = in.value("error", "unknown error");
    }
}

void to_json(Json& out, const ToolCall& call) {
    out = Json{{"tool", call.tool},     {"arguments", call.arguments}, {"caller", call.caller},
               {"call_id", call.call_id}, {"start_s", call.start_s},   {"end_s", call.end_s}};
}

void from_json(const Json& in, ToolCall& call) {
    call.tool = in.at("tool").get<std::string>();
    call.arguments = in.value("arguments", Json::object());
    call.caller = in.value("caller", "");
    call.call_id = in.value("call_id", "");
    call.start_s = in.value("start_s", 0.0);
    call.end_s = in.value("end_s", 0.0);
}

void to_json(Json& out, const CallRecord& record) {
    out = Json{{"call", record.call}, {"result", record.result}};
}

void from_json(const Json& in, CallRecord& record) {
    record.call = in.at("call").get<ToolCall>();
    record.result = in.at("result").get<ToolResult>();
}

double wall_clock_s() {
    using namespace std::chrono;
    return duration<double>(system_clock::now().time_since_epoch()).count();
}

}  // namespace buildops::toolbus
