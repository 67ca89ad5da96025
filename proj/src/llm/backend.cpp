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


#include <cmath>
#include <fstream>
#include <sstream>

#include "buildops/error.hpp"
#include "buildops/llm/backend.hpp"

namespace buildops::llm {

namespace {

std::string kind_name(BackendKind k) { return k == BackendKind::HttpChat ? "http_chat" : "scripted"; }

BackendKind kind_from(const std::string& s) {
    if (s == "http_chat") return BackendKind::HttpChat;
    if (s == "scripted") return BackendKind::Scripted;
    throw Error("InvalidArgument", "unknown backend kind '" + s + "'");
}

}  // namespace

void validate_spec(const BackendSpec& spec) {
    if (spec.backend_id.empty()) throw Error("InvalidArgument", "backend_id is empty");
    const auto& p = spec.pricing;
    if (!(p.input_per_million >= 0.0) || !(p.output_per_million >= 0.0) || !std::isfinite(p.input_per_million) ||
        !std::isfinite(p.output_per_million)) {
        throw Error("InvalidArgument", "backend '" + spec.backend_id + "': pricing must be finite and >= 0");
    }
    if (!(spec.timeout_s > 0.0)) {
        throw Error("InvalidArgument", "backend '" + spec.backend_id + "': timeout_s must be > 0");
    }
    if (spec.max_retries < 0) {
        throw Error("InvalidArgument", "backend '" + spec.backend_id + "': max_retries must be >= 0");
    }
    if (spec.kind == BackendKind::HttpChat && spec.endpoint.empty()) {
        throw Error("InvalidArgument", "backend '" + spec.backend_id + "': http_chat needs an endpoint");
    }
}

void to_json(Json& j, const BackendSpec& s) {
    j = Json{{"backend_id", s.backend_id},
             {"kind", kind_name(s.kind)},
             {"model_name", s.model_name},
             {"pricing", {{"input", s.pricing.input_per_million}, {"output", s.pricing.output_per_million}}},
             {"timeout_s", s.timeout_s},
             {"max_retries", s.max_retries}};
    if (!s.endpoint.empty()) j["endpoint"] = s.endpoint;
    if (!s.api_key_env.empty()) j["api_key_env"] = s.api_key_env;
    if (!s.script.is_null()) j["script"] = s.script;
    if (!s.script_path.empty()) j["script_path"] = s.script_path;
}

void from_json(const Json& j, BackendSpec& s) {
    if (!j.is_object()) throw Error("InvalidArgument", "backend spec must be an object");
    s = BackendSpec{};
    s.backend_id = j.at("backend_id").get<std::string>();
    s.kind = kind_from(j.value("kind", std::string("scripted")));
    s.endpoint = j.value("endpoint", std::string());
    s.model_name = j.value("model_name", std::string());
    if (j.contains("pricing")) {
        const Json& p = j.at("pricing");
        s.pricing.input_per_million = p.value("input", 0.0);
        s.pricing.output_per_million = p.value("output", 0.0);
    }
    s.timeout_s = j.value("timeout_s", 60.0);
    s.max_retries = j.value("max_retries", 2);
    s.api_key_env = j.value("api_key_env", std::string());
    if (j.contains("script")) s.script = j.at("script");
    s.script_path = j.value("script_path", std::string());
}

std::string to_string(RoleTag tag) { return tag == RoleTag::Orchestrator ? "orchestrator" : "agent"; }

RoleTag role_tag_from_string(const std::string& s) {
    if (s == "orchestrator") return RoleTag::Orchestrator;
    if (s == "agent") return RoleTag::Agent;
    throw Error("InvalidArgument", "unknown role tag '" + s + "'");
}

void to_json(Json& j, const UsageRecord& u) {
    j = Json{{"backend_id", u.backend_id},       {"role_tag", to_string(u.role)},
             {"purpose", u.purpose},             {"agent_id", u.agent_id},
             {"prompt_tokens", u.prompt_tokens}, {"completion_tokens", u.completion_tokens},
             {"wall_time_s", u.wall_time_s},     {"cost", u.cost}};
}

void from_json(const Json& j, UsageRecord& u) {
    u.backend_id = j.value("backend_id", std::string());
    u.role = role_tag_from_string(j.value("role_tag", std::string("agent")));
    u.purpose = j.value("purpose", std::string());
    u.agent_id = j.value("agent_id", std::string());
    u.prompt_tokens = j.value("prompt_tokens", 0L);
    u.completion_tokens = j.value("completion_tokens", 0L);
    u.wall_time_s = j.value("wall_time_s", 0.0);
    u.cost = j.value("cost", 0.0);
}

double cost_of(const Pricing& pricing, long prompt_tokens, long completion_tokens) {
    return static_cast<double>(prompt_tokens) * pricing.input_per_million / 1e6 +
           static_cast<double>(completion_tokens) * pricing.output_per_million / 1e6;
}

long count_tokens(const std::string& text) {
    std::istringstream in(text);
    long n = 0;
    std::string word;
    while (in >> word) ++n;
    return n;
}

UsageRecord Backend::make_usage(long prompt_tokens, long completion_tokens, double wall_time_s,
                                const CompletionParams& params) const {
    UsageRecord u;
    u.backend_id = spec_.backend_id;
    u.role = params.role;
    u.purpose = params.purpose;
    u.agent_id = params.agent_id;
    u.prompt_tokens = prompt_tokens;
    u.completion_tokens = completion_tokens;
    u.wall_time_s = wall_time_s;
    u.cost = cost_of(spec_.pricing, prompt_tokens, completion_tokens);
    return u;
}

std::shared_ptr<Backend> make_backend(const BackendSpec& spec) {
    validate_spec(spec);
    if (spec.kind == BackendKind::HttpChat) return std::make_shared<HttpChatBackend>(spec);
    std::vector<ScriptRule> rules;
    if (!spec.script.is_null()) {
        rules = parse_script(spec.script);
    } else if (!spec.script_path.empty()) {
        std::ifstream in(spec.script_path);
        if (!in) throw Error("InvalidArgument", "cannot read script '" + spec.script_path + "'");
        Json doc;
        try {
            doc = Json::parse(in);
        } catch (const Json::exception& e) {
            throw Error("InvalidArgument", "script '" + spec.script_path + "': " + e.what());
        }
        rules = parse_script(doc);
    }
    return std::make_shared<ScriptedBackend>(spec, std::move(rules));
}

BackendRegistry BackendRegistry::from_json(const Json& list) {
    if (!list.is_array()) throw Error("InvalidArgument", "backend registry must be a JSON list");
    BackendRegistry reg;
    for (const auto& entry : list) {
        BackendSpec spec;
        try {
            spec = entry.get<BackendSpec>();
        } catch (const Json::exception& e) {
            throw Error("InvalidArgument", std::string("bad backend spec: ") + e.what());
        }
        if (reg.contains(spec.backend_id)) {
            throw Error("DuplicateId", "backend '" + spec.backend_id + "' declared twice");
        }
        reg.add(make_backend(spec));
    }
    return reg;
}

BackendRegistry BackendRegistry::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("InvalidArgument", "cannot read backend registry '" + path + "'");
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::exception& e) {
        throw Error("InvalidArgument", "backend registry '" + path + "': " + e.what());
    }
    return from_json(doc);
}

void BackendRegistry::add(std::shared_ptr<Backend> backend) {
    const std::string id = backend->spec().backend_id;
    backends_[id] = std::move(backend);
}

std::shared_ptr<Backend> BackendRegistry::get(const std::string& backend_id) const {
    auto it = backends_.find(backend_id);
    if (it == backends_.end()) throw Error("UnknownBackend", "no backend '" + backend_id + "'");
    return it->second;
}

std::vector<std::string> BackendRegistry::ids() const {
    std::vector<std::string> out;
    for (const auto& [id, _] : backends_) out.push_back(id);
    return out;
}

std::vector<BackendSpec> default_tier_specs(const std::string& local_endpoint, const std::string& api_endpoint) {
    auto local = [&](const std::string& id, const std::string& model) {
        BackendSpec s;
        s.backend_id = id;
        s.kind = BackendKind::HttpChat;
        s.endpoint = local_endpoint;
        s.model_name = model;
        s.timeout_s = 300.0;
        return s;
    };
    BackendSpec api;
    api.backend_id = "API";
    api.kind = BackendKind::HttpChat;
    api.endpoint = api_endpoint;
    api.model_name = "gpt-4o-mini";
    api.pricing = {0.15, 0.60};
    api.timeout_s = 120.0;
    api.api_key_env = "OPENAI_API_KEY";
    return {local("S", "qwen3:1.7b"), local("M", "qwen3:4b"), local("L", "gemma2:9b"), local("XL", "qwen3:30b"), api};
}

}  // namespace buildops::llm
