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
#include <memory>
#include <mutex>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <json.hpp>

namespace buildops::llm {

using Json = nlohmann::json;

struct Message {
    std::string role;  // system | user | assistant
    std::string content;
};

struct Pricing {
    double input_per_million = 0.0;   // $ per 1M prompt tokens
    double output_per_million = 0.0;  // $ per 1M completion tokens
};

enum class BackendKind { HttpChat, Scripted };

struct BackendSpec {
    std::string backend_id;
    BackendKind kind = BackendKind::Scripted;
    std::string endpoint;      // http_chat: e.g. http://localhost:11434/v1/chat/completions
    std::string model_name;
    Pricing pricing;
    double timeout_s = 60.0;
    int max_retries = 2;
    std::string api_key_env;   // name of the variable holding the key; the key itself is never stored
    Json script = nullptr;     // scripted: inline rules
    std::string script_path;   // scripted: rules file
};

/// Throws Error("InvalidArgument") on negative pricing, timeout <= 0 or a
/// missing endpoint for http_chat.
void validate_spec(const BackendSpec& spec);

void to_json(Json& j, const BackendSpec& s);
void from_json(const Json& j, BackendSpec& s);

enum class RoleTag { Orchestrator, Agent };

std::string to_string(RoleTag tag);
RoleTag role_tag_from_string(const std::string& s);

struct UsageRecord {
    std::string backend_id;
    RoleTag role = RoleTag::Agent;
    std::string purpose;  // route, plan, plan_stage1, synthesis, specialist, ...
    std::string agent_id;
    long prompt_tokens = 0;
    long completion_tokens = 0;
    double wall_time_s = 0.0;
    double cost = 0.0;
};

void to_json(Json& j, const UsageRecord& u);
void from_json(const Json& j, UsageRecord& u);

/// prompt_tokens * p_in / 1e6 + completion_tokens * p_out / 1e6
double cost_of(const Pricing& pricing, long prompt_tokens, long completion_tokens);

/// Whitespace-delimited token count used where no provider count exists.
long count_tokens(const std::string& text);

struct CompletionParams {
    double temperature = 0.3;
    RoleTag role = RoleTag::Agent;
    std::string purpose;
    std::string agent_id;
};

struct Completion {
    std::string text;
    UsageRecord usage;
};

class Backend {
public:
    explicit Backend(BackendSpec spec) : spec_(std::move(spec)) {}
    virtual ~Backend() = default;

    /// Throws Error("BackendTimeout" | "BackendUnavailable" | "AuthFailure" |
    /// "ScriptMiss").
    virtual Completion complete(const std::vector<Message>& messages, const CompletionParams& params) = 0;

    const BackendSpec& spec() const { return spec_; }

protected:
    UsageRecord make_usage(long prompt_tokens, long completion_tokens, double wall_time_s,
                           const CompletionParams& params) const;

    BackendSpec spec_;
};

// ---------------------------------------------------------------------------
// Scripted backend
// ---------------------------------------------------------------------------

/// One rule. Every present condition must hold (AND). The response is either
/// literal text, text followed by a slice of the prompt (echo), or an error.
struct ScriptRule {
    std::vector<std::string> substrings;
    std::string regex_text;
    std::optional<std::regex> regex;
    std::optional<int> call_index;  // 1-based
    std::optional<int> times;       // rule retires after this many uses

    std::string text;
    std::optional<std::string> echo_after;   // echo the prompt slice after this marker
    std::optional<std::string> echo_before;  // ... and before this one
    std::string suffix;                      // appended after the echoed slice
    std::optional<std::string> error_kind;
    std::string error_message;

    int used = 0;
};

/// Parses one rule: {match: {substring: str|[str], regex: str, call_index: n},
/// response: str | {text, echo_after, echo_before, suffix, error: {kind, message}},
/// times: n}. Throws Error("InvalidArgument") on a bad pattern.
ScriptRule parse_rule(const Json& j);
std::vector<ScriptRule> parse_script(const Json& j);

class ScriptedBackend : public Backend {
public:
    ScriptedBackend(BackendSpec spec, std::vector<ScriptRule> rules);

    Completion complete(const std::vector<Message>& messages, const CompletionParams& params) override;

    void add_rule(ScriptRule rule);
    int call_count() const;

private:
    mutable std::mutex mutex_;
    std::vector<ScriptRule> rules_;
    int calls_ = 0;
};

/// Messages joined as the scripted backend sees them.
std::string flatten(const std::vector<Message>& messages);

// ---------------------------------------------------------------------------
// OpenAI-compatible chat-completions client
// ---------------------------------------------------------------------------

class HttpChatBackend : public Backend {
public:
    explicit HttpChatBackend(BackendSpec spec);

    /// POST {model, messages, temperature}; retries transport errors, 429 and
    /// 5xx with exponential backoff (base_backoff_s * 2^attempt).
    Completion complete(const std::vector<Message>& messages, const CompletionParams& params) override;

    void set_base_backoff(double seconds) { base_backoff_s_ = seconds; }

private:
    std::string scheme_host_port_;
    std::string path_;
    double base_backoff_s_ = 0.5;
};

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

std::shared_ptr<Backend> make_backend(const BackendSpec& spec);

class BackendRegistry {
public:
    /// JSON list of BackendSpec. Throws Error("InvalidArgument") or
    /// Error("DuplicateId").
    static BackendRegistry from_json(const Json& list);
    static BackendRegistry load(const std::string& path);

    void add(std::shared_ptr<Backend> backend);
    /// Throws Error("UnknownBackend").
    std::shared_ptr<Backend> get(const std::string& backend_id) const;
    bool contains(const std::string& backend_id) const { return backends_.count(backend_id) > 0; }
    std::vector<std::string> ids() const;

private:
    std::map<std::string, std::shared_ptr<Backend>> backends_;
};

/// The five benchmark tiers (S, M, L, XL, API) with their model names and
/// prices, pointed at `endpoint` for the local tiers.
std::vector<BackendSpec> default_tier_specs(const std::string& local_endpoint = "http://localhost:11434/v1/chat/completions",
                                            const std::string& api_endpoint = "https://api.openai.com/v1/chat/completions");

}  // namespace buildops::llm
