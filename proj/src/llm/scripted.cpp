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


#include <chrono>

#include "buildops/error.hpp"
#include "buildops/llm/backend.hpp"

namespace buildops::llm {

namespace {

std::string slice(const std::string& prompt, const ScriptRule& rule) {
    std::size_t begin = 0;
    if (rule.echo_after) {
        auto pos = prompt.find(*rule.echo_after);
        if (pos == std::string::npos) return {};
        begin = pos + rule.echo_after->size();
    }
    std::size_t end = prompt.size();
    if (rule.echo_before) {
        auto pos = prompt.find(*rule.echo_before, begin);
        if (pos != std::string::npos) end = pos;
    }
    return prompt.substr(begin, end - begin);
}

}  // namespace

std::string flatten(const std::vector<Message>& messages) {
    std::string out;
    for (std::size_t i = 0; i < messages.size(); ++i) {
        if (i) out += "\n\n";
        out += messages[i].content;
    }
    return out;
}

ScriptRule parse_rule(const Json& j) {
    if (!j.is_object()) throw Error("InvalidArgument", "script rule must be an object");
    ScriptRule r;
    if (j.contains("match")) {
        const Json& m = j.at("match");
        if (m.contains("substring")) {
            const Json& s = m.at("substring");
            if (s.is_string()) {
                r.substrings.push_back(s.get<std::string>());
            } else if (s.is_array()) {
                for (const auto& item : s) r.substrings.push_back(item.get<std::string>());
            } else {
                throw Error("InvalidArgument", "match.substring must be a string or list");
            }
        }
        if (m.contains("regex")) {
            r.regex_text = m.at("regex").get<std::string>();
            try {
                r.regex.emplace(r.regex_text, std::regex::ECMAScript);
            } catch (const std::regex_error& e) {
                throw Error("InvalidArgument", "bad regex '" + r.regex_text + "': " + e.what());
            }
        }
        if (m.contains("call_index")) {
            r.call_index = m.at("call_index").get<int>();
            if (*r.call_index < 1) throw Error("InvalidArgument", "call_index is 1-based");
        }
    }
    if (j.contains("times")) {
        r.times = j.at("times").get<int>();
        if (*r.times < 1) throw Error("InvalidArgument", "times must be >= 1");
    }
    if (!j.contains("response")) throw Error("InvalidArgument", "script rule has no response");
    const Json& resp = j.at("response");
    if (resp.is_string()) {
        r.text = resp.get<std::string>();
    } else if (resp.is_object()) {
        r.text = resp.value("text", std::string());
        if (resp.contains("echo_after")) r.echo_after = resp.at("echo_after").get<std::string>();
        if (resp.contains("echo_before")) r.echo_before = resp.at("echo_before").get<std::string>();
        r.suffix = resp.value("suffix", std::string());
        if (resp.value("echo", false) && !r.echo_after) r.echo_after = std::string();
        if (resp.contains("error")) {
            const Json& e = resp.at("error");
            r.error_kind = e.value("kind", std::string("BackendUnavailable"));
            r.error_message = e.value("message", std::string("scripted failure"));
        }
    } else {
        throw Error("InvalidArgument", "response must be a string or object");
    }
    return r;
}

std::vector<ScriptRule> parse_script(const Json& j) {
    const Json& list = j.is_object() && j.contains("rules") ? j.at("rules") : j;
    if (!list.is_array()) throw Error("InvalidArgument", "script must be a list of rules");
    std::vector<ScriptRule> out;
    for (const auto& item : list) out.push_back(parse_rule(item));
    return out;
}

ScriptedBackend::ScriptedBackend(BackendSpec spec, std::vector<ScriptRule> rules)
    : Backend(std::move(spec)), rules_(std::move(rules)) {}

void ScriptedBackend::add_rule(ScriptRule rule) {
    std::lock_guard lock(mutex_);
    rules_.push_back(std::move(rule));
}

int ScriptedBackend::call_count() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

Completion ScriptedBackend::complete(const std::vector<Message>& messages, const CompletionParams& params) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string prompt = flatten(messages);
    std::string text;
    {
        std::lock_guard lock(mutex_);
        const int index = ++calls_;
        ScriptRule* hit = nullptr;
        for (auto& r : rules_) {
            if (r.times && r.used >= *r.times) continue;
            if (r.call_index && *r.call_index != index) continue;
            bool ok = true;
            for (const auto& s : r.substrings) {
                if (prompt.find(s) == std::string::npos) {
                    ok = false;
                    break;
                }
            }
            if (ok && r.regex && !std::regex_search(prompt, *r.regex)) ok = false;
            if (ok) {
                hit = &r;
                break;
            }
        }
        if (!hit) {
            throw Error("ScriptMiss", "backend '" + spec_.backend_id + "' call " + std::to_string(index) +
                                          ": no rule for prompt starting \"" + prompt.substr(0, 80) + "\"");
        }
        ++hit->used;
        if (hit->error_kind) throw Error(*hit->error_kind, hit->error_message);
        text = hit->text;
        if (hit->echo_after || hit->echo_before) text += slice(prompt, *hit);
        text += hit->suffix;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return Completion{text, make_usage(count_tokens(prompt), count_tokens(text), wall, params)};
}

}  // namespace buildops::llm
