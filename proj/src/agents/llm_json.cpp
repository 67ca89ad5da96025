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


#include "buildops/agents/llm_json.hpp"

#include "buildops/error.hpp"

namespace buildops::agents {

namespace {

bool try_object(const std::string& text, Json& out) {
    Json parsed = Json::parse(text, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) return false;
    out = std::move(parsed);
    return true;
}

}  // namespace

Json extract_json(const std::string& text) {
    Json out;
    if (try_object(text, out)) return out;
    // Fenced block, with or without a language tag.
    auto fence = text.find("```");
    if (fence != std::string::npos) {
        auto body = text.find('\n', fence);
        auto close = body == std::string::npos ? std::string::npos : text.find("```", body);
        if (close != std::string::npos && try_object(text.substr(body + 1, close - body - 1), out)) return out;
    }
    auto first = text.find('{');
    auto last = text.rfind('}');
    if (first != std::string::npos && last != std::string::npos && last > first &&
        try_object(text.substr(first, last - first + 1), out)) {
        return out;
    }
    throw Error("MalformedLLMOutput", "reply contains no JSON object: \"" + text.substr(0, 120) + "\"");
}

JsonReply complete_json(llm::Backend& backend, std::vector<llm::Message> messages,
                        const llm::CompletionParams& params, const ReplyCheck& check,
                        std::vector<llm::UsageRecord>& usage, int retries) {
    std::string problem;
    for (int attempt = 0; attempt <= retries; ++attempt) {
        llm::Completion reply = backend.complete(messages, params);
        usage.push_back(reply.usage);
        try {
            Json value = extract_json(reply.text);
            problem = check ? check(value) : std::string();
            if (problem.empty()) return JsonReply{std::move(value), std::move(reply.text), attempt + 1};
        } catch (const Error& e) {
            problem = e.what();
        }
        messages.push_back({"assistant", reply.text});
        messages.push_back({"user", "Your previous reply could not be used: " + problem +
                                        "\nReturn only the JSON object in the requested format."});
    }
    throw Error("MalformedLLMOutput", "no usable reply after " + std::to_string(retries + 1) +
                                          " attempts; last problem: " + problem);
}

}  // namespace buildops::agents
