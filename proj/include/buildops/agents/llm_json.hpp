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

#include <functional>
#include <string>
#include <vector>

#include "buildops/llm/backend.hpp"

namespace buildops::agents {

using Json = nlohmann::json;

/// Pulls the JSON object out of a model reply: the whole text, a fenced
/// ```json block, or the outermost {...} span. Throws
/// Error("MalformedLLMOutput").
Json extract_json(const std::string& text);

/// Returns an empty string when the parsed reply is usable, otherwise the
/// reason it is not.
using ReplyCheck = std::function<std::string(const Json&)>;

inline constexpr int kDefaultJsonRetries = 2;

struct JsonReply {
    Json value;
    std::string text;
    int attempts = 0;
};

/// Calls the backend, parses and checks the reply; on failure appends the bad
/// reply and the reason to the conversation and tries again, up to `retries`
/// extra times. Every attempt's usage goes to `usage` even when the call
/// finally throws Error("MalformedLLMOutput"). Backend errors propagate.
JsonReply complete_json(llm::Backend& backend, std::vector<llm::Message> messages,
                        const llm::CompletionParams& params, const ReplyCheck& check,
                        std::vector<llm::UsageRecord>& usage, int retries = kDefaultJsonRetries);

}  // namespace buildops::agents
