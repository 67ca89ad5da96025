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


#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "buildops/error.hpp"
#include "buildops/llm/backend.hpp"

namespace buildops::llm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Splits "https://host:port/path" into ("https://host:port", "/path").
std::pair<std::string, std::string> split_url(const std::string& url) {
    auto scheme = url.find("://");
    if (scheme == std::string::npos) throw Error("InvalidArgument", "endpoint '" + url + "' has no scheme");
    auto slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

std::chrono::microseconds as_duration(double seconds) {
    return std::chrono::microseconds(static_cast<long long>(std::llround(seconds * 1e6)));
}

}  // namespace

HttpChatBackend::HttpChatBackend(BackendSpec spec) : Backend(std::move(spec)) {
    validate_spec(spec_);
    std::tie(scheme_host_port_, path_) = split_url(spec_.endpoint);
}

Completion HttpChatBackend::complete(const std::vector<Message>& messages, const CompletionParams& params) {
    Json body{{"model", spec_.model_name}, {"temperature", params.temperature}, {"messages", Json::array()}};
    for (const auto& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (!spec_.api_key_env.empty()) {
        const char* key = std::getenv(spec_.api_key_env.c_str());
        if (!key || !*key) {
            throw Error("AuthFailure", "environment variable " + spec_.api_key_env + " is not set");
        }
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    const auto t0 = Clock::now();
    std::string last_error;
    for (int attempt = 0; attempt <= spec_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(as_duration(base_backoff_s_ * std::pow(2.0, attempt - 1)));
        }
        httplib::Client client(scheme_host_port_);
        client.set_connection_timeout(as_duration(spec_.timeout_s));
        client.set_read_timeout(as_duration(spec_.timeout_s));
        client.set_write_timeout(as_duration(spec_.timeout_s));

        const auto attempt_start = Clock::now();
        auto res = client.Post(path_, headers, payload, "application/json");
        if (!res) {
            const auto err = res.error();
            if (err == httplib::Error::ConnectionTimeout ||
                (err == httplib::Error::Read && seconds_since(attempt_start) >= 0.9 * spec_.timeout_s)) {
                throw Error("BackendTimeout", "backend '" + spec_.backend_id + "' exceeded " +
                                                  std::to_string(spec_.timeout_s) + " s");
            }
            last_error = httplib::to_string(err);
            continue;
        }
        if (res->status == 401 || res->status == 403) {
            throw Error("AuthFailure", "backend '" + spec_.backend_id + "' rejected credentials (HTTP " +
                                           std::to_string(res->status) + ")");
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw Error("BackendUnavailable", "backend '" + spec_.backend_id + "' returned HTTP " +
                                                  std::to_string(res->status) + ": " + res->body.substr(0, 200));
        }
        Json reply;
        try {
            reply = Json::parse(res->body);
        } catch (const Json::exception& e) {
            throw Error("BackendUnavailable", "backend '" + spec_.backend_id + "' sent invalid JSON: " + e.what());
        }
        std::string text;
        try {
            text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const Json::exception&) {
            throw Error("BackendUnavailable", "backend '" + spec_.backend_id + "' reply has no choices[0].message.content");
        }
        long in = -1;
        long out = -1;
        if (reply.contains("usage") && reply["usage"].is_object()) {
            const Json& u = reply["usage"];
            if (u.contains("prompt_tokens") && u["prompt_tokens"].is_number()) in = u["prompt_tokens"].get<long>();
            if (u.contains("completion_tokens") && u["completion_tokens"].is_number()) {
                out = u["completion_tokens"].get<long>();
            }
        }
        if (in < 0) in = count_tokens(flatten(messages));
        if (out < 0) out = count_tokens(text);
        return Completion{text, make_usage(in, out, seconds_since(t0), params)};
    }
    throw Error("BackendUnavailable", "backend '" + spec_.backend_id + "' failed after " +
                                          std::to_string(spec_.max_retries + 1) + " attempts: " + last_error);
}

}  // namespace buildops::llm
