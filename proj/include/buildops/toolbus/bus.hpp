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

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "buildops/toolbus/registry.hpp"

namespace buildops::toolbus {

/// What agents talk to. The in-process bus and the JSON-RPC clients both
/// implement it, so agents never know which side of a transport they are on.
class ToolClient {
public:
    virtual ~ToolClient() = default;

    virtual std::vector<ToolSpec> list_tools(Detail detail) = 0;
    virtual ToolSpec describe(std::string_view name) = 0;
    /// Never throws for tool-level problems; those come back as a failed
    /// envelope. Fills call_id (when empty) and timestamps.
    virtual CallRecord invoke(ToolCall call) = 0;
};

/// Returns true when `caller` may call `tool`.
using AccessPolicy = std::function<bool(std::string_view caller, std::string_view tool)>;

/// Mediates every invocation: authorization, argument validation, handler
/// execution and the session trace.
class ToolBus : public ToolClient {
public:
    explicit ToolBus(std::shared_ptr<const ToolRegistry> registry, AccessPolicy policy = {});

    std::vector<ToolSpec> list_tools(Detail detail) override;
    ToolSpec describe(std::string_view name) override;
    CallRecord invoke(ToolCall call) override;

    /// An unset policy admits every caller.
    void set_access_policy(AccessPolicy policy);

    std::vector<CallRecord> trace() const;
    void clear_trace();

    const ToolRegistry& registry() const { return *registry_; }
    std::shared_ptr<const ToolRegistry> registry_ptr() const { return registry_; }

private:
    ToolResult execute(const ToolCall& call);

    std::shared_ptr<const ToolRegistry> registry_;
    mutable std::mutex policy_mutex_;
    AccessPolicy policy_;
    mutable std::mutex trace_mutex_;
    std::vector<CallRecord> trace_;
    std::uint64_t next_call_ = 1;
};

}  // namespace buildops::toolbus
