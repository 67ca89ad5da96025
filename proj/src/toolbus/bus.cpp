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

#include "buildops/toolbus/bus.hpp"

#include <algorithm>
#include <exception>

#include "buildops/error.hpp"

namespace buildops::toolbus {

namespace {

std::string join_violations(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += "; ";
        out += items[i];
    }
    return out;
}

}  // namespace

ToolBus::ToolBus(std::shared_ptr<const ToolRegistry> registry, AccessPolicy policy)
    : registry_(std::move(registry)), policy_(std::move(policy)) {
    if (!registry_) throw Error("InvalidSpec", "tool bus needs a registry");
}

std::vector<ToolSpec> ToolBus::list_tools(Detail detail) {
    return registry_->list_tools(detail);
}

ToolSpec ToolBus::describe(std::string_view name) {
    return registry_->describe(name);
}

void ToolBus::set_access_policy(AccessPolicy policy) {
    std::lock_guard lock(policy_mutex_);
    policy_ = std::move(policy);
}

ToolResult ToolBus::execute(const ToolCall& call) {
    const ToolSpec* spec = registry_->find(call.tool);
    if (!spec) return ToolResult::fail("UnknownTool: no tool named '" + call.tool + "'");
    {
        std::lock_guard lock(policy_mutex_);
        if (policy_ && !policy_(call.caller, call.tool)) {
            return ToolResult::fail("Unauthorized: caller '" + call.caller + "' may not call '" +
                                    call.tool + "'");
        }
    }
    auto violations = validate_args(*spec, call.arguments);
    if (!violations.empty()) {
        return ToolResult::fail("ValidationFailed: " + join_violations(violations));
    }
    try {
        ToolResult r = registry_->handler(call.tool)(coerce_args(*spec, call.arguments));
        if (r.success) {
            r.error.reset();
        } else {
            r.data.reset();
            r.message.reset();
            if (!r.error) r.error = "tool reported failure without a message";
        }
        return r;
    } catch (const std::exception& e) {
        return ToolResult::fail(e.what());
    } catch (...) {
        return ToolResult::fail("unknown exception in tool handler");
    }
}

CallRecord ToolBus::invoke(ToolCall call) {
    if (call.call_id.empty()) {
        std::lock_guard lock(trace_mutex_);
        call.call_id = (call.caller.empty() ? std::string("anonymous") : call.caller) + "#" +
                       std::to_string(next_call_++);
    }
    if (call.arguments.is_null()) call.arguments = Json::object();
    call.start_s = wall_clock_s();
    ToolResult result = execute(call);
    call.end_s = std::max(wall_clock_s(), call.start_s);
    CallRecord record{std::move(call), std::move(result)};
    {
        std::lock_guard lock(trace_mutex_);
        trace_.push_back(record);
    }
    return record;
}

std::vector<CallRecord> ToolBus::trace() const {
    std::lock_guard lock(trace_mutex_);
    return trace_;
}

void ToolBus::clear_trace() {
    std::lock_guard lock(trace_mutex_);
    trace_.clear();
}

}  // namespace buildops::toolbus
