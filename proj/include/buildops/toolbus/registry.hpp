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
#include <string_view>
#include <unordered_map>
#include <vector>

#include "buildops/toolbus/tool_spec.hpp"

namespace buildops::toolbus {

using ToolHandler = std::function<ToolResult(const Json& arguments)>;

enum class Detail { NamesOnly, Full };

/// Registration-ordered tool table. Built once at startup, then shared
/// read-only between the bus and any number of transports.
class ToolRegistry {
public:
    using Handle = std::size_t;

    /// Throws Error("InvalidSpec") or Error("DuplicateName").
    Handle register_tool(ToolSpec spec, ToolHandler handler);

    /// names_only keeps name and category; full returns the whole schema.
    std::vector<ToolSpec> list_tools(Detail detail) const;
    Json list_json(Detail detail) const;

    /// Throws Error("UnknownTool").
    const ToolSpec& describe(std::string_view name) const;
    const ToolSpec* find(std::string_view name) const;
    bool contains(std::string_view name) const { return find(name) != nullptr; }

    /// Throws Error("UnknownTool").
    std::vector<std::string> validate_args(std::string_view name, const Json& arguments) const;

    const ToolHandler& handler(std::string_view name) const;

    std::vector<std::string> names() const;
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

private:
    struct Entry {
        ToolSpec spec;
        ToolHandler handler;
    };

    std::vector<Entry> entries_;
    std::unordered_map<std::string, Handle> index_;
};

}  // namespace buildops::toolbus
