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

#include "buildops/toolbus/registry.hpp"

#include "buildops/error.hpp"

namespace buildops::toolbus {

ToolRegistry::Handle ToolRegistry::register_tool(ToolSpec spec, ToolHandler handler) {
    validate_spec(spec);
    if (index_.count(spec.name)) {
        throw Error("DuplicateName", "tool '" + spec.name + "' is already registered");
    }
    if (!handler) {
        throw Error("InvalidSpec", "tool '" + spec.name + "' has no handler");
    }
    Handle h = entries_.size();
    index_.emplace(spec.name, h);
    entries_.push_back(Entry{std::move(spec), std::move(handler)});
    return h;
}

std::vector<ToolSpec> ToolRegistry::list_tools(Detail detail) const {
    std::vector<ToolSpec> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) {
        if (detail == Detail::Full) {
            out.push_back(e.spec);
        } else {
            ToolSpec stripped;
            stripped.name = e.spec.name;
            stripped.category = e.spec.category;
            out.push_back(std::move(stripped));
        }
    }
    return out;
}

Json ToolRegistry::list_json(Detail detail) const {
    Json out = Json::array();
    for (const auto& e : entries_) {
        if (detail == Detail::Full) {
            out.push_back(e.spec);
        } else {
            out.push_back(Json{{"name", e.spec.name}, {"category", e.spec.category}});
        }
    }
    return out;
}

const ToolSpec* ToolRegistry::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    return it == index_.end() ? nullptr : &entries_[it->second].spec;
}

const ToolSpec& ToolRegistry::describe(std::string_view name) const {
    if (const auto* spec = find(name)) return *spec;
    throw Error("UnknownTool", "no tool named '" + std::string(name) + "'");
}

std::vector<std::string> ToolRegistry::validate_args(std::string_view name, const Json& arguments) const {
    return toolbus::validate_args(describe(name), arguments);
}

const ToolHandler& ToolRegistry::handler(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) {
        throw Error("UnknownTool", "no tool named '" + std::string(name) + "'");
    }
    return entries_[it->second].handler;
}

std::vector<std::string> ToolRegistry::names() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.spec.name);
    return out;
}

}  // namespace buildops::toolbus
