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

#include <memory>
#include <string>
#include <vector>

#include "buildops/runtime/workspace.hpp"
#include "buildops/toolbus/registry.hpp"

namespace buildops::runtime {

/// Registers the 61 runtime tools, in catalog order, against `workspace`.
void register_runtime_tools(toolbus::ToolRegistry& registry, std::shared_ptr<Workspace> workspace);

/// Fresh registry holding the runtime tools.
std::shared_ptr<toolbus::ToolRegistry> make_runtime_registry(std::shared_ptr<Workspace> workspace);

/// Tool name -> (entity, verb) mapping of the catalog.
struct ToolEntity {
    std::string tool;
    std::string entity;
    std::string verb;
};
const std::vector<ToolEntity>& tool_entity_table();

/// The 11 category names, in catalog order.
const std::vector<std::string>& tool_categories();

}  // namespace buildops::runtime
