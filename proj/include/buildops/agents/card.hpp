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
#include <optional>
#include <string>
#include <vector>

#include "buildops/toolbus/registry.hpp"

namespace buildops::agents {

using Json = nlohmann::json;

struct AgentCard {
    std::string agent_id;
    std::string name;
    std::string role;
    std::string description;
    std::string model = "default";
    double temperature = 0.3;
    std::vector<std::string> capabilities;
    std::vector<std::string> available_tools;
    std::vector<std::string> example_tasks;
    std::vector<std::string> constraints;

    bool allows(const std::string& tool) const;
    bool operator==(const AgentCard&) const = default;
};

/// Parses one YAML card. Throws Error("ParseError") for malformed YAML and
/// Error("SchemaError") for missing agent_id/name/role/available_tools, wrong
/// field types or a temperature outside [0, 2].
AgentCard load_agent_card(const std::string& yaml_text);
AgentCard load_agent_card_file(const std::string& path);

/// YAML in the card field order; load_agent_card(dump_agent_card(c)) == c.
std::string dump_agent_card(const AgentCard& card);

/// Every *.yaml / *.yml file in `dir`, sorted by file name.
std::vector<AgentCard> load_cards_dir(const std::string& dir);

/// Writes <dir>/<agent_id>.yaml and returns the path.
std::string save_agent_card(const AgentCard& card, const std::string& dir);

void to_json(Json& j, const AgentCard& card);

/// Declaration-ordered set of cards, checked against a tool registry.
class AgentPool {
public:
    AgentPool() = default;

    /// Throws Error("DuplicateAgentId") or Error("UnknownToolInCard").
    void add(AgentCard card, const toolbus::ToolRegistry& registry);
    /// Adds tools to an existing card. Throws Error("UnknownId") or
    /// Error("UnknownToolInCard").
    void extend_tools(const std::string& agent_id, const std::vector<std::string>& tools,
                      const toolbus::ToolRegistry& registry);

    const AgentCard* find(const std::string& agent_id) const;
    /// Throws Error("UnknownId").
    const AgentCard& get(const std::string& agent_id) const;
    const std::vector<AgentCard>& cards() const { return cards_; }
    std::size_t size() const { return cards_.size(); }
    bool empty() const { return cards_.empty(); }

    /// Agent ids whose whitelist includes `tool`.
    std::vector<std::string> owners(const std::string& tool) const;
    /// Registry tools no card lists, in registry order.
    std::vector<std::string> unassigned_tools(const toolbus::ToolRegistry& registry) const;

    /// One-line identity per agent: "- id (name): description".
    std::string brief_summary() const;
    /// Identity plus tool names, no parameter detail.
    std::string minimal_summary() const;
    /// Role, capabilities and the full schema block of every tool.
    std::string full_summary(const toolbus::ToolRegistry& registry) const;
    /// Identity, capabilities and tool names (used when assessing the pool).
    std::string capability_summary() const;

private:
    std::vector<AgentCard> cards_;
};

/// Throws like AgentPool::add.
AgentPool instantiate_pool(const std::vector<AgentCard>& cards, const toolbus::ToolRegistry& registry);

/// Schema block for one tool. Every block opens with "[tool: <name>]" so
/// prompts can be scanned for which schemas they carry.
std::string render_tool_schema(const toolbus::ToolSpec& spec);
std::string schema_marker(const std::string& tool);

}  // namespace buildops::agents
