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


#include "buildops/agents/card.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "buildops/error.hpp"

namespace buildops::agents {

namespace {

std::string scalar(const YAML::Node& root, const char* key, bool required) {
    const YAML::Node node = root[key];
    if (!node || node.IsNull()) {
        if (required) throw Error("SchemaError", std::string("agent card is missing '") + key + "'");
        return {};
    }
    if (!node.IsScalar()) throw Error("SchemaError", std::string("'") + key + "' must be a scalar");
    return node.as<std::string>();
}

std::vector<std::string> sequence(const YAML::Node& root, const char* key, bool required) {
    const YAML::Node node = root[key];
    if (!node || node.IsNull()) {
        if (required) throw Error("SchemaError", std::string("agent card is missing '") + key + "'");
        return {};
    }
    if (!node.IsSequence()) throw Error("SchemaError", std::string("'") + key + "' must be a list");
    std::vector<std::string> out;
    for (const auto& item : node) {
        if (!item.IsScalar()) throw Error("SchemaError", std::string("'") + key + "' entries must be text");
        out.push_back(item.as<std::string>());
    }
    return out;
}

void emit_list(YAML::Emitter& out, const char* key, const std::vector<std::string>& items) {
    out << YAML::Key << key << YAML::Value << YAML::BeginSeq;
    for (const auto& item : items) out << YAML::DoubleQuoted << item;
    out << YAML::EndSeq;
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

void render_params(std::ostringstream& out, const std::vector<toolbus::ParamSpec>& params, int depth) {
    const std::string pad(static_cast<std::size_t>(2 * depth + 2), ' ');
    for (const auto& p : params) {
        out << pad << "- " << p.name << " (" << toolbus::to_string(p.kind) << ", "
            << (p.required ? "required" : "optional") << ")";
        if (!p.description.empty()) out << ": " << p.description;
        if (!p.enum_values.empty()) out << " [one of: " << join(p.enum_values, ", ") << "]";
        if (p.default_value) out << " [default: " << p.default_value->dump() << "]";
        out << "\n";
        if (!p.fields.empty()) render_params(out, p.fields, depth + 1);
    }
}

}  // namespace

bool AgentCard::allows(const std::string& tool) const {
    return std::find(available_tools.begin(), available_tools.end(), tool) != available_tools.end();
}

AgentCard load_agent_card(const std::string& yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw Error("ParseError", std::string("agent card: ") + e.what());
    }
    if (!root.IsMap()) throw Error("ParseError", "agent card must be a YAML mapping");
    AgentCard card;
    try {
        card.agent_id = scalar(root, "agent_id", true);
        card.name = scalar(root, "name", true);
        card.role = scalar(root, "role", true);
        card.description = scalar(root, "description", false);
        std::string model = scalar(root, "model", false);
        if (!model.empty()) card.model = model;
        if (root["temperature"] && !root["temperature"].IsNull()) {
            try {
                card.temperature = root["temperature"].as<double>();
            } catch (const YAML::Exception&) {
                throw Error("SchemaError", "temperature must be a number");
            }
        }
        card.capabilities = sequence(root, "capabilities", false);
        card.available_tools = sequence(root, "available_tools", true);
        card.example_tasks = sequence(root, "example_tasks", false);
        card.constraints = sequence(root, "constraints", false);
    } catch (const YAML::Exception& e) {
        throw Error("SchemaError", std::string("agent card: ") + e.what());
    }
    if (card.agent_id.empty()) throw Error("SchemaError", "agent_id is empty");
    if (!std::isfinite(card.temperature) || card.temperature < 0.0 || card.temperature > 2.0) {
        throw Error("SchemaError", "agent '" + card.agent_id + "': temperature must lie in [0, 2]");
    }
    std::set<std::string> seen;
    for (const auto& t : card.available_tools) {
        if (!seen.insert(t).second) {
            throw Error("SchemaError", "agent '" + card.agent_id + "' lists tool '" + t + "' twice");
        }
    }
    return card;
}

AgentCard load_agent_card_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("ParseError", "cannot read agent card '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return load_agent_card(text.str());
    } catch (const Error& e) {
        throw Error(e.kind(), path + ": " + std::string(e.what()).substr(e.kind().size() + 2));
    }
}

std::string dump_agent_card(const AgentCard& card) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "agent_id" << YAML::Value << YAML::DoubleQuoted << card.agent_id;
    out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << card.name;
    out << YAML::Key << "role" << YAML::Value << YAML::DoubleQuoted << card.role;
    out << YAML::Key << "description" << YAML::Value << YAML::DoubleQuoted << card.description;
    out << YAML::Key << "model" << YAML::Value << YAML::DoubleQuoted << card.model;
    out << YAML::Key << "temperature" << YAML::Value << card.temperature;
    emit_list(out, "capabilities", card.capabilities);
    emit_list(out, "available_tools", card.available_tools);
    emit_list(out, "example_tasks", card.example_tasks);
    emit_list(out, "constraints", card.constraints);
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

std::vector<AgentCard> load_cards_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw Error("ParseError", "cards directory '" + dir + "' does not exist");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto ext = entry.path().extension();
        if (entry.is_regular_file() && (ext == ".yaml" || ext == ".yml")) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<AgentCard> cards;
    for (const auto& f : files) cards.push_back(load_agent_card_file(f.string()));
    return cards;
}

std::string save_agent_card(const AgentCard& card, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const fs::path path = fs::path(dir) / (card.agent_id + ".yaml");
    std::ofstream out(path);
    if (!out) throw Error("InvalidArgument", "cannot write agent card '" + path.string() + "'");
    out << dump_agent_card(card);
    return path.string();
}

void to_json(Json& j, const AgentCard& c) {
    j = Json{{"agent_id", c.agent_id},
             {"name", c.name},
             {"role", c.role},
             {"description", c.description},
             {"model", c.model},
             {"temperature", c.temperature},
             {"capabilities", c.capabilities},
             {"available_tools", c.available_tools},
             {"example_tasks", c.example_tasks},
             {"constraints", c.constraints}};
}

void AgentPool::add(AgentCard card, const toolbus::ToolRegistry& registry) {
    if (find(card.agent_id)) throw Error("DuplicateAgentId", "agent '" + card.agent_id + "' is already in the pool");
    for (const auto& t : card.available_tools) {
        if (!registry.contains(t)) {
            throw Error("UnknownToolInCard", "agent '" + card.agent_id + "' lists unknown tool '" + t + "'");
        }
    }
    cards_.push_back(std::move(card));
}

void AgentPool::extend_tools(const std::string& agent_id, const std::vector<std::string>& tools,
                             const toolbus::ToolRegistry& registry) {
    for (const auto& t : tools) {
        if (!registry.contains(t)) {
            throw Error("UnknownToolInCard", "agent '" + agent_id + "' cannot take unknown tool '" + t + "'");
        }
    }
    for (auto& c : cards_) {
        if (c.agent_id != agent_id) continue;
        for (const auto& t : tools) {
            if (!c.allows(t)) c.available_tools.push_back(t);
        }
        return;
    }
    throw Error("UnknownId", "no agent '" + agent_id + "' in the pool");
}

const AgentCard* AgentPool::find(const std::string& agent_id) const {
    for (const auto& c : cards_) {
        if (c.agent_id == agent_id) return &c;
    }
    return nullptr;
}

const AgentCard& AgentPool::get(const std::string& agent_id) const {
    if (const auto* c = find(agent_id)) return *c;
    throw Error("UnknownId", "no agent '" + agent_id + "' in the pool");
}

std::vector<std::string> AgentPool::owners(const std::string& tool) const {
    std::vector<std::string> out;
    for (const auto& c : cards_) {
        if (c.allows(tool)) out.push_back(c.agent_id);
    }
    return out;
}

std::vector<std::string> AgentPool::unassigned_tools(const toolbus::ToolRegistry& registry) const {
    std::vector<std::string> out;
    for (const auto& name : registry.names()) {
        if (owners(name).empty()) out.push_back(name);
    }
    return out;
}

std::string AgentPool::brief_summary() const {
    std::ostringstream out;
    for (const auto& c : cards_) {
        out << "\n- " << c.agent_id << " (" << c.name << "): " << (c.description.empty() ? c.role : c.description);
    }
    return out.str();
}

std::string AgentPool::minimal_summary() const {
    std::ostringstream out;
    for (const auto& c : cards_) {
        out << "\n- " << c.agent_id << " (" << c.name << "): tools = " << join(c.available_tools, ", ");
    }
    return out.str();
}

std::string AgentPool::full_summary(const toolbus::ToolRegistry& registry) const {
    std::ostringstream out;
    for (const auto& c : cards_) {
        out << "\n\n### " << c.agent_id << " (" << c.name << ")\n";
        out << "Role: " << c.role << "\n";
        if (!c.description.empty()) out << "Description: " << c.description << "\n";
        if (!c.capabilities.empty()) {
            out << "Capabilities:\n";
            for (const auto& cap : c.capabilities) out << "- " << cap << "\n";
        }
        if (!c.constraints.empty()) {
            out << "Constraints:\n";
            for (const auto& k : c.constraints) out << "- " << k << "\n";
        }
        out << "Tools:\n";
        for (const auto& t : c.available_tools) out << render_tool_schema(registry.describe(t));
    }
    return out.str();
}

std::string AgentPool::capability_summary() const {
    std::ostringstream out;
    for (const auto& c : cards_) {
        out << "\n- " << c.agent_id << " (" << c.name << "): " << c.role;
        if (!c.capabilities.empty()) out << ". Capabilities: " << join(c.capabilities, "; ");
        out << ". Tools: " << join(c.available_tools, ", ");
    }
    return out.str();
}

AgentPool instantiate_pool(const std::vector<AgentCard>& cards, const toolbus::ToolRegistry& registry) {
    AgentPool pool;
    for (const auto& c : cards) pool.add(c, registry);
    return pool;
}

std::string schema_marker(const std::string& tool) { return "[tool: " + tool + "]"; }

std::string render_tool_schema(const toolbus::ToolSpec& spec) {
    std::ostringstream out;
    out << schema_marker(spec.name) << " " << spec.description << "\n";
    if (spec.params.empty()) {
        out << "  (no parameters)\n";
    } else {
        render_params(out, spec.params, 0);
    }
    return out.str();
}

}  // namespace buildops::agents
