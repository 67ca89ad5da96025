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


#include "buildops/bench/cases.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "buildops/agents/adherence.hpp"
#include "buildops/agents/card.hpp"
#include "buildops/error.hpp"
#include "buildops/toolbus/registry.hpp"

namespace buildops::bench {

std::vector<Call> TestCase::expected_calls() const {
    std::vector<Call> out;
    for (const auto& s : expected_steps) {
        for (const auto& t : s.required_tools) {
            out.push_back({t, s.expected_parameters.contains(t) ? s.expected_parameters.at(t) : Json::object()});
        }
    }
    return out;
}

std::vector<StepSig> TestCase::expected_signature() const {
    std::vector<StepSig> out;
    for (const auto& s : expected_steps) {
        out.push_back({s.agent_id, {s.required_tools.begin(), s.required_tools.end()}});
    }
    return out;
}

bool TestCase::has_expected_params() const {
    for (const auto& c : expected_calls()) {
        if (!agents::flatten_params(c.parameters).empty()) return true;
    }
    return false;
}

void to_json(Json& j, const ExpectedStep& s) {
    j = Json{{"step_order", s.step_order},
             {"agent_id", s.agent_id},
             {"required_tools", s.required_tools},
             {"expected_parameters", s.expected_parameters}};
}

void from_json(const Json& j, ExpectedStep& s) {
    s.step_order = j.at("step_order").get<int>();
    s.agent_id = j.at("agent_id").get<std::string>();
    s.required_tools = j.at("required_tools").get<std::vector<std::string>>();
    s.expected_parameters = j.value("expected_parameters", Json::object());
    if (!s.expected_parameters.is_object()) throw Error("InvalidCase", "expected_parameters must be an object");
}

void to_json(Json& j, const TestCase& c) {
    j = Json{{"test_id", c.test_id},
             {"name", c.name},
             {"category", c.category},
             {"request", c.request},
             {"expected_agents", c.expected_agents},
             {"expected_tools", c.expected_tools},
             {"expected_steps", c.expected_steps},
             {"description", c.description}};
}

void from_json(const Json& j, TestCase& c) {
    c.test_id = j.at("test_id").get<std::string>();
    c.name = j.value("name", c.test_id);
    c.category = j.at("category").get<std::string>();
    c.request = j.at("request").get<std::string>();
    c.expected_agents = j.at("expected_agents").get<std::vector<std::string>>();
    c.expected_tools = j.at("expected_tools").get<std::vector<std::string>>();
    c.expected_steps = j.at("expected_steps").get<std::vector<ExpectedStep>>();
    c.description = j.value("description", "");
}

void validate_case(const TestCase& c) {
    auto fail = [&](const std::string& why) { throw Error("InvalidCase", c.test_id + ": " + why); };
    if (std::find(categories().begin(), categories().end(), c.category) == categories().end()) {
        fail("unknown category '" + c.category + "'");
    }
    if (c.test_id.rfind(c.category + "_", 0) != 0) fail("test_id does not start with " + c.category + "_");
    if (c.expected_steps.empty()) fail("no expected steps");
    const std::set<std::string> agents(c.expected_agents.begin(), c.expected_agents.end());
    const std::set<std::string> tools(c.expected_tools.begin(), c.expected_tools.end());
    int last = 0;
    for (const auto& s : c.expected_steps) {
        if (s.step_order < 1 || s.step_order <= last) fail("step_order must increase from 1");
        last = s.step_order;
        if (!agents.count(s.agent_id)) fail("step agent " + s.agent_id + " missing from expected_agents");
        if (s.required_tools.empty()) fail("step " + std::to_string(s.step_order) + " has no tools");
        for (const auto& t : s.required_tools) {
            if (!tools.count(t)) fail("tool " + t + " missing from expected_tools");
        }
        for (auto it = s.expected_parameters.begin(); it != s.expected_parameters.end(); ++it) {
            if (std::find(s.required_tools.begin(), s.required_tools.end(), it.key()) == s.required_tools.end()) {
                fail("parameters given for tool " + it.key() + " outside required_tools");
            }
        }
    }
}

void validate_case(const TestCase& c, const agents::AgentPool& pool, const toolbus::ToolRegistry& registry) {
    validate_case(c);
    auto fail = [&](const std::string& why) { throw Error("InvalidCase", c.test_id + ": " + why); };
    for (const auto& s : c.expected_steps) {
        const auto* card = pool.find(s.agent_id);
        if (!card) fail("unknown agent " + s.agent_id);
        for (const auto& t : s.required_tools) {
            if (!registry.contains(t)) fail("unknown tool " + t);
            if (!card->allows(t)) fail(s.agent_id + " does not own " + t);
            if (!s.expected_parameters.contains(t)) continue;
            const auto spec = registry.describe(t);
            for (auto it = s.expected_parameters.at(t).begin(); it != s.expected_parameters.at(t).end(); ++it) {
                bool known = false;
                for (const auto& p : spec.params) known = known || p.name == it.key();
                if (!known) fail(t + " has no parameter " + it.key());
            }
        }
    }
}

std::vector<TestCase> parse_cases(const std::string& jsonl) {
    std::vector<TestCase> out;
    std::set<std::string> ids;
    std::istringstream in(jsonl);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            auto c = Json::parse(line).get<TestCase>();
            validate_case(c);
            if (!ids.insert(c.test_id).second) throw Error("InvalidCase", "duplicate test_id " + c.test_id);
            out.push_back(std::move(c));
        } catch (const std::exception& e) {
            throw Error("BadCaseFile", std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

std::vector<TestCase> load_cases(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("BadCaseFile", "0: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_cases(ss.str());
}

}  // namespace buildops::bench
