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


#include "buildops/cli/commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <thread>

#include <unistd.h>
#include <yaml-cpp/yaml.h>

#include "buildops/bench/harness.hpp"
#include "buildops/error.hpp"
#include "buildops/runtime/tools.hpp"
#include "buildops/toolbus/rpc.hpp"

namespace buildops::cli {

namespace fs = std::filesystem;
using orchestrator::Mode;

void to_json(Json& j, const CliConfig& c) {
    j = Json{{"cards_dir", c.cards_dir},
             {"prompts_dir", c.prompts_dir},
             {"backends", c.backends_file},
             {"cases", c.cases_file},
             {"results_dir", c.results_dir},
             {"mode", c.mode},
             {"orchestrator_backend", c.orchestrator_backend},
             {"specialist_backend", c.specialist_backend},
             {"parallel", c.parallel},
             {"trace", c.trace}};
}

void apply_config_file(CliConfig& c, const std::string& path) {
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const std::exception& e) {
        throw Error("ConfigError", "cannot read " + path + ": " + e.what());
    }
    if (root.IsNull()) return;
    if (!root.IsMap()) throw Error("ConfigError", path + ": expected a mapping");
    for (const auto& kv : root) {
        const auto key = kv.first.as<std::string>();
        const auto& v = kv.second;
        try {
            if (key == "cards_dir") c.cards_dir = v.as<std::string>();
            else if (key == "prompts_dir") c.prompts_dir = v.as<std::string>();
            else if (key == "backends") c.backends_file = v.as<std::string>();
            else if (key == "cases") c.cases_file = v.as<std::string>();
            else if (key == "results_dir") c.results_dir = v.as<std::string>();
            else if (key == "mode") c.mode = v.as<std::string>();
            else if (key == "orchestrator_backend") c.orchestrator_backend = v.as<std::string>();
            else if (key == "specialist_backend") c.specialist_backend = v.as<std::string>();
            else if (key == "parallel") c.parallel = v.as<int>();
            else if (key == "trace") c.trace = v.as<bool>();
            else throw Error("ConfigError", path + ": unknown key '" + key + "'");
        } catch (const YAML::Exception& e) {
            throw Error("ConfigError", path + ": bad value for '" + key + "'");
        }
    }
}

void validate_config(const CliConfig& c) {
    try {
        orchestrator::mode_from_string(c.mode);
    } catch (const Error&) {
        throw Error("ConfigError", "mode must be one of c1, c2, d (got '" + c.mode + "')");
    }
    if (c.parallel < 1) throw Error("ConfigError", "parallel must be at least 1");
}

std::string write_snapshot(const CliConfig& config, const std::string& dir, const Json& extra) {
    fs::create_directories(dir);
    Json j = config;
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    const auto path = (fs::path(dir) / "config_snapshot.json").string();
    std::ofstream(path) << j.dump(2) << "\n";
    return path;
}

int exit_code_for(const std::string& kind) {
    static const std::set<std::string> usage{"ConfigError", "BadCaseFile", "BadRecordFile", "InvalidArgument",
                                             "UnknownBackend", "UnknownPrompt", "ParseError", "SchemaError",
                                             "DuplicateAgentId", "UnknownToolInCard", "DuplicateId", "PortInUse",
                                             "UnknownCase"};
    return usage.count(kind) ? 1 : 2;
}

namespace {

agents::PromptSet prompts_for(const CliConfig& c) {
    return c.prompts_dir.empty() ? agents::PromptSet::defaults() : agents::PromptSet::load_dir(c.prompts_dir);
}

std::vector<llm::BackendSpec> tier_specs(const CliConfig& c) {
    std::ifstream f(c.backends_file);
    if (!f) throw Error("ConfigError", "cannot open backends file " + c.backends_file);
    std::vector<llm::BackendSpec> specs;
    try {
        for (const auto& j : Json::parse(f)) specs.push_back(j.get<llm::BackendSpec>());
    } catch (const Json::exception& e) {
        throw Error("ConfigError", c.backends_file + ": " + e.what());
    }
    return specs;
}

bench::TestCase find_case(const CliConfig& c, const std::string& id) {
    for (auto& tc : bench::load_cases(c.cases_file)) {
        if (tc.test_id == id) return tc;
    }
    throw Error("UnknownCase", "no test case '" + id + "' in " + c.cases_file);
}

struct Session {
    std::shared_ptr<runtime::Workspace> ws;
    std::shared_ptr<toolbus::ToolRegistry> registry;
    std::unique_ptr<toolbus::ToolBus> bus;
    std::shared_ptr<llm::Backend> agent_backend;
    std::unique_ptr<orchestrator::Orchestrator> orch;
    int turns = 0;
};

Session make_session(const CliConfig& c, const SessionOptions& options) {
    validate_config(c);
    Session s;
    s.ws = std::make_shared<runtime::Workspace>(fs::path(c.results_dir));
    s.registry = runtime::make_runtime_registry(s.ws);
    s.bus = std::make_unique<toolbus::ToolBus>(s.registry);
    const Mode mode = orchestrator::mode_from_string(c.mode);

    std::shared_ptr<llm::Backend> orch_backend;
    if (options.script_case) {
        const auto tc = find_case(c, *options.script_case);
        auto factory = bench::scripted_factory(tier_specs(c));
        orch_backend = factory(tc, mode, llm::RoleTag::Orchestrator, c.orchestrator_backend);
        s.agent_backend = factory(tc, mode, llm::RoleTag::Agent, c.specialist_backend);
    } else {
        auto registry = llm::BackendRegistry::from_json(Json(tier_specs(c)));
        orch_backend = registry.get(c.orchestrator_backend);
        s.agent_backend = registry.get(c.specialist_backend);
    }

    orchestrator::OrchestratorOptions o;
    o.mode = mode;
    o.hr_enabled = options.hr;
    o.cards_dir = options.hr ? c.cards_dir : "";
    auto pool = agents::instantiate_pool(agents::load_cards_dir(c.cards_dir), *s.registry);
    auto agent = s.agent_backend;
    s.orch = std::make_unique<orchestrator::Orchestrator>(
        prompts_for(c), orch_backend, [agent](const agents::AgentCard&) -> llm::Backend& { return *agent; }, *s.bus,
        s.registry, std::move(pool), o);
    return s;
}

void turn(const CliConfig& c, Session& s, const std::string& request, std::ostream& out) {
    auto trace = s.orch->handle(request, bench::runtime_context(*s.ws));
    out << trace.final_answer << "\n";
    ++s.turns;
    if (c.trace) {
        const auto path = fs::path(c.results_dir) / "traces" / ("session_turn_" + std::to_string(s.turns) + ".json");
        orchestrator::save_trace(trace, path.string());
        out << "trace: " << path.string() << "\n";
    }
    out.flush();
}

}  // namespace

int cmd_serve(const CliConfig& c, const std::string& transport, const std::string& host, int port, std::ostream& out,
              const std::atomic<bool>& stop) {
    auto ws = std::make_shared<runtime::Workspace>(fs::path(c.results_dir));
    auto registry = runtime::make_runtime_registry(ws);
    toolbus::ToolBus bus(registry);
    toolbus::RpcDispatcher dispatcher(bus);
    if (transport == "stdio") {
        std::cerr << "serving " << registry->size() << " tools on stdio" << std::endl;
        toolbus::serve_stdio(dispatcher, STDIN_FILENO, STDOUT_FILENO);
        return 0;
    }
    if (transport != "tcp") throw Error("InvalidArgument", "transport must be tcp or stdio");
    if (port < 0 || port > 65535) throw Error("InvalidArgument", "port out of range");
    toolbus::TcpServer server(dispatcher, host, std::uint16_t(port));
    server.start();
    out << "serving " << registry->size() << " tools on " << host << ":" << server.port() << std::endl;
    while (!stop.load()) std::this_thread::sleep_for(std::chrono::milliseconds(50));
    server.stop();
    return 0;
}

int cmd_chat(const CliConfig& c, const SessionOptions& options, std::istream& in, std::ostream& out, bool prompt) {
    auto s = make_session(c, options);
    write_snapshot(c, c.results_dir, Json{{"command", "chat"}});
    std::string line;
    while (true) {
        if (prompt) out << "> " << std::flush;
        if (!std::getline(in, line)) break;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        turn(c, s, line, out);
    }
    if (prompt) out << "\n";
    return 0;
}

int cmd_run(const CliConfig& c, const SessionOptions& options, const std::string& request, std::ostream& out) {
    auto s = make_session(c, options);
    write_snapshot(c, c.results_dir, Json{{"command", "run"}, {"request", request}});
    turn(c, s, request, out);
    return 0;
}

int cmd_bench(const CliConfig& c, const BenchArgs& args, std::ostream& out) {
    validate_config(c);
    auto cases = bench::load_cases(c.cases_file);
    if (!args.only.empty()) {
        std::vector<bench::TestCase> kept;
        for (const auto& id : args.only) {
            auto it = std::find_if(cases.begin(), cases.end(), [&](const auto& tc) { return tc.test_id == id; });
            if (it == cases.end()) throw Error("UnknownCase", "no test case '" + id + "'");
            kept.push_back(*it);
        }
        cases = std::move(kept);
    }
    std::vector<Mode> modes;
    for (const auto& m : args.modes) modes.push_back(orchestrator::mode_from_string(m));

    const auto specs = tier_specs(c);
    std::vector<bench::TierPair> pairs;
    if (!args.pairs.empty()) {
        for (const auto& p : args.pairs) {
            const auto slash = p.find('/');
            if (slash == std::string::npos) throw Error("InvalidArgument", "pair must look like O/S: " + p);
            pairs.push_back({p.substr(0, slash), p.substr(slash + 1)});
        }
    } else {
        auto tiers = args.tiers;
        if (tiers.empty()) {
            for (const auto& s : specs) tiers.push_back(s.backend_id);
        }
        pairs = bench::all_pairs(tiers);
    }

    bench::BenchSetup setup;
    setup.cards = agents::load_cards_dir(c.cards_dir);
    setup.prompts = prompts_for(c);
    setup.tool_metric = bench::tool_metric_from_string(args.tool_metric);
    if (args.scripted) {
        setup.backends = bench::scripted_factory(specs);
    } else {
        auto registry = std::make_shared<llm::BackendRegistry>(llm::BackendRegistry::from_json(Json(specs)));
        for (const auto& p : pairs) {
            registry->get(p.orchestrator);
            registry->get(p.specialist);
        }
        setup.backends = bench::registry_factory(registry);
    }
    const std::string dir = args.out_dir.empty() ? (fs::path(c.results_dir) / "bench").string() : args.out_dir;
    setup.out_dir = dir;
    setup.write_traces = true;

    Json pair_labels = Json::array();
    for (const auto& p : pairs) pair_labels.push_back(p.label());
    write_snapshot(c, dir,
                   Json{{"command", "bench"},
                        {"modes", args.modes},
                        {"pairs", pair_labels},
                        {"scripted", args.scripted},
                        {"tool_metric", args.tool_metric},
                        {"cases_run", cases.size()}});

    const auto records = bench::run_matrix(cases, modes, pairs, setup, c.parallel);
    bench::write_records(records, (fs::path(dir) / "records.jsonl").string());
    const auto by_mode = bench::aggregate(records, bench::GroupBy::Mode);
    std::ofstream(fs::path(dir) / "summary.csv") << bench::summary_csv(by_mode, "Mode");
    std::ofstream(fs::path(dir) / "summary_pair.csv")
        << bench::summary_csv(bench::aggregate(records, bench::GroupBy::Pair), "Tier pair");
    std::ofstream(fs::path(dir) / "summary_category.csv")
        << bench::summary_csv(bench::aggregate(records, bench::GroupBy::Category), "Category");

    long failed = 0;
    for (const auto& r : records) failed += !r.ok();
    out << records.size() << " runs (" << failed << " with errors), tool accuracy metric: " << args.tool_metric << "\n"
        << bench::summary_table(by_mode, "Mode") << "results: " << dir << "\n";
    return 0;
}

int cmd_report(const std::string& records_file, const std::string& group_by, const std::string& csv_out,
               std::ostream& out) {
    const auto records = bench::load_records(records_file);
    const auto by = bench::group_by_from_string(group_by);
    const std::string header = by == bench::GroupBy::Mode ? "Mode" : by == bench::GroupBy::Pair ? "Tier pair" : "Category";
    const auto rows = bench::aggregate(records, by);
    out << bench::summary_table(rows, header);
    if (!csv_out.empty()) {
        std::ofstream f(csv_out);
        if (!f) throw Error("IOError", "cannot write " + csv_out);
        f << bench::summary_csv(rows, header);
    }
    return 0;
}

}  // namespace buildops::cli
