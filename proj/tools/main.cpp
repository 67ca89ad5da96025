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


#include <unistd.h>

#include <atomic>
#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "buildops/cli/commands.hpp"
#include "buildops/error.hpp"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

template <typename T>
void overlay(T& target, const std::optional<T>& flag) {
    if (flag) target = *flag;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace buildops::cli;

    CLI::App app{"buildops: multi-agent orchestration over a building-energy runtime"};
    app.require_subcommand(1);

    std::string config_file;
    std::optional<std::string> cards_dir, prompts_dir, backends, cases, results_dir, mode, orch_backend, spec_backend;
    std::optional<int> parallel;
    bool trace = false;
    app.add_option("--config", config_file, "YAML or JSON config file; flags override it")->check(CLI::ExistingFile);
    app.add_option("--cards-dir", cards_dir, "Directory of agent cards");
    app.add_option("--prompts-dir", prompts_dir, "Directory of prompt templates (default: built in)");
    app.add_option("--backends", backends, "JSON list of backend specs");
    app.add_option("--cases", cases, "Benchmark cases (JSONL)");
    app.add_option("--mode", mode, "Intelligence mode: c1, c2 or d");
    app.add_option("--orchestrator-backend", orch_backend, "Backend id for the orchestrator");
    app.add_option("--specialist-backend", spec_backend, "Backend id for the specialists");
    app.add_option("--results-dir", results_dir, "Where runs, traces and snapshots go");
    app.add_option("--parallel", parallel, "Concurrent benchmark runs");
    app.add_flag("--trace", trace, "Write the session trace of every request");

    auto* serve = app.add_subcommand("serve", "Serve the runtime tools over JSON-RPC");
    std::string transport = "tcp", host = "127.0.0.1";
    int port = 8741;
    serve->add_option("--transport", transport, "tcp or stdio")->check(CLI::IsMember({"tcp", "stdio"}));
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--port", port, "TCP port (0 picks one)");

    SessionOptions session;
    std::optional<std::string> script_case;
    auto* chat = app.add_subcommand("chat", "Interactive requests through the concierge");
    auto* run = app.add_subcommand("run", "Handle one request");
    std::string request;
    run->add_option("request", request, "The request text")->required();
    for (auto* sub : {chat, run}) {
        sub->add_option("--script-case", script_case, "Play the scripted replies of this test case");
        sub->add_flag("--hr", session.hr, "Let the HR step extend the agent pool");
    }

    auto* bench = app.add_subcommand("bench", "Run the benchmark matrix");
    BenchArgs bargs;
    bench->add_option("--modes", bargs.modes, "Modes to run")->delimiter(',');
    bench->add_option("--tiers", bargs.tiers, "Tier ids; every ordered pair is run")->delimiter(',');
    bench->add_option("--pairs", bargs.pairs, "Explicit orchestrator/specialist pairs, e.g. S/M")->delimiter(',');
    bench->add_option("--only", bargs.only, "Restrict to these test ids")->delimiter(',');
    bench->add_flag("--scripted", bargs.scripted, "Use perfect scripted backends priced like each tier");
    bench->add_option("--tool-metric", bargs.tool_metric, "recall or jaccard")
        ->check(CLI::IsMember({"recall", "jaccard"}));
    bench->add_option("--out", bargs.out_dir, "Output directory (default: <results-dir>/bench)");

    auto* report = app.add_subcommand("report", "Summarize a records.jsonl file");
    std::string records_file, group_by = "mode", csv_out;
    report->add_option("records", records_file, "records.jsonl")->required()->check(CLI::ExistingFile);
    report->add_option("--group-by", group_by, "mode, pair or category")
        ->check(CLI::IsMember({"mode", "pair", "tier-pair", "category"}));
    report->add_option("--csv", csv_out, "Also write the table as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        CliConfig config;
        if (!config_file.empty()) apply_config_file(config, config_file);
        overlay(config.cards_dir, cards_dir);
        overlay(config.prompts_dir, prompts_dir);
        overlay(config.backends_file, backends);
        overlay(config.cases_file, cases);
        overlay(config.results_dir, results_dir);
        overlay(config.mode, mode);
        overlay(config.orchestrator_backend, orch_backend);
        overlay(config.specialist_backend, spec_backend);
        overlay(config.parallel, parallel);
        if (trace) config.trace = true;
        validate_config(config);
        session.script_case = script_case;

        if (*serve) {
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            return cmd_serve(config, transport, host, port, std::cout, g_stop);
        }
        if (*chat) return cmd_chat(config, session, std::cin, std::cout, isatty(STDIN_FILENO) != 0);
        if (*run) return cmd_run(config, session, request, std::cout);
        if (*bench) return cmd_bench(config, bargs, std::cout);
        if (*report) return cmd_report(records_file, group_by, csv_out, std::cout);
    } catch (const buildops::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
