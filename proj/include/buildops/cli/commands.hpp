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

#include <atomic>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace buildops::cli {

using Json = nlohmann::json;

/// Settings shared by every subcommand. Defaults, then the config file,
/// then flags.
struct CliConfig {
    std::string cards_dir = "data/cards";
    std::string prompts_dir;  // empty: built-in templates
    std::string backends_file = "data/backends.json";
    std::string cases_file = "data/cases.jsonl";
    std::string results_dir = "results";
    std::string mode = "c2";
    std::string orchestrator_backend = "XL";
    std::string specialist_backend = "M";
    int parallel = 1;
    bool trace = false;
};

void to_json(Json& j, const CliConfig& c);

/// Overlays the keys present in a YAML or JSON file. Throws
/// Error("ConfigError") on unreadable files, unknown keys or bad values.
void apply_config_file(CliConfig& config, const std::string& path);

/// Throws Error("ConfigError") when the mode is unknown or parallel < 1.
void validate_config(const CliConfig& config);

/// Writes <dir>/config_snapshot.json and returns its path.
std::string write_snapshot(const CliConfig& config, const std::string& dir, const Json& extra = Json::object());

struct SessionOptions {
    std::optional<std::string> script_case;  // play the perfect script of this test case
    bool hr = false;
};

int cmd_serve(const CliConfig& config, const std::string& transport, const std::string& host, int port,
              std::ostream& out, const std::atomic<bool>& stop);

/// One request per input line until EOF.
int cmd_chat(const CliConfig& config, const SessionOptions& session, std::istream& in, std::ostream& out,
             bool prompt);

int cmd_run(const CliConfig& config, const SessionOptions& session, const std::string& request, std::ostream& out);

struct BenchArgs {
    std::vector<std::string> modes{"c1", "c2", "d"};
    std::vector<std::string> tiers;  // all pairs of these; empty: every backend id
    std::vector<std::string> pairs;  // explicit "O/S" pairs; wins over tiers
    std::vector<std::string> only;   // restrict to these test ids
    bool scripted = false;
    std::string tool_metric = "recall";
    std::string out_dir;             // empty: <results_dir>/bench
};

/// Writes records.jsonl, summary*.csv, traces/ and the config snapshot.
int cmd_bench(const CliConfig& config, const BenchArgs& args, std::ostream& out);

int cmd_report(const std::string& records_file, const std::string& group_by, const std::string& csv_out,
               std::ostream& out);

/// 1 for problems with the invocation or its inputs, 2 otherwise.
int exit_code_for(const std::string& error_kind);

}  // namespace buildops::cli
