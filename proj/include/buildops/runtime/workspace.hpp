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

#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "buildops/runtime/analysis.hpp"
#include "buildops/runtime/environment.hpp"
#include "buildops/runtime/model.hpp"

namespace buildops::runtime {

/// Session state behind the runtime tools: configurations, the active one,
/// selections, environment settings and simulation runs. One workspace per
/// session; handlers serialize on `mutex`.
struct Workspace {
    explicit Workspace(std::filesystem::path results_dir = {});

    std::mutex mutex;
    std::map<std::string, Configuration> configs;
    std::string active_config_id;
    std::map<std::string, EnvironmentSettings> environments;
    std::string selected_environment = "default";
    // entity kind ("cluster", "building", "hvac", "der", "controller") -> id
    std::map<std::string, std::string> selection;
    std::map<std::string, SimulationResult> runs;
    std::filesystem::path results_dir;  // empty keeps runs in memory only
    int run_counter = 0;

    /// Throws Error("NoActiveConfig").
    Configuration& active();
    /// Throws Error("UnknownId").
    Configuration& config(const std::string& config_id);

    /// Cluster resolution: explicit id, else the cluster holding the entity
    /// (`holds`), else the selected cluster, else the only cluster. Throws
    /// Error("UnknownId") or Error("AmbiguousCluster").
    Cluster& resolve_cluster(const std::optional<std::string>& cluster_id,
                             const std::function<bool(const Cluster&)>& holds = {});

    /// Applies `fn` to a copy of the cluster and commits it only when the
    /// change introduces no new validation errors. Throws
    /// Error("DanglingReference") or Error("ValidationFailed") otherwise.
    void mutate(Cluster& cluster, const std::function<void(Cluster&)>& fn);

    struct RunRequest {
        std::optional<std::string> run_id;
        std::optional<std::string> config_id;
        std::optional<std::string> cluster_id;
        std::optional<std::string> environment_id;
        std::optional<double> horizon_hours;
        std::optional<int> timestep_s;
    };
    /// Runs, stores and (with a results directory) persists a simulation.
    const SimulationResult& simulate(const RunRequest& request);

    /// Looks in memory, then in the results directory. Throws Error("UnknownRun").
    const SimulationResult& run(const std::string& run_id);

    /// Writes runs/<run_id>.json and runs/<run_id>_summary.csv under `dir`
    /// (default: the results directory). Returns the two paths.
    std::vector<std::string> save_run(const std::string& run_id, const std::filesystem::path& dir = {});
};

}  // namespace buildops::runtime
