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

#include "buildops/runtime/workspace.hpp"

#include <algorithm>
#include <fstream>

#include "buildops/error.hpp"

namespace buildops::runtime {

namespace fs = std::filesystem;

Workspace::Workspace(fs::path dir) : results_dir(std::move(dir)) {
    configs["reference"] = reference_configuration("reference");
    active_config_id = "reference";
    environments["default"] = EnvironmentSettings{};
}

Configuration& Workspace::active() {
    if (active_config_id.empty() || !configs.count(active_config_id)) {
        throw Error("NoActiveConfig", "no active configuration; create one or call config_set_active");
    }
    return configs.at(active_config_id);
}

Configuration& Workspace::config(const std::string& config_id) {
    auto it = configs.find(config_id);
    if (it == configs.end()) throw Error("UnknownId", "no configuration '" + config_id + "'");
    return it->second;
}

Cluster& Workspace::resolve_cluster(const std::optional<std::string>& cluster_id,
                                    const std::function<bool(const Cluster&)>& holds) {
    auto& clusters = active().clusters;
    if (cluster_id && !cluster_id->empty()) {
        auto it = clusters.find(*cluster_id);
        if (it == clusters.end()) {
            throw Error("UnknownId", "no cluster '" + *cluster_id + "' in configuration '" + active_config_id + "'");
        }
        return it->second;
    }
    if (holds) {
        for (auto& [id, c] : clusters) {
            if (holds(c)) return c;
        }
    }
    auto sel = selection.find("cluster");
    if (sel != selection.end() && clusters.count(sel->second)) return clusters.at(sel->second);
    if (clusters.size() == 1) return clusters.begin()->second;
    if (clusters.empty()) {
        throw Error("UnknownId", "configuration '" + active_config_id + "' has no clusters");
    }
    throw Error("AmbiguousCluster", "several clusters exist; pass cluster_id or call cluster_select");
}

void Workspace::mutate(Cluster& cluster, const std::function<void(Cluster&)>& fn) {
    const auto before = validate_cluster(cluster);
    Cluster next = cluster;
    fn(next);
    std::vector<std::string> fresh;
    for (const auto& e : validate_cluster(next)) {
        if (std::find(before.begin(), before.end(), e) == before.end()) fresh.push_back(e);
    }
    if (!fresh.empty()) {
        std::string msg;
        bool dangling = false;
        for (std::size_t i = 0; i < fresh.size(); ++i) {
            msg += (i ? "; " : "") + fresh[i];
            if (fresh[i].find("missing") != std::string::npos) dangling = true;
        }
        throw Error(dangling ? "DanglingReference" : "ValidationFailed", msg);
    }
    cluster = std::move(next);
}

const SimulationResult& Workspace::simulate(const RunRequest& req) {
    Configuration& cfg = req.config_id ? config(*req.config_id) : active();
    const std::string saved_active = active_config_id;
    active_config_id = cfg.config_id;
    Cluster* cluster = nullptr;
    try {
        cluster = &resolve_cluster(req.cluster_id);
    } catch (...) {
        active_config_id = saved_active;
        throw;
    }
    active_config_id = saved_active;

    const std::string env_id = req.environment_id.value_or(selected_environment);
    auto env_it = environments.find(env_id);
    if (env_it == environments.end()) throw Error("UnknownId", "no environment '" + env_id + "'");
    EnvironmentSettings settings = env_it->second;
    if (req.horizon_hours) settings.horizon_hours = *req.horizon_hours;
    if (req.timestep_s) settings.timestep_s = *req.timestep_s;

    const std::string run_id = req.run_id.value_or("run_" + std::to_string(++run_counter));
    if (run_id.empty() || run_id.find('/') != std::string::npos || run_id.find("..") != std::string::npos) {
        throw Error("InvalidArgument", "invalid run_id '" + run_id + "'");
    }
    SimulationResult result = run_simulation(*cluster, settings, run_id, cfg.config_id);
    runs[run_id] = std::move(result);
    if (!results_dir.empty()) save_run(run_id);
    return runs.at(run_id);
}

const SimulationResult& Workspace::run(const std::string& run_id) {
    auto it = runs.find(run_id);
    if (it != runs.end()) return it->second;
    if (!results_dir.empty() && run_id.find('/') == std::string::npos) {
        const fs::path p = results_dir / "runs" / (run_id + ".json");
        std::ifstream in(p);
        if (in) {
            Json j = Json::parse(in);
            return runs[run_id] = j.get<SimulationResult>();
        }
    }
    throw Error("UnknownRun", "no simulation run '" + run_id + "'");
}

std::vector<std::string> Workspace::save_run(const std::string& run_id, const fs::path& dir) {
    const auto& r = run(run_id);
    const fs::path base = dir.empty() ? results_dir : dir;
    if (base.empty()) throw Error("InvalidArgument", "no results directory configured");
    const fs::path runs_dir = base / "runs";
    fs::create_directories(runs_dir);
    const fs::path json_path = runs_dir / (run_id + ".json");
    const fs::path csv_path = runs_dir / (run_id + "_summary.csv");
    {
        std::ofstream out(json_path);
        out << Json(r).dump() << '\n';
        if (!out) throw Error("IoError", "cannot write '" + json_path.string() + "'");
    }
    {
        std::ofstream out(csv_path);
        out << summary_csv(r);
        if (!out) throw Error("IoError", "cannot write '" + csv_path.string() + "'");
    }
    return {json_path.string(), csv_path.string()};
}

}  // namespace buildops::runtime
