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

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "buildops/agents/card.hpp"
#include "buildops/agents/prompts.hpp"
#include "buildops/bench/cases.hpp"
#include "buildops/bench/scripts.hpp"
#include "buildops/llm/backend.hpp"
#include "buildops/orchestrator/orchestrator.hpp"
#include "buildops/runtime/workspace.hpp"

namespace buildops::bench {

/// One line describing the live runtime state, handed to the planners.
std::string runtime_context(runtime::Workspace& ws);

struct TierPair {
    std::string orchestrator;
    std::string specialist;
    std::string label() const { return orchestrator + "/" + specialist; }
};

/// Every (orchestrator, specialist) combination of `tiers`, orchestrator-major.
std::vector<TierPair> all_pairs(const std::vector<std::string>& tiers);

/// Supplies the backend for one run. Called once per role per run, so
/// stateful backends (scripts) are never shared between runs.
using BackendFactory = std::function<std::shared_ptr<llm::Backend>(const TestCase&, orchestrator::Mode,
                                                                   llm::RoleTag, const std::string& tier)>;

/// Scripted backends that play the perfect script for each case, priced
/// like the named tier (from `tiers`; unknown tiers are free).
BackendFactory scripted_factory(std::vector<llm::BackendSpec> tiers, Faults faults = {});

/// Backends looked up by tier id in `registry`; the same instance serves
/// every run.
BackendFactory registry_factory(std::shared_ptr<llm::BackendRegistry> registry);

struct BenchSetup {
    std::vector<agents::AgentCard> cards;
    agents::PromptSet prompts = agents::PromptSet::defaults();
    BackendFactory backends;
    ToolMetric tool_metric = ToolMetric::Recall;
    bool parallel_steps = false;
    std::string out_dir;       // traces go to <out_dir>/traces when set
    bool write_traces = true;
};

struct RunRecord {
    std::string test_id;
    std::string category;
    std::string mode;
    std::string orchestrator_tier;
    std::string specialist_tier;

    double acc_tool = 0, acc_agent = 0, acc_plan = 0, acc_key = 0, acc_val = 0, acc_combined = 0;
    std::string tool_metric = "recall";
    bool params_scored = true;  // false when the case has no expected parameters

    double total_time_s = 0, planning_time_s = 0, execution_time_s = 0, synthesis_time_s = 0;
    long orchestrator_tokens = 0, agent_tokens = 0, total_tokens = 0;
    double orchestrator_cost = 0, agent_cost = 0, total_cost = 0;
    int llm_calls = 0;

    /// followed | tool_removal | tool_addition | parameter_modification | mixed;
    /// empty for decentralized runs.
    std::string adherence;
    std::string error;
    std::string trace_path;

    bool ok() const { return error.empty(); }
};

void to_json(Json& j, const RunRecord& r);
void from_json(const Json& j, RunRecord& r);

/// What a trace actually did, as the metrics see it.
struct ActualTrace {
    std::set<std::string> tools;
    std::set<std::string> agents;
    std::vector<StepSig> steps;
    std::vector<Call> calls;
    std::optional<agents::DeviationReport> adherence;
};

/// Skipped steps contribute nothing; every call that reached the bus counts,
/// successful or not.
ActualTrace extract_actual(const orchestrator::SessionTrace& trace);

/// Fills accuracies, timings, tokens and adherence from a finished trace.
RunRecord score_trace(const TestCase& c, const orchestrator::SessionTrace& trace, ToolMetric metric);

/// Fresh workspace, full pipeline, metrics. Never throws: a failure yields a
/// record with zero accuracies and the error text.
RunRecord run_case(const TestCase& c, orchestrator::Mode mode, const TierPair& pair, const BenchSetup& setup,
                   orchestrator::SessionTrace* trace_out = nullptr);

/// Every case x mode x pair, `parallelism` runs at a time. Records come back
/// sorted by (test_id, mode, orchestrator tier, specialist tier).
std::vector<RunRecord> run_matrix(const std::vector<TestCase>& cases, const std::vector<orchestrator::Mode>& modes,
                                  const std::vector<TierPair>& pairs, const BenchSetup& setup, int parallelism = 1);

enum class GroupBy { Mode, Pair, Category };
GroupBy group_by_from_string(const std::string& s);

struct SummaryRow {
    std::string group;
    long runs = 0;
    long errors = 0;
    std::map<std::string, double> means;  // keyed by column header
    long centralized_runs = 0;
    double adherence_rate = 0;
    std::map<std::string, double> deviation_share;  // among deviated runs
};

/// Column headers of the metric means, in report order.
const std::vector<std::string>& metric_columns();

std::vector<SummaryRow> aggregate(const std::vector<RunRecord>& records, GroupBy by);

void write_records(const std::vector<RunRecord>& records, const std::string& path);
std::vector<RunRecord> load_records(const std::string& path);
std::string summary_csv(const std::vector<SummaryRow>& rows, const std::string& group_header);
std::string summary_table(const std::vector<SummaryRow>& rows, const std::string& group_header);

}  // namespace buildops::bench
