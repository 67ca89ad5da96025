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


#include "buildops/bench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "buildops/error.hpp"
#include "buildops/runtime/tools.hpp"

namespace buildops::bench {

using orchestrator::Mode;
using orchestrator::SessionTrace;

namespace {

template <typename Map>
std::string keys_of(const Map& m) {
    std::string out;
    for (const auto& [k, v] : m) out += (out.empty() ? "" : ", ") + k;
    return out.empty() ? "none" : out;
}

}  // namespace

std::string runtime_context(runtime::Workspace& ws) {
    std::lock_guard lock(ws.mutex);
    std::ostringstream out;
    if (ws.active_config_id.empty() || !ws.configs.count(ws.active_config_id)) {
        out << "No active configuration.";
    } else {
        const auto& cfg = ws.configs.at(ws.active_config_id);
        out << "Active configuration: " << cfg.config_id << ".";
        for (const auto& [id, cl] : cfg.clusters) {
            out << " Cluster " << id << ": buildings [";
            bool first = true;
            for (const auto& [bid, b] : cl.buildings) {
                out << (first ? "" : ", ") << bid;
                first = false;
                if (!b.zones.empty()) {
                    out << " (zones";
                    for (const auto& z : b.zones) out << " " << z.zone_id;
                    out << ")";
                }
            }
            out << "], hvac [" << keys_of(cl.hvac_systems) << "], der [" << keys_of(cl.der_systems)
                << "], controllers [" << keys_of(cl.controllers) << "], disturbances [" << keys_of(cl.disturbances)
                << "].";
        }
    }
    out << " Environment: " << ws.selected_environment << ". Stored runs: " << keys_of(ws.runs) << ".";
    return out.str();
}

std::vector<TierPair> all_pairs(const std::vector<std::string>& tiers) {
    std::vector<TierPair> out;
    for (const auto& o : tiers) {
        for (const auto& s : tiers) out.push_back({o, s});
    }
    return out;
}

BackendFactory scripted_factory(std::vector<llm::BackendSpec> tiers, Faults faults) {
    return [tiers = std::move(tiers), faults = std::move(faults)](const TestCase& c, Mode mode, llm::RoleTag role,
                                                                  const std::string& tier) {
        llm::BackendSpec spec;
        for (const auto& t : tiers) {
            if (t.backend_id == tier) spec = t;
        }
        spec.backend_id = tier;
        spec.kind = llm::BackendKind::Scripted;
        const Json rules =
            role == llm::RoleTag::Orchestrator ? orchestrator_script(c, mode, faults) : agent_script(c, mode, faults);
        return std::static_pointer_cast<llm::Backend>(
            std::make_shared<llm::ScriptedBackend>(spec, llm::parse_script(rules)));
    };
}

BackendFactory registry_factory(std::shared_ptr<llm::BackendRegistry> registry) {
    return [registry](const TestCase&, Mode, llm::RoleTag, const std::string& tier) { return registry->get(tier); };
}

void to_json(Json& j, const RunRecord& r) {
    j = Json{{"test_id", r.test_id},
             {"category", r.category},
             {"mode", r.mode},
             {"orchestrator_tier", r.orchestrator_tier},
             {"specialist_tier", r.specialist_tier},
             {"acc_tool", r.acc_tool},
             {"acc_agent", r.acc_agent},
             {"acc_plan", r.acc_plan},
             {"acc_key", r.acc_key},
             {"acc_val", r.acc_val},
             {"acc_combined", r.acc_combined},
             {"tool_metric", r.tool_metric},
             {"params_scored", r.params_scored},
             {"total_time_s", r.total_time_s},
             {"planning_time_s", r.planning_time_s},
             {"execution_time_s", r.execution_time_s},
             {"synthesis_time_s", r.synthesis_time_s},
             {"orchestrator_tokens", r.orchestrator_tokens},
             {"agent_tokens", r.agent_tokens},
             {"total_tokens", r.total_tokens},
             {"orchestrator_cost", r.orchestrator_cost},
             {"agent_cost", r.agent_cost},
             {"total_cost", r.total_cost},
             {"llm_calls", r.llm_calls},
             {"adherence", r.adherence},
             {"error", r.error},
             {"trace_path", r.trace_path}};
}

void from_json(const Json& j, RunRecord& r) {
    r.test_id = j.at("test_id").get<std::string>();
    r.category = j.value("category", "");
    r.mode = j.at("mode").get<std::string>();
    r.orchestrator_tier = j.at("orchestrator_tier").get<std::string>();
    r.specialist_tier = j.at("specialist_tier").get<std::string>();
    r.acc_tool = j.at("acc_tool").get<double>();
    r.acc_agent = j.at("acc_agent").get<double>();
    r.acc_plan = j.at("acc_plan").get<double>();
    r.acc_key = j.at("acc_key").get<double>();
    r.acc_val = j.at("acc_val").get<double>();
    r.acc_combined = j.at("acc_combined").get<double>();
    r.tool_metric = j.value("tool_metric", "recall");
    r.params_scored = j.value("params_scored", true);
    r.total_time_s = j.value("total_time_s", 0.0);
    r.planning_time_s = j.value("planning_time_s", 0.0);
    r.execution_time_s = j.value("execution_time_s", 0.0);
    r.synthesis_time_s = j.value("synthesis_time_s", 0.0);
    r.orchestrator_tokens = j.value("orchestrator_tokens", 0L);
    r.agent_tokens = j.value("agent_tokens", 0L);
    r.total_tokens = j.value("total_tokens", 0L);
    r.orchestrator_cost = j.value("orchestrator_cost", 0.0);
    r.agent_cost = j.value("agent_cost", 0.0);
    r.total_cost = j.value("total_cost", 0.0);
    r.llm_calls = j.value("llm_calls", 0);
    r.adherence = j.value("adherence", "");
    r.error = j.value("error", "");
    r.trace_path = j.value("trace_path", "");
}

ActualTrace extract_actual(const SessionTrace& trace) {
    ActualTrace a;
    std::vector<agents::PlannedCall> planned, executed;
    for (const auto& s : trace.steps) {
        if (s.status == agents::StepStatus::Skipped) continue;
        a.agents.insert(s.agent_id);
        StepSig sig{s.agent_id, {}};
        for (const auto& rec : s.executed_calls) {
            a.tools.insert(rec.call.tool);
            sig.tools.insert(rec.call.tool);
            a.calls.push_back({rec.call.tool, rec.call.arguments});
            executed.push_back({rec.call.tool, rec.call.arguments});
        }
        a.steps.push_back(std::move(sig));
        if (!trace.plan) continue;
        for (const auto& p : trace.plan->steps) {
            if (p.step_id != s.step_id || !p.guidance) continue;
            for (const auto& i : p.guidance->tool_instructions) planned.push_back({i.tool, i.parameters});
        }
    }
    if (orchestrator::centralized(trace.mode)) a.adherence = agents::classify_deviation(planned, executed);
    return a;
}

RunRecord score_trace(const TestCase& c, const SessionTrace& trace, ToolMetric metric) {
    RunRecord r;
    r.test_id = c.test_id;
    r.category = c.category;
    r.mode = orchestrator::to_string(trace.mode);
    r.tool_metric = to_string(metric);

    const ActualTrace a = extract_actual(trace);
    const std::set<std::string> exp_tools(c.expected_tools.begin(), c.expected_tools.end());
    const std::set<std::string> exp_agents(c.expected_agents.begin(), c.expected_agents.end());
    r.acc_tool = acc_tool(exp_tools, a.tools, metric);
    r.acc_agent = acc_agent(exp_agents, a.agents);
    r.acc_plan = acc_plan(c.expected_signature(), a.steps);
    r.params_scored = c.has_expected_params();
    if (r.params_scored) {
        const auto p = acc_params(c.expected_calls(), a.calls);
        r.acc_key = p.acc_key();
        r.acc_val = p.acc_val();
        r.acc_combined = acc_combined(r.acc_plan, r.acc_agent, r.acc_tool, r.acc_key, r.acc_val);
    } else {
        r.acc_combined = (r.acc_plan + r.acc_agent + r.acc_tool) / 3.0;
    }

    r.total_time_s = trace.total.seconds();
    r.planning_time_s = trace.planning.seconds();
    r.execution_time_s = trace.execution.seconds();
    r.synthesis_time_s = trace.synthesis.seconds();
    for (const auto& u : trace.all_usage()) {
        const long tokens = u.prompt_tokens + u.completion_tokens;
        if (u.role == llm::RoleTag::Orchestrator) {
            r.orchestrator_tokens += tokens;
            r.orchestrator_cost += u.cost;
        } else {
            r.agent_tokens += tokens;
            r.agent_cost += u.cost;
        }
        ++r.llm_calls;
    }
    r.total_tokens = r.orchestrator_tokens + r.agent_tokens;
    r.total_cost = r.orchestrator_cost + r.agent_cost;
    if (a.adherence) r.adherence = agents::to_string(a.adherence->type);
    if (!trace.routed && trace.error.empty()) r.error = "request was not routed";
    if (!trace.error.empty()) r.error = trace.error;
    return r;
}

namespace {

std::string run_key(const TestCase& c, Mode mode, const TierPair& pair) {
    return c.test_id + "__" + orchestrator::to_string(mode) + "__" + pair.orchestrator + "__" + pair.specialist;
}

}  // namespace

RunRecord run_case(const TestCase& c, Mode mode, const TierPair& pair, const BenchSetup& setup, SessionTrace* trace_out) {
    RunRecord r;
    try {
        std::filesystem::path results;
        if (!setup.out_dir.empty()) results = std::filesystem::path(setup.out_dir) / "runs" / run_key(c, mode, pair);
        auto ws = std::make_shared<runtime::Workspace>(results);
        auto registry = runtime::make_runtime_registry(ws);
        toolbus::ToolBus bus(registry);
        auto pool = agents::instantiate_pool(setup.cards, *registry);
        auto orch_backend = setup.backends(c, mode, llm::RoleTag::Orchestrator, pair.orchestrator);
        auto agent_backend = setup.backends(c, mode, llm::RoleTag::Agent, pair.specialist);

        orchestrator::OrchestratorOptions options;
        options.mode = mode;
        options.parallel = setup.parallel_steps;
        orchestrator::Orchestrator o(
            setup.prompts, orch_backend, [agent_backend](const agents::AgentCard&) -> llm::Backend& { return *agent_backend; },
            bus, registry, std::move(pool), options);
        SessionTrace trace = o.handle(c.request, runtime_context(*ws));
        r = score_trace(c, trace, setup.tool_metric);
        if (!setup.out_dir.empty() && setup.write_traces) {
            const auto path = std::filesystem::path(setup.out_dir) / "traces" / (run_key(c, mode, pair) + ".json");
            orchestrator::save_trace(trace, path.string());
            r.trace_path = path.string();
        }
        if (trace_out) *trace_out = std::move(trace);
    } catch (const std::exception& e) {
        r = RunRecord{};
        r.test_id = c.test_id;
        r.category = c.category;
        r.mode = orchestrator::to_string(mode);
        r.tool_metric = to_string(setup.tool_metric);
        r.params_scored = c.has_expected_params();
        if (orchestrator::centralized(mode)) r.adherence = agents::to_string(agents::Adherence::Followed);
        r.error = e.what();
    }
    r.orchestrator_tier = pair.orchestrator;
    r.specialist_tier = pair.specialist;
    return r;
}

std::vector<RunRecord> run_matrix(const std::vector<TestCase>& cases, const std::vector<Mode>& modes,
                                  const std::vector<TierPair>& pairs, const BenchSetup& setup, int parallelism) {
    struct Job {
        const TestCase* c;
        Mode mode;
        const TierPair* pair;
    };
    std::vector<Job> jobs;
    for (const auto& c : cases) {
        for (auto m : modes) {
            for (const auto& p : pairs) jobs.push_back({&c, m, &p});
        }
    }
    std::vector<RunRecord> records(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
            records[i] = run_case(*jobs[i].c, jobs[i].mode, *jobs[i].pair, setup);
        }
    };
    const int n = std::max(1, std::min<int>(parallelism, int(jobs.size())));
    std::vector<std::thread> threads;
    for (int t = 1; t < n; ++t) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();

    std::stable_sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
        return std::tie(a.test_id, a.mode, a.orchestrator_tier, a.specialist_tier) <
               std::tie(b.test_id, b.mode, b.orchestrator_tier, b.specialist_tier);
    });
    return records;
}

GroupBy group_by_from_string(const std::string& s) {
    if (s == "mode") return GroupBy::Mode;
    if (s == "pair" || s == "tier-pair" || s == "tier_pair") return GroupBy::Pair;
    if (s == "category") return GroupBy::Category;
    throw Error("InvalidArgument", "unknown grouping '" + s + "' (mode, pair, category)");
}

const std::vector<std::string>& metric_columns() {
    static const std::vector<std::string> c{
        "Tool selection accuracy", "Agent selection accuracy", "Plan step accuracy", "Parameter accuracy",
        "Key accuracy",            "Value accuracy",           "Combined accuracy",  "Total time",
        "Planning time",           "Execution time",           "Synthesis time",     "Orchestrator tokens",
        "Agent tokens",            "Total tokens",             "Orchestrator cost",  "Agent cost",
        "Total cost"};
    return c;
}

namespace {

std::vector<double> metric_values(const RunRecord& r) {
    return {r.acc_tool,
            r.acc_agent,
            r.acc_plan,
            (r.acc_key + r.acc_val) / 2.0,
            r.acc_key,
            r.acc_val,
            r.acc_combined,
            r.total_time_s,
            r.planning_time_s,
            r.execution_time_s,
            r.synthesis_time_s,
            double(r.orchestrator_tokens),
            double(r.agent_tokens),
            double(r.total_tokens),
            r.orchestrator_cost,
            r.agent_cost,
            r.total_cost};
}

const std::vector<std::string>& deviation_types() {
    static const std::vector<std::string> d{"tool_removal", "tool_addition", "parameter_modification", "mixed"};
    return d;
}

}  // namespace

std::vector<SummaryRow> aggregate(const std::vector<RunRecord>& records, GroupBy by) {
    std::map<std::string, std::vector<const RunRecord*>> groups;
    for (const auto& r : records) {
        std::string key = by == GroupBy::Mode ? r.mode
                          : by == GroupBy::Pair ? r.orchestrator_tier + "/" + r.specialist_tier
                                                : r.category;
        groups[key].push_back(&r);
    }
    std::vector<SummaryRow> rows;
    const auto& cols = metric_columns();
    for (const auto& [key, rs] : groups) {
        SummaryRow row;
        row.group = key;
        row.runs = long(rs.size());
        std::vector<double> sums(cols.size(), 0.0);
        long followed = 0, deviated = 0;
        std::map<std::string, long> by_type;
        for (const auto* r : rs) {
            const auto v = metric_values(*r);
            for (std::size_t i = 0; i < v.size(); ++i) sums[i] += v[i];
            row.errors += !r->ok();
            if (r->adherence.empty() || !r->ok()) continue;
            ++row.centralized_runs;
            if (r->adherence == "followed") {
                ++followed;
            } else {
                ++deviated;
                ++by_type[r->adherence];
            }
        }
        for (std::size_t i = 0; i < cols.size(); ++i) row.means[cols[i]] = sums[i] / double(rs.size());
        row.adherence_rate = row.centralized_runs ? double(followed) / double(row.centralized_runs) : 0.0;
        for (const auto& t : deviation_types()) {
            row.deviation_share[t] = deviated ? double(by_type[t]) / double(deviated) : 0.0;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_records(const std::vector<RunRecord>& records, const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream f(path);
    if (!f) throw Error("IOError", "cannot write " + path);
    for (const auto& r : records) f << Json(r).dump() << "\n";
}

std::vector<RunRecord> load_records(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("IOError", "cannot open " + path);
    std::vector<RunRecord> out;
    std::string line;
    int n = 0;
    while (std::getline(f, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(Json::parse(line).get<RunRecord>());
        } catch (const std::exception& e) {
            throw Error("BadRecordFile", std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

namespace {

std::vector<std::string> header(const std::string& group_header) {
    std::vector<std::string> h{group_header, "Runs", "Errors"};
    for (const auto& c : metric_columns()) h.push_back(c);
    h.push_back("Adherence rate");
    for (const auto& t : deviation_types()) h.push_back("Share " + t);
    return h;
}

std::vector<std::string> cells(const SummaryRow& row) {
    std::vector<std::string> c{row.group, std::to_string(row.runs), std::to_string(row.errors)};
    auto fmt = [](double v) {
        std::ostringstream s;
        s << std::setprecision(6) << v;
        return s.str();
    };
    for (const auto& col : metric_columns()) c.push_back(fmt(row.means.at(col)));
    c.push_back(row.centralized_runs ? fmt(row.adherence_rate) : "");
    for (const auto& t : deviation_types()) c.push_back(row.centralized_runs ? fmt(row.deviation_share.at(t)) : "");
    return c;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

}  // namespace

std::string summary_csv(const std::vector<SummaryRow>& rows, const std::string& group_header) {
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << csv_field(v[i]);
        out << "\n";
    };
    line(header(group_header));
    for (const auto& r : rows) line(cells(r));
    return out.str();
}

std::string summary_table(const std::vector<SummaryRow>& rows, const std::string& group_header) {
    // Transposed: one line per metric, one column per group.
    const auto h = header(group_header);
    std::vector<std::vector<std::string>> cols;
    for (const auto& r : rows) cols.push_back(cells(r));
    std::size_t w0 = 0;
    for (const auto& s : h) w0 = std::max(w0, s.size());
    std::ostringstream out;
    for (std::size_t i = 0; i < h.size(); ++i) {
        out << std::left << std::setw(int(w0) + 2) << h[i];
        for (const auto& c : cols) out << std::right << std::setw(14) << c[i];
        out << "\n";
    }
    return out.str();
}

}  // namespace buildops::bench
