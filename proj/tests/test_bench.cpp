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


#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "buildops/bench/harness.hpp"
#include "buildops/error.hpp"
#include "buildops/runtime/tools.hpp"
#include "support/oracles.hpp"

using namespace buildops;
using namespace buildops::bench;
using orchestrator::Mode;

namespace {

const std::string kData = std::string(BUILDOPS_SOURCE_DIR) + "/data";

std::string kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return "none";
}

std::set<std::string> S(std::initializer_list<std::string> l) { return l; }

const std::vector<TestCase>& shipped_cases() {
    static const auto cases = load_cases(kData + "/cases.jsonl");
    return cases;
}

const TestCase& shipped(const std::string& id) {
    for (const auto& c : shipped_cases()) {
        if (c.test_id == id) return c;
    }
    throw std::runtime_error("no case " + id);
}

BenchSetup scripted_setup(Faults faults = {}) {
    BenchSetup s;
    s.cards = agents::load_cards_dir(kData + "/cards");
    s.backends = scripted_factory(llm::default_tier_specs(), std::move(faults));
    return s;
}

const std::vector<Mode> kModes{Mode::C1, Mode::C2, Mode::D};

}  // namespace

TEST(Metrics, ToolExamples) {
    EXPECT_EQ(acc_tool(S({"a", "b"}), S({"a", "b"})), 1.0);
    EXPECT_EQ(acc_tool(S({"a", "b"}), S({"a", "c"})), 0.5);
    EXPECT_EQ(acc_tool(S({"a"}), S({"a", "b", "c"})), 1.0);
    EXPECT_EQ(acc_tool(S({"a"}), S({"a", "b", "c"}), ToolMetric::Jaccard), 1.0 / 3.0);
    EXPECT_EQ(kind_of([] { acc_tool({}, S({"a"})); }), "EmptyExpected");
}

TEST(Metrics, AgentExamples) {
    EXPECT_EQ(acc_agent(S({"hvac_agent"}), S({"hvac_agent", "simulation_agent"})), 1.0);
    EXPECT_EQ(acc_agent(S({"hvac_agent", "der_agent"}), S({"hvac_agent"})), 0.5);
    EXPECT_EQ(kind_of([] { acc_agent({}, {}); }), "EmptyExpected");
}

TEST(Metrics, PlanExamples) {
    const std::vector<StepSig> exp{{"A", {"t1"}}, {"B", {"t2"}}};
    EXPECT_EQ(acc_plan(exp, exp), 1.0);
    EXPECT_EQ(acc_plan(exp, {{"B", {"t2"}}, {"A", {"t1"}}}), 0.5);
    EXPECT_EQ(acc_plan({{"A", {"t1", "t2"}}}, {{"A", {"t1", "t2", "t3"}}}), 1.0);
    EXPECT_EQ(acc_plan({{"A", {"t1", "t2"}}}, {{"A", {"t1"}}}), 0.0);
    EXPECT_EQ(acc_plan(exp, {}), 0.0);
    EXPECT_EQ(kind_of([] { acc_plan({}, {}); }), "EmptyExpected");
}

TEST(Metrics, GreedyUndercountsWhereAlignmentDoesNot) {
    const std::vector<StepSig> exp{{"A", {"t1"}}, {"B", {"t2"}}, {"C", {"t3"}}};
    const std::vector<StepSig> act{{"B", {"t2"}}, {"C", {"t3"}}, {"A", {"t1"}}};
    EXPECT_EQ(acc_plan_greedy(exp, act), 1.0 / 3.0);
    EXPECT_EQ(acc_plan(exp, act), 2.0 / 3.0);
    EXPECT_EQ(oracle::best_alignment(exp, act), 2);
}

TEST(Metrics, ParamExamples) {
    const Call cop{"hvac_update", Json{{"chiller", {{"rated_cop", 4.5}}}}};
    auto s = acc_params({cop}, {cop});
    EXPECT_EQ(s.acc_key(), 1.0);
    EXPECT_EQ(s.acc_val(), 1.0);
    s = acc_params({cop}, {{"hvac_update", Json{{"chiller", {{"rated_cop", "4.5"}}}}}});
    EXPECT_EQ(s.acc_val(), 1.0);
    s = acc_params({{"der_update", Json{{"capacity", 20}}}}, {{"der_update", Json{{"capacity", 15}}}});
    EXPECT_EQ(s.acc_key(), 1.0);
    EXPECT_EQ(s.acc_val(), 0.0);
    // A tool that never ran counts all its keys as misses.
    s = acc_params({cop, {"der_update", Json{{"capacity", 20}}}}, {cop});
    EXPECT_EQ(s.acc_key(), 0.5);
    EXPECT_EQ(kind_of([] { acc_params({{"config_list", Json::object()}}, {}); }), "NoExpectedParams");
}

TEST(Metrics, BestMatchTieBreaks) {
    const Call exp{"simulation_run", Json{{"run_id", "upgrade"}}};
    const std::vector<Call> runs{{"simulation_run", Json{{"run_id", "baseline"}}},
                                 {"simulation_run", Json{{"run_id", "upgrade"}}},
                                 {"simulation_run", Json{{"run_id", "upgrade"}}}};
    EXPECT_EQ(best_match(exp, runs), 1);  // value matches beat position, then earliest
    EXPECT_EQ(best_match({"simulation_run", Json{{"run_id", "x"}}}, runs), 0);
    EXPECT_EQ(best_match({"analysis_cost", Json::object()}, runs), -1);
}

TEST(Metrics, CombinedIsUnweightedMean) {
    EXPECT_EQ(acc_combined(1, 1, 1, 1, 1), 1.0);
    EXPECT_EQ(acc_combined(1, 0.5, 0, 1, 0), (1 + 0.5 + 0 + 0.5) / 4);
}

TEST(MetricsOracle, RandomPairsMatchBruteForce) {
    oracle::Generator gen(20261018);
    for (int n = 0; n < 2000; ++n) {
        const auto t = gen.pair();
        const std::set<std::string> et(t.exp_tools.begin(), t.exp_tools.end());
        const std::set<std::string> at(t.act_tools.begin(), t.act_tools.end());
        EXPECT_TRUE(oracle::same_ratio(acc_tool(et, at), oracle::recall(t.exp_tools, t.act_tools)));
        EXPECT_TRUE(oracle::same_ratio(acc_tool(et, at, ToolMetric::Jaccard), oracle::jaccard(t.exp_tools, t.act_tools)));
        const std::set<std::string> eg(t.exp_agents.begin(), t.exp_agents.end());
        const std::set<std::string> ag(t.act_agents.begin(), t.act_agents.end());
        EXPECT_TRUE(oracle::same_ratio(acc_agent(eg, ag), oracle::recall(t.exp_agents, t.act_agents)));
        EXPECT_TRUE(oracle::same_ratio(acc_plan(t.exp_steps, t.act_steps),
                                       {oracle::best_alignment(t.exp_steps, t.act_steps), long(t.exp_steps.size())}));
        const auto want = oracle::params(t.exp_calls, t.act_calls);
        const auto got = acc_params(t.exp_calls, t.act_calls);
        ASSERT_EQ(got.expected_keys, want.expected);
        ASSERT_EQ(got.matched_keys, want.keys) << n;
        ASSERT_EQ(got.matched_values, want.values) << n;
        for (double v : {acc_tool(et, at), acc_plan(t.exp_steps, t.act_steps), got.acc_key(), got.acc_val()}) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
    }
}

TEST(MetricsOracle, PlanExhaustiveSmallAlphabet) {
    // Two agents, tool sets {t1} and {t1, t2}: every sequence pair up to
    // 4 expected and 5 executed steps.
    const std::vector<StepSig> alphabet{{"A", {"t1"}}, {"A", {"t1", "t2"}}, {"B", {"t1"}}, {"B", {"t1", "t2"}}};
    auto sequences = [&](int max_len, int min_len) {
        std::vector<std::vector<StepSig>> out;
        std::vector<std::vector<StepSig>> layer{{}};
        for (int len = 0; len <= max_len; ++len) {
            if (len >= min_len) out.insert(out.end(), layer.begin(), layer.end());
            std::vector<std::vector<StepSig>> next;
            for (const auto& s : layer) {
                for (const auto& a : alphabet) {
                    next.push_back(s);
                    next.back().push_back(a);
                }
            }
            layer = std::move(next);
        }
        return out;
    };
    const auto exps = sequences(4, 1);
    const auto acts = sequences(5, 0);
    long checked = 0;
    for (const auto& e : exps) {
        for (const auto& a : acts) {
            ASSERT_EQ(acc_plan(e, a), double(oracle::best_alignment(e, a)) / double(e.size()));
            ++checked;
        }
    }
    EXPECT_EQ(checked, 340L * 1365L);
}

TEST(MetricsProperty, Monotonicity) {
    oracle::Generator gen(7);
    for (int n = 0; n < 500; ++n) {
        const auto t = gen.pair();
        const std::set<std::string> et(t.exp_tools.begin(), t.exp_tools.end());
        std::set<std::string> at(t.act_tools.begin(), t.act_tools.end());
        const double before = acc_tool(et, at);
        at.insert(t.exp_tools.front());
        EXPECT_GE(acc_tool(et, at), before);

        const double plan = acc_plan(t.exp_steps, t.act_steps);
        for (std::size_t j = 0; j < t.act_steps.size(); ++j) {
            auto fewer = t.act_steps;
            fewer.erase(fewer.begin() + long(j));
            EXPECT_LE(acc_plan(t.exp_steps, fewer), plan);
        }
        EXPECT_EQ(acc_plan(t.exp_steps, t.exp_steps), 1.0);
    }
}

TEST(Cases, ShippedSuite) {
    const auto& cases = shipped_cases();
    EXPECT_EQ(cases.size(), 53u);
    std::map<std::string, int> per;
    for (const auto& c : cases) ++per[c.category];
    for (const auto& cat : categories()) EXPECT_GE(per[cat], 12) << cat;

    auto ws = std::make_shared<runtime::Workspace>();
    auto registry = runtime::make_runtime_registry(ws);
    auto pool = agents::instantiate_pool(agents::load_cards_dir(kData + "/cards"), *registry);
    for (const auto& c : cases) {
        EXPECT_NO_THROW(validate_case(c, pool, *registry)) << c.test_id;
        EXPECT_TRUE(c.has_expected_params()) << c.test_id;
        const bool multi_agent = c.expected_agents.size() > 1;
        bool multi_tool = false;
        for (const auto& s : c.expected_steps) multi_tool = multi_tool || s.required_tools.size() > 1;
        EXPECT_EQ(c.category, std::string(multi_agent ? "MA" : "SA") + (multi_tool ? "MT" : "ST")) << c.test_id;
    }
}

TEST(Cases, BadLinesReportLineNumber) {
    std::string good = Json(shipped("SAST_001")).dump();
    std::string other = Json(shipped("SAST_002")).dump();
    try {
        parse_cases(good + "\n" + other + "\n{not json\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), "BadCaseFile");
        EXPECT_EQ(std::string(e.what()).rfind("BadCaseFile: 3:", 0), 0u) << e.what();
    }
    Json wrong = shipped("SAST_001");
    wrong["test_id"] = "MAMT_099";
    EXPECT_EQ(kind_of([&] { parse_cases(wrong.dump()); }), "BadCaseFile");
    EXPECT_EQ(kind_of([&] { parse_cases(good + "\n" + good); }), "BadCaseFile");
    EXPECT_EQ(parse_cases("\n" + good + "\n\n").size(), 1u);
    EXPECT_EQ(kind_of([] { load_cases("/nonexistent/cases.jsonl"); }), "BadCaseFile");
}

TEST(Harness, PerfectScriptsScoreOneEverywhere) {
    const auto setup = scripted_setup();
    for (const auto& c : shipped_cases()) {
        for (auto mode : kModes) {
            orchestrator::SessionTrace trace;
            const auto r = run_case(c, mode, {"S", "S"}, setup, &trace);
            const std::string where = c.test_id + " " + orchestrator::to_string(mode);
            ASSERT_TRUE(r.ok()) << where << ": " << r.error;
            EXPECT_EQ(r.acc_tool, 1.0) << where;
            EXPECT_EQ(r.acc_agent, 1.0) << where;
            EXPECT_EQ(r.acc_plan, 1.0) << where;
            EXPECT_EQ(r.acc_key, 1.0) << where;
            EXPECT_EQ(r.acc_val, 1.0) << where;
            EXPECT_EQ(r.acc_combined, 1.0) << where;
            EXPECT_EQ(r.adherence, orchestrator::centralized(mode) ? "followed" : "") << where;
            for (const auto& s : trace.steps) {
                EXPECT_EQ(s.status, agents::StepStatus::Success) << where << " " << s.step_id << ": " << s.error;
                for (const auto& call : s.executed_calls) {
                    EXPECT_TRUE(call.result.success)
                        << where << " " << call.call.tool << ": " << call.result.error.value_or("");
                }
            }
            EXPECT_EQ(r.orchestrator_tokens + r.agent_tokens, r.total_tokens);
            EXPECT_GT(r.orchestrator_tokens, 0);
            EXPECT_GT(r.agent_tokens, 0);
            EXPECT_GE(r.total_time_s, r.planning_time_s + r.execution_time_s + r.synthesis_time_s - 1e-9);
        }
    }
}

TEST(Harness, FaultInjection) {
    const auto& c = shipped("SAMT_001");  // hvac_query + hvac_update
    Faults drop;
    drop.drop_tool = "hvac_query";
    for (auto mode : {Mode::C1, Mode::C2}) {
        const auto r = run_case(c, mode, {"S", "S"}, scripted_setup(drop));
        EXPECT_EQ(r.acc_tool, 0.5);
        EXPECT_EQ(r.adherence, "tool_removal");
    }
    EXPECT_EQ(run_case(c, Mode::D, {"S", "S"}, scripted_setup(drop)).acc_tool, 0.5);

    Faults swap;
    swap.swap_first_steps = true;
    for (auto mode : kModes) {
        const auto r = run_case(shipped("MAST_002"), mode, {"S", "S"}, scripted_setup(swap));
        EXPECT_EQ(r.acc_plan, 0.5) << orchestrator::to_string(mode);
        EXPECT_EQ(r.acc_agent, 1.0);
        EXPECT_EQ(r.acc_tool, 1.0);
    }

    Faults perturb;
    perturb.perturb = Faults::Perturb{"hvac_update", "chiller.rated_cop", 3.9};
    for (auto mode : kModes) {
        const auto r = run_case(shipped("SAST_001"), mode, {"S", "S"}, scripted_setup(perturb));
        EXPECT_EQ(r.acc_key, 1.0);
        EXPECT_EQ(r.acc_val, 0.5) << orchestrator::to_string(mode);
    }
}

TEST(Harness, MatrixCardinalityAndAggregation) {
    const std::vector<TestCase> cases{shipped("SAST_001"), shipped("MAST_002")};
    const auto records = run_matrix(cases, kModes, {{"S", "API"}}, scripted_setup(), 3);
    ASSERT_EQ(records.size(), 6u);
    for (const auto& r : records) {
        EXPECT_TRUE(r.ok()) << r.error;
        EXPECT_GT(r.agent_cost, 0.0);
        EXPECT_EQ(r.orchestrator_cost, 0.0);
        EXPECT_DOUBLE_EQ(r.orchestrator_cost + r.agent_cost, r.total_cost);
    }
    const auto rows = aggregate(records, GroupBy::Mode);
    ASSERT_EQ(rows.size(), 3u);
    for (const auto& row : rows) {
        EXPECT_EQ(row.runs, 2);
        EXPECT_EQ(row.means.at("Combined accuracy"), 1.0);
        EXPECT_EQ(row.adherence_rate, row.group == "D" ? 0.0 : 1.0);
    }
    const auto csv = summary_csv(rows, "Mode");
    for (const auto& col : {"Tool selection accuracy", "Agent selection accuracy", "Plan step accuracy",
                            "Parameter accuracy", "Total time", "Planning time", "Execution time", "Synthesis time",
                            "Orchestrator tokens", "Agent tokens", "Total tokens", "Orchestrator cost", "Agent cost",
                            "Total cost"}) {
        EXPECT_NE(csv.find(col), std::string::npos) << col;
    }
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(Harness, CrashingBackendIsContained) {
    auto setup = scripted_setup();
    auto scripted = setup.backends;
    setup.backends = [scripted](const TestCase& c, Mode m, llm::RoleTag role, const std::string& tier) {
        if (tier != "CRASH") return scripted(c, m, role, tier);
        llm::BackendSpec spec;
        spec.backend_id = "CRASH";
        const Json rules = Json::parse(
            R"([{"match": {}, "response": {"error": {"kind": "BackendUnavailable", "message": "boom"}}}])");
        return std::static_pointer_cast<llm::Backend>(std::make_shared<llm::ScriptedBackend>(spec, llm::parse_script(rules)));
    };
    setup.backends = [inner = setup.backends](const TestCase& c, Mode m, llm::RoleTag role, const std::string& tier) {
        if (tier == "THROW") throw std::runtime_error("factory exploded");
        return inner(c, m, role, tier);
    };
    const auto records =
        run_matrix({shipped("SAST_001")}, kModes, {{"CRASH", "S"}, {"S", "S"}, {"THROW", "S"}}, setup, 2);
    ASSERT_EQ(records.size(), 9u);
    for (const auto& r : records) {
        if (r.orchestrator_tier == "S") {
            EXPECT_TRUE(r.ok());
            continue;
        }
        EXPECT_FALSE(r.ok());
        EXPECT_EQ(r.acc_combined, 0.0);
        EXPECT_EQ(r.acc_tool + r.acc_agent + r.acc_plan + r.acc_key + r.acc_val, 0.0);
    }
}

TEST(Harness, CaseOrderDoesNotLeak) {
    std::vector<TestCase> cases{shipped("MAMT_003"), shipped("MAST_007"), shipped("SAMT_006")};
    auto strip = [](std::vector<RunRecord> rs) {
        std::vector<std::string> out;
        for (auto& r : rs) {
            r.total_time_s = r.planning_time_s = r.execution_time_s = r.synthesis_time_s = 0;
            out.push_back(Json(r).dump());
        }
        return out;
    };
    const auto a = strip(run_matrix(cases, kModes, {{"M", "L"}}, scripted_setup(), 1));
    std::reverse(cases.begin(), cases.end());
    const auto b = strip(run_matrix(cases, kModes, {{"M", "L"}}, scripted_setup(), 4));
    EXPECT_EQ(a, b);
}

TEST(Harness, RecordsRoundTripAndTraces) {
    const auto dir = std::filesystem::temp_directory_path() / "buildops_bench_out";
    std::filesystem::remove_all(dir);
    auto setup = scripted_setup();
    setup.out_dir = dir.string();
    const auto records = run_matrix({shipped("MAST_001")}, {Mode::C2}, {{"XL", "API"}}, setup);
    ASSERT_EQ(records.size(), 1u);
    EXPECT_TRUE(std::filesystem::exists(records[0].trace_path));
    write_records(records, (dir / "records.jsonl").string());
    const auto back = load_records((dir / "records.jsonl").string());
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(Json(back[0]).dump(), Json(records[0]).dump());
    std::filesystem::remove_all(dir);
}

TEST(Harness, PairsAndGrouping) {
    const auto pairs = all_pairs({"S", "M", "L", "XL", "API"});
    EXPECT_EQ(pairs.size(), 25u);
    EXPECT_EQ(pairs[1].label(), "S/M");
    EXPECT_EQ(group_by_from_string("tier-pair"), GroupBy::Pair);
    EXPECT_EQ(kind_of([] { group_by_from_string("nope"); }), "InvalidArgument");
}

TEST(Harness, RuntimeContextNamesEntities) {
    runtime::Workspace ws;
    const auto ctx = runtime_context(ws);
    for (const char* id : {"reference", "cluster_1", "building_1", "zone_1", "hvac_1", "der_1", "thermostat_1"}) {
        EXPECT_NE(ctx.find(id), std::string::npos) << id;
    }
}
