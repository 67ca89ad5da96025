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
#include <set>

#include "buildops/runtime/tools.hpp"
#include "buildops/toolbus/bus.hpp"

using namespace buildops;
using namespace buildops::runtime;
using toolbus::Detail;
using toolbus::ToolBus;
using toolbus::ToolCall;

namespace {

struct Fixture {
    std::shared_ptr<Workspace> ws;
    std::shared_ptr<toolbus::ToolRegistry> registry;
    ToolBus bus;

    explicit Fixture(std::filesystem::path dir = {})
        : ws(std::make_shared<Workspace>(std::move(dir))), registry(make_runtime_registry(ws)), bus(registry) {}

    toolbus::ToolResult call(const std::string& tool, Json args = Json::object()) {
        return bus.invoke(ToolCall{tool, std::move(args), "test"}).result;
    }
};

std::string error_of(const toolbus::ToolResult& r) { return r.error.value_or(""); }

}  // namespace

TEST(Catalog, SixtyOneToolsInElevenCategories) {
    Fixture f;
    EXPECT_EQ(f.registry->size(), 61u);
    std::set<std::string> cats;
    for (const auto& t : f.registry->list_tools(Detail::NamesOnly)) cats.insert(t.category);
    EXPECT_EQ(cats.size(), 11u);
    EXPECT_EQ(tool_categories().size(), 11u);
    for (const auto& c : tool_categories()) EXPECT_TRUE(cats.count(c)) << c;
    ASSERT_EQ(tool_entity_table().size(), 61u);
    for (const auto& e : tool_entity_table()) EXPECT_TRUE(f.registry->contains(e.tool)) << e.tool;
}

TEST(Catalog, HvacAddMatchesExampleSchema) {
    Fixture f;
    const auto& spec = f.registry->describe("hvac_add");
    ASSERT_EQ(spec.params.size(), 5u);
    EXPECT_EQ(spec.params[0].name, "system_id");
    EXPECT_TRUE(spec.params[0].required);
    EXPECT_EQ(spec.params[1].name, "cluster_id");
    EXPECT_TRUE(spec.params[1].required);
    EXPECT_FALSE(spec.params[2].required);
    const auto* cfg = spec.param("system_config");
    ASSERT_NE(cfg, nullptr);
    EXPECT_EQ(cfg->kind, toolbus::ParamKind::Map);
    EXPECT_EQ(cfg->fields.size(), 6u);
}

TEST(Tools, HvacAddEnvelope) {
    Fixture f;
    Json config{{"fan", {{"rated_flow_m3s", 0.4}, {"rated_power_W", 400}}},
                {"fan_ctrl", {{"ctrl_type", "vfd"}, {"rated_flow_m3s", 0.4}}},
                {"chiller", {{"rated_capacity_W", 15000}, {"rated_cop", 4.5}}}};
    auto r = f.call("hvac_add", Json{{"system_id", "hvac_2"}, {"cluster_id", "cluster_1"},
                                     {"system_name", "FCU System"}, {"system_config", config}});
    ASSERT_TRUE(r.success) << error_of(r);
    EXPECT_EQ(*r.message, "HVAC system 'hvac_2' added to cluster 'cluster_1'");
    EXPECT_EQ(r.data->at("system_type"), "hvac_systems");
    EXPECT_EQ(r.data->at("system_config"), config);
    const auto& h = f.ws->active().clusters.at("cluster_1").hvac_systems.at("hvac_2");
    EXPECT_EQ(h.fan_ctrl.ctrl_type, FanControl::Vfd);
    EXPECT_EQ(h.chiller.rated_cop, 4.5);
}

TEST(Tools, HvacAddOnMissingClusterFails) {
    Fixture f;
    auto r = f.call("hvac_add", Json{{"system_id", "h"}, {"cluster_id", "c1"}});
    EXPECT_FALSE(r.success);
    EXPECT_EQ(error_of(r).rfind("UnknownId", 0), 0u) << error_of(r);
    ASSERT_TRUE(f.call("cluster_add", Json{{"cluster_id", "c1"}}).success);
    EXPECT_TRUE(f.call("hvac_add", Json{{"system_id", "h"}, {"cluster_id", "c1"}}).success);
    EXPECT_EQ(error_of(f.call("hvac_add", Json{{"system_id", "h"}, {"cluster_id", "c1"}})).rfind("DuplicateId", 0), 0u);
}

TEST(Tools, EnumViolationIsValidationFailed) {
    Fixture f;
    auto r = f.call("hvac_update", Json{{"system_id", "hvac_1"}, {"fan_ctrl", {{"ctrl_type", "turbo"}}}});
    EXPECT_EQ(error_of(r), "ValidationFailed: enum violation for fan_ctrl.ctrl_type: 'turbo' not in {constant, staged, vfd}");
}

TEST(Tools, DerUpdateIsShallowMerge) {
    Fixture f;
    auto r = f.call("der_update", Json{{"system_id", "der_1"}, {"battery", {{"capacity", 20}}}});
    ASSERT_TRUE(r.success) << error_of(r);
    const auto& b = *f.ws->active().clusters.at("cluster_1").der_systems.at("der_1").battery;
    EXPECT_EQ(b.capacity, 20.0);
    EXPECT_EQ(b.soc_min, 0.1);
    EXPECT_EQ(b.soc_max, 0.95);
    EXPECT_EQ(b.max_power, 5.0);
}

TEST(Tools, HvacUpdateCop) {
    Fixture f;
    ASSERT_TRUE(f.call("hvac_update", Json{{"system_id", "hvac_1"}, {"chiller", {{"rated_cop", "4.5"}}}}).success);
    const auto& h = f.ws->active().clusters.at("cluster_1").hvac_systems.at("hvac_1");
    EXPECT_EQ(h.chiller.rated_cop, 4.5);
    EXPECT_EQ(h.chiller.rated_capacity_w, 12000.0);
}

TEST(Tools, RemoveThenQueryIsUnknownId) {
    Fixture f;
    ASSERT_TRUE(f.call("controller_remove", Json{{"controller_id", "battery_schedule_1"}}).success);
    auto q = f.call("controller_query", Json{{"controller_id", "battery_schedule_1"}});
    EXPECT_EQ(error_of(q).rfind("UnknownId", 0), 0u) << error_of(q);
}

TEST(Tools, RemovingReferencedSystemIsDangling) {
    Fixture f;
    auto r = f.call("hvac_remove", Json{{"system_id", "hvac_1"}});
    EXPECT_EQ(error_of(r).rfind("DanglingReference", 0), 0u) << error_of(r);
    EXPECT_TRUE(f.ws->active().clusters.at("cluster_1").hvac_systems.count("hvac_1"));
}

TEST(Tools, AssignToMissingBuildingIsDangling) {
    Fixture f;
    auto r = f.call("der_assign_to_buildings", Json{{"system_id", "der_1"}, {"building_ids", {"nowhere"}}});
    EXPECT_EQ(error_of(r).rfind("DanglingReference", 0), 0u) << error_of(r);
}

TEST(Tools, InvariantViolationsRejected) {
    Fixture f;
    EXPECT_FALSE(f.call("hvac_update", Json{{"system_id", "hvac_1"}, {"coil", {{"effectiveness", 1.5}}}}).success);
    EXPECT_FALSE(f.call("der_update", Json{{"system_id", "der_1"}, {"battery", {{"soc", 0.99}}}}).success);
    EXPECT_FALSE(f.call("controller_add_hvac", Json{{"controller_id", "p"}, {"system_id", "hvac_1"},
                                                    {"controller_type", "precool"}, {"offset_C", -1}}).success);
    EXPECT_FALSE(f.call("hvac_update", Json{{"system_id", "hvac_1"}, {"fan_ctrl", {{"ctrl_type", "staged"}}}}).success);
    EXPECT_TRUE(f.call("hvac_update",
                       Json{{"system_id", "hvac_1"}, {"fan_ctrl", {{"ctrl_type", "staged"}, {"stages", 3}}}}).success);
}

TEST(Tools, BuildFromScratchAndSimulate) {
    Fixture f;
    auto ok = [&](const std::string& tool, Json args) {
        auto r = f.call(tool, std::move(args));
        EXPECT_TRUE(r.success) << tool << ": " << error_of(r);
        return r;
    };
    ok("config_create", Json{{"config_id", "scratch"}});
    ok("cluster_add", Json{{"cluster_id", "c1"}});
    ok("building_add", Json{{"building_id", "b1"}});
    ok("building_add_thermal_zone", Json{{"building_id", "b1"}, {"zone_id", "z1"}, {"capacitance_J_per_C", 1e7},
                                         {"resistance_C_per_W", 5e-3}});
    ok("building_add_electrical_zone", Json{{"building_id", "b1"}, {"zone_id", "e1"}, {"base_load_kW", 0.4}});
    ok("building_add_water_zone", Json{{"building_id", "b1"}, {"zone_id", "w1"}});
    ok("hvac_add", Json{{"system_id", "h1"}, {"cluster_id", "c1"}});
    ok("hvac_assign_to_buildings", Json{{"system_id", "h1"}, {"building_ids", {"b1"}}});
    ok("der_add", Json{{"system_id", "d1"}, {"pv", {{"rated", 4}}}});
    ok("der_assign_to_buildings", Json{{"system_id", "d1"}, {"building_ids", {"b1"}}});
    ok("controller_add_hvac", Json{{"controller_id", "t1"}, {"system_id", "h1"}});
    ok("disturbance_add_weather", Json{{"disturbance_id", "w"}, {"mean_temp_C", 30}});
    ok("disturbance_add_occupancy", Json{{"disturbance_id", "o"}, {"profile", "office"}});
    ok("disturbance_add_price", Json{{"disturbance_id", "p"}});
    EXPECT_FALSE(f.call("disturbance_add_weather", Json{{"disturbance_id", "w2"}}).success);
    ok("environment_add", Json{{"environment_id", "half_day"}, {"horizon_hours", 12}, {"timestep_s", 600}});
    auto v = ok("config_validate", Json::object());
    EXPECT_TRUE(v.data->at("valid").get<bool>());
    auto run = ok("simulation_run", Json{{"run_id", "first"}});
    EXPECT_EQ(run.data->at("steps"), 72);
    auto status = ok("simulation_get_status", Json{{"run_id", "first"}});
    EXPECT_EQ(status.data->at("status"), "completed");
    EXPECT_EQ(ok("simulation_list_results", Json::object()).data->at("runs").size(), 1u);
    auto a = ok("analysis_flexibility", Json{{"run_id", "first"}});
    EXPECT_TRUE(a.data->at("metrics").at("efc").is_null());
    auto missing = f.call("analysis_energy", Json{{"run_id", "nope"}});
    EXPECT_EQ(error_of(missing).rfind("UnknownRun", 0), 0u);
}

TEST(Tools, CaseStudyThroughTools) {
    Fixture f;
    auto ok = [&](const std::string& tool, Json args) {
        auto r = f.call(tool, std::move(args));
        EXPECT_TRUE(r.success) << tool << ": " << error_of(r);
        return r;
    };
    ok("simulation_run", Json{{"run_id", "baseline"}});
    ok("hvac_update", Json{{"system_id", "hvac_1"}, {"chiller", {{"rated_cop", 4.5}}}});
    ok("der_update", Json{{"system_id", "der_1"}, {"battery", {{"capacity", 20}}}});
    ok("simulation_run", Json{{"run_id", "upgrade"}});
    ok("controller_add_hvac", Json{{"controller_id", "precool_1"}, {"system_id", "hvac_1"},
                                   {"controller_type", "precool"}, {"offset_C", 2}, {"window_start_hour", 14},
                                   {"window_end_hour", 16}});
    ok("simulation_run", Json{{"run_id", "upgrade_precool"}});
    auto c1 = ok("comparison_comprehensive", Json{{"baseline_run_id", "baseline"}, {"comparison_run_id", "upgrade"}});
    const auto& m = c1.data->at("metrics");
    EXPECT_NEAR(m.at("chiller_kwh").at("delta_pct").get<double>(), (3.0 / 4.5 - 1.0) * 100.0, 1e-9);
    EXPECT_LT(m.at("hvac_kwh").at("delta").get<double>(), 0.0);
    auto c2 = ok("comparison_comfort", Json{{"baseline_run_id", "upgrade"}, {"comparison_run_id", "upgrade_precool"}});
    EXPECT_LE(c2.data->at("metrics").at("mean_temp_c").at("delta").get<double>(), 0.0);
}

TEST(Tools, PersistenceAndReload) {
    const auto dir = std::filesystem::path(::testing::TempDir()) / "buildops_results";
    std::filesystem::remove_all(dir);
    {
        Fixture f(dir);
        ASSERT_TRUE(f.call("simulation_run", Json{{"run_id", "r1"}}).success);
        EXPECT_TRUE(std::filesystem::exists(dir / "runs" / "r1.json"));
        EXPECT_TRUE(std::filesystem::exists(dir / "runs" / "r1_summary.csv"));
        ASSERT_TRUE(f.call("config_save", Json::object()).success);
        EXPECT_TRUE(std::filesystem::exists(dir / "configs" / "reference.json"));
    }
    Fixture g(dir);
    auto r = g.call("analysis_cost", Json{{"run_id", "r1"}});
    ASSERT_TRUE(r.success) << error_of(r);
    auto snapshot = (dir / "configs" / "reference.json").string();
    ASSERT_TRUE(g.call("config_create", Json{{"config_id", "copy"}, {"path", snapshot}}).success);
    EXPECT_EQ(Json(g.ws->config("copy").clusters), Json(g.ws->config("reference").clusters));
}

TEST(Tools, SelectionDrivesDefaults) {
    Fixture f;
    ASSERT_TRUE(f.call("cluster_add", Json{{"cluster_id", "c2"}}).success);
    auto ambiguous = f.call("building_add", Json{{"building_id", "bx"}});
    EXPECT_EQ(error_of(ambiguous).rfind("AmbiguousCluster", 0), 0u) << error_of(ambiguous);
    ASSERT_TRUE(f.call("cluster_select", Json{{"cluster_id", "c2"}}).success);
    ASSERT_TRUE(f.call("building_add", Json{{"building_id", "bx"}}).success);
    EXPECT_TRUE(f.ws->active().clusters.at("c2").buildings.count("bx"));
    // entity lookup still finds the owning cluster
    ASSERT_TRUE(f.call("hvac_query", Json{{"system_id", "hvac_1"}}).success);
    ASSERT_TRUE(f.call("hvac_select", Json{{"system_id", "hvac_1"}}).success);
    EXPECT_EQ(f.call("hvac_query").data->at("system_id"), "hvac_1");
}
