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

#include <cmath>
#include <fstream>
#include <random>

#include "buildops/error.hpp"
#include "buildops/runtime/analysis.hpp"
#include "buildops/runtime/environment.hpp"
#include "support/random_config.hpp"

using namespace buildops;
using namespace buildops::runtime;

namespace {

Cluster reference_cluster() { return reference_configuration().clusters.at("cluster_1"); }

double chiller_kwh(const SimulationResult& r) { return analyze(r, Facet::Energy).at("chiller_kwh").get<double>(); }

}  // namespace

TEST(ZoneStep, HandEvaluatedExample) {
    // 24 + 900/1e7 * (8/2e-3 + 500 - 3000) = 24 + 9e-5 * 1500
    EXPECT_NEAR(zone_step(24.0, 32.0, 500.0, 3000.0, 2e-3, 1e7, 900.0), 24.135, 1e-12);
}

TEST(ZoneStep, ZeroFluxIsFixedPoint) {
    EXPECT_DOUBLE_EQ(zone_step(27.5, 27.5, 0.0, 0.0, 4e-3, 1.2e7, 900.0), 27.5);
}

TEST(ZoneCooling, LandsOnLimitWhenUncapped) {
    const double q = zone_cooling_demand(26.0, 32.0, 800.0, 24.5, 4e-3, 1.2e7, 900.0, 1e9);
    EXPECT_GT(q, 0.0);
    EXPECT_NEAR(zone_step(26.0, 32.0, 800.0, q, 4e-3, 1.2e7, 900.0), 24.5, 1e-9);
}

TEST(ZoneCooling, IdleBelowLimitAndCapped) {
    EXPECT_EQ(zone_cooling_demand(20.0, 20.0, 0.0, 24.5, 4e-3, 1.2e7, 900.0, 5000.0), 0.0);
    EXPECT_EQ(zone_cooling_demand(40.0, 45.0, 5000.0, 24.5, 4e-3, 1.2e7, 900.0, 2500.0), 2500.0);
}

TEST(Battery, ChargeAtSocMaxIsClamped) {
    DerSystem::Battery b{10.0, 0.9, 0.1, 0.9, 0.95, 0.95, 5.0};
    auto r = battery_step(b, 0.9, 5.0, 0.0, 0.25);
    EXPECT_EQ(r.charge_kw, 0.0);
    EXPECT_EQ(r.soc, 0.9);
}

TEST(Battery, SocUpdateFormula) {
    DerSystem::Battery b{10.0, 0.5, 0.1, 0.9, 0.9, 0.8, 4.0};
    auto c = battery_step(b, 0.5, 2.0, 0.0, 0.5);
    EXPECT_NEAR(c.soc, 0.5 + 0.9 * 2.0 * 0.5 / 10.0, 1e-12);
    auto d = battery_step(b, 0.5, 0.0, 2.0, 0.5);
    EXPECT_NEAR(d.soc, 0.5 - 2.0 / 0.8 * 0.5 / 10.0, 1e-12);
}

TEST(Battery, DischargeCurtailedToReachSocMinExactly) {
    DerSystem::Battery b{10.0, 0.15, 0.1, 0.9, 0.95, 0.9, 50.0};
    auto d = battery_step(b, 0.15, 0.0, 50.0, 1.0);
    EXPECT_NEAR(d.discharge_kw, 0.05 * 10.0 * 0.9, 1e-12);
    EXPECT_NEAR(d.soc, 0.1, 1e-12);
}

TEST(FanPower, ControlTypes) {
    HvacSystem h;
    h.fan.rated_power_w = 400.0;
    h.fan_ctrl.ctrl_type = FanControl::Constant;
    EXPECT_EQ(fan_power_w(h, 0.3), 400.0);
    EXPECT_EQ(fan_power_w(h, 0.0), 0.0);
    h.fan_ctrl.ctrl_type = FanControl::Vfd;
    EXPECT_NEAR(fan_power_w(h, 0.5), 50.0, 1e-12);
    h.fan_ctrl.ctrl_type = FanControl::Staged;
    h.fan_ctrl.stages = 2;
    EXPECT_NEAR(fan_power_w(h, 0.3), 50.0, 1e-12);
    EXPECT_NEAR(fan_power_w(h, 0.7), 400.0, 1e-12);
}

TEST(HvacPower, ChillerIsThermalOverCop) {
    HvacSystem h;
    h.chiller.rated_cop = 4.0;
    auto p = hvac_power(h, 2000.0);
    EXPECT_DOUBLE_EQ(p.chiller_w, 500.0);
    EXPECT_DOUBLE_EQ(p.pump_w, h.pump.rated_power_w);
    EXPECT_EQ(hvac_power(h, 0.0).total_w(), 0.0);
}

TEST(Windows, WrapAroundMidnight) {
    EXPECT_TRUE(hour_in_window(23.0, 22.0, 2.0));
    EXPECT_TRUE(hour_in_window(1.0, 22.0, 2.0));
    EXPECT_FALSE(hour_in_window(2.0, 22.0, 2.0));
    EXPECT_TRUE(hour_in_window(16.0, 16.0, 20.0));
    EXPECT_FALSE(hour_in_window(20.0, 16.0, 20.0));
}

TEST(Simulation, DayAt900sHas96Records) {
    auto r = run_simulation(reference_cluster(), EnvironmentSettings{}, "r", "reference");
    EXPECT_EQ(r.records.size(), 96u);
    EXPECT_DOUBLE_EQ(r.records.back().time_h, 23.75);
}

TEST(Simulation, Deterministic) {
    auto a = run_simulation(reference_cluster(), EnvironmentSettings{}, "r", "reference");
    auto b = run_simulation(reference_cluster(), EnvironmentSettings{}, "r", "reference");
    EXPECT_EQ(Json(a).dump(), Json(b).dump());
}

TEST(Simulation, DanglingControllerFailsValidation) {
    Cluster c = reference_cluster();
    c.controllers.at("thermostat_1").assigned_system = "hvac_missing";
    try {
        run_simulation(c, EnvironmentSettings{}, "r", "reference");
        FAIL() << "expected ValidationFailed";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), "ValidationFailed");
        EXPECT_NE(std::string(e.what()).find("hvac_missing"), std::string::npos);
    }
}

TEST(Simulation, ShortSeriesIsHorizonUncovered) {
    Cluster c = reference_cluster();
    auto& w = c.disturbances.at("weather_1");
    w.profile = "series";
    w.series_step_s = 3600.0;
    for (int h = 0; h < 12; ++h) w.series.push_back(SeriesRow{h * 3600.0, 30.0, 0.0, 1.0, 0.1});
    try {
        run_simulation(c, EnvironmentSettings{}, "r", "reference");
        FAIL() << "expected HorizonUncovered";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), "HorizonUncovered");
    }
}

TEST(Simulation, TimeConstantShorterThanStepRejected) {
    Cluster c = reference_cluster();
    c.buildings.at("building_1").zones[0].resistance_c_per_w = 1e-5;
    EXPECT_THROW(run_simulation(c, EnvironmentSettings{}, "r", "reference"), Error);
}

TEST(Environment, StepBeforeInitializeThrows) {
    Environment env(reference_cluster(), EnvironmentSettings{});
    try {
        env.step();
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), "Uninitialized");
    }
}

TEST(Environment, NonFiniteStateAborts) {
    Environment env(reference_cluster(), EnvironmentSettings{});
    env.initialize();
    env.mutable_state().zones[0].temperature_c = std::nan("");
    try {
        env.step();
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), "NonFiniteState");
    }
}

TEST(Environment, ResetRestoresInitialState) {
    Environment env(reference_cluster(), EnvironmentSettings{});
    env.initialize();
    const auto first = Json(env.step()).dump();
    env.step();
    env.reset();
    EXPECT_EQ(env.step_index(), 0);
    EXPECT_EQ(Json(env.step()).dump(), first);
}

TEST(Disturbances, CsvRoundTrip) {
    const std::string path = ::testing::TempDir() + "/dist.csv";
    {
        std::ofstream out(path);
        out << "timestamp,outdoor_c,irradiance_wm2,occupancy,price_per_kwh\n";
        for (int h = 0; h < 24; ++h) out << h * 3600 << ",30," << (h >= 8 && h < 16 ? 500 : 0) << ",1,0.2\n";
    }
    double step = 0;
    auto rows = read_disturbance_csv(path, &step);
    ASSERT_EQ(rows.size(), 24u);
    EXPECT_EQ(step, 3600.0);
    Cluster c = reference_cluster();
    auto& w = c.disturbances.at("weather_1");
    w.profile = "series";
    w.series = rows;
    w.series_step_s = step;
    auto r = run_simulation(c, EnvironmentSettings{}, "r", "reference");
    EXPECT_EQ(r.records[0].outdoor_c, 30.0);
    EXPECT_EQ(r.records[40].irradiance_wm2, 500.0);  // 10:00
}

TEST(Disturbances, BadHeaderRejected) {
    const std::string path = ::testing::TempDir() + "/bad.csv";
    {
        std::ofstream out(path);
        out << "time,temp\n0,1\n";
    }
    EXPECT_THROW(read_disturbance_csv(path, nullptr), Error);
}

// --- analysis oracles --------------------------------------------------------

namespace {

SimulationResult toy_run(std::vector<double> grid, std::vector<double> price) {
    SimulationResult r;
    r.run_id = "toy";
    r.timestep_s = 3600;
    r.horizon_hours = static_cast<double>(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        StepRecord s;
        s.time_h = static_cast<double>(i);
        s.grid_import_kw = grid[i];
        s.price = price[i];
        r.records.push_back(s);
    }
    return r;
}

}  // namespace

TEST(Analysis, CostIsDotProduct) {
    auto r = toy_run({1, 2, 0, 1}, {0.1, 0.3, 0.3, 0.1});
    EXPECT_NEAR(analyze(r, Facet::Cost).at("cost_usd").get<double>(), 0.80, 1e-12);
}

TEST(Analysis, NoPvMeansNullSelfConsumption) {
    Cluster c = reference_cluster();
    c.der_systems.at("der_1").pv.reset();
    auto m = analyze(run_simulation(c, EnvironmentSettings{}, "r", "x"), Facet::Flexibility);
    EXPECT_EQ(m.at("pv_curtailed_kwh").get<double>(), 0.0);
    EXPECT_TRUE(m.at("self_consumption_pct").is_null());
}

TEST(Analysis, IdleBatteryHasZeroCyclesAndInitialMinSoc) {
    Cluster c = reference_cluster();
    c.controllers.erase("battery_schedule_1");
    auto m = analyze(run_simulation(c, EnvironmentSettings{}, "r", "x"), Facet::Flexibility);
    EXPECT_EQ(m.at("efc").get<double>(), 0.0);
    EXPECT_EQ(m.at("min_soc").get<double>(), 0.5);
}

TEST(Analysis, NoBatteryMeansNullCycles) {
    Cluster c = reference_cluster();
    c.der_systems.at("der_1").battery.reset();
    auto m = analyze(run_simulation(c, EnvironmentSettings{}, "r", "x"), Facet::Flexibility);
    EXPECT_TRUE(m.at("efc").is_null());
    EXPECT_TRUE(m.at("min_soc").is_null());
}

TEST(Analysis, ComprehensiveIsUnion) {
    auto r = run_simulation(reference_cluster(), EnvironmentSettings{}, "r", "x");
    Json all = analyze(r, Facet::Comprehensive);
    std::size_t n = 0;
    for (auto f : {Facet::Energy, Facet::Cost, Facet::Comfort, Facet::Flexibility}) {
        const Json part = analyze(r, f);
        for (auto& [k, v] : part.items()) {
            EXPECT_EQ(all.at(k), v) << k;
            ++n;
        }
    }
    EXPECT_EQ(all.size(), n);
}

TEST(Comparison, SelfComparisonIsZero) {
    auto r = run_simulation(reference_cluster(), EnvironmentSettings{}, "r", "x");
    const Json m = compare(r, r, Facet::Comprehensive);
    for (auto& [k, v] : m.items()) {
        if (v.at("delta").is_null()) continue;
        EXPECT_EQ(v.at("delta").get<double>(), 0.0) << k;
        if (!v.at("delta_pct").is_null()) EXPECT_EQ(v.at("delta_pct").get<double>(), 0.0) << k;
    }
}

TEST(Comparison, PercentDeltaRelativeToBaseline) {
    auto a = toy_run({10}, {0.1});
    auto b = toy_run({9.16}, {0.1});
    a.records[0].hvac_elec_kw = 10.0;
    b.records[0].hvac_elec_kw = 9.16;
    auto m = compare(a, b, Facet::Energy).at("hvac_kwh");
    EXPECT_NEAR(m.at("delta_pct").get<double>(), -8.4, 1e-9);
    EXPECT_NEAR(m.at("delta").get<double>(), -0.84, 1e-12);
}

TEST(Comparison, ZeroBaselineGivesNullPercent) {
    auto a = toy_run({0}, {0.1});
    auto b = toy_run({1}, {0.1});
    EXPECT_TRUE(compare(a, b, Facet::Cost).at("cost_usd").at("delta_pct").is_null());
}

TEST(Comparison, MismatchedHorizonIncompatible) {
    auto a = toy_run({1, 1}, {0.1, 0.1});
    auto b = toy_run({1}, {0.1});
    try {
        compare(a, b, Facet::Energy);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), "IncompatibleRuns");
    }
}

// --- property suites ---------------------------------------------------------

class RandomConfigs : public ::testing::Test {
protected:
    std::mt19937_64 rng{20260101};
};

TEST_F(RandomConfigs, EnergyBalanceAndSocBounds) {
    for (int trial = 0; trial < 40; ++trial) {
        Cluster c = buildops::testing::random_cluster(rng);
        auto r = run_simulation(c, EnvironmentSettings{}, "p", "x");
        const auto* bat = c.der_systems.at("der_1").battery ? &*c.der_systems.at("der_1").battery : nullptr;
        for (const auto& s : r.records) {
            EXPECT_LE(std::abs(s.pv_used_kw + s.batt_charge_from_pv_kw + s.grid_import_kw + s.batt_discharge_kw -
                               s.load_kw - s.batt_charge_kw),
                      1e-9);
            EXPECT_LE(std::abs(s.pv_used_kw + s.batt_charge_from_pv_kw + s.curtailed_kw - s.pv_gen_kw), 1e-9);
            EXPECT_GE(s.grid_import_kw, -1e-9);
            EXPECT_GE(s.curtailed_kw, -1e-12);
            if (bat) {
                EXPECT_GE(s.soc, bat->soc_min - 1e-12);
                EXPECT_LE(s.soc, bat->soc_max + 1e-12);
            }
        }
    }
}

TEST_F(RandomConfigs, ChillerEnergyScalesInverselyWithCop) {
    for (int trial = 0; trial < 40; ++trial) {
        Cluster c = buildops::testing::random_cluster(rng);
        c.hvac_systems.at("hvac_1").chiller.rated_cop = 3.0;
        auto a = run_simulation(c, EnvironmentSettings{}, "a", "x");
        c.hvac_systems.at("hvac_1").chiller.rated_cop = 4.5;
        auto b = run_simulation(c, EnvironmentSettings{}, "b", "x");
        const double ea = chiller_kwh(a);
        if (ea == 0.0) continue;
        EXPECT_NEAR(chiller_kwh(b) / ea, 3.0 / 4.5, 1e-9 * (3.0 / 4.5));
        for (std::size_t i = 0; i < a.records.size(); ++i) {
            ASSERT_EQ(a.records[i].zone_temps_c, b.records[i].zone_temps_c);
        }
    }
}

TEST_F(RandomConfigs, PrecoolNeverWarmsWindowEndOrRaisesPeakCooling) {
    for (int trial = 0; trial < 40; ++trial) {
        Cluster c = buildops::testing::random_cluster(rng);
        auto base = run_simulation(c, EnvironmentSettings{}, "a", "x");
        Controller p;
        p.controller_id = "precool_1";
        p.kind = ControllerKind::Precool;
        p.assigned_system = "hvac_1";
        p.offset_c = 2.0;
        p.window_start_hour = 14.0;
        p.window_end_hour = 16.0;
        c.controllers[p.controller_id] = p;
        auto pre = run_simulation(c, EnvironmentSettings{}, "b", "x");
        const std::size_t end_idx = 16 * 4 - 1;  // interval ending at 16:00
        for (std::size_t z = 0; z < base.records[end_idx].zone_temps_c.size(); ++z) {
            EXPECT_LE(pre.records[end_idx].zone_temps_c[z], base.records[end_idx].zone_temps_c[z] + 1e-12);
        }
        for (std::size_t i = 0; i < base.records.size(); ++i) {
            if (!base.records[i].peak) continue;
            EXPECT_LE(pre.records[i].q_cool_w, base.records[i].q_cool_w + 1e-9);
        }
    }
}
