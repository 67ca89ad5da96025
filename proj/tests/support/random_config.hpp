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

#include <random>

#include "buildops/runtime/model.hpp"

// Random but simulation-eligible clusters for the physics property suites.
namespace buildops::testing {

inline runtime::Cluster random_cluster(std::mt19937_64& rng, int timestep_s = 900) {
    using namespace runtime;
    auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };

    Cluster c = reference_configuration().clusters.at("cluster_1");
    c.buildings.clear();
    const int n_buildings = 1 + static_cast<int>(rng() % 2);
    std::vector<std::string> ids;
    for (int b = 0; b < n_buildings; ++b) {
        Building bld;
        bld.building_id = "b" + std::to_string(b);
        const int n_zones = 1 + static_cast<int>(rng() % 3);
        for (int z = 0; z < n_zones; ++z) {
            ThermalZone tz;
            tz.zone_id = "z" + std::to_string(z);
            tz.capacitance_j_per_c = uni(2e6, 3e7);
            // keep R*C comfortably above the timestep
            const double r_min = 1.2 * timestep_s / tz.capacitance_j_per_c;
            tz.resistance_c_per_w = std::max(r_min, uni(1e-3, 2e-2));
            tz.temperature_c = uni(20.0, 30.0);
            tz.internal_gain_w = uni(0.0, 1500.0);
            tz.solar_aperture_m2 = uni(0.0, 10.0);
            tz.setpoint_c = uni(21.0, 26.0);
            tz.deadband_c = uni(0.0, 2.0);
            tz.comfort_low_c = tz.setpoint_c - 3.0;
            tz.comfort_high_c = tz.setpoint_c + 1.5;
            bld.zones.push_back(tz);
        }
        if (coin(0.8)) bld.electrical_zone = ElectricalZone{"e0", uni(0.0, 3.0)};
        ids.push_back(bld.building_id);
        c.buildings[bld.building_id] = bld;
    }

    HvacSystem& h = c.hvac_systems.at("hvac_1");
    h.assigned_buildings = ids;
    h.chiller.rated_capacity_w = uni(3000.0, 30000.0);
    h.chiller.rated_cop = uni(2.5, 6.0);
    h.coil.effectiveness = uni(0.5, 1.0);
    const int ctrl = static_cast<int>(rng() % 3);
    h.fan_ctrl.ctrl_type = static_cast<FanControl>(ctrl);
    h.fan_ctrl.stages = h.fan_ctrl.ctrl_type == FanControl::Staged ? 2 + static_cast<int>(rng() % 3) : 0;
    if (coin(0.5)) h.tower = HvacSystem::Tower{};

    DerSystem& d = c.der_systems.at("der_1");
    d.assigned_buildings = ids;
    if (coin(0.85)) {
        DerSystem::Battery b;
        b.capacity = uni(2.0, 30.0);
        b.soc_min = uni(0.0, 0.3);
        b.soc_max = uni(0.7, 1.0);
        b.soc = uni(b.soc_min, b.soc_max);
        b.charge_eff = uni(0.8, 1.0);
        b.discharge_eff = uni(0.8, 1.0);
        b.max_power = uni(0.5, 10.0);
        d.battery = b;
    } else {
        d.battery.reset();
    }
    if (coin(0.85)) {
        d.pv = DerSystem::Pv{uni(0.0, 15.0)};
    } else {
        d.pv.reset();
    }

    Controller& s = c.controllers.at("battery_schedule_1");
    s.charge_start_hour = std::floor(uni(0.0, 8.0));
    s.charge_end_hour = s.charge_start_hour + std::floor(uni(1.0, 6.0));
    if (coin(0.3)) {
        s.discharge_start_hour = std::floor(uni(10.0, 16.0));
        s.discharge_end_hour = std::floor(uni(17.0, 23.0));
    }
    if (coin(0.3)) {
        Controller& t = c.controllers.at("thermostat_1");
        t.setpoint_c = uni(22.0, 26.0);
        t.deadband_c = uni(0.0, 1.5);
    }

    Disturbance& w = c.disturbances.at("weather_1");
    w.mean_temp_c = uni(20.0, 34.0);
    w.temp_amplitude_c = uni(2.0, 8.0);
    w.peak_irradiance_wm2 = uni(0.0, 1000.0);
    Disturbance& o = c.disturbances.at("occupancy_1");
    o.away_level = uni(0.0, 1.0);
    Disturbance& p = c.disturbances.at("price_1");
    p.offpeak_price = uni(0.05, 0.2);
    p.peak_price = uni(0.2, 0.6);
    return c;
}

}  // namespace buildops::testing
