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

#include <memory>
#include <string>
#include <vector>

#include "buildops/runtime/model.hpp"

namespace buildops::runtime {

// ---------------------------------------------------------------------------
// Physics primitives
// ---------------------------------------------------------------------------

/// One explicit step of the 1R1C zone:
///   T' = T + dt/C * ((T_out - T)/R + Q_int - Q_cool)
double zone_step(double temp_c, double outdoor_c, double q_int_w, double q_cool_w, double resistance_c_per_w,
                 double capacitance_j_per_c, double dt_s);

/// Cooling the plant delivers to a zone this step. Cooling engages only when
/// the free-floating next temperature would exceed `limit_c`, delivers
/// exactly enough to land on the limit, and is capped by `max_cooling_w`.
double zone_cooling_demand(double temp_c, double outdoor_c, double q_int_w, double limit_c,
                           double resistance_c_per_w, double capacitance_j_per_c, double dt_s,
                           double max_cooling_w);

struct BatteryStepResult {
    double charge_kw = 0.0;     // bus side
    double discharge_kw = 0.0;  // bus side
    double soc = 0.0;
};

/// soc' = soc + (eta_c*P_ch - P_dis/eta_d) * dt_h / capacity, with both
/// requests curtailed by max_power and by the room left inside
/// [soc_min, soc_max].
BatteryStepResult battery_step(const DerSystem::Battery& battery, double soc, double charge_request_kw,
                               double discharge_request_kw, double dt_h);

/// Fan electric power at part-load ratio plr in [0, 1].
double fan_power_w(const HvacSystem& system, double plr);

/// Chiller + fan + pump + tower electric power in W.
struct HvacPower {
    double chiller_w = 0.0;
    double fan_w = 0.0;
    double pump_w = 0.0;
    double tower_w = 0.0;
    double total_w() const { return chiller_w + fan_w + pump_w + tower_w; }
};
HvacPower hvac_power(const HvacSystem& system, double q_cool_w);

bool hour_in_window(double hour_of_day, double start, double end);

// ---------------------------------------------------------------------------
// Disturbances
// ---------------------------------------------------------------------------

struct DisturbanceSample {
    double hour_of_day = 0.0;
    double outdoor_c = 0.0;
    double irradiance_wm2 = 0.0;
    double occupancy = 1.0;
    double price_per_kwh = 0.0;
    bool peak = false;
};

/// Reads `timestamp,outdoor_c,irradiance_wm2,occupancy,price_per_kwh` where
/// timestamp is seconds from the simulation start and rows are evenly spaced.
/// Throws Error("InvalidArgument") on a bad header or row.
std::vector<SeriesRow> read_disturbance_csv(const std::string& path, double* step_s);

/// Peak window of the cluster's price disturbance (default 16-20 h).
std::pair<double, double> peak_window(const Cluster& cluster);

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

struct StepRecord {
    double time_h = 0.0;          // interval start, hours from simulation start
    double hour_of_day = 0.0;
    double outdoor_c = 0.0;
    double irradiance_wm2 = 0.0;
    double occupancy = 1.0;
    std::vector<double> zone_temps_c;  // end of interval
    double q_cool_w = 0.0;
    double chiller_elec_kw = 0.0;
    double hvac_elec_kw = 0.0;
    double load_kw = 0.0;
    double pv_gen_kw = 0.0;
    double pv_used_kw = 0.0;           // PV serving the load directly
    double batt_charge_kw = 0.0;
    double batt_charge_from_pv_kw = 0.0;
    double batt_discharge_kw = 0.0;    // delivered to the bus
    double curtailed_kw = 0.0;
    double soc = 0.0;                  // capacity weighted, end of interval
    double grid_import_kw = 0.0;
    double price = 0.0;
    bool peak = false;
};

struct ZoneInfo {
    std::string building_id;
    std::string zone_id;
    double comfort_low_c = 0.0;
    double comfort_high_c = 0.0;
};

struct SimulationResult {
    std::string run_id;
    std::string config_id;
    std::string cluster_id;
    std::string status = "completed";
    int timestep_s = 900;
    double horizon_hours = 24.0;
    double start_hour = 0.0;
    double peak_start_hour = 16.0;
    double peak_end_hour = 20.0;
    std::vector<ZoneInfo> zones;
    double battery_capacity_kwh = 0.0;  // 0 when the cluster has no battery
    double initial_soc = 0.0;
    double battery_throughput_kwh = 0.0;
    double pv_rated_kw = 0.0;
    std::vector<StepRecord> records;

    double dt_h() const { return timestep_s / 3600.0; }
};

void to_json(Json& j, const StepRecord& r);
void from_json(const Json& j, StepRecord& r);
void to_json(Json& j, const SimulationResult& r);
void from_json(const Json& j, SimulationResult& r);

// ---------------------------------------------------------------------------
// Environment: initialize -> reset -> step
// ---------------------------------------------------------------------------

struct ZoneState {
    std::string building_id;
    ThermalZone params;
    std::string hvac_id;         // empty when no plant serves the zone
    double max_cooling_w = 0.0;  // this zone's share of the plant
    double temperature_c = 0.0;
    double limit_c = 0.0;        // action: cooling limit for this step
    double q_int_w = 0.0;
    double q_cool_w = 0.0;
};

enum class BatteryCommand { Idle, Charge, Discharge };

struct BatteryState {
    std::string system_id;
    DerSystem::Battery params;
    double soc = 0.0;
    double throughput_kwh = 0.0;
    BatteryCommand command = BatteryCommand::Idle;  // action
};

/// Everything the modules read and write during one step.
struct EnvState {
    double time_s = 0.0;
    double dt_s = 900.0;
    double start_hour = 0.0;
    DisturbanceSample disturbance;
    std::vector<ZoneState> zones;
    std::vector<BatteryState> batteries;
    StepRecord record;
};

/// Common interface of disturbance, controller and dynamic modules.
class Module {
public:
    virtual ~Module() = default;
    virtual void initialize(const Cluster& cluster, const EnvironmentSettings& settings) { (void)cluster, (void)settings; }
    virtual void reset(EnvState& state) { (void)state; }
    virtual void step(EnvState& state) = 0;
};

class Environment {
public:
    Environment(Cluster cluster, EnvironmentSettings settings);
    ~Environment();
    Environment(Environment&&) noexcept;
    Environment& operator=(Environment&&) noexcept;

    /// Validates the cluster and builds the module set. Throws
    /// Error("ValidationFailed") or Error("HorizonUncovered").
    void initialize();
    void reset();
    /// Runs disturbance modules, then controllers, then dynamics, and
    /// returns the record of the interval. Throws Error("Uninitialized") or
    /// Error("NonFiniteState").
    const StepRecord& step();

    bool done() const;
    int steps_total() const;
    int step_index() const { return step_index_; }
    const EnvState& state() const { return state_; }
    EnvState& mutable_state() { return state_; }

private:
    Cluster cluster_;
    EnvironmentSettings settings_;
    std::vector<std::unique_ptr<Module>> disturbance_modules_;
    std::vector<std::unique_ptr<Module>> controller_modules_;
    std::vector<std::unique_ptr<Module>> dynamic_modules_;
    EnvState state_;
    bool initialized_ = false;
    int step_index_ = 0;
};

/// Runs a full horizon. Deterministic in (cluster, settings).
SimulationResult run_simulation(const Cluster& cluster, const EnvironmentSettings& settings,
                                const std::string& run_id, const std::string& config_id);

}  // namespace buildops::runtime
