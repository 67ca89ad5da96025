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

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

// Configuration hierarchy: configuration -> cluster -> building / system ->
// component. All maps are ordered by id so iteration (and therefore every
// simulation) is deterministic.

namespace buildops::runtime {

using Json = nlohmann::json;

struct ThermalZone {
    std::string zone_id;
    double temperature_c = 24.0;          // initial state
    double capacitance_j_per_c = 1.0e7;
    double resistance_c_per_w = 5.0e-3;
    double internal_gain_w = 500.0;       // scaled by occupancy
    double solar_aperture_m2 = 0.0;       // effective area for irradiance gain
    double setpoint_c = 24.0;
    double deadband_c = 1.0;
    double comfort_low_c = 20.0;
    double comfort_high_c = 26.0;
};

struct ElectricalZone {
    std::string zone_id;
    double base_load_kw = 0.5;            // scaled by occupancy
};

// Accepted and persisted; no dynamics.
struct WaterZone {
    std::string zone_id;
};

struct Building {
    std::string building_id;
    std::string name;
    std::vector<ThermalZone> zones;
    std::optional<ElectricalZone> electrical_zone;
    std::optional<WaterZone> water_zone;
    Json metadata = Json::object();
};

enum class FanControl { Constant, Staged, Vfd };

std::string to_string(FanControl c);
FanControl fan_control_from_string(const std::string& s);

struct HvacSystem {
    struct Fan {
        double rated_flow_m3s = 0.4;
        double rated_power_w = 400.0;
    };
    struct FanCtrl {
        FanControl ctrl_type = FanControl::Constant;
        double rated_flow_m3s = 0.4;
        int stages = 0;
    };
    struct Coil {
        double effectiveness = 0.7;
    };
    struct Pump {
        double rated_flow_m3s = 0.01;
        double rated_power_w = 1500.0;
    };
    struct Chiller {
        double rated_capacity_w = 15000.0;
        double rated_cop = 4.5;
    };
    struct Tower {
        double rated_capacity_w = 15000.0;
        double rated_fan_power_w = 400.0;
        double pump_power_per_flow = 85000.0;  // W/(m3/s)
        double min_approach_c = 3.0;
        double max_approach_c = 7.0;
    };

    std::string system_id;
    std::string name;
    Fan fan;
    FanCtrl fan_ctrl;
    Coil coil;
    Pump pump;
    Chiller chiller;
    std::optional<Tower> tower;
    std::vector<std::string> assigned_buildings;
    Json parameters = Json::object();

    double max_cooling_w() const { return coil.effectiveness * chiller.rated_capacity_w; }
};

struct DerSystem {
    struct Battery {
        double capacity = 10.0;           // kWh
        double soc = 0.5;                 // initial state, fraction
        double soc_min = 0.1;
        double soc_max = 0.9;
        double charge_eff = 0.95;
        double discharge_eff = 0.95;
        double max_power = 5.0;           // kW
    };
    struct Pv {
        double rated = 5.0;               // kW at 1000 W/m2
    };

    std::string system_id;
    std::string name;
    std::optional<Battery> battery;
    std::optional<Pv> pv;
    std::vector<std::string> assigned_buildings;
};

enum class ControllerKind { ThermostatDeadband, Precool, DerSchedule };

std::string to_string(ControllerKind k);
ControllerKind controller_kind_from_string(const std::string& s);

struct Controller {
    std::string controller_id;
    ControllerKind kind = ControllerKind::ThermostatDeadband;
    std::string assigned_system;
    bool enabled = true;
    // thermostat_deadband: overrides for the zones of the assigned system
    std::optional<double> setpoint_c;
    std::optional<double> deadband_c;
    // precool: setpoint lowered by offset_c inside [window_start, window_end)
    double offset_c = 2.0;
    double window_start_hour = 14.0;
    double window_end_hour = 16.0;
    // der_schedule: charge at max power inside the charge window, discharge
    // toward the load inside the discharge window (defaults to the price peak)
    double charge_start_hour = 0.0;
    double charge_end_hour = 6.0;
    std::optional<double> discharge_start_hour;
    std::optional<double> discharge_end_hour;
};

enum class DisturbanceKind { Weather, Occupancy, Price };

std::string to_string(DisturbanceKind k);
DisturbanceKind disturbance_kind_from_string(const std::string& s);

/// One row of an explicit disturbance series (CSV ingestion).
struct SeriesRow {
    double time_s = 0.0;
    double outdoor_c = 0.0;
    double irradiance_wm2 = 0.0;
    double occupancy = 1.0;
    double price_per_kwh = 0.0;
};

struct Disturbance {
    std::string disturbance_id;
    DisturbanceKind kind = DisturbanceKind::Weather;
    // Built-in profile name, or "series" when rows came from a CSV file.
    std::string profile;
    // weather
    double mean_temp_c = 29.0;
    double temp_amplitude_c = 5.0;
    double peak_irradiance_wm2 = 850.0;
    // occupancy
    double occupied_level = 1.0;
    double away_level = 0.5;
    // price
    double offpeak_price = 0.12;
    double peak_price = 0.32;
    double peak_start_hour = 16.0;
    double peak_end_hour = 20.0;
    std::string source_path;
    std::vector<SeriesRow> series;
    double series_step_s = 0.0;
};

struct Cluster {
    std::string cluster_id;
    std::string description;
    Json metadata = Json::object();
    std::map<std::string, Building> buildings;
    std::map<std::string, HvacSystem> hvac_systems;
    std::map<std::string, DerSystem> der_systems;
    std::map<std::string, Controller> controllers;
    std::map<std::string, Disturbance> disturbances;

    /// Thermal / electrical / water groupings derived from the members.
    Json domains() const;
    bool has_system(const std::string& id) const {
        return hvac_systems.count(id) || der_systems.count(id);
    }
};

struct Configuration {
    std::string config_id;
    std::string description;
    std::map<std::string, Cluster> clusters;
    Json metadata = Json::object();
};

struct EnvironmentSettings {
    std::string environment_id = "default";
    int timestep_s = 900;
    double horizon_hours = 24.0;
    double start_hour = 0.0;
};

/// Invariant and cross-reference check. Each entry names the offending id.
std::vector<std::string> validate_configuration(const Configuration& config);
std::vector<std::string> validate_cluster(const Cluster& cluster);

/// The shipped reference test building: one cluster, one single-zone
/// building, a fan-coil/chiller plant, PV plus battery, thermostat and
/// battery schedule controllers, design-day weather, occupancy and TOU price.
Configuration reference_configuration(const std::string& config_id = "reference");

void to_json(Json& j, const ThermalZone& v);
void from_json(const Json& j, ThermalZone& v);
void to_json(Json& j, const Building& v);
void from_json(const Json& j, Building& v);
void to_json(Json& j, const HvacSystem& v);
void from_json(const Json& j, HvacSystem& v);
void to_json(Json& j, const DerSystem& v);
void from_json(const Json& j, DerSystem& v);
void to_json(Json& j, const Controller& v);
void from_json(const Json& j, Controller& v);
void to_json(Json& j, const Disturbance& v);
void from_json(const Json& j, Disturbance& v);
void to_json(Json& j, const Cluster& v);
void from_json(const Json& j, Cluster& v);
void to_json(Json& j, const Configuration& v);
void from_json(const Json& j, Configuration& v);
void to_json(Json& j, const EnvironmentSettings& v);
void from_json(const Json& j, EnvironmentSettings& v);

// Shallow-merge helpers used by the *_update tools: only keys present in
// `patch` change; nested component maps merge one level down.
void apply_zone_patch(ThermalZone& zone, const Json& patch);
void apply_hvac_patch(HvacSystem& system, const Json& patch);
void apply_der_patch(DerSystem& system, const Json& patch);
void apply_controller_patch(Controller& controller, const Json& patch);
void apply_disturbance_patch(Disturbance& disturbance, const Json& patch);
void apply_environment_patch(EnvironmentSettings& env, const Json& patch);

}  // namespace buildops::runtime
