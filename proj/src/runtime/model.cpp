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

#include "buildops/runtime/model.hpp"

#include <cmath>
#include <set>

#include "buildops/error.hpp"

namespace buildops::runtime {

namespace {

bool in_day(double h) { return std::isfinite(h) && h >= 0.0 && h < 24.0; }

template <typename T>
std::optional<T> opt_value(const Json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<T>();
}

// Merge `patch` into `target`, one level deep for nested maps. Keys must
// already exist in `target` unless listed in `optional_components`, whose
// defaults are supplied by `component_default`.
void merge_patch(Json& target, const Json& patch, const std::string& what,
                 const std::map<std::string, Json>& optional_components = {}) {
    if (!patch.is_object()) throw Error("InvalidArgument", what + " patch must be a map");
    for (auto it = patch.begin(); it != patch.end(); ++it) {
        if (it->is_null()) continue;
        const auto& key = it.key();
        if (!target.contains(key) || target.at(key).is_null()) {
            auto opt = optional_components.find(key);
            if (opt == optional_components.end()) {
                throw Error("InvalidArgument", "unknown " + what + " field '" + key + "'");
            }
            target[key] = opt->second;
        }
        Json& slot = target[key];
        if (slot.is_object() && it->is_object()) {
            for (auto sub = it->begin(); sub != it->end(); ++sub) {
                if (!slot.contains(sub.key())) {
                    throw Error("InvalidArgument", "unknown " + what + " field '" + key + "." + sub.key() + "'");
                }
                slot[sub.key()] = *sub;
            }
        } else {
            slot = *it;
        }
    }
}

void zone_errors(const ThermalZone& z, const std::string& where, std::vector<std::string>& out) {
    if (!(z.capacitance_j_per_c > 0)) out.push_back(where + ": capacitance must be > 0");
    if (!(z.resistance_c_per_w > 0)) out.push_back(where + ": resistance must be > 0");
    if (!(z.deadband_c >= 0)) out.push_back(where + ": deadband must be >= 0");
    if (!(z.comfort_low_c < z.comfort_high_c)) out.push_back(where + ": comfort_low must be < comfort_high");
    if (!std::isfinite(z.temperature_c)) out.push_back(where + ": temperature must be finite");
}

void hvac_errors(const HvacSystem& s, std::vector<std::string>& out) {
    const std::string where = "hvac system '" + s.system_id + "'";
    if (!(s.chiller.rated_cop > 0)) out.push_back(where + ": rated_cop must be > 0");
    if (!(s.coil.effectiveness > 0 && s.coil.effectiveness <= 1)) {
        out.push_back(where + ": coil effectiveness must be in (0, 1]");
    }
    if (!(s.chiller.rated_capacity_w >= 0)) out.push_back(where + ": rated_capacity_W must be >= 0");
    if (s.fan_ctrl.ctrl_type == FanControl::Staged && s.fan_ctrl.stages < 2) {
        out.push_back(where + ": staged fan control needs stages >= 2");
    }
}

void der_errors(const DerSystem& s, std::vector<std::string>& out) {
    const std::string where = "der system '" + s.system_id + "'";
    if (s.battery) {
        const auto& b = *s.battery;
        if (!(b.capacity > 0)) out.push_back(where + ": battery capacity must be > 0");
        if (!(b.soc_min <= b.soc && b.soc <= b.soc_max)) {
            out.push_back(where + ": battery soc must satisfy soc_min <= soc <= soc_max");
        }
        if (!(b.soc_min >= 0 && b.soc_max <= 1)) out.push_back(where + ": soc bounds must lie in [0, 1]");
        if (!(b.charge_eff > 0 && b.charge_eff <= 1) || !(b.discharge_eff > 0 && b.discharge_eff <= 1)) {
            out.push_back(where + ": battery efficiencies must be in (0, 1]");
        }
        if (!(b.max_power >= 0)) out.push_back(where + ": battery max_power must be >= 0");
    }
    if (s.pv && !(s.pv->rated >= 0)) out.push_back(where + ": pv rated must be >= 0");
}

void controller_errors(const Controller& c, std::vector<std::string>& out) {
    const std::string where = "controller '" + c.controller_id + "'";
    if (c.kind == ControllerKind::Precool) {
        if (!(c.offset_c > 0)) out.push_back(where + ": precool offset must be > 0");
        if (!in_day(c.window_start_hour) || !in_day(c.window_end_hour)) {
            out.push_back(where + ": precool window must lie within [0, 24)");
        }
    }
    if (c.kind == ControllerKind::DerSchedule) {
        if (!in_day(c.charge_start_hour) || !in_day(c.charge_end_hour)) {
            out.push_back(where + ": charge window must lie within [0, 24)");
        }
        if ((c.discharge_start_hour && !in_day(*c.discharge_start_hour)) ||
            (c.discharge_end_hour && !in_day(*c.discharge_end_hour))) {
            out.push_back(where + ": discharge window must lie within [0, 24)");
        }
    }
    if (c.kind == ControllerKind::ThermostatDeadband && c.deadband_c && !(*c.deadband_c >= 0)) {
        out.push_back(where + ": deadband must be >= 0");
    }
}

Json series_to_json(const std::vector<SeriesRow>& rows) {
    Json out = Json::array();
    for (const auto& r : rows) {
        out.push_back(Json::array({r.time_s, r.outdoor_c, r.irradiance_wm2, r.occupancy, r.price_per_kwh}));
    }
    return out;
}

std::vector<SeriesRow> series_from_json(const Json& j) {
    std::vector<SeriesRow> rows;
    for (const auto& r : j) {
        rows.push_back(SeriesRow{r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>(),
                                 r.at(3).get<double>(), r.at(4).get<double>()});
    }
    return rows;
}

}  // namespace

std::string to_string(FanControl c) {
    switch (c) {
        case FanControl::Constant: return "constant";
        case FanControl::Staged: return "staged";
        case FanControl::Vfd: return "vfd";
    }
    return "constant";
}

FanControl fan_control_from_string(const std::string& s) {
    if (s == "constant") return FanControl::Constant;
    if (s == "staged") return FanControl::Staged;
    if (s == "vfd") return FanControl::Vfd;
    throw Error("InvalidArgument", "unknown fan ctrl_type '" + s + "'");
}

std::string to_string(ControllerKind k) {
    switch (k) {
        case ControllerKind::ThermostatDeadband: return "thermostat_deadband";
        case ControllerKind::Precool: return "precool";
        case ControllerKind::DerSchedule: return "der_schedule";
    }
    return "thermostat_deadband";
}

ControllerKind controller_kind_from_string(const std::string& s) {
    if (s == "thermostat_deadband") return ControllerKind::ThermostatDeadband;
    if (s == "precool") return ControllerKind::Precool;
    if (s == "der_schedule") return ControllerKind::DerSchedule;
    throw Error("InvalidArgument", "unknown controller type '" + s + "'");
}

std::string to_string(DisturbanceKind k) {
    switch (k) {
        case DisturbanceKind::Weather: return "weather";
        case DisturbanceKind::Occupancy: return "occupancy";
        case DisturbanceKind::Price: return "price";
    }
    return "weather";
}

DisturbanceKind disturbance_kind_from_string(const std::string& s) {
    if (s == "weather") return DisturbanceKind::Weather;
    if (s == "occupancy") return DisturbanceKind::Occupancy;
    if (s == "price") return DisturbanceKind::Price;
    throw Error("InvalidArgument", "unknown disturbance kind '" + s + "'");
}

Json Cluster::domains() const {
    Json thermal = Json::array(), electrical = Json::array(), water = Json::array();
    for (const auto& [id, s] : hvac_systems) thermal.push_back(id);
    for (const auto& [bid, b] : buildings) {
        for (const auto& z : b.zones) thermal.push_back(bid + "/" + z.zone_id);
        if (b.electrical_zone) electrical.push_back(bid + "/" + b.electrical_zone->zone_id);
        if (b.water_zone) water.push_back(bid + "/" + b.water_zone->zone_id);
    }
    for (const auto& [id, s] : der_systems) electrical.push_back(id);
    return Json{{"thermal", thermal}, {"electrical", electrical}, {"water", water}};
}

std::vector<std::string> validate_cluster(const Cluster& c) {
    std::vector<std::string> out;
    const std::string where = "cluster '" + c.cluster_id + "'";
    for (const auto& [bid, b] : c.buildings) {
        std::set<std::string> zone_ids;
        for (const auto& z : b.zones) {
            if (!zone_ids.insert(z.zone_id).second) {
                out.push_back("building '" + bid + "': duplicate zone '" + z.zone_id + "'");
            }
            zone_errors(z, "zone '" + bid + "/" + z.zone_id + "'", out);
        }
    }
    for (const auto& [id, s] : c.hvac_systems) {
        if (c.der_systems.count(id)) out.push_back(where + ": system id '" + id + "' used twice");
        hvac_errors(s, out);
        for (const auto& b : s.assigned_buildings) {
            if (!c.buildings.count(b)) {
                out.push_back("hvac system '" + id + "' is assigned to missing building '" + b + "'");
            }
        }
    }
    for (const auto& [id, s] : c.der_systems) {
        der_errors(s, out);
        for (const auto& b : s.assigned_buildings) {
            if (!c.buildings.count(b)) {
                out.push_back("der system '" + id + "' is assigned to missing building '" + b + "'");
            }
        }
    }
    for (const auto& [id, ctl] : c.controllers) {
        controller_errors(ctl, out);
        const bool wants_der = ctl.kind == ControllerKind::DerSchedule;
        const bool found = wants_der ? c.der_systems.count(ctl.assigned_system) > 0
                                     : c.hvac_systems.count(ctl.assigned_system) > 0;
        if (!found) {
            out.push_back("controller '" + id + "' is assigned to missing " + (wants_der ? "der" : "hvac") +
                          " system '" + ctl.assigned_system + "'");
        }
    }
    int weather = 0, occupancy = 0, price = 0;
    for (const auto& [id, d] : c.disturbances) {
        weather += d.kind == DisturbanceKind::Weather;
        occupancy += d.kind == DisturbanceKind::Occupancy;
        price += d.kind == DisturbanceKind::Price;
        if (d.kind == DisturbanceKind::Price &&
            (!in_day(d.peak_start_hour) || !(d.peak_end_hour > 0 && d.peak_end_hour <= 24))) {
            out.push_back("disturbance '" + id + "': peak window must lie within [0, 24]");
        }
    }
    if (weather > 1 || occupancy > 1 || price > 1) {
        out.push_back(where + ": at most one disturbance of each kind may be active");
    }
    return out;
}

std::vector<std::string> validate_configuration(const Configuration& config) {
    std::vector<std::string> out;
    for (const auto& [id, c] : config.clusters) {
        auto errs = validate_cluster(c);
        out.insert(out.end(), errs.begin(), errs.end());
    }
    return out;
}

void to_json(Json& j, const ThermalZone& v) {
    j = Json{{"zone_id", v.zone_id},
             {"temperature_C", v.temperature_c},
             {"capacitance_J_per_C", v.capacitance_j_per_c},
             {"resistance_C_per_W", v.resistance_c_per_w},
             {"internal_gain_W", v.internal_gain_w},
             {"solar_aperture_m2", v.solar_aperture_m2},
             {"setpoint_C", v.setpoint_c},
             {"deadband_C", v.deadband_c},
             {"comfort_low_C", v.comfort_low_c},
             {"comfort_high_C", v.comfort_high_c}};
}

void from_json(const Json& j, ThermalZone& v) {
    ThermalZone d;
    v.zone_id = j.at("zone_id").get<std::string>();
    v.temperature_c = j.value("temperature_C", d.temperature_c);
    v.capacitance_j_per_c = j.value("capacitance_J_per_C", d.capacitance_j_per_c);
    v.resistance_c_per_w = j.value("resistance_C_per_W", d.resistance_c_per_w);
    v.internal_gain_w = j.value("internal_gain_W", d.internal_gain_w);
    v.solar_aperture_m2 = j.value("solar_aperture_m2", d.solar_aperture_m2);
    v.setpoint_c = j.value("setpoint_C", d.setpoint_c);
    v.deadband_c = j.value("deadband_C", d.deadband_c);
    v.comfort_low_c = j.value("comfort_low_C", d.comfort_low_c);
    v.comfort_high_c = j.value("comfort_high_C", d.comfort_high_c);
}

void to_json(Json& j, const Building& v) {
    j = Json{{"building_id", v.building_id}, {"building_name", v.name}, {"thermal_zones", v.zones},
             {"metadata", v.metadata}};
    j["electrical_zone"] = v.electrical_zone
                               ? Json{{"zone_id", v.electrical_zone->zone_id},
                                      {"base_load_kW", v.electrical_zone->base_load_kw}}
                               : Json(nullptr);
    j["water_zone"] = v.water_zone ? Json{{"zone_id", v.water_zone->zone_id}} : Json(nullptr);
}

void from_json(const Json& j, Building& v) {
    v.building_id = j.at("building_id").get<std::string>();
    v.name = j.value("building_name", "");
    v.zones = j.value("thermal_zones", std::vector<ThermalZone>{});
    v.metadata = j.value("metadata", Json::object());
    v.electrical_zone.reset();
    v.water_zone.reset();
    if (j.contains("electrical_zone") && j.at("electrical_zone").is_object()) {
        const auto& e = j.at("electrical_zone");
        v.electrical_zone = ElectricalZone{e.at("zone_id").get<std::string>(), e.value("base_load_kW", 0.5)};
    }
    if (j.contains("water_zone") && j.at("water_zone").is_object()) {
        v.water_zone = WaterZone{j.at("water_zone").at("zone_id").get<std::string>()};
    }
}

namespace {

Json tower_json(const HvacSystem::Tower& t) {
    return Json{{"rated_capacity_W", t.rated_capacity_w},
                {"rated_fan_power_W", t.rated_fan_power_w},
                {"pump_power_per_flow", t.pump_power_per_flow},
                {"min_approach_C", t.min_approach_c},
                {"max_approach_C", t.max_approach_c}};
}

}  // namespace

void to_json(Json& j, const HvacSystem& v) {
    Json fan_ctrl{{"ctrl_type", to_string(v.fan_ctrl.ctrl_type)}, {"rated_flow_m3s", v.fan_ctrl.rated_flow_m3s}};
    if (v.fan_ctrl.ctrl_type == FanControl::Staged || v.fan_ctrl.stages > 0) {
        fan_ctrl["stages"] = v.fan_ctrl.stages;
    } else {
        fan_ctrl["stages"] = 0;
    }
    j = Json{{"system_id", v.system_id},
             {"system_name", v.name},
             {"fan", {{"rated_flow_m3s", v.fan.rated_flow_m3s}, {"rated_power_W", v.fan.rated_power_w}}},
             {"fan_ctrl", fan_ctrl},
             {"coil", {{"effectiveness", v.coil.effectiveness}}},
             {"pump", {{"rated_flow_m3s", v.pump.rated_flow_m3s}, {"rated_power_W", v.pump.rated_power_w}}},
             {"chiller", {{"rated_capacity_W", v.chiller.rated_capacity_w}, {"rated_cop", v.chiller.rated_cop}}},
             {"tower", v.tower ? tower_json(*v.tower) : Json(nullptr)},
             {"assigned_buildings", v.assigned_buildings},
             {"parameters", v.parameters}};
}

void from_json(const Json& j, HvacSystem& v) {
    HvacSystem d;
    v.system_id = j.at("system_id").get<std::string>();
    v.name = j.value("system_name", "");
    if (j.contains("fan") && j.at("fan").is_object()) {
        const auto& f = j.at("fan");
        v.fan.rated_flow_m3s = f.value("rated_flow_m3s", d.fan.rated_flow_m3s);
        v.fan.rated_power_w = f.value("rated_power_W", d.fan.rated_power_w);
    }
    if (j.contains("fan_ctrl") && j.at("fan_ctrl").is_object()) {
        const auto& f = j.at("fan_ctrl");
        v.fan_ctrl.ctrl_type = fan_control_from_string(f.value("ctrl_type", std::string("constant")));
        v.fan_ctrl.rated_flow_m3s = f.value("rated_flow_m3s", v.fan.rated_flow_m3s);
        v.fan_ctrl.stages = f.value("stages", 0);
    }
    if (j.contains("coil") && j.at("coil").is_object()) {
        v.coil.effectiveness = j.at("coil").value("effectiveness", d.coil.effectiveness);
    }
    if (j.contains("pump") && j.at("pump").is_object()) {
        const auto& p = j.at("pump");
        v.pump.rated_flow_m3s = p.value("rated_flow_m3s", d.pump.rated_flow_m3s);
        v.pump.rated_power_w = p.value("rated_power_W", d.pump.rated_power_w);
    }
    if (j.contains("chiller") && j.at("chiller").is_object()) {
        const auto& c = j.at("chiller");
        v.chiller.rated_capacity_w = c.value("rated_capacity_W", d.chiller.rated_capacity_w);
        v.chiller.rated_cop = c.value("rated_cop", d.chiller.rated_cop);
    }
    v.tower.reset();
    if (j.contains("tower") && j.at("tower").is_object()) {
        const auto& t = j.at("tower");
        HvacSystem::Tower td;
        v.tower = HvacSystem::Tower{t.value("rated_capacity_W", td.rated_capacity_w),
                                    t.value("rated_fan_power_W", td.rated_fan_power_w),
                                    t.value("pump_power_per_flow", td.pump_power_per_flow),
                                    t.value("min_approach_C", td.min_approach_c),
                                    t.value("max_approach_C", td.max_approach_c)};
    }
    v.assigned_buildings = j.value("assigned_buildings", std::vector<std::string>{});
    v.parameters = j.value("parameters", Json::object());
    if (v.parameters.is_null()) v.parameters = Json::object();
}

void to_json(Json& j, const DerSystem& v) {
    Json battery(nullptr), pv(nullptr);
    if (v.battery) {
        const auto& b = *v.battery;
        battery = Json{{"capacity", b.capacity},     {"soc", b.soc},
                       {"soc_min", b.soc_min},       {"soc_max", b.soc_max},
                       {"charge_eff", b.charge_eff}, {"discharge_eff", b.discharge_eff},
                       {"max_power", b.max_power}};
    }
    if (v.pv) pv = Json{{"rated", v.pv->rated}};
    j = Json{{"system_id", v.system_id},
             {"system_name", v.name},
             {"battery", battery},
             {"pv", pv},
             {"assigned_buildings", v.assigned_buildings}};
}

void from_json(const Json& j, DerSystem& v) {
    v.system_id = j.at("system_id").get<std::string>();
    v.name = j.value("system_name", "");
    v.battery.reset();
    v.pv.reset();
    if (j.contains("battery") && j.at("battery").is_object()) {
        const auto& b = j.at("battery");
        DerSystem::Battery d;
        v.battery = DerSystem::Battery{b.value("capacity", d.capacity),   b.value("soc", d.soc),
                                       b.value("soc_min", d.soc_min),     b.value("soc_max", d.soc_max),
                                       b.value("charge_eff", d.charge_eff), b.value("discharge_eff", d.discharge_eff),
                                       b.value("max_power", d.max_power)};
    }
    if (j.contains("pv") && j.at("pv").is_object()) {
        v.pv = DerSystem::Pv{j.at("pv").value("rated", DerSystem::Pv{}.rated)};
    }
    v.assigned_buildings = j.value("assigned_buildings", std::vector<std::string>{});
}

void to_json(Json& j, const Controller& v) {
    j = Json{{"controller_id", v.controller_id},
             {"controller_type", to_string(v.kind)},
             {"system_id", v.assigned_system},
             {"enabled", v.enabled}};
    switch (v.kind) {
        case ControllerKind::ThermostatDeadband:
            j["setpoint_C"] = v.setpoint_c ? Json(*v.setpoint_c) : Json(nullptr);
            j["deadband_C"] = v.deadband_c ? Json(*v.deadband_c) : Json(nullptr);
            break;
        case ControllerKind::Precool:
            j["offset_C"] = v.offset_c;
            j["window_start_hour"] = v.window_start_hour;
            j["window_end_hour"] = v.window_end_hour;
            break;
        case ControllerKind::DerSchedule:
            j["charge_start_hour"] = v.charge_start_hour;
            j["charge_end_hour"] = v.charge_end_hour;
            j["discharge_start_hour"] = v.discharge_start_hour ? Json(*v.discharge_start_hour) : Json(nullptr);
            j["discharge_end_hour"] = v.discharge_end_hour ? Json(*v.discharge_end_hour) : Json(nullptr);
            break;
    }
}

void from_json(const Json& j, Controller& v) {
    Controller d;
    v.controller_id = j.at("controller_id").get<std::string>();
    v.kind = controller_kind_from_string(j.value("controller_type", std::string("thermostat_deadband")));
    v.assigned_system = j.value("system_id", "");
    v.enabled = j.value("enabled", true);
    v.setpoint_c = opt_value<double>(j, "setpoint_C");
    v.deadband_c = opt_value<double>(j, "deadband_C");
    v.offset_c = j.contains("offset_C") && !j.at("offset_C").is_null() ? j.at("offset_C").get<double>() : d.offset_c;
    auto num = [&](const char* key, double fallback) {
        return j.contains(key) && !j.at(key).is_null() ? j.at(key).get<double>() : fallback;
    };
    v.window_start_hour = num("window_start_hour", d.window_start_hour);
    v.window_end_hour = num("window_end_hour", d.window_end_hour);
    v.charge_start_hour = num("charge_start_hour", d.charge_start_hour);
    v.charge_end_hour = num("charge_end_hour", d.charge_end_hour);
    v.discharge_start_hour = opt_value<double>(j, "discharge_start_hour");
    v.discharge_end_hour = opt_value<double>(j, "discharge_end_hour");
}

void to_json(Json& j, const Disturbance& v) {
    j = Json{{"disturbance_id", v.disturbance_id}, {"kind", to_string(v.kind)}, {"profile", v.profile}};
    switch (v.kind) {
        case DisturbanceKind::Weather:
            j["mean_temp_C"] = v.mean_temp_c;
            j["temp_amplitude_C"] = v.temp_amplitude_c;
            j["peak_irradiance_Wm2"] = v.peak_irradiance_wm2;
            break;
        case DisturbanceKind::Occupancy:
            j["occupied_level"] = v.occupied_level;
            j["away_level"] = v.away_level;
            break;
        case DisturbanceKind::Price:
            j["offpeak_price"] = v.offpeak_price;
            j["peak_price"] = v.peak_price;
            j["peak_start_hour"] = v.peak_start_hour;
            j["peak_end_hour"] = v.peak_end_hour;
            break;
    }
    if (!v.source_path.empty()) j["csv_path"] = v.source_path;
    if (!v.series.empty()) {
        j["series_step_s"] = v.series_step_s;
        j["series"] = series_to_json(v.series);
    }
}

void from_json(const Json& j, Disturbance& v) {
    Disturbance d;
    v.disturbance_id = j.at("disturbance_id").get<std::string>();
    v.kind = disturbance_kind_from_string(j.at("kind").get<std::string>());
    v.profile = j.value("profile", "");
    v.mean_temp_c = j.value("mean_temp_C", d.mean_temp_c);
    v.temp_amplitude_c = j.value("temp_amplitude_C", d.temp_amplitude_c);
    v.peak_irradiance_wm2 = j.value("peak_irradiance_Wm2", d.peak_irradiance_wm2);
    v.occupied_level = j.value("occupied_level", d.occupied_level);
    v.away_level = j.value("away_level", d.away_level);
    v.offpeak_price = j.value("offpeak_price", d.offpeak_price);
    v.peak_price = j.value("peak_price", d.peak_price);
    v.peak_start_hour = j.value("peak_start_hour", d.peak_start_hour);
    v.peak_end_hour = j.value("peak_end_hour", d.peak_end_hour);
    v.source_path = j.value("csv_path", "");
    v.series_step_s = j.value("series_step_s", 0.0);
    v.series = j.contains("series") ? series_from_json(j.at("series")) : std::vector<SeriesRow>{};
}

void to_json(Json& j, const Cluster& v) {
    Json buildings = Json::object(), hvac = Json::object(), der = Json::object(), ctl = Json::object(),
         dist = Json::object();
    for (const auto& [k, x] : v.buildings) buildings[k] = x;
    for (const auto& [k, x] : v.hvac_systems) hvac[k] = x;
    for (const auto& [k, x] : v.der_systems) der[k] = x;
    for (const auto& [k, x] : v.controllers) ctl[k] = x;
    for (const auto& [k, x] : v.disturbances) dist[k] = x;
    j = Json{{"cluster_id", v.cluster_id}, {"description", v.description}, {"metadata", v.metadata},
             {"buildings", buildings},     {"hvac_systems", hvac},         {"der_systems", der},
             {"controllers", ctl},         {"disturbances", dist}};
}

void from_json(const Json& j, Cluster& v) {
    v.cluster_id = j.at("cluster_id").get<std::string>();
    v.description = j.value("description", "");
    v.metadata = j.value("metadata", Json::object());
    v.buildings.clear();
    v.hvac_systems.clear();
    v.der_systems.clear();
    v.controllers.clear();
    v.disturbances.clear();
    const Json empty = Json::object();
    auto section = [&](const char* key) -> const Json& { return j.contains(key) ? j.at(key) : empty; };
    for (auto& [k, x] : section("buildings").items()) v.buildings[k] = x.get<Building>();
    for (auto& [k, x] : section("hvac_systems").items()) v.hvac_systems[k] = x.get<HvacSystem>();
    for (auto& [k, x] : section("der_systems").items()) v.der_systems[k] = x.get<DerSystem>();
    for (auto& [k, x] : section("controllers").items()) v.controllers[k] = x.get<Controller>();
    for (auto& [k, x] : section("disturbances").items()) v.disturbances[k] = x.get<Disturbance>();
}

void to_json(Json& j, const Configuration& v) {
    Json clusters = Json::object();
    for (const auto& [k, c] : v.clusters) clusters[k] = c;
    j = Json{{"config_id", v.config_id}, {"description", v.description}, {"clusters", clusters},
             {"metadata", v.metadata}};
}

void from_json(const Json& j, Configuration& v) {
    v.config_id = j.at("config_id").get<std::string>();
    v.description = j.value("description", "");
    v.metadata = j.value("metadata", Json::object());
    v.clusters.clear();
    if (j.contains("clusters")) {
        for (auto& [k, c] : j.at("clusters").items()) v.clusters[k] = c.get<Cluster>();
    }
}

void to_json(Json& j, const EnvironmentSettings& v) {
    j = Json{{"environment_id", v.environment_id},
             {"timestep_s", v.timestep_s},
             {"horizon_hours", v.horizon_hours},
             {"start_hour", v.start_hour}};
}

void from_json(const Json& j, EnvironmentSettings& v) {
    EnvironmentSettings d;
    v.environment_id = j.value("environment_id", d.environment_id);
    v.timestep_s = j.value("timestep_s", d.timestep_s);
    v.horizon_hours = j.value("horizon_hours", d.horizon_hours);
    v.start_hour = j.value("start_hour", d.start_hour);
}

void apply_zone_patch(ThermalZone& zone, const Json& patch) {
    Json j = zone;
    merge_patch(j, patch, "zone");
    zone = j.get<ThermalZone>();
}

void apply_hvac_patch(HvacSystem& system, const Json& patch) {
    Json j = system;
    merge_patch(j, patch, "hvac", {{"tower", tower_json(HvacSystem::Tower{})}});
    system = j.get<HvacSystem>();
}

void apply_der_patch(DerSystem& system, const Json& patch) {
    Json j = system;
    DerSystem defaults;
    defaults.system_id = system.system_id;
    defaults.battery = DerSystem::Battery{};
    defaults.pv = DerSystem::Pv{};
    Json dj = defaults;
    merge_patch(j, patch, "der", {{"battery", dj.at("battery")}, {"pv", dj.at("pv")}});
    system = j.get<DerSystem>();
}

void apply_controller_patch(Controller& controller, const Json& patch) {
    if (!patch.is_object()) throw Error("InvalidArgument", "controller patch must be a map");
    Controller next = controller;
    for (auto it = patch.begin(); it != patch.end(); ++it) {
        if (it->is_null()) continue;
        const auto& key = it.key();
        if (key == "enabled") next.enabled = it->get<bool>();
        else if (key == "system_id") next.assigned_system = it->get<std::string>();
        else if (key == "setpoint_C") next.setpoint_c = it->get<double>();
        else if (key == "deadband_C") next.deadband_c = it->get<double>();
        else if (key == "offset_C") next.offset_c = it->get<double>();
        else if (key == "window_start_hour") next.window_start_hour = it->get<double>();
        else if (key == "window_end_hour") next.window_end_hour = it->get<double>();
        else if (key == "charge_start_hour") next.charge_start_hour = it->get<double>();
        else if (key == "charge_end_hour") next.charge_end_hour = it->get<double>();
        else if (key == "discharge_start_hour") next.discharge_start_hour = it->get<double>();
        else if (key == "discharge_end_hour") next.discharge_end_hour = it->get<double>();
        else throw Error("InvalidArgument", "unknown controller field '" + key + "'");
    }
    controller = std::move(next);
}

void apply_disturbance_patch(Disturbance& disturbance, const Json& patch) {
    Json j = disturbance;
    merge_patch(j, patch, to_string(disturbance.kind) + " disturbance");
    disturbance = j.get<Disturbance>();
}

void apply_environment_patch(EnvironmentSettings& env, const Json& patch) {
    Json j = env;
    merge_patch(j, patch, "environment");
    env = j.get<EnvironmentSettings>();
}

Configuration reference_configuration(const std::string& config_id) {
    Configuration cfg;
    cfg.config_id = config_id;
    cfg.description = "Reference test building: single-zone residence with fan-coil plant, PV and battery";

    Cluster c;
    c.cluster_id = "cluster_1";
    c.description = "Reference cluster";

    Building b;
    b.building_id = "building_1";
    b.name = "Reference Test Building";
    ThermalZone z;
    z.zone_id = "zone_1";
    z.temperature_c = 24.0;
    z.capacitance_j_per_c = 1.2e7;
    z.resistance_c_per_w = 4.0e-3;
    z.internal_gain_w = 600.0;
    z.solar_aperture_m2 = 6.0;
    z.setpoint_c = 24.0;
    z.deadband_c = 1.0;
    z.comfort_low_c = 21.0;
    z.comfort_high_c = 25.0;
    b.zones.push_back(z);
    b.electrical_zone = ElectricalZone{"electrical_1", 0.6};
    c.buildings[b.building_id] = b;

    HvacSystem h;
    h.system_id = "hvac_1";
    h.name = "FCU System";
    h.chiller.rated_capacity_w = 12000.0;
    h.chiller.rated_cop = 3.0;
    h.pump.rated_power_w = 300.0;
    h.assigned_buildings = {"building_1"};
    c.hvac_systems[h.system_id] = h;

    DerSystem der;
    der.system_id = "der_1";
    der.name = "Rooftop PV and Battery";
    der.battery = DerSystem::Battery{13.5, 0.5, 0.1, 0.95, 0.95, 0.95, 5.0};
    der.pv = DerSystem::Pv{8.0};
    der.assigned_buildings = {"building_1"};
    c.der_systems[der.system_id] = der;

    Controller t;
    t.controller_id = "thermostat_1";
    t.kind = ControllerKind::ThermostatDeadband;
    t.assigned_system = "hvac_1";
    c.controllers[t.controller_id] = t;

    Controller s;
    s.controller_id = "battery_schedule_1";
    s.kind = ControllerKind::DerSchedule;
    s.assigned_system = "der_1";
    s.charge_start_hour = 0.0;
    s.charge_end_hour = 6.0;
    c.controllers[s.controller_id] = s;

    Disturbance w;
    w.disturbance_id = "weather_1";
    w.kind = DisturbanceKind::Weather;
    w.profile = "summer_design_day";
    c.disturbances[w.disturbance_id] = w;

    Disturbance o;
    o.disturbance_id = "occupancy_1";
    o.kind = DisturbanceKind::Occupancy;
    o.profile = "residential";
    c.disturbances[o.disturbance_id] = o;

    Disturbance p;
    p.disturbance_id = "price_1";
    p.kind = DisturbanceKind::Price;
    p.profile = "tou";
    c.disturbances[p.disturbance_id] = p;

    cfg.clusters[c.cluster_id] = c;
    return cfg;
}

}  // namespace buildops::runtime
