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

#include "buildops/runtime/environment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "buildops/error.hpp"

namespace buildops::runtime {

double zone_step(double temp_c, double outdoor_c, double q_int_w, double q_cool_w, double resistance_c_per_w,
                 double capacitance_j_per_c, double dt_s) {
    return temp_c + dt_s / capacitance_j_per_c * ((outdoor_c - temp_c) / resistance_c_per_w + q_int_w - q_cool_w);
}

double zone_cooling_demand(double temp_c, double outdoor_c, double q_int_w, double limit_c,
                           double resistance_c_per_w, double capacitance_j_per_c, double dt_s,
                           double max_cooling_w) {
    const double free = zone_step(temp_c, outdoor_c, q_int_w, 0.0, resistance_c_per_w, capacitance_j_per_c, dt_s);
    const double demand = std::max(0.0, (free - limit_c) * capacitance_j_per_c / dt_s);
    return std::min(demand, std::max(0.0, max_cooling_w));
}

BatteryStepResult battery_step(const DerSystem::Battery& b, double soc, double charge_request_kw,
                               double discharge_request_kw, double dt_h) {
    BatteryStepResult r;
    const double room_kw = std::max(0.0, (b.soc_max - soc) * b.capacity / (b.charge_eff * dt_h));
    const double avail_kw = std::max(0.0, (soc - b.soc_min) * b.capacity * b.discharge_eff / dt_h);
    r.charge_kw = std::min({std::max(0.0, charge_request_kw), b.max_power, room_kw});
    r.discharge_kw = std::min({std::max(0.0, discharge_request_kw), b.max_power, avail_kw});
    const double next = soc + (b.charge_eff * r.charge_kw - r.discharge_kw / b.discharge_eff) * dt_h / b.capacity;
    r.soc = std::clamp(next, b.soc_min, b.soc_max);
    return r;
}

double fan_power_w(const HvacSystem& system, double plr) {
    if (plr <= 0.0) return 0.0;
    plr = std::min(plr, 1.0);
    const double rated = system.fan.rated_power_w;
    switch (system.fan_ctrl.ctrl_type) {
        case FanControl::Constant:
            return rated;
        case FanControl::Staged: {
            const int stages = std::max(system.fan_ctrl.stages, 1);
            const double level = std::ceil(plr * stages - 1e-12) / stages;
            return rated * level * level * level;
        }
        case FanControl::Vfd:
            return rated * plr * plr * plr;
    }
    return rated;
}

HvacPower hvac_power(const HvacSystem& system, double q_cool_w) {
    HvacPower p;
    const double cap = system.max_cooling_w();
    const double plr = cap > 0.0 ? std::clamp(q_cool_w / cap, 0.0, 1.0) : 0.0;
    p.chiller_w = q_cool_w / system.chiller.rated_cop;
    p.fan_w = fan_power_w(system, plr);
    p.pump_w = plr > 0.0 ? system.pump.rated_power_w : 0.0;
    if (system.tower && plr > 0.0) {
        p.tower_w = system.tower->rated_fan_power_w * plr +
                    system.tower->pump_power_per_flow * system.pump.rated_flow_m3s;
    }
    return p;
}

bool hour_in_window(double hour_of_day, double start, double end) {
    if (start <= end) return hour_of_day >= start && hour_of_day < end;
    return hour_of_day >= start || hour_of_day < end;
}

std::vector<SeriesRow> read_disturbance_csv(const std::string& path, double* step_s) {
    std::ifstream in(path);
    if (!in) throw Error("InvalidArgument", "cannot open disturbance file '" + path + "'");
    std::string line;
    std::getline(in, line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "timestamp,outdoor_c,irradiance_wm2,occupancy,price_per_kwh") {
        throw Error("InvalidArgument", "unexpected disturbance header in '" + path + "'");
    }
    std::vector<SeriesRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        double values[5];
        int n = 0;
        while (std::getline(ss, cell, ',') && n < 5) {
            try {
                std::size_t used = 0;
                values[n] = std::stod(cell, &used);
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw Error("InvalidArgument", path + ":" + std::to_string(line_no) + ": bad number '" + cell + "'");
            }
            ++n;
        }
        if (n != 5) throw Error("InvalidArgument", path + ":" + std::to_string(line_no) + ": expected 5 columns");
        rows.push_back(SeriesRow{values[0], values[1], values[2], values[3], values[4]});
    }
    if (rows.empty()) throw Error("InvalidArgument", "disturbance file '" + path + "' has no rows");
    double step = rows.size() > 1 ? rows[1].time_s - rows[0].time_s : 3600.0;
    if (!(step > 0)) throw Error("InvalidArgument", "disturbance timestamps must increase");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (std::abs(rows[i].time_s - rows[i - 1].time_s - step) > 1e-6) {
            throw Error("InvalidArgument", "disturbance rows in '" + path + "' are not evenly spaced");
        }
    }
    if (step_s) *step_s = step;
    return rows;
}

std::pair<double, double> peak_window(const Cluster& cluster) {
    for (const auto& [id, d] : cluster.disturbances) {
        if (d.kind == DisturbanceKind::Price) return {d.peak_start_hour, d.peak_end_hour};
    }
    return {16.0, 20.0};
}

namespace {

const Disturbance* first_of_kind(const Cluster& c, DisturbanceKind kind) {
    for (const auto& [id, d] : c.disturbances) {
        if (d.kind == kind) return &d;
    }
    return nullptr;
}

const SeriesRow& series_row(const Disturbance& d, double time_s) {
    const double t0 = d.series.front().time_s;
    auto idx = static_cast<std::size_t>(std::floor((time_s - t0) / d.series_step_s + 1e-9));
    if (time_s < t0 || idx >= d.series.size()) {
        throw Error("HorizonUncovered", "disturbance '" + d.disturbance_id + "' does not cover t=" +
                                            std::to_string(time_s) + " s");
    }
    return d.series[idx];
}

void check_coverage(const Disturbance& d, double horizon_s) {
    if (d.profile != "series") return;
    if (d.series.empty() || !(d.series_step_s > 0)) {
        throw Error("HorizonUncovered", "disturbance '" + d.disturbance_id + "' has no series rows");
    }
    const double covered = d.series.back().time_s + d.series_step_s - d.series.front().time_s;
    if (d.series.front().time_s > 0 || covered + 1e-6 < horizon_s) {
        throw Error("HorizonUncovered", "disturbance '" + d.disturbance_id + "' covers " +
                                            std::to_string(covered / 3600.0) + " h of a " +
                                            std::to_string(horizon_s / 3600.0) + " h horizon");
    }
}

class DisturbanceModule final : public Module {
public:
    void initialize(const Cluster& cluster, const EnvironmentSettings& settings) override {
        weather_ = first_of_kind(cluster, DisturbanceKind::Weather);
        occupancy_ = first_of_kind(cluster, DisturbanceKind::Occupancy);
        price_ = first_of_kind(cluster, DisturbanceKind::Price);
        if (!weather_) {
            throw Error("ValidationFailed", "cluster '" + cluster.cluster_id + "' has no weather disturbance");
        }
        const double horizon_s = settings.horizon_hours * 3600.0;
        for (const auto* d : {weather_, occupancy_, price_}) {
            if (d) check_coverage(*d, horizon_s);
        }
        std::tie(peak_start_, peak_end_) = peak_window(cluster);
    }

    void step(EnvState& s) override {
        auto& out = s.disturbance;
        out.hour_of_day = std::fmod(s.start_hour + s.time_s / 3600.0, 24.0);
        const double h = out.hour_of_day;
        const auto& w = *weather_;
        if (w.profile == "series") {
            const auto& row = series_row(w, s.time_s);
            out.outdoor_c = row.outdoor_c;
            out.irradiance_wm2 = row.irradiance_wm2;
        } else {
            out.outdoor_c = w.mean_temp_c + w.temp_amplitude_c * std::cos(2.0 * std::numbers::pi * (h - 15.0) / 24.0);
            out.irradiance_wm2 =
                (h >= 6.0 && h < 18.0) ? w.peak_irradiance_wm2 * std::sin(std::numbers::pi * (h - 6.0) / 12.0) : 0.0;
        }
        out.occupancy = 1.0;
        if (occupancy_) {
            const auto& o = *occupancy_;
            if (o.profile == "series") {
                out.occupancy = series_row(o, s.time_s).occupancy;
            } else if (o.profile == "residential") {
                out.occupancy = (h >= 8.0 && h < 17.0) ? o.away_level : o.occupied_level;
            } else if (o.profile == "office") {
                out.occupancy = (h >= 8.0 && h < 18.0) ? o.occupied_level : o.away_level;
            } else {
                out.occupancy = o.occupied_level;
            }
        }
        out.peak = hour_in_window(h, peak_start_, peak_end_);
        out.price_per_kwh = 0.0;
        if (price_) {
            const auto& p = *price_;
            if (p.profile == "series") {
                out.price_per_kwh = series_row(p, s.time_s).price_per_kwh;
            } else if (p.profile == "flat") {
                out.price_per_kwh = p.offpeak_price;
            } else {
                out.price_per_kwh = out.peak ? p.peak_price : p.offpeak_price;
            }
        }
    }

private:
    const Disturbance* weather_ = nullptr;
    const Disturbance* occupancy_ = nullptr;
    const Disturbance* price_ = nullptr;
    double peak_start_ = 16.0;
    double peak_end_ = 20.0;
};

// Sets each zone's cooling limit: setpoint + deadband/2, with setpoint and
// deadband optionally overridden by a thermostat controller on the plant.
class ThermostatModule final : public Module {
public:
    void initialize(const Cluster& cluster, const EnvironmentSettings&) override {
        overrides_.clear();
        for (const auto& [id, c] : cluster.controllers) {
            if (c.kind == ControllerKind::ThermostatDeadband && c.enabled && !overrides_.count(c.assigned_system)) {
                overrides_[c.assigned_system] = c;
            }
        }
    }

    void step(EnvState& s) override {
        for (auto& z : s.zones) {
            double sp = z.params.setpoint_c;
            double db = z.params.deadband_c;
            auto it = overrides_.find(z.hvac_id);
            if (it != overrides_.end()) {
                if (it->second.setpoint_c) sp = *it->second.setpoint_c;
                if (it->second.deadband_c) db = *it->second.deadband_c;
            }
            z.limit_c = sp + db / 2.0;
        }
    }

private:
    std::map<std::string, Controller> overrides_;
};

class PrecoolModule final : public Module {
public:
    explicit PrecoolModule(Controller c) : c_(std::move(c)) {}

    void step(EnvState& s) override {
        if (!hour_in_window(s.disturbance.hour_of_day, c_.window_start_hour, c_.window_end_hour)) return;
        for (auto& z : s.zones) {
            if (z.hvac_id == c_.assigned_system) z.limit_c -= c_.offset_c;
        }
    }

private:
    Controller c_;
};

class DerScheduleModule final : public Module {
public:
    explicit DerScheduleModule(Controller c) : c_(std::move(c)) {}

    void initialize(const Cluster& cluster, const EnvironmentSettings&) override {
        auto [ps, pe] = peak_window(cluster);
        discharge_start_ = c_.discharge_start_hour.value_or(ps);
        discharge_end_ = c_.discharge_end_hour.value_or(pe);
    }

    void step(EnvState& s) override {
        const double h = s.disturbance.hour_of_day;
        for (auto& b : s.batteries) {
            if (b.system_id != c_.assigned_system) continue;
            if (hour_in_window(h, c_.charge_start_hour, c_.charge_end_hour)) {
                b.command = BatteryCommand::Charge;
            } else if (hour_in_window(h, discharge_start_, discharge_end_)) {
                b.command = BatteryCommand::Discharge;
            } else {
                b.command = BatteryCommand::Idle;
            }
        }
    }

private:
    Controller c_;
    double discharge_start_ = 16.0;
    double discharge_end_ = 20.0;
};

class ZoneThermalModule final : public Module {
public:
    void step(EnvState& s) override {
        const auto& d = s.disturbance;
        s.record.zone_temps_c.resize(s.zones.size());
        double total = 0.0;
        for (std::size_t i = 0; i < s.zones.size(); ++i) {
            auto& z = s.zones[i];
            z.q_int_w = z.params.internal_gain_w * d.occupancy + z.params.solar_aperture_m2 * d.irradiance_wm2;
            z.q_cool_w = z.hvac_id.empty()
                             ? 0.0
                             : zone_cooling_demand(z.temperature_c, d.outdoor_c, z.q_int_w, z.limit_c,
                                                   z.params.resistance_c_per_w, z.params.capacitance_j_per_c,
                                                   s.dt_s, z.max_cooling_w);
            z.temperature_c = zone_step(z.temperature_c, d.outdoor_c, z.q_int_w, z.q_cool_w,
                                        z.params.resistance_c_per_w, z.params.capacitance_j_per_c, s.dt_s);
            s.record.zone_temps_c[i] = z.temperature_c;
            total += z.q_cool_w;
        }
        s.record.q_cool_w = total;
    }
};

class HvacPowerModule final : public Module {
public:
    void initialize(const Cluster& cluster, const EnvironmentSettings&) override {
        systems_.clear();
        for (const auto& [id, h] : cluster.hvac_systems) systems_.push_back(h);
    }

    void step(EnvState& s) override {
        double chiller = 0.0, total = 0.0;
        for (const auto& h : systems_) {
            double q = 0.0;
            for (const auto& z : s.zones) {
                if (z.hvac_id == h.system_id) q += z.q_cool_w;
            }
            auto p = hvac_power(h, q);
            chiller += p.chiller_w;
            total += p.total_w();
        }
        s.record.chiller_elec_kw = chiller / 1000.0;
        s.record.hvac_elec_kw = total / 1000.0;
    }

private:
    std::vector<HvacSystem> systems_;
};

class ElectricalModule final : public Module {
public:
    void initialize(const Cluster& cluster, const EnvironmentSettings&) override {
        base_load_kw_ = 0.0;
        for (const auto& [id, b] : cluster.buildings) {
            if (b.electrical_zone) base_load_kw_ += b.electrical_zone->base_load_kw;
        }
        pv_rated_kw_ = 0.0;
        for (const auto& [id, d] : cluster.der_systems) {
            if (d.pv) pv_rated_kw_ += d.pv->rated;
        }
    }

    void step(EnvState& s) override {
        auto& r = s.record;
        const double dt_h = s.dt_s / 3600.0;
        r.load_kw = r.hvac_elec_kw + base_load_kw_ * s.disturbance.occupancy;
        r.pv_gen_kw = pv_rated_kw_ * s.disturbance.irradiance_wm2 / 1000.0;
        r.pv_used_kw = std::min(r.pv_gen_kw, r.load_kw);
        double surplus = r.pv_gen_kw - r.pv_used_kw;
        double residual = r.load_kw - r.pv_used_kw;
        double grid_charge = 0.0;
        r.batt_charge_kw = r.batt_charge_from_pv_kw = r.batt_discharge_kw = 0.0;
        for (auto& b : s.batteries) {
            const double ch_req = b.command == BatteryCommand::Charge ? b.params.max_power : 0.0;
            const double dis_req = b.command == BatteryCommand::Discharge ? residual : 0.0;
            auto step = battery_step(b.params, b.soc, ch_req, dis_req, dt_h);
            const double from_pv = std::min(step.charge_kw, surplus);
            surplus -= from_pv;
            grid_charge += step.charge_kw - from_pv;
            residual -= step.discharge_kw;
            r.batt_charge_kw += step.charge_kw;
            r.batt_charge_from_pv_kw += from_pv;
            r.batt_discharge_kw += step.discharge_kw;
            b.soc = step.soc;
            b.throughput_kwh += (step.charge_kw + step.discharge_kw) * dt_h;
        }
        r.curtailed_kw = surplus;
        r.grid_import_kw = residual + grid_charge;
    }

private:
    double base_load_kw_ = 0.0;
    double pv_rated_kw_ = 0.0;
};

bool finite(double v) { return std::isfinite(v); }

}  // namespace

Environment::Environment(Cluster cluster, EnvironmentSettings settings)
    : cluster_(std::move(cluster)), settings_(std::move(settings)) {}

Environment::~Environment() = default;
Environment::Environment(Environment&&) noexcept = default;
Environment& Environment::operator=(Environment&&) noexcept = default;

void Environment::initialize() {
    auto errors = validate_cluster(cluster_);
    if (settings_.timestep_s <= 0) errors.push_back("timestep must be > 0");
    if (!(settings_.horizon_hours > 0)) errors.push_back("horizon must be > 0");
    for (const auto& [bid, b] : cluster_.buildings) {
        for (const auto& z : b.zones) {
            if (z.resistance_c_per_w * z.capacitance_j_per_c < settings_.timestep_s) {
                errors.push_back("zone '" + bid + "/" + z.zone_id + "': time constant R*C is shorter than the timestep");
            }
        }
    }
    if (!errors.empty()) {
        std::string msg;
        for (std::size_t i = 0; i < errors.size(); ++i) msg += (i ? "; " : "") + errors[i];
        throw Error("ValidationFailed", msg);
    }

    disturbance_modules_.clear();
    controller_modules_.clear();
    dynamic_modules_.clear();
    disturbance_modules_.push_back(std::make_unique<DisturbanceModule>());
    controller_modules_.push_back(std::make_unique<ThermostatModule>());
    for (const auto& [id, c] : cluster_.controllers) {
        if (!c.enabled) continue;
        if (c.kind == ControllerKind::Precool) controller_modules_.push_back(std::make_unique<PrecoolModule>(c));
        if (c.kind == ControllerKind::DerSchedule) {
            controller_modules_.push_back(std::make_unique<DerScheduleModule>(c));
        }
    }
    dynamic_modules_.push_back(std::make_unique<ZoneThermalModule>());
    dynamic_modules_.push_back(std::make_unique<HvacPowerModule>());
    dynamic_modules_.push_back(std::make_unique<ElectricalModule>());

    for (auto* group : {&disturbance_modules_, &controller_modules_, &dynamic_modules_}) {
        for (auto& m : *group) m->initialize(cluster_, settings_);
    }
    initialized_ = true;
    reset();
}

void Environment::reset() {
    if (!initialized_) throw Error("Uninitialized", "environment must be initialized before reset");
    state_ = EnvState{};
    state_.dt_s = settings_.timestep_s;
    state_.start_hour = settings_.start_hour;

    std::map<std::string, int> zones_served;
    auto plant_for = [&](const std::string& building_id) -> std::string {
        for (const auto& [id, h] : cluster_.hvac_systems) {
            if (std::find(h.assigned_buildings.begin(), h.assigned_buildings.end(), building_id) !=
                h.assigned_buildings.end()) {
                return id;
            }
        }
        return {};
    };
    for (const auto& [bid, b] : cluster_.buildings) {
        for (const auto& z : b.zones) {
            ZoneState zs;
            zs.building_id = bid;
            zs.params = z;
            zs.hvac_id = plant_for(bid);
            zs.temperature_c = z.temperature_c;
            if (!zs.hvac_id.empty()) ++zones_served[zs.hvac_id];
            state_.zones.push_back(std::move(zs));
        }
    }
    for (auto& z : state_.zones) {
        if (z.hvac_id.empty()) continue;
        z.max_cooling_w = cluster_.hvac_systems.at(z.hvac_id).max_cooling_w() / zones_served[z.hvac_id];
    }
    for (const auto& [id, d] : cluster_.der_systems) {
        if (!d.battery) continue;
        BatteryState b;
        b.system_id = id;
        b.params = *d.battery;
        b.soc = d.battery->soc;
        state_.batteries.push_back(b);
    }
    for (auto* group : {&disturbance_modules_, &controller_modules_, &dynamic_modules_}) {
        for (auto& m : *group) m->reset(state_);
    }
    step_index_ = 0;
}

int Environment::steps_total() const {
    return static_cast<int>(std::floor(settings_.horizon_hours * 3600.0 / settings_.timestep_s + 1e-9));
}

bool Environment::done() const { return step_index_ >= steps_total(); }

const StepRecord& Environment::step() {
    if (!initialized_) throw Error("Uninitialized", "environment must be initialized before step");
    state_.time_s = static_cast<double>(step_index_) * state_.dt_s;
    state_.record = StepRecord{};
    for (auto& m : disturbance_modules_) m->step(state_);
    for (auto& m : controller_modules_) m->step(state_);
    for (auto& m : dynamic_modules_) m->step(state_);

    auto& r = state_.record;
    const auto& d = state_.disturbance;
    r.time_h = state_.time_s / 3600.0;
    r.hour_of_day = d.hour_of_day;
    r.outdoor_c = d.outdoor_c;
    r.irradiance_wm2 = d.irradiance_wm2;
    r.occupancy = d.occupancy;
    r.price = d.price_per_kwh;
    r.peak = d.peak;
    double cap = 0.0, stored = 0.0;
    for (const auto& b : state_.batteries) {
        cap += b.params.capacity;
        stored += b.soc * b.params.capacity;
    }
    r.soc = cap > 0 ? stored / cap : 0.0;

    bool ok = finite(r.outdoor_c) && finite(r.irradiance_wm2) && finite(r.occupancy) && finite(r.q_cool_w) &&
              finite(r.hvac_elec_kw) && finite(r.load_kw) && finite(r.grid_import_kw) && finite(r.soc) &&
              finite(r.price) && finite(r.pv_gen_kw);
    for (double t : r.zone_temps_c) ok = ok && finite(t);
    if (!ok) {
        throw Error("NonFiniteState", "non-finite state at step " + std::to_string(step_index_) + " (t=" +
                                          std::to_string(r.time_h) + " h)");
    }
    ++step_index_;
    return r;
}

SimulationResult run_simulation(const Cluster& cluster, const EnvironmentSettings& settings,
                                const std::string& run_id, const std::string& config_id) {
    Environment env(cluster, settings);
    env.initialize();

    SimulationResult result;
    result.run_id = run_id;
    result.config_id = config_id;
    result.cluster_id = cluster.cluster_id;
    result.timestep_s = settings.timestep_s;
    result.horizon_hours = settings.horizon_hours;
    result.start_hour = settings.start_hour;
    std::tie(result.peak_start_hour, result.peak_end_hour) = peak_window(cluster);
    for (const auto& z : env.state().zones) {
        result.zones.push_back(ZoneInfo{z.building_id, z.params.zone_id, z.params.comfort_low_c, z.params.comfort_high_c});
    }
    double cap = 0.0, stored = 0.0;
    for (const auto& b : env.state().batteries) {
        cap += b.params.capacity;
        stored += b.soc * b.params.capacity;
    }
    result.battery_capacity_kwh = cap;
    result.initial_soc = cap > 0 ? stored / cap : 0.0;
    for (const auto& [id, d] : cluster.der_systems) {
        if (d.pv) result.pv_rated_kw += d.pv->rated;
    }

    result.records.reserve(static_cast<std::size_t>(env.steps_total()));
    while (!env.done()) result.records.push_back(env.step());
    for (const auto& b : env.state().batteries) result.battery_throughput_kwh += b.throughput_kwh;
    return result;
}

void to_json(Json& j, const StepRecord& r) {
    j = Json{{"time_h", r.time_h},
             {"hour_of_day", r.hour_of_day},
             {"outdoor_c", r.outdoor_c},
             {"irradiance_wm2", r.irradiance_wm2},
             {"occupancy", r.occupancy},
             {"zone_temps_c", r.zone_temps_c},
             {"q_cool_w", r.q_cool_w},
             {"chiller_elec_kw", r.chiller_elec_kw},
             {"hvac_elec_kw", r.hvac_elec_kw},
             {"load_kw", r.load_kw},
             {"pv_gen_kw", r.pv_gen_kw},
             {"pv_used_kw", r.pv_used_kw},
             {"batt_charge_kw", r.batt_charge_kw},
             {"batt_charge_from_pv_kw", r.batt_charge_from_pv_kw},
             {"batt_discharge_kw", r.batt_discharge_kw},
             {"curtailed_kw", r.curtailed_kw},
             {"soc", r.soc},
             {"grid_import_kw", r.grid_import_kw},
             {"price", r.price},
             {"peak", r.peak}};
}

void from_json(const Json& j, StepRecord& r) {
    r.time_h = j.at("time_h").get<double>();
    r.hour_of_day = j.at("hour_of_day").get<double>();
    r.outdoor_c = j.at("outdoor_c").get<double>();
    r.irradiance_wm2 = j.at("irradiance_wm2").get<double>();
    r.occupancy = j.at("occupancy").get<double>();
    r.zone_temps_c = j.at("zone_temps_c").get<std::vector<double>>();
    r.q_cool_w = j.at("q_cool_w").get<double>();
    r.chiller_elec_kw = j.at("chiller_elec_kw").get<double>();
    r.hvac_elec_kw = j.at("hvac_elec_kw").get<double>();
    r.load_kw = j.at("load_kw").get<double>();
    r.pv_gen_kw = j.at("pv_gen_kw").get<double>();
    r.pv_used_kw = j.at("pv_used_kw").get<double>();
    r.batt_charge_kw = j.at("batt_charge_kw").get<double>();
    r.batt_charge_from_pv_kw = j.at("batt_charge_from_pv_kw").get<double>();
    r.batt_discharge_kw = j.at("batt_discharge_kw").get<double>();
    r.curtailed_kw = j.at("curtailed_kw").get<double>();
    r.soc = j.at("soc").get<double>();
    r.grid_import_kw = j.at("grid_import_kw").get<double>();
    r.price = j.at("price").get<double>();
    r.peak = j.at("peak").get<bool>();
}

void to_json(Json& j, const SimulationResult& r) {
    Json zones = Json::array();
    for (const auto& z : r.zones) {
        zones.push_back(Json{{"building_id", z.building_id},
                             {"zone_id", z.zone_id},
                             {"comfort_low_C", z.comfort_low_c},
                             {"comfort_high_C", z.comfort_high_c}});
    }
    j = Json{{"run_id", r.run_id},
             {"config_id", r.config_id},
             {"cluster_id", r.cluster_id},
             {"status", r.status},
             {"timestep_s", r.timestep_s},
             {"horizon_hours", r.horizon_hours},
             {"start_hour", r.start_hour},
             {"peak_window", {r.peak_start_hour, r.peak_end_hour}},
             {"zones", zones},
             {"battery_capacity_kwh", r.battery_capacity_kwh},
             {"initial_soc", r.initial_soc},
             {"battery_throughput_kwh", r.battery_throughput_kwh},
             {"pv_rated_kw", r.pv_rated_kw},
             {"records", r.records}};
}

void from_json(const Json& j, SimulationResult& r) {
    r.run_id = j.at("run_id").get<std::string>();
    r.config_id = j.value("config_id", "");
    r.cluster_id = j.value("cluster_id", "");
    r.status = j.value("status", "completed");
    r.timestep_s = j.at("timestep_s").get<int>();
    r.horizon_hours = j.at("horizon_hours").get<double>();
    r.start_hour = j.value("start_hour", 0.0);
    r.peak_start_hour = j.at("peak_window").at(0).get<double>();
    r.peak_end_hour = j.at("peak_window").at(1).get<double>();
    r.zones.clear();
    for (const auto& z : j.at("zones")) {
        r.zones.push_back(ZoneInfo{z.at("building_id").get<std::string>(), z.at("zone_id").get<std::string>(),
                                   z.at("comfort_low_C").get<double>(), z.at("comfort_high_C").get<double>()});
    }
    r.battery_capacity_kwh = j.value("battery_capacity_kwh", 0.0);
    r.initial_soc = j.value("initial_soc", 0.0);
    r.battery_throughput_kwh = j.value("battery_throughput_kwh", 0.0);
    r.pv_rated_kw = j.value("pv_rated_kw", 0.0);
    r.records = j.at("records").get<std::vector<StepRecord>>();
}

}  // namespace buildops::runtime
