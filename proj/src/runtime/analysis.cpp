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

#include "buildops/runtime/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "buildops/error.hpp"

namespace buildops::runtime {

std::string to_string(Facet f) {
    switch (f) {
        case Facet::Energy: return "energy";
        case Facet::Cost: return "cost";
        case Facet::Comfort: return "comfort";
        case Facet::Flexibility: return "flexibility";
        case Facet::Comprehensive: return "comprehensive";
    }
    return "comprehensive";
}

Facet facet_from_string(const std::string& s) {
    if (s == "energy") return Facet::Energy;
    if (s == "cost") return Facet::Cost;
    if (s == "comfort") return Facet::Comfort;
    if (s == "flexibility") return Facet::Flexibility;
    if (s == "comprehensive") return Facet::Comprehensive;
    throw Error("InvalidArgument", "unknown facet '" + s + "'");
}

namespace {

Json energy(const SimulationResult& r) {
    const double dt = r.dt_h();
    double hvac = 0, chiller = 0, thermal = 0, total = 0, grid = 0;
    for (const auto& s : r.records) {
        hvac += s.hvac_elec_kw * dt;
        chiller += s.chiller_elec_kw * dt;
        thermal += s.q_cool_w / 1000.0 * dt;
        total += s.load_kw * dt;
        grid += s.grid_import_kw * dt;
    }
    return Json{{"hvac_kwh", hvac},
                {"chiller_kwh", chiller},
                {"cooling_thermal_kwh", thermal},
                {"total_kwh", total},
                {"grid_import_kwh", grid}};
}

Json cost(const SimulationResult& r) {
    const double dt = r.dt_h();
    double all = 0, peak = 0;
    for (const auto& s : r.records) {
        const double c = s.grid_import_kw * s.price * dt;
        all += c;
        if (s.peak) peak += c;
    }
    return Json{{"cost_usd", all}, {"peak_cost_usd", peak}};
}

Json comfort(const SimulationResult& r) {
    long violations = 0;
    double sum = 0, sum_sq = 0, max_t = -std::numeric_limits<double>::infinity();
    long n = 0;
    for (const auto& s : r.records) {
        for (std::size_t i = 0; i < s.zone_temps_c.size(); ++i) {
            const double t = s.zone_temps_c[i];
            if (i < r.zones.size() && (t < r.zones[i].comfort_low_c || t > r.zones[i].comfort_high_c)) ++violations;
            sum += t;
            sum_sq += t * t;
            max_t = std::max(max_t, t);
            ++n;
        }
    }
    Json out{{"violation_steps", violations}};
    if (n == 0) {
        out["temp_std_c"] = nullptr;
        out["mean_temp_c"] = nullptr;
        out["max_temp_c"] = nullptr;
        return out;
    }
    const double mean = sum / n;
    out["temp_std_c"] = std::sqrt(std::max(0.0, sum_sq / n - mean * mean));
    out["mean_temp_c"] = mean;
    out["max_temp_c"] = max_t;
    return out;
}

Json flexibility(const SimulationResult& r) {
    const double dt = r.dt_h();
    double gen = 0, curtailed = 0, peak_grid = 0;
    double min_soc = r.initial_soc;
    for (const auto& s : r.records) {
        gen += s.pv_gen_kw * dt;
        curtailed += s.curtailed_kw * dt;
        if (s.peak) peak_grid += s.grid_import_kw * dt;
        min_soc = std::min(min_soc, s.soc);
    }
    Json out{{"pv_generation_kwh", gen}, {"pv_curtailed_kwh", curtailed}};
    out["self_consumption_pct"] = gen > 0 ? Json((gen - curtailed) / gen * 100.0) : Json(nullptr);
    const bool battery = r.battery_capacity_kwh > 0;
    out["min_soc"] = battery ? Json(min_soc) : Json(nullptr);
    out["efc"] = battery ? Json(r.battery_throughput_kwh / (2.0 * r.battery_capacity_kwh)) : Json(nullptr);
    out["peak_grid_import_kwh"] = peak_grid;
    return out;
}

}  // namespace

Json analyze(const SimulationResult& r, Facet facet) {
    switch (facet) {
        case Facet::Energy: return energy(r);
        case Facet::Cost: return cost(r);
        case Facet::Comfort: return comfort(r);
        case Facet::Flexibility: return flexibility(r);
        case Facet::Comprehensive: {
            Json out = energy(r);
            out.update(cost(r));
            out.update(comfort(r));
            out.update(flexibility(r));
            return out;
        }
    }
    return Json::object();
}

Json compare(const SimulationResult& a, const SimulationResult& b, Facet facet) {
    if (a.timestep_s != b.timestep_s || a.horizon_hours != b.horizon_hours) {
        throw Error("IncompatibleRuns", "runs '" + a.run_id + "' and '" + b.run_id +
                                            "' differ in timestep or horizon");
    }
    const Json ma = analyze(a, facet);
    const Json mb = analyze(b, facet);
    Json out = Json::object();
    for (const auto& [key, va] : ma.items()) {
        const Json& vb = mb.at(key);
        Json entry{{"baseline", va}, {"comparison", vb}, {"delta", nullptr}, {"delta_pct", nullptr}};
        if (va.is_number() && vb.is_number()) {
            const double x = va.get<double>();
            const double y = vb.get<double>();
            entry["delta"] = y - x;
            if (x != 0.0) entry["delta_pct"] = (y - x) / x * 100.0;
        }
        out[key] = entry;
    }
    return out;
}

std::string summary_csv(const SimulationResult& r) {
    std::ostringstream os;
    os.precision(12);
    os << "metric,value\n";
    const Json metrics = analyze(r, Facet::Comprehensive);
    for (const auto& [key, v] : metrics.items()) {
        os << key << ',';
        if (!v.is_null()) os << v.dump();
        os << '\n';
    }
    return os.str();
}

}  // namespace buildops::runtime
