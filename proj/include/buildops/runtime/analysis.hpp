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

#include <string>

#include "buildops/runtime/environment.hpp"

namespace buildops::runtime {

enum class Facet { Energy, Cost, Comfort, Flexibility, Comprehensive };

std::string to_string(Facet f);
Facet facet_from_string(const std::string& s);

/// Metric map for one facet. Undefined quantities (self consumption without
/// PV, cycles without a battery) are JSON null.
///
///   energy        hvac_kwh, chiller_kwh, cooling_thermal_kwh, total_kwh, grid_import_kwh
///   cost          cost_usd = sum(grid_import * price * dt), peak_cost_usd
///   comfort       violation_steps, temp_std_c, mean_temp_c, max_temp_c
///   flexibility   pv_generation_kwh, pv_curtailed_kwh, self_consumption_pct,
///                 min_soc, efc = throughput / (2 * capacity), peak_grid_import_kwh
///   comprehensive union of the above
Json analyze(const SimulationResult& result, Facet facet);

/// Per metric {baseline, comparison, delta, delta_pct}. delta is
/// comparison - baseline; delta_pct is delta / baseline * 100 and null when
/// the baseline is 0 or either side is null. Throws
/// Error("IncompatibleRuns") when timestep or horizon differ.
Json compare(const SimulationResult& baseline, const SimulationResult& comparison, Facet facet);

/// Two-column `metric,value` CSV of the comprehensive metrics.
std::string summary_csv(const SimulationResult& result);

}  // namespace buildops::runtime
