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

#include <optional>
#include <string>

#include "buildops/bench/cases.hpp"
#include "buildops/orchestrator/plan.hpp"

namespace buildops::bench {

/// Deliberate mistakes layered on an otherwise perfect script.
struct Faults {
    /// The specialist silently leaves this tool out of its step.
    std::optional<std::string> drop_tool;
    /// The orchestrator plans the first two expected steps in reverse order.
    bool swap_first_steps = false;
    /// The orchestrator writes `value` for `tool`.`key` (dotted) instead of the
    /// expected one.
    struct Perturb {
        std::string tool;
        std::string key;
        Json value;
    };
    std::optional<Perturb> perturb;
};

/// Task text for expected step `order`; the bracketed tag lets scripts
/// address one step.
std::string step_task(const TestCase& c, const ExpectedStep& s);
std::string step_tag(int order);

/// The plan a perfect orchestrator would produce for `c` in `mode`.
orchestrator::ExecutionPlan perfect_plan(const TestCase& c, orchestrator::Mode mode, const Faults& faults = {});

/// Scripted rules for the orchestrator side (concierge, planning, formatter).
Json orchestrator_script(const TestCase& c, orchestrator::Mode mode, const Faults& faults = {});

/// Scripted rules for every specialist (validate or plan, then synthesize).
Json agent_script(const TestCase& c, orchestrator::Mode mode, const Faults& faults = {});

}  // namespace buildops::bench
