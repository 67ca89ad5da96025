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
#include <string>

namespace buildops::agents {

/// Named prompt templates. Placeholders are `{identifier}`; anything else in
/// braces (the JSON skeletons) is left alone.
class PromptSet {
public:
    /// The templates shipped under prompts/, compiled in.
    static PromptSet defaults();

    /// Defaults overlaid with every `<name>.txt` found in `dir`.
    static PromptSet load_dir(const std::string& dir);

    /// Throws Error("UnknownPrompt").
    const std::string& get(const std::string& name) const;
    void set(const std::string& name, std::string text) { templates_[name] = std::move(text); }
    const std::map<std::string, std::string>& all() const { return templates_; }

    std::string render(const std::string& name, const std::map<std::string, std::string>& vars) const;

private:
    std::map<std::string, std::string> templates_;
};

/// Single-pass substitution of `{key}` for each key in `vars`. Substituted
/// text is never rescanned and unknown `{...}` groups stay as they are.
std::string render_template(const std::string& text, const std::map<std::string, std::string>& vars);

namespace prompt {
inline constexpr const char* kConciergeSystem = "concierge_system";
inline constexpr const char* kConciergeFormatter = "concierge_formatter";
inline constexpr const char* kPlanC1 = "plan_c1";
inline constexpr const char* kPlanC2Stage1 = "plan_c2_stage1";
inline constexpr const char* kPlanC2Stage2 = "plan_c2_stage2";
inline constexpr const char* kPlanD = "plan_d";
inline constexpr const char* kSpecialistCentralized = "specialist_centralized";
inline constexpr const char* kSpecialistDecentralized = "specialist_decentralized";
inline constexpr const char* kSpecialistSynthesis = "specialist_synthesis";
inline constexpr const char* kHrAssess = "hr_assess";
}  // namespace prompt

}  // namespace buildops::agents
