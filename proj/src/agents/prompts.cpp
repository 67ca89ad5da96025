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


#include "buildops/agents/prompts.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "buildops/error.hpp"

namespace buildops::agents {

namespace detail {
const std::map<std::string, std::string>& embedded_prompts();
}

PromptSet PromptSet::defaults() {
    PromptSet set;
    set.templates_ = detail::embedded_prompts();
    return set;
}

PromptSet PromptSet::load_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    PromptSet set = defaults();
    if (!fs::is_directory(dir)) throw Error("InvalidArgument", "prompts directory '" + dir + "' does not exist");
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() != ".txt") continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream text;
        text << in.rdbuf();
        set.templates_[entry.path().stem().string()] = text.str();
    }
    return set;
}

const std::string& PromptSet::get(const std::string& name) const {
    auto it = templates_.find(name);
    if (it == templates_.end()) throw Error("UnknownPrompt", "no prompt template '" + name + "'");
    return it->second;
}

std::string PromptSet::render(const std::string& name, const std::map<std::string, std::string>& vars) const {
    return render_template(get(name), vars);
}

std::string render_template(const std::string& text, const std::map<std::string, std::string>& vars) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '{') {
            std::size_t j = i + 1;
            while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
            if (j < text.size() && text[j] == '}' && j > i + 1) {
                auto it = vars.find(text.substr(i + 1, j - i - 1));
                if (it != vars.end()) {
                    out += it->second;
                    i = j + 1;
                    continue;
                }
            }
        }
        out += text[i++];
    }
    return out;
}

}  // namespace buildops::agents
