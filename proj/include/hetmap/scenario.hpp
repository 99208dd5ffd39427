// Copyright 2026 The hetmap Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HETMAP_SCENARIO_HPP
#define HETMAP_SCENARIO_HPP

#include "hetmap/behavior.hpp"
#include "hetmap/explorer.hpp"
#include "hetmap/monitor.hpp"
#include "hetmap/platform.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hetmap {

enum class AppKind { scalable, static_threads };

struct AppSpec {
    std::string app_id;
    double arrival_ms = 0.0;
    TrueBehavior behavior;
    std::optional<std::filesystem::path> description_file;
    AppKind kind = AppKind::scalable;
    int threads = 0;
    double priority = 1.0;
};

/// Forced configuration change, for protocol tests and what-if runs.
struct ScriptedReconfiguration {
    std::string app_id;
    double time_ms = 0.0;
    Configuration config;
};

struct PolicyOptions {
    double noise_sigma = kDefaultNoiseSigma;
    double ema_alpha = kDefaultEmaAlpha;
    double idle_factor = 0.1;
    int reconfig_cost_windows = 1;
    int discard_windows = kDiscardAfterReconfiguration;
    int model_degree = 2;
    std::vector<ScriptedReconfiguration> reconfigurations;
};

struct Scenario {
    std::string name;
    std::uint64_t seed = 0;
    int window_ms = kDefaultWindowMs;
    std::vector<AppSpec> apps;
    PolicyOptions policy_options;
    StageThresholds thresholds;
};

/// Relative description paths are resolved against `base_dir`.
Scenario scenario_from_json_text(const std::string& text, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

/// Checks app ids, behaviors and scripted configurations against `p`.
void validate_scenario(const Scenario& s, const Platform& p);

} // namespace hetmap

#endif
