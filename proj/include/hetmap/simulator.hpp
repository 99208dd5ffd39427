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

#ifndef HETMAP_SIMULATOR_HPP
#define HETMAP_SIMULATOR_HPP

#include "hetmap/allocator.hpp"
#include "hetmap/application.hpp"
#include "hetmap/scenario.hpp"

#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace hetmap {

enum class Policy {
    /// Lagrangian allocation over declared or learned operating points,
    /// with online exploration for applications without a description.
    emapper,
    /// Every application gets every core; cores are time-multiplexed equally.
    baseline_spread,
    /// Allocation over declared description files only, no monitoring.
    static_points,
};

const char* to_string(Policy p);
/// Throws std::invalid_argument for unknown names.
Policy policy_from_string(const std::string& s);

struct AppReport {
    double arrival_ms = 0.0;
    double completion_ms = 0.0;
    double energy_j = 0.0;
    std::vector<Configuration> configs_used;
    std::size_t reconfigurations = 0;
    std::size_t discarded_windows = 0;
    std::size_t accepted_windows = 0;
    std::size_t coallocated_windows = 0;
    Stage stage_at_start = Stage::initial;
    Stage stage_at_end = Stage::initial;

    bool operator==(const AppReport&) const = default;
};

struct Report {
    std::string scenario;
    std::string policy;
    std::uint64_t seed = 0;
    std::map<std::string, AppReport> per_app;
    double makespan_ms = 0.0;
    double total_energy_j = 0.0;
    double idle_energy_j = 0.0;
    /// Independently integrated per-core platform power.
    double platform_energy_j = 0.0;
    /// total_energy_j split over core types with the power coefficients.
    std::vector<double> per_type_energy_j;
    /// Total accumulated work over total declared work.
    double work_ratio = 0.0;

    bool operator==(const Report&) const = default;
};

/// Measurement histories carried from one run to the next.
struct LearnedState {
    std::map<std::string, MeasurementHistory> histories;
    std::map<std::string, Stage> stages;
};

struct SimOptions {
    std::ostream* monitor_trace = nullptr;
    std::ostream* exploration_trace = nullptr;
    std::ostream* lambda_trace = nullptr;
    /// Read at arrival and updated when the run ends.
    LearnedState* learned = nullptr;
};

/**
 * \brief Deterministic discrete-event simulation of one scenario.
 *
 * Time advances between events: arrivals, completions, scripted
 * reconfigurations and monitoring window ticks every `window_ms`.
 * Arrivals, exits, finished exploration batches, stage changes and
 * stable-stage reassessment ticks trigger one reallocation at that instant.
 */
class Simulator {
public:
    Simulator(Scenario scenario, Platform platform, Policy policy, SimOptions options = {});
    ~Simulator();
    Simulator(const Simulator&) = delete;
    Simulator& operator=(const Simulator&) = delete;

    Report run();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

Report run_scenario(const Scenario& scenario, const Platform& platform, Policy policy, SimOptions options = {});

} // namespace hetmap

#endif
