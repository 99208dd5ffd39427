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

#ifndef HETMAP_BEHAVIOR_HPP
#define HETMAP_BEHAVIOR_HPP

#include "hetmap/operating_point.hpp"
#include "hetmap/platform.hpp"

#include <optional>
#include <vector>

namespace hetmap {

/// Explicit polynomial ground truth; coefficients follow MonomialBasis order.
struct PolynomialBehavior {
    std::vector<double> ips;
    std::vector<double> power;
};

/**
 * \brief Hidden performance and power model of a simulated application.
 *
 * Throughput follows Amdahl's law over the rate-weighted hardware threads of
 * a configuration. A core running j threads delivers
 * rate · (1 + smt_factor · (j - 1)). Mixing core types costs
 * interference_penalty · (cores outside the largest type) / (cores used).
 */
struct TrueBehavior {
    double total_work = 1.0;
    double parallel_fraction = 0.9;
    std::vector<double> per_type_rate;
    double smt_factor = 0.3;
    std::vector<double> static_power_per_core;
    std::vector<double> dynamic_power_per_core;
    double interference_penalty = 0.0;
    std::optional<PolynomialBehavior> polynomial;
};

/// Throws ValidationError if vector lengths do not match the platform or
/// values are out of range.
void validate_behavior(const TrueBehavior& b, const Platform& p);

struct Throughput {
    double ips = 0.0;
    double power = 0.0;
};

/// Configuration actually exercised by an application with a fixed number
/// of threads: fastest cores get a first thread before any core gets a
/// second. Cores left without a thread stay allocated but idle.
Configuration thread_limited_configuration(const Configuration& cfg, const Platform& p, const TrueBehavior& b,
                                           int threads);

/**
 * True (noise-free) IPS and power of `cfg`. With `static_threads` the
 * application cannot use more hardware threads than it has; allocated cores
 * it cannot use contribute their static power only.
 */
Throughput ground_truth(const TrueBehavior& b, const Configuration& cfg, const Platform& p,
                        std::optional<int> static_threads = std::nullopt);

/// Exhaustive sweep of every configuration, as a design-time exploration
/// tool would produce it. Points are Pareto-filtered.
AppDescription sweep_description(const std::string& app_id, const TrueBehavior& b, const Platform& p,
                                 std::optional<int> static_threads = std::nullopt);

} // namespace hetmap

#endif
