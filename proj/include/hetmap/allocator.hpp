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

#ifndef HETMAP_ALLOCATOR_HPP
#define HETMAP_ALLOCATOR_HPP

#include "hetmap/operating_point.hpp"
#include "hetmap/platform.hpp"

#include <Eigen/Core>

#include <compare>
#include <cstddef>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace hetmap {

struct AppCandidates {
    std::string app_id;
    std::vector<OperatingPoint> points;
    double priority = 1.0;
};

struct AllocationRequest {
    Platform platform;
    std::vector<AppCandidates> apps;
};

/// One physical core handed to an application.
struct CoreSlot {
    std::size_t type = 0;
    int core = 0;
    int threads = 1;

    friend auto operator<=>(const CoreSlot&, const CoreSlot&) = default;
};

using CoreAssignment = std::map<std::string, std::vector<CoreSlot>>;

struct Allocation {
    std::map<std::string, OperatingPoint> choices;
    /// Index of the chosen point in the app's (prepared) candidate list.
    std::map<std::string, std::size_t> choice_index;
    CoreAssignment core_assignment;
    /// Apps placed beyond capacity; the simulator time-multiplexes them.
    std::set<std::string> overflowed;
    /// Every app holding at least one core shared with another app.
    std::set<std::string> coallocated;
    bool feasible = false;
    double total_cost = 0.0;
};

/// Cost used by the allocator: utility is normalized by the app's largest
/// candidate utility and multiplied by the priority before ρ/υ² is taken.
double scaled_cost(const OperatingPoint& pt, double max_utility, double priority);

/// Sum of scaled costs of `alloc.choices` against the candidates in `req`.
double allocation_cost(const AllocationRequest& req, const Allocation& alloc);

struct LambdaTraceRow {
    int iteration = 0;
    Eigen::VectorXd lambda;
    CoreVector demand;
    double relaxed_cost = 0.0;
    bool feasible = false;
};

struct LagrangianOptions {
    int max_iterations = 200;
    /// When set, receives one row per subgradient iteration.
    std::vector<LambdaTraceRow>* trace = nullptr;
};

/**
 * \brief Approximate MMKP solver based on Lagrangian relaxation.
 *
 * Per-type multipliers price core usage; every application independently
 * picks its cheapest candidate under the current prices and the prices move
 * along the projected subgradient. The best feasible selection seen is then
 * improved by single-application swaps. If the relaxation never produced a
 * feasible selection a repair phase trades cost for capacity; when that
 * fails too the co-allocation fallback places the remaining applications.
 */
Allocation allocate(const AllocationRequest& req, const LagrangianOptions& opts = {});

inline constexpr std::size_t kDefaultExactBound = 1'000'000;

/// Exhaustive reference solver. Throws InstanceTooLargeError when the
/// product of candidate counts exceeds `bound`.
Allocation allocate_exact(const AllocationRequest& req, std::size_t bound = kDefaultExactBound);

/// Gives every application missing from `partial` its smallest-footprint
/// point. Those that do not fit the remaining capacity are marked
/// overflowed, largest footprint first.
Allocation coallocate_fallback(const AllocationRequest& req, Allocation partial);

/// First-fit placement by core index within each type, apps in id order.
/// Overflowed apps go onto the least-loaded cores and may share them.
/// Throws std::logic_error if a non-overflowed app does not fit.
CoreAssignment assign_cores(const std::map<std::string, OperatingPoint>& choices, const Platform& p,
                            const std::set<std::string>& overflowed = {});

/// Apps that share a core with another app in `assignment`.
std::set<std::string> sharing_apps(const CoreAssignment& assignment);

void write_lambda_trace_csv(std::ostream& os, const std::vector<LambdaTraceRow>& trace);

} // namespace hetmap

#endif
