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


#ifndef HETMAP_REPORT_HPP
#define HETMAP_REPORT_HPP

#include "hetmap/simulator.hpp"

#include <map>
#include <ostream>
#include <span>
#include <string>

namespace hetmap {

std::string report_to_json_text(const Report& r);
/// Throws ParseError.
Report report_from_json_text(const std::string& text);

/// One row per application and a final `__total__` row.
void write_report_csv(std::ostream& os, const Report& r);

/// Means over repeated runs of one scenario and policy.
struct Aggregate {
    std::string scenario;
    std::string policy;
    std::size_t runs = 0;
    double makespan_ms = 0.0;
    double total_energy_j = 0.0;
    double idle_energy_j = 0.0;
    std::map<std::string, double> completion_ms;
    std::map<std::string, double> energy_j;

    bool operator==(const Aggregate&) const = default;
};

/// Throws std::invalid_argument for an empty span.
Aggregate aggregate_reports(std::span<const Report> runs);

std::string aggregate_to_json_text(const Aggregate& a);
Aggregate aggregate_from_json_text(const std::string& text);

/// baseline / policy for makespan and energy; values above 1 favor `policy`.
struct Improvement {
    std::string policy;
    double time = 0.0;
    double energy = 0.0;
};

Improvement improvement_factor(const Aggregate& baseline, const Aggregate& policy);

/// Persisted exploration state: per app its stage and smoothed records.
std::string learned_state_to_json_text(const LearnedState& s);
LearnedState learned_state_from_json_text(const std::string& text);

} // namespace hetmap

#endif
