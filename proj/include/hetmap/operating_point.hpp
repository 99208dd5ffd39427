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

#ifndef HETMAP_OPERATING_POINT_HPP
#define HETMAP_OPERATING_POINT_HPP

#include "hetmap/platform.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace hetmap {

enum class Provenance { measured, predicted, declared };

const char* to_string(Provenance p);

/**
 * \brief One selectable way of running an application.
 *
 * `theta` is derived from `config` and counts physical cores per core type.
 * `utility` is in the application's own units (IPS when it reports none),
 * `power` is average watts.
 */
struct OperatingPoint {
    Configuration config;
    CoreVector theta;
    double utility = 0.0;
    double power = 0.0;
    Provenance provenance = Provenance::declared;

    bool operator==(const OperatingPoint& o) const
    {
        return config == o.config && theta == o.theta && utility == o.utility && power == o.power &&
               provenance == o.provenance;
    }
};

/// Builds a point with its footprint; throws on invalid config or
/// non-positive utility/power.
OperatingPoint make_point(const Configuration& cfg, const Platform& p, double utility, double power,
                          Provenance prov = Provenance::declared);

/// Energy-utility cost ρ/υ² (energy per unit of utility, times delay).
/// Throws std::domain_error for non-positive utility.
double energy_utility_cost(const OperatingPoint& pt);
double energy_utility_cost(double power, double utility);

/// Weakly better in footprint, utility and power, strictly in one of them.
bool dominates(const OperatingPoint& a, const OperatingPoint& b);

/// Maximal non-dominated subset. Points identical in (θ, υ, ρ) are collapsed
/// to the first occurrence. Output is sorted by θ lexicographically, then by
/// descending utility.
std::vector<OperatingPoint> pareto_filter(std::span<const OperatingPoint> points);

struct AppDescription {
    std::string app_id;
    std::string utility_units;
    std::vector<OperatingPoint> points;

    bool operator==(const AppDescription&) const = default;
};

struct LoadedDescription {
    AppDescription description;
    /// Number of points the Pareto filter removed on load.
    std::size_t filtered_out = 0;
};

LoadedDescription app_description_from_json_text(const std::string& text, const Platform& p);
std::string app_description_to_json_text(const AppDescription& d);
LoadedDescription load_app_description(const std::filesystem::path& path, const Platform& p);
void save_app_description(const AppDescription& d, const std::filesystem::path& path);

} // namespace hetmap

#endif
