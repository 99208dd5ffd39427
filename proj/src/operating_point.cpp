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

#include "hetmap/operating_point.hpp"

#include "hetmap/error.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace hetmap {

const char* to_string(Provenance p)
{
    switch (p) {
    case Provenance::measured:
        return "measured";
    case Provenance::predicted:
        return "predicted";
    case Provenance::declared:
        return "declared";
    }
    return "declared";
}

namespace {

Provenance provenance_from_string(const std::string& s)
{
    if (s == "measured")
        return Provenance::measured;
    if (s == "predicted")
        return Provenance::predicted;
    if (s == "declared")
        return Provenance::declared;
    throw ParseError("unknown provenance '" + s + "'");
}

bool theta_less(const CoreVector& a, const CoreVector& b)
{
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

} // namespace

OperatingPoint make_point(const Configuration& cfg, const Platform& p, double utility, double power, Provenance prov)
{
    validate_configuration(cfg, p);
    if (!(utility > 0.0) || !std::isfinite(utility))
        throw ValidationError("operating point " + cfg.to_string() + " has non-positive utility");
    if (!(power > 0.0) || !std::isfinite(power))
        throw ValidationError("operating point " + cfg.to_string() + " has non-positive power");
    return OperatingPoint{cfg, footprint(cfg, p), utility, power, prov};
}

double energy_utility_cost(double power, double utility)
{
    if (!(utility > 0.0))
        throw std::domain_error("energy-utility cost needs positive utility");
    return (power / utility) * (1.0 / utility);
}

double energy_utility_cost(const OperatingPoint& pt)
{
    return energy_utility_cost(pt.power, pt.utility);
}

bool dominates(const OperatingPoint& a, const OperatingPoint& b)
{
    if (a.theta.size() != b.theta.size())
        throw DimensionError("dominance check between footprints of different length");
    if (!(a.theta.array() <= b.theta.array()).all() || a.utility < b.utility || a.power > b.power)
        return false;
    return (a.theta.array() < b.theta.array()).any() || a.utility > b.utility || a.power < b.power;
}

std::vector<OperatingPoint> pareto_filter(std::span<const OperatingPoint> points)
{
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        const auto& a = points[i];
        const auto& b = points[j];
        if (a.theta != b.theta)
            return theta_less(a.theta, b.theta);
        return a.utility > b.utility;
    });

    // Collapse exact duplicates onto the earliest input index.
    std::vector<std::size_t> unique;
    for (std::size_t i : order) {
        bool dup = false;
        for (std::size_t u : unique) {
            const auto& a = points[u];
            const auto& b = points[i];
            if (a.theta == b.theta && a.utility == b.utility && a.power == b.power) {
                dup = true;
                break;
            }
        }
        if (!dup)
            unique.push_back(i);
    }

    std::vector<OperatingPoint> out;
    for (std::size_t i : unique) {
        bool dominated = std::any_of(unique.begin(), unique.end(),
                                     [&](std::size_t j) { return j != i && dominates(points[j], points[i]); });
        if (!dominated)
            out.push_back(points[i]);
    }
    return out;
}

LoadedDescription app_description_from_json_text(const std::string& text, const Platform& p)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("application description: ") + e.what());
    }
    LoadedDescription out;
    try {
        out.description.app_id = j.at("app_id").get<std::string>();
        out.description.utility_units = j.value("utility_units", std::string{});
        std::vector<OperatingPoint> raw;
        for (const auto& pt : j.at("points")) {
            Configuration cfg(pt.at("config").get<std::vector<int>>());
            if (cfg.size() != p.dimensions())
                throw DimensionError("description '" + out.description.app_id + "' has a " +
                                     std::to_string(cfg.size()) + "-dim config, platform '" + p.name() + "' has " +
                                     std::to_string(p.dimensions()));
            Provenance prov = Provenance::declared;
            if (pt.contains("provenance"))
                prov = provenance_from_string(pt.at("provenance").get<std::string>());
            raw.push_back(make_point(cfg, p, pt.at("utility").get<double>(), pt.at("power").get<double>(), prov));
        }
        if (out.description.app_id.empty())
            throw ValidationError("application description with empty app_id");
        out.description.points = pareto_filter(raw);
        out.filtered_out = raw.size() - out.description.points.size();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("application description: ") + e.what());
    }
    return out;
}

std::string app_description_to_json_text(const AppDescription& d)
{
    nlohmann::json j;
    j["app_id"] = d.app_id;
    j["utility_units"] = d.utility_units;
    j["points"] = nlohmann::json::array();
    for (const auto& pt : d.points)
        j["points"].push_back({{"config", pt.config.dims},
                               {"utility", pt.utility},
                               {"power", pt.power},
                               {"provenance", to_string(pt.provenance)}});
    return j.dump(2);
}

LoadedDescription load_app_description(const std::filesystem::path& path, const Platform& p)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open application description " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return app_description_from_json_text(ss.str(), p);
}

void save_app_description(const AppDescription& d, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write application description " + path.string());
    out << app_description_to_json_text(d) << '\n';
}

} // namespace hetmap
