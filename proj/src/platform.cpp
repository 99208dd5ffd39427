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

#include "hetmap/platform.hpp"

#include "hetmap/error.hpp"
#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace hetmap {

Platform::Platform(std::string name, std::vector<CoreType> core_types)
    : name_(std::move(name)), core_types_(std::move(core_types))
{
    if (core_types_.empty())
        throw ValidationError("platform '" + name_ + "' declares no core types");
    std::set<std::string> ids;
    for (std::size_t k = 0; k < core_types_.size(); ++k) {
        const auto& t = core_types_[k];
        if (t.id.empty())
            throw ValidationError("core type with empty id");
        if (!ids.insert(t.id).second)
            throw ValidationError("duplicate core type id '" + t.id + "'");
        if (t.count < 1)
            throw ValidationError("core type '" + t.id + "' has count < 1");
        if (t.hw_threads < 1)
            throw ValidationError("core type '" + t.id + "' has hw_threads < 1");
        if (!(t.power_coefficient > 0.0))
            throw ValidationError("core type '" + t.id + "' has non-positive power coefficient");
        first_bucket_.push_back(bucket_type_.size());
        for (int j = 1; j <= t.hw_threads; ++j) {
            bucket_type_.push_back(k);
            bucket_threads_.push_back(j);
        }
    }
}

CoreVector Platform::capacity() const
{
    CoreVector cap(static_cast<Eigen::Index>(num_types()));
    for (std::size_t k = 0; k < num_types(); ++k)
        cap[static_cast<Eigen::Index>(k)] = core_types_[k].count;
    return cap;
}

int Platform::total_cores() const
{
    return capacity().sum();
}

std::optional<std::size_t> Platform::type_index(const std::string& id) const
{
    for (std::size_t k = 0; k < core_types_.size(); ++k)
        if (core_types_[k].id == id)
            return k;
    return std::nullopt;
}

bool Configuration::is_zero() const
{
    return std::all_of(dims.begin(), dims.end(), [](int v) { return v == 0; });
}

Eigen::VectorXd Configuration::as_vector() const
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(dims.size()));
    for (std::size_t i = 0; i < dims.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = dims[i];
    return v;
}

std::string Configuration::to_string() const
{
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < dims.size(); ++i)
        os << (i ? "," : "") << dims[i];
    os << ']';
    return os.str();
}

void validate_configuration(const Configuration& cfg, const Platform& p)
{
    if (cfg.size() != p.dimensions())
        throw DimensionError("configuration " + cfg.to_string() + " has " + std::to_string(cfg.size()) +
                             " dims, platform has " + std::to_string(p.dimensions()));
    for (int v : cfg.dims)
        if (v < 0)
            throw ValidationError("configuration " + cfg.to_string() + " has a negative entry");
    CoreVector theta = footprint(cfg, p);
    for (std::size_t k = 0; k < p.num_types(); ++k)
        if (theta[static_cast<Eigen::Index>(k)] > p.core_type(k).count)
            throw ValidationError("configuration " + cfg.to_string() + " exceeds the " +
                                  p.core_type(k).id + " core count");
}

CoreVector footprint(const Configuration& cfg, const Platform& p)
{
    if (cfg.size() != p.dimensions())
        throw DimensionError("configuration length " + std::to_string(cfg.size()) +
                             " does not match platform dimensionality " + std::to_string(p.dimensions()));
    CoreVector theta = CoreVector::Zero(static_cast<Eigen::Index>(p.num_types()));
    for (std::size_t d = 0; d < cfg.size(); ++d)
        theta[static_cast<Eigen::Index>(p.bucket_type(d))] += cfg[d];
    return theta;
}

namespace {

// All bucket vectors for one core type with sum <= count, lexicographic.
void type_buckets(int width, int count, std::vector<int>& cur, std::vector<std::vector<int>>& out)
{
    if (static_cast<int>(cur.size()) == width) {
        out.push_back(cur);
        return;
    }
    int used = std::accumulate(cur.begin(), cur.end(), 0);
    for (int v = 0; v + used <= count; ++v) {
        cur.push_back(v);
        type_buckets(width, count, cur, out);
        cur.pop_back();
    }
}

} // namespace

std::vector<Configuration> enumerate_configurations(const Platform& p, std::optional<std::size_t> cap)
{
    std::vector<std::vector<std::vector<int>>> per_type;
    for (const auto& t : p.core_types()) {
        std::vector<std::vector<int>> opts;
        std::vector<int> cur;
        type_buckets(t.hw_threads, t.count, cur, opts);
        per_type.push_back(std::move(opts));
    }

    std::vector<Configuration> all;
    std::vector<std::size_t> idx(per_type.size(), 0);
    bool done = false;
    while (!done) {
        std::vector<int> dims;
        dims.reserve(p.dimensions());
        for (std::size_t k = 0; k < per_type.size(); ++k)
            dims.insert(dims.end(), per_type[k][idx[k]].begin(), per_type[k][idx[k]].end());
        Configuration cfg(std::move(dims));
        if (!cfg.is_zero())
            all.push_back(std::move(cfg));
        // odometer with the last type fastest keeps lexicographic order
        std::size_t k = per_type.size();
        while (true) {
            if (k == 0) {
                done = true;
                break;
            }
            --k;
            if (++idx[k] < per_type[k].size())
                break;
            idx[k] = 0;
        }
    }

    if (!cap || *cap >= all.size())
        return all;

    std::vector<Configuration> strata = all;
    std::stable_sort(strata.begin(), strata.end(), [&](const Configuration& a, const Configuration& b) {
        return footprint(a, p).sum() < footprint(b, p).sum();
    });
    std::vector<Configuration> picked;
    picked.reserve(*cap);
    const std::size_t n = strata.size();
    for (std::size_t i = 0; i < *cap; ++i)
        picked.push_back(strata[(i * n) / *cap]);
    std::sort(picked.begin(), picked.end());
    return picked;
}

Configuration full_configuration(const Platform& p)
{
    std::vector<int> dims(p.dimensions(), 0);
    for (std::size_t k = 0; k < p.num_types(); ++k) {
        const auto& t = p.core_type(k);
        dims[p.first_bucket(k) + static_cast<std::size_t>(t.hw_threads) - 1] = t.count;
    }
    return Configuration(std::move(dims));
}

Platform platform_from_json_text(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("platform: ") + e.what());
    }
    try {
        std::vector<CoreType> types;
        for (const auto& t : j.at("core_types")) {
            CoreType ct;
            ct.id = t.at("id").get<std::string>();
            ct.count = t.at("count").get<int>();
            ct.hw_threads = t.at("hw_threads").get<int>();
            ct.power_coefficient = t.at("power_coefficient").get<double>();
            types.push_back(std::move(ct));
        }
        return Platform(j.value("name", std::string{}), std::move(types));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("platform: ") + e.what());
    }
}

std::string platform_to_json_text(const Platform& p)
{
    nlohmann::json j;
    j["name"] = p.name();
    j["core_types"] = nlohmann::json::array();
    for (const auto& t : p.core_types())
        j["core_types"].push_back({{"id", t.id},
                                   {"count", t.count},
                                   {"hw_threads", t.hw_threads},
                                   {"power_coefficient", t.power_coefficient}});
    return j.dump(2);
}

Platform load_platform(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open platform file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return platform_from_json_text(ss.str());
}

} // namespace hetmap
