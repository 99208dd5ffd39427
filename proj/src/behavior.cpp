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

#include "hetmap/behavior.hpp"

#include "hetmap/error.hpp"
#include "hetmap/poly_model.hpp"

#include <algorithm>
#include <cmath>

namespace hetmap {

void validate_behavior(const TrueBehavior& b, const Platform& p)
{
    if (!(b.total_work > 0.0))
        throw ValidationError("behavior total_work must be positive");
    if (b.polynomial) {
        auto terms = b.polynomial->ips.size();
        if (terms == 0 || terms != b.polynomial->power.size())
            throw ValidationError("polynomial behavior needs equally long ips and power coefficient lists");
        bool ok = false;
        for (int d = 0; d <= 6 && !ok; ++d)
            ok = MonomialBasis::count(p.dimensions(), d) == terms;
        if (!ok)
            throw ValidationError("polynomial behavior coefficient count does not match any degree for " +
                                  std::to_string(p.dimensions()) + " dims");
        return;
    }
    const auto m = p.num_types();
    if (b.per_type_rate.size() != m || b.static_power_per_core.size() != m || b.dynamic_power_per_core.size() != m)
        throw ValidationError("behavior vectors must have one entry per core type (" + std::to_string(m) + ")");
    if (b.parallel_fraction < 0.0 || b.parallel_fraction > 1.0)
        throw ValidationError("parallel_fraction outside [0, 1]");
    if (!(b.smt_factor > 0.0) || b.smt_factor > 1.0)
        throw ValidationError("smt_factor outside (0, 1]");
    if (b.interference_penalty < 0.0)
        throw ValidationError("negative interference_penalty");
    for (std::size_t k = 0; k < m; ++k)
        if (!(b.per_type_rate[k] > 0.0) || !(b.static_power_per_core[k] > 0.0) || !(b.dynamic_power_per_core[k] > 0.0))
            throw ValidationError("behavior rates and powers must be positive");
}

namespace {

double thread_factor(const TrueBehavior& b, int threads)
{
    return 1.0 + b.smt_factor * static_cast<double>(threads - 1);
}

double type_rate(const TrueBehavior& b, std::size_t k)
{
    return b.per_type_rate.empty() ? 1.0 : b.per_type_rate[k];
}

Throughput polynomial_truth(const PolynomialBehavior& poly, const Configuration& cfg)
{
    int degree = 0;
    while (MonomialBasis::count(cfg.size(), degree) < poly.ips.size())
        ++degree;
    MonomialBasis basis(cfg.size(), degree);
    Eigen::VectorXd phi = basis.evaluate(cfg.as_vector());
    Eigen::Map<const Eigen::VectorXd> ci(poly.ips.data(), static_cast<Eigen::Index>(poly.ips.size()));
    Eigen::Map<const Eigen::VectorXd> cp(poly.power.data(), static_cast<Eigen::Index>(poly.power.size()));
    return {phi.dot(ci), phi.dot(cp)};
}

} // namespace

Configuration thread_limited_configuration(const Configuration& cfg, const Platform& p, const TrueBehavior& b,
                                           int threads)
{
    struct Core {
        double rate;
        std::size_t type;
        std::size_t bucket;
        int capacity;
        int used = 0;
    };
    std::vector<Core> cores;
    for (std::size_t d = 0; d < cfg.size(); ++d)
        for (int c = 0; c < cfg[d]; ++c)
            cores.push_back({type_rate(b, p.bucket_type(d)), p.bucket_type(d), d, p.bucket_threads(d)});
    std::stable_sort(cores.begin(), cores.end(), [](const Core& a, const Core& c) { return a.rate > c.rate; });

    int left = threads;
    for (auto& c : cores) {
        if (left == 0)
            break;
        c.used = 1;
        --left;
    }
    for (auto& c : cores) {
        if (left == 0)
            break;
        int extra = std::min(left, c.capacity - c.used);
        if (c.used > 0 && extra > 0) {
            c.used += extra;
            left -= extra;
        }
    }
    std::vector<int> dims(cfg.size(), 0);
    for (const auto& c : cores)
        if (c.used > 0)
            ++dims[p.first_bucket(c.type) + static_cast<std::size_t>(c.used) - 1];
    return Configuration(std::move(dims));
}

Throughput ground_truth(const TrueBehavior& b, const Configuration& cfg, const Platform& p,
                        std::optional<int> static_threads)
{
    validate_configuration(cfg, p);
    Configuration used = static_threads ? thread_limited_configuration(cfg, p, b, *static_threads) : cfg;

    if (b.polynomial)
        return polynomial_truth(*b.polynomial, used);

    CoreVector allocated = footprint(cfg, p);
    CoreVector active = footprint(used, p);
    double static_power = 0.0;
    for (std::size_t k = 0; k < p.num_types(); ++k)
        static_power += allocated[static_cast<Eigen::Index>(k)] * b.static_power_per_core[k];
    if (active.sum() == 0)
        return {0.0, static_power};

    double capacity = 0.0;
    double best_rate = 0.0;
    std::size_t best_type = 0;
    for (std::size_t d = 0; d < used.size(); ++d) {
        if (used[d] == 0)
            continue;
        std::size_t k = p.bucket_type(d);
        capacity += used[d] * b.per_type_rate[k] * thread_factor(b, p.bucket_threads(d));
        if (b.per_type_rate[k] > best_rate) {
            best_rate = b.per_type_rate[k];
            best_type = k;
        }
    }
    const double f = b.parallel_fraction;
    const double serial_time = (1.0 - f) / best_rate;
    const double time_per_work = serial_time + f / capacity;
    const double total = active.sum();
    const double penalty = b.interference_penalty * (total - active.maxCoeff()) / total;
    const double ips = (1.0 - penalty) / time_per_work;

    // Only the fastest core is busy during the serial share of the run.
    const double serial_share = serial_time / time_per_work;
    double dynamic_all = 0.0;
    for (std::size_t d = 0; d < used.size(); ++d)
        dynamic_all += used[d] * b.dynamic_power_per_core[p.bucket_type(d)] * thread_factor(b, p.bucket_threads(d));
    const double dynamic = (1.0 - serial_share) * dynamic_all + serial_share * b.dynamic_power_per_core[best_type];
    return {ips, static_power + dynamic};
}

AppDescription sweep_description(const std::string& app_id, const TrueBehavior& b, const Platform& p,
                                 std::optional<int> static_threads)
{
    std::vector<OperatingPoint> pts;
    for (const auto& cfg : enumerate_configurations(p)) {
        Throughput t = ground_truth(b, cfg, p, static_threads);
        if (t.ips > 0.0 && t.power > 0.0)
            pts.push_back(make_point(cfg, p, t.ips, t.power, Provenance::declared));
    }
    return AppDescription{app_id, "ips", pareto_filter(pts)};
}

} // namespace hetmap
