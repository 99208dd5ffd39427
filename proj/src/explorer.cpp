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

#include "hetmap/explorer.hpp"

#include "hetmap/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace hetmap {

void StageThresholds::validate() const
{
    if (initial_exit == 0 || stable_points == 0 || stable_samples == 0 || refinement_batch == 0 ||
        stable_reassess == 0)
        throw ValidationError("stage thresholds must be positive");
    if (initial_exit >= stable_points)
        throw ValidationError("initial_exit must be below stable_points");
}

Stage stage_of(const Application& app, const StageThresholds& t)
{
    const auto& h = app.history;
    if (h.measured_configurations() < t.initial_exit)
        return Stage::initial;
    if (h.configurations_with_samples(t.stable_samples) >= t.stable_points)
        return Stage::stable;
    return Stage::refinement;
}

std::vector<TrainingRow> training_rows(const MeasurementHistory& history)
{
    std::vector<TrainingRow> rows;
    rows.reserve(history.records().size());
    for (const auto& [cfg, rec] : history.records())
        rows.push_back({cfg, rec.ips.value, rec.power.value});
    return rows;
}

std::vector<OperatingPoint> measured_points(const MeasurementHistory& history, const Platform& p)
{
    std::vector<OperatingPoint> pts;
    for (const auto& [cfg, rec] : history.records())
        if (rec.ips.value > 0.0 && rec.power.value > 0.0)
            pts.push_back(make_point(cfg, p, rec.ips.value, rec.power.value, Provenance::measured));
    return pts;
}

namespace {

PolyModel fit_rows(std::span<const TrainingRow> rows, std::size_t dims, int degree, bool zero_anchor)
{
    // one row per distinct configuration; later duplicates are averaged in
    std::map<Configuration, std::pair<Eigen::Vector2d, int>> merged;
    for (const auto& r : rows) {
        if (r.config.size() != dims)
            throw DimensionError("training row " + r.config.to_string() + " does not have " + std::to_string(dims) +
                                 " dims");
        auto& [sum, n] = merged[r.config];
        if (n == 0)
            sum.setZero();
        sum += Eigen::Vector2d(r.ips, r.power);
        ++n;
    }
    if (zero_anchor) {
        auto& [sum, n] = merged[Configuration(std::vector<int>(dims, 0))];
        if (n == 0)
            sum.setZero();
        ++n;
    }
    const auto m = static_cast<Eigen::Index>(merged.size());
    Eigen::MatrixXd x(m, static_cast<Eigen::Index>(dims));
    Eigen::VectorXd ips(m), power(m);
    Eigen::Index r = 0;
    for (const auto& [cfg, acc] : merged) {
        x.row(r) = cfg.as_vector().transpose();
        ips[r] = acc.first[0] / acc.second;
        power[r] = acc.first[1] / acc.second;
        ++r;
    }
    return fit_polynomial<double>(x, ips, power, degree);
}

} // namespace

PolyModel fit_model(std::span<const TrainingRow> rows, std::size_t dims, int degree)
{
    return fit_rows(rows, dims, degree, false);
}

PolyModel fit_aux_model(std::span<const TrainingRow> rows, std::size_t dims, int degree)
{
    return fit_rows(rows, dims, degree, true);
}

std::optional<int> usable_degree(std::size_t distinct_rows, std::size_t dims, int max_degree)
{
    for (int d = max_degree; d >= 1; --d)
        if (MonomialBasis::count(dims, d) <= distinct_rows)
            return d;
    return std::nullopt;
}

Configuration select_initial_probe(std::span<const Configuration> measured, std::span<const Configuration> candidates)
{
    if (candidates.empty())
        throw std::invalid_argument("probe selection without candidates");
    const Configuration* best = nullptr;
    double best_dist = -1.0;
    for (const auto& c : candidates) {
        double d = std::numeric_limits<double>::infinity();
        Eigen::VectorXd cv = c.as_vector();
        for (const auto& m : measured)
            d = std::min(d, (cv - m.as_vector()).norm());
        if (d > best_dist || (d == best_dist && c < *best)) {
            best_dist = d;
            best = &c;
        }
    }
    return *best;
}

std::vector<Configuration> select_initial_batch(std::span<const Configuration> measured,
                                                std::span<const Configuration> candidates, std::size_t count)
{
    std::vector<Configuration> seen(measured.begin(), measured.end());
    std::vector<Configuration> pool(candidates.begin(), candidates.end());
    std::vector<Configuration> out;
    while (out.size() < count && !pool.empty()) {
        Configuration pick = select_initial_probe(seen, pool);
        pool.erase(std::find(pool.begin(), pool.end(), pick));
        seen.push_back(pick);
        out.push_back(std::move(pick));
    }
    return out;
}

namespace {

double metric_difference(double main, double aux, double scale)
{
    if (main <= 0.0 || aux <= 0.0)
        return std::max(std::abs(main), std::abs(aux)) / scale;
    const double eps = 1e-9 * scale;
    return std::abs(main - aux) / std::max({std::abs(main), std::abs(aux), eps});
}

} // namespace

double discrepancy_score(const PolyModel& main, const PolyModel& aux, const Configuration& cfg,
                         const MetricScale& scale)
{
    Eigen::VectorXd x = cfg.as_vector();
    double d_ips = metric_difference(main.predict_ips(x), aux.predict_ips(x), scale.ips);
    double d_pow = metric_difference(main.predict_power(x), aux.predict_power(x), scale.power);
    return std::sqrt(d_ips * d_pow);
}

Configuration select_refinement_probe(const PolyModel& main, const PolyModel& aux,
                                      std::span<const Configuration> candidates, const MetricScale& scale)
{
    auto batch = select_refinement_batch(main, aux, candidates, scale, 1);
    if (batch.empty())
        throw std::invalid_argument("probe selection without candidates");
    return batch.front();
}

std::vector<Configuration> select_refinement_batch(const PolyModel& main, const PolyModel& aux,
                                                   std::span<const Configuration> candidates,
                                                   const MetricScale& scale, std::size_t count)
{
    std::vector<std::pair<double, Configuration>> scored;
    scored.reserve(candidates.size());
    for (const auto& c : candidates)
        scored.emplace_back(discrepancy_score(main, aux, c, scale), c);
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first)
            return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<Configuration> out;
    for (std::size_t i = 0; i < scored.size() && out.size() < count; ++i)
        out.push_back(scored[i].second);
    return out;
}

std::vector<OperatingPoint> predicted_front(const PolyModel& model, const Platform& p,
                                            std::span<const OperatingPoint> measured)
{
    std::set<Configuration> have;
    std::vector<OperatingPoint> pts(measured.begin(), measured.end());
    for (const auto& m : measured)
        have.insert(m.config);
    for (const auto& cfg : enumerate_configurations(p)) {
        if (have.count(cfg))
            continue;
        Eigen::VectorXd x = cfg.as_vector();
        double ips = model.predict_ips(x);
        double power = model.predict_power(x);
        if (!(ips > 0.0) || !(power > 0.0) || !std::isfinite(ips) || !std::isfinite(power))
            continue;
        pts.push_back(make_point(cfg, p, ips, power, Provenance::predicted));
    }
    return pareto_filter(pts);
}

std::vector<OperatingPoint> learned_front(const MeasurementHistory& history, Stage stage, const Platform& p,
                                          int max_degree)
{
    auto pts = measured_points(history, p);
    if (stage != Stage::initial) {
        auto rows = training_rows(history);
        if (auto deg = usable_degree(rows.size(), p.dimensions(), max_degree))
            return predicted_front(fit_model(rows, p.dimensions(), *deg), p, pts);
    }
    return pareto_filter(pts);
}

ExplorationTrace::ExplorationTrace(std::ostream& os) : os_(os)
{
    os_ << "round,app_id,stage,probe_config,score,model_mape_ips,model_mape_power\n";
}

void ExplorationTrace::write(std::size_t round, const std::string& app_id, Stage stage, const Configuration& probe,
                             double score, double mape_ips, double mape_power)
{
    os_ << round << ',' << app_id << ',' << to_string(stage) << ",\"" << probe.to_string() << "\"," << score << ','
        << mape_ips << ',' << mape_power << '\n';
}

} // namespace hetmap
