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

#ifndef HETMAP_EXPLORER_HPP
#define HETMAP_EXPLORER_HPP

#include "hetmap/application.hpp"
#include "hetmap/operating_point.hpp"
#include "hetmap/platform.hpp"
#include "hetmap/poly_model.hpp"

#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace hetmap {

inline constexpr int kDefaultModelDegree = 2;

struct StageThresholds {
    std::size_t initial_exit = 6;
    std::size_t stable_points = 25;
    std::size_t stable_samples = 20;
    std::size_t refinement_batch = 3;
    std::size_t stable_reassess = 100;

    /// Throws ValidationError on zero values or initial_exit >= stable_points.
    void validate() const;
};

/// Stage implied by the measurement history alone.
Stage stage_of(const Application& app, const StageThresholds& t);

/// One smoothed observation per configuration.
struct TrainingRow {
    Configuration config;
    double ips = 0.0;
    double power = 0.0;
};

/// EMA values of every measured configuration of `history`.
std::vector<TrainingRow> training_rows(const MeasurementHistory& history);

/// Measured operating points (EMA values) with positive utility and power.
std::vector<OperatingPoint> measured_points(const MeasurementHistory& history, const Platform& p);

/// Throws UnderdeterminedError with fewer distinct configurations than
/// monomials for (dims, degree).
PolyModel fit_model(std::span<const TrainingRow> rows, std::size_t dims, int degree = kDefaultModelDegree);

/// Same as fit_model with an extra all-zero configuration observed at
/// zero IPS and zero power.
PolyModel fit_aux_model(std::span<const TrainingRow> rows, std::size_t dims, int degree = kDefaultModelDegree);

/// Highest degree <= max_degree that `distinct_rows` observations determine,
/// or nullopt if not even a linear model is.
std::optional<int> usable_degree(std::size_t distinct_rows, std::size_t dims, int max_degree);

/// Candidate whose nearest measured configuration is furthest away;
/// ties go to the lexicographically smallest candidate.
Configuration select_initial_probe(std::span<const Configuration> measured, std::span<const Configuration> candidates);

/// Largest observed values, used to scale anomaly discrepancies.
struct MetricScale {
    double ips = 1.0;
    double power = 1.0;
};

/**
 * Discrepancy between the main and the zero-anchored auxiliary model.
 *
 * Per metric the relative difference |main - aux| / max(|main|, |aux|, ε)
 * is used. When either model predicts a non-positive value the difference
 * is taken against zero instead, max(|main|, |aux|) / scale. The score is
 * the geometric mean of the IPS and power differences.
 */
double discrepancy_score(const PolyModel& main, const PolyModel& aux, const Configuration& cfg,
                         const MetricScale& scale);

Configuration select_refinement_probe(const PolyModel& main, const PolyModel& aux,
                                      std::span<const Configuration> candidates, const MetricScale& scale);

/// Up to `count` distinct initial-stage probes, each chosen as if the
/// previous ones had already been measured.
std::vector<Configuration> select_initial_batch(std::span<const Configuration> measured,
                                                std::span<const Configuration> candidates, std::size_t count);

/// The `count` highest-scoring candidates, best first.
std::vector<Configuration> select_refinement_batch(const PolyModel& main, const PolyModel& aux,
                                                   std::span<const Configuration> candidates,
                                                   const MetricScale& scale, std::size_t count);

/// Model predictions over every configuration of `p`, merged with the
/// measured points (measured wins per configuration) and Pareto-filtered.
/// Non-positive predictions are dropped.
std::vector<OperatingPoint> predicted_front(const PolyModel& model, const Platform& p,
                                            std::span<const OperatingPoint> measured);

/// Front an application is allocated from: the model front once past the
/// Initial stage and enough rows exist, otherwise the measured front.
std::vector<OperatingPoint> learned_front(const MeasurementHistory& history, Stage stage, const Platform& p,
                                          int max_degree = kDefaultModelDegree);

/// CSV: round,app_id,stage,probe_config,score,model_mape_ips,model_mape_power
class ExplorationTrace {
public:
    explicit ExplorationTrace(std::ostream& os);
    void write(std::size_t round, const std::string& app_id, Stage stage, const Configuration& probe, double score,
               double mape_ips, double mape_power);

private:
    std::ostream& os_;
};

} // namespace hetmap

#endif
