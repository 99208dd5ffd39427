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

#ifndef HETMAP_MONITOR_HPP
#define HETMAP_MONITOR_HPP

#include "hetmap/platform.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <ostream>
#include <random>
#include <string>

namespace hetmap {

inline constexpr double kDefaultEmaAlpha = 0.1;
inline constexpr int kDefaultWindowMs = 50;
inline constexpr int kDiscardAfterReconfiguration = 3;
inline constexpr double kDefaultNoiseSigma = 0.05;

struct Measurement {
    Configuration config;
    double ips = 0.0;
    double power = 0.0;
    double window_ms = kDefaultWindowMs;
    double timestamp_ms = 0.0;
    bool discard = false;
};

struct EmaState {
    double value = 0.0;
    double alpha = kDefaultEmaAlpha;
    bool initialized = false;
};

/// First observation seeds the average; afterwards
/// value = measured * alpha + value * (1 - alpha).
/// Throws std::domain_error for non-finite input.
EmaState ema_update(EmaState state, double measured);

struct EnergySplit {
    Eigen::VectorXd per_type_energy;
    Eigen::VectorXd per_type_cpu_time;
};

/**
 * Splits a total energy reading across core types.
 *
 * Each type's power is expressed relative to a reference type through its
 * coefficient, P_k = γ_k · P_ref, so that
 * total = Σ_k T_k · γ_k · P_ref. Solving for P_ref gives each type's share.
 * Throws std::domain_error when no CPU time was recorded.
 */
EnergySplit attribute_energy(double total_energy, const Eigen::VectorXd& cpu_time_per_type,
                             const Eigen::VectorXd& coefficients);

/// Splits one core type's energy among applications by their CPU time.
Eigen::VectorXd attribute_by_cpu_time(double type_energy, const Eigen::VectorXd& app_cpu_time);

/**
 * \brief Windowed sampling for one application.
 *
 * Applies seeded multiplicative Gaussian noise to the true signal and marks
 * the first windows after every reconfiguration as discarded.
 */
class MeasurementChannel {
public:
    MeasurementChannel(std::uint64_t seed, double noise_sigma, int discard_windows = kDiscardAfterReconfiguration);

    void notify_reconfiguration() { discard_remaining_ = discard_windows_; }
    int discard_remaining() const { return discard_remaining_; }

    Measurement sample(const Configuration& cfg, double true_ips, double true_power, double window_ms,
                       double timestamp_ms);

private:
    double perturb(double v);

    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    double sigma_;
    int discard_windows_;
    int discard_remaining_ = 0;
};

/// Smoothed statistics of one configuration.
struct ConfigRecord {
    EmaState ips;
    EmaState power;
    std::size_t samples = 0;
};

/// Accepted measurements of one application, one EMA pair per configuration.
class MeasurementHistory {
public:
    explicit MeasurementHistory(double alpha = kDefaultEmaAlpha) : alpha_(alpha) {}

    /// Returns false (and records nothing) for discarded measurements.
    bool ingest(const Measurement& m);
    /// Restores a persisted record verbatim.
    void restore(const Configuration& cfg, const ConfigRecord& rec) { records_[cfg] = rec; }

    const std::map<Configuration, ConfigRecord>& records() const { return records_; }
    std::size_t measured_configurations() const { return records_.size(); }
    std::size_t configurations_with_samples(std::size_t min_samples) const;
    std::size_t total_samples() const;
    const ConfigRecord* find(const Configuration& cfg) const;
    double alpha() const { return alpha_; }

private:
    double alpha_;
    std::map<Configuration, ConfigRecord> records_;
};

/// CSV trace: time_ms,app_id,config,ips_raw,ips_ema,power_raw,power_ema,discarded
class MonitorTrace {
public:
    explicit MonitorTrace(std::ostream& os);
    void write(const std::string& app_id, const Measurement& m, const ConfigRecord* rec);

private:
    std::ostream& os_;
};

} // namespace hetmap

#endif
