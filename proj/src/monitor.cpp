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

#include "hetmap/monitor.hpp"

#include "hetmap/error.hpp"

#include <cmath>
#include <stdexcept>

namespace hetmap {

EmaState ema_update(EmaState state, double measured)
{
    if (!std::isfinite(measured))
        throw std::domain_error("EMA update with non-finite observation");
    if (!state.initialized) {
        state.value = measured;
        state.initialized = true;
    } else {
        state.value = measured * state.alpha + state.value * (1.0 - state.alpha);
    }
    return state;
}

EnergySplit attribute_energy(double total_energy, const Eigen::VectorXd& cpu_time_per_type,
                             const Eigen::VectorXd& coefficients)
{
    if (cpu_time_per_type.size() != coefficients.size())
        throw DimensionError("cpu time and power coefficient vectors differ in length");
    if (total_energy < 0.0)
        throw std::domain_error("negative total energy");
    Eigen::VectorXd weighted = cpu_time_per_type.cwiseProduct(coefficients);
    double denom = weighted.sum();
    if (!(denom > 0.0))
        throw std::domain_error("energy attribution needs non-zero CPU time");
    double reference_power = total_energy / denom;
    return EnergySplit{weighted * reference_power, cpu_time_per_type};
}

Eigen::VectorXd attribute_by_cpu_time(double type_energy, const Eigen::VectorXd& app_cpu_time)
{
    double total = app_cpu_time.sum();
    if (!(total > 0.0))
        return Eigen::VectorXd::Zero(app_cpu_time.size());
    return app_cpu_time * (type_energy / total);
}

MeasurementChannel::MeasurementChannel(std::uint64_t seed, double noise_sigma, int discard_windows)
    : rng_(seed), sigma_(noise_sigma), discard_windows_(discard_windows)
{
}

double MeasurementChannel::perturb(double v)
{
    if (sigma_ <= 0.0)
        return v;
    return std::max(0.0, v * (1.0 + sigma_ * normal_(rng_)));
}

Measurement MeasurementChannel::sample(const Configuration& cfg, double true_ips, double true_power,
                                       double window_ms, double timestamp_ms)
{
    Measurement m;
    m.config = cfg;
    m.ips = perturb(true_ips);
    m.power = perturb(true_power);
    m.window_ms = window_ms;
    m.timestamp_ms = timestamp_ms;
    if (discard_remaining_ > 0) {
        m.discard = true;
        --discard_remaining_;
    }
    return m;
}

bool MeasurementHistory::ingest(const Measurement& m)
{
    if (m.discard)
        return false;
    auto [it, inserted] = records_.try_emplace(m.config);
    auto& rec = it->second;
    if (inserted) {
        rec.ips.alpha = alpha_;
        rec.power.alpha = alpha_;
    }
    rec.ips = ema_update(rec.ips, m.ips);
    rec.power = ema_update(rec.power, m.power);
    ++rec.samples;
    return true;
}

std::size_t MeasurementHistory::configurations_with_samples(std::size_t min_samples) const
{
    std::size_t n = 0;
    for (const auto& [cfg, rec] : records_)
        if (rec.samples >= min_samples)
            ++n;
    return n;
}

std::size_t MeasurementHistory::total_samples() const
{
    std::size_t n = 0;
    for (const auto& [cfg, rec] : records_)
        n += rec.samples;
    return n;
}

const ConfigRecord* MeasurementHistory::find(const Configuration& cfg) const
{
    auto it = records_.find(cfg);
    return it == records_.end() ? nullptr : &it->second;
}

MonitorTrace::MonitorTrace(std::ostream& os) : os_(os)
{
    os_ << "time_ms,app_id,config,ips_raw,ips_ema,power_raw,power_ema,discarded\n";
}

void MonitorTrace::write(const std::string& app_id, const Measurement& m, const ConfigRecord* rec)
{
    os_ << m.timestamp_ms << ',' << app_id << ",\"" << m.config.to_string() << "\"," << m.ips << ',';
    if (rec)
        os_ << rec->ips.value;
    os_ << ',' << m.power << ',';
    if (rec)
        os_ << rec->power.value;
    os_ << ',' << (m.discard ? 1 : 0) << '\n';
}

} // namespace hetmap
