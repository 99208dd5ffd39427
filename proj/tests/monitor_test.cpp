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


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hetmap/monitor.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

using namespace hetmap;

TEST_CASE("ema update")
{
    EmaState s;
    s = ema_update(s, 50.0);
    CHECK(s.initialized);
    CHECK(s.value == 50.0);

    EmaState t{100.0, 0.1, true};
    CHECK(ema_update(t, 200.0).value == doctest::Approx(110.0));
    CHECK_THROWS_AS(ema_update(t, std::numeric_limits<double>::quiet_NaN()), std::domain_error);
    CHECK_THROWS_AS(ema_update(t, std::numeric_limits<double>::infinity()), std::domain_error);
}

TEST_CASE("ema contracts geometrically toward a constant input")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int c = 0; c < 200; ++c) {
        const double init = u(rng), v = u(rng);
        EmaState s{init, 0.1, true};
        for (int k = 1; k <= 20; ++k) {
            s = ema_update(s, v);
            CHECK(std::abs(s.value - v) <= std::pow(0.9, k) * std::abs(init - v) * (1 + 1e-12) + 1e-12);
        }
    }
}

TEST_CASE("ema stays within the observed range")
{
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n(10.0, 5.0);
    EmaState s;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i = 0; i < 5000; ++i) {
        double x = n(rng);
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        s = ema_update(s, x);
        CHECK(s.value >= lo);
        CHECK(s.value <= hi);
    }
}

TEST_CASE("energy attribution")
{
    Eigen::VectorXd t(2), g(2);
    t << 1.0, 1.0;
    g << 3.0, 1.0;
    EnergySplit e = attribute_energy(10.0, t, g);
    CHECK(e.per_type_energy[0] == doctest::Approx(7.5));
    CHECK(e.per_type_energy[1] == doctest::Approx(2.5));

    g << 1.0, 1.0;
    e = attribute_energy(8.0, t, g);
    CHECK(e.per_type_energy[0] == doctest::Approx(4.0));
    CHECK(e.per_type_energy[1] == doctest::Approx(4.0));

    CHECK_THROWS_AS(attribute_energy(1.0, Eigen::VectorXd::Zero(2), g), std::domain_error);
}

TEST_CASE("energy attribution conserves and scales linearly")
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    std::uniform_int_distribution<int> m(1, 4);
    for (int c = 0; c < 1000; ++c) {
        const int k = m(rng);
        Eigen::VectorXd t(k), g(k);
        for (int i = 0; i < k; ++i) {
            t[i] = u(rng);
            g[i] = 0.1 + u(rng);
        }
        if (t.sum() == 0.0)
            continue;
        const double total = 100.0 * u(rng);
        EnergySplit e = attribute_energy(total, t, g);
        CHECK(std::abs(e.per_type_energy.sum() - total) <= 1e-9 * std::max(total, 1e-300));
        EnergySplit twice = attribute_energy(2.0 * total, t, g);
        CHECK((twice.per_type_energy - 2.0 * e.per_type_energy).norm() <= 1e-9 * std::max(total, 1.0));
        CHECK((e.per_type_energy.array() >= 0.0).all());
    }
}

TEST_CASE("cpu-time split among apps")
{
    Eigen::VectorXd t(3);
    t << 1.0, 2.0, 1.0;
    Eigen::VectorXd e = attribute_by_cpu_time(8.0, t);
    CHECK(e[0] == doctest::Approx(2.0));
    CHECK(e[1] == doctest::Approx(4.0));
    CHECK(e.sum() == doctest::Approx(8.0));
}

TEST_CASE("noise-free channel returns the truth")
{
    MeasurementChannel ch(1, 0.0);
    Measurement m = ch.sample(Configuration{1, 0}, 3.5, 7.25, kDefaultWindowMs, 50.0);
    CHECK(m.ips == 3.5);
    CHECK(m.power == 7.25);
    CHECK(m.window_ms == 50.0);
    CHECK_FALSE(m.discard);
}

TEST_CASE("noisy channel is unbiased and seeded")
{
    MeasurementChannel a(42, 0.05), b(42, 0.05);
    double si = 0.0, sp = 0.0;
    for (int i = 0; i < 1000; ++i) {
        Measurement x = a.sample(Configuration{1}, 10.0, 4.0, 50.0, i * 50.0);
        Measurement y = b.sample(Configuration{1}, 10.0, 4.0, 50.0, i * 50.0);
        CHECK(x.ips == y.ips);
        CHECK(x.power == y.power);
        si += x.ips;
        sp += x.power;
    }
    CHECK(std::abs(si / 1000.0 - 10.0) / 10.0 < 0.01);
    CHECK(std::abs(sp / 1000.0 - 4.0) / 4.0 < 0.01);
}

TEST_CASE("discarded windows never reach the history")
{
    MeasurementChannel ch(9, 0.05);
    MeasurementHistory h;
    std::size_t windows = 0, reconfigs = 0;
    const Configuration cfgs[] = {{1, 0}, {0, 1}, {1, 1}, {1, 0}};
    for (int phase = 0; phase < 4; ++phase) {
        if (phase > 0) {
            ch.notify_reconfiguration();
            ++reconfigs;
        }
        for (int w = 0; w < 7; ++w) {
            Measurement m = ch.sample(cfgs[phase], 5.0, 2.0, 50.0, windows * 50.0);
            CHECK(m.discard == (phase > 0 && w < 3));
            CHECK(h.ingest(m) == !m.discard);
            ++windows;
        }
    }
    CHECK(h.total_samples() == windows - 3 * reconfigs);
    CHECK(h.measured_configurations() == 3);
    CHECK(h.find(Configuration{1, 0})->samples == 7 + 4);
    CHECK(h.configurations_with_samples(4) == 3);
    CHECK(h.configurations_with_samples(5) == 1);
    CHECK(h.find(Configuration{0, 0}) == nullptr);
}

TEST_CASE("history keeps one ema per configuration")
{
    MeasurementHistory h(0.5);
    Measurement m;
    m.config = Configuration{1};
    m.ips = 2.0;
    m.power = 1.0;
    h.ingest(m);
    m.ips = 4.0;
    m.power = 3.0;
    h.ingest(m);
    const ConfigRecord* r = h.find(Configuration{1});
    REQUIRE(r != nullptr);
    CHECK(r->ips.value == doctest::Approx(3.0));
    CHECK(r->power.value == doctest::Approx(2.0));
    CHECK(r->samples == 2);
}

TEST_CASE("monitor trace columns")
{
    std::ostringstream os;
    MonitorTrace tr(os);
    Measurement m;
    m.config = Configuration{1, 0};
    m.ips = 1.5;
    m.power = 2.5;
    m.timestamp_ms = 100.0;
    tr.write("ep", m, nullptr);
    std::string text = os.str();
    CHECK(text.rfind("time_ms,app_id,config,ips_raw,ips_ema,power_raw,power_ema,discarded\n", 0) == 0);
    CHECK(text.find("ep") != std::string::npos);
}
