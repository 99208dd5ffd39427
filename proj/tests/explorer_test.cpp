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

#include "hetmap/error.hpp"
#include "hetmap/explorer.hpp"
#include "hetmap/metrics.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

using namespace hetmap;

namespace {

Platform small()
{
    return Platform("small", {{"P", 2, 2, 3.0}, {"E", 4, 1, 1.0}});
}

Application with_history(const std::vector<Configuration>& cfgs, std::size_t samples)
{
    Application app;
    app.app_id = "a";
    for (const auto& c : cfgs)
        for (std::size_t s = 0; s < samples; ++s) {
            Measurement m;
            m.config = c;
            m.ips = 1.0 + c.as_vector().sum();
            m.power = 2.0 + c.as_vector().sum();
            app.history.ingest(m);
        }
    return app;
}

// 1 + 2a + 3b + c + 0.5a^2 - 0.25ab + 0.1c^2 style quadratic over 3 dims
double quad_ips(const Eigen::VectorXd& x)
{
    return 1.0 + 2.0 * x[0] + 3.0 * x[1] + x[2] + 0.5 * x[0] * x[0] - 0.25 * x[0] * x[1] + 0.1 * x[2] * x[2];
}

double quad_power(const Eigen::VectorXd& x)
{
    return 2.0 + x[0] + 1.5 * x[1] + 0.5 * x[2] + 0.2 * x[1] * x[1] + 0.05 * x[0] * x[2];
}

std::vector<TrainingRow> quad_rows(const std::vector<Configuration>& cfgs)
{
    std::vector<TrainingRow> rows;
    for (const auto& c : cfgs)
        rows.push_back({c, quad_ips(c.as_vector()), quad_power(c.as_vector())});
    return rows;
}

PolyModel linear_1d(double ips_slope, double power_slope)
{
    PolyModel m;
    m.basis = MonomialBasis(1, 1);
    m.ips_coefficients = Eigen::Vector2d(0.0, ips_slope);
    m.power_coefficients = Eigen::Vector2d(0.0, power_slope);
    return m;
}

} // namespace

TEST_CASE("stage thresholds")
{
    StageThresholds t;
    std::vector<Configuration> cfgs;
    for (int i = 1; i <= 25; ++i)
        cfgs.push_back(Configuration{i});
    CHECK(stage_of(with_history({cfgs.begin(), cfgs.begin() + 5}, 20), t) == Stage::initial);
    CHECK(stage_of(with_history({cfgs.begin(), cfgs.begin() + 10}, 5), t) == Stage::refinement);
    CHECK(stage_of(with_history(cfgs, 20), t) == Stage::stable);
    CHECK(stage_of(with_history(cfgs, 19), t) == Stage::refinement);

    StageThresholds bad;
    bad.initial_exit = 30;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = StageThresholds{};
    bad.refinement_batch = 0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("stage never regresses")
{
    Application app;
    app.advance_to(Stage::refinement);
    app.advance_to(Stage::initial);
    CHECK(app.stage == Stage::refinement);
    app.advance_to(Stage::stable);
    CHECK(app.stage == Stage::stable);
}

TEST_CASE("monomial basis order and counts")
{
    MonomialBasis b(2, 2);
    REQUIRE(b.size() == 6);
    CHECK(b.exponents()[0] == std::vector<int>{0, 0});
    CHECK(b.exponents()[1] == std::vector<int>{1, 0});
    CHECK(b.exponents()[2] == std::vector<int>{0, 1});
    CHECK(b.exponents()[3] == std::vector<int>{2, 0});
    CHECK(b.exponents()[4] == std::vector<int>{1, 1});
    CHECK(b.exponents()[5] == std::vector<int>{0, 2});
    for (std::size_t dims = 1; dims <= 4; ++dims)
        for (int deg = 0; deg <= 3; ++deg)
            CHECK(MonomialBasis(dims, deg).size() == MonomialBasis::count(dims, deg));
    CHECK(MonomialBasis::count(3, 2) == 10);
    CHECK_THROWS_AS(b.evaluate(Eigen::Vector3d(1, 2, 3)), DimensionError);
}

TEST_CASE("quadratic recovery from twenty noiseless points")
{
    Platform p("raptor", {{"P", 8, 2, 3.0}, {"E", 16, 1, 1.0}});
    auto all = enumerate_configurations(p);
    std::mt19937_64 rng(1);
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<Configuration> train(all.begin(), all.begin() + 20);
    PolyModel m = fit_model(quad_rows(train), 3, 2);
    CHECK(m.training_count == 20);
    std::vector<double> pi, ai, pp, ap;
    for (const auto& c : enumerate_configurations(p)) {
        Eigen::VectorXd x = c.as_vector();
        pi.push_back(m.predict_ips(x));
        ai.push_back(quad_ips(x));
        pp.push_back(m.predict_power(x));
        ap.push_back(quad_power(x));
        CHECK(std::abs(m.predict_ips(x) - quad_ips(x)) <= 1e-9 * std::abs(quad_ips(x)));
    }
    CHECK(mape(pi, ai) < 1e-6);
    CHECK(mape(pp, ap) < 1e-6);
}

TEST_CASE("under-determined fits are rejected")
{
    std::vector<Configuration> cfgs{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {1, 0, 1}};
    CHECK_THROWS_AS(fit_model(quad_rows(cfgs), 3, 2), UnderdeterminedError);
    // duplicates do not count as distinct configurations
    auto rows = quad_rows(cfgs);
    auto more = rows;
    more.insert(more.end(), rows.begin(), rows.end());
    CHECK_THROWS_AS(fit_model(more, 3, 2), UnderdeterminedError);
    CHECK_NOTHROW(fit_model(rows, 3, 1));
    CHECK(usable_degree(5, 3, 2) == std::optional<int>(1));
    CHECK(usable_degree(10, 3, 2) == std::optional<int>(2));
    CHECK(usable_degree(3, 3, 2) == std::nullopt);
}

TEST_CASE("constant data yields a constant model")
{
    std::vector<TrainingRow> rows;
    for (const auto& c : enumerate_configurations(small()))
        rows.push_back({c, 4.0, 9.0});
    PolyModel m = fit_model(rows, 3, 2);
    for (const auto& c : enumerate_configurations(small())) {
        CHECK(m.predict_ips(c.as_vector()) == doctest::Approx(4.0));
        CHECK(m.predict_power(c.as_vector()) == doctest::Approx(9.0));
    }
}

TEST_CASE("auxiliary model is anchored at the origin")
{
    // degree 1 in 1 dim with one real point: the line through the origin
    std::vector<TrainingRow> one{{Configuration{2}, 6.0, 4.0}};
    PolyModel aux = fit_aux_model(one, 1, 1);
    CHECK(aux.predict_ips(Eigen::VectorXd::Zero(1)) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(aux.predict_ips(Eigen::VectorXd::Constant(1, 2.0)) == doctest::Approx(6.0));

    // data that already holds the zero observation: both models agree
    std::vector<TrainingRow> rows{{Configuration{0}, 0.0, 0.0}, {Configuration{1}, 2.0, 1.0},
                                  {Configuration{3}, 5.0, 4.0}};
    PolyModel main = fit_model(rows, 1, 1);
    PolyModel anchored = fit_aux_model(rows, 1, 1);
    CHECK((main.ips_coefficients - anchored.ips_coefficients).norm() < 1e-12);
    CHECK((main.power_coefficients - anchored.power_coefficients).norm() < 1e-12);
}

TEST_CASE("zero discrepancy for noiseless quadratics through the origin")
{
    auto f_ips = [](const Eigen::VectorXd& x) { return 2.0 * x[0] + x[1] + 0.5 * x[2] + 0.1 * x[0] * x[2]; };
    auto f_pow = [](const Eigen::VectorXd& x) { return 3.0 * x[0] + 0.5 * x[1] + x[2] + 0.2 * x[1] * x[1]; };
    Platform p = small();
    std::vector<TrainingRow> rows;
    for (const auto& c : enumerate_configurations(p))
        rows.push_back({c, f_ips(c.as_vector()), f_pow(c.as_vector())});
    PolyModel main = fit_model(rows, 3, 2);
    PolyModel aux = fit_aux_model(rows, 3, 2);
    for (const auto& c : enumerate_configurations(p))
        CHECK(discrepancy_score(main, aux, c, {10.0, 10.0}) < 1e-6);
}

TEST_CASE("initial probe selection")
{
    std::vector<Configuration> measured{{0, 0}};
    std::vector<Configuration> cand{{1, 0}, {4, 4}};
    CHECK(select_initial_probe(measured, cand) == Configuration{4, 4});

    std::vector<Configuration> none;
    std::vector<Configuration> c2{{3, 1}, {1, 2}, {1, 1}};
    CHECK(select_initial_probe(none, c2) == Configuration{1, 1});

    auto all = enumerate_configurations(small());
    std::vector<Configuration> almost(all.begin(), all.end());
    Configuration missing = almost[7];
    almost.erase(almost.begin() + 7);
    CHECK(select_initial_probe(almost, all) == missing);
}

TEST_CASE("initial batch never repeats measured configurations")
{
    auto all = enumerate_configurations(small());
    std::vector<Configuration> measured{all[0], all[5]};
    auto batch = select_initial_batch(measured, all, 3);
    CHECK(batch.size() == 3);
    std::set<Configuration> seen(measured.begin(), measured.end());
    for (const auto& b : batch)
        CHECK(seen.insert(b).second);
}

TEST_CASE("refinement probe selection")
{
    std::vector<Configuration> cand{{1}, {2}};
    PolyModel same = linear_1d(1.0, 1.0);
    CHECK(select_refinement_probe(same, same, cand, {}) == Configuration{1});

    // main(x) = x, aux(x) = 2x: equal relative differences, tie to the smaller
    CHECK(select_refinement_probe(linear_1d(1.0, 1.0), linear_1d(2.0, 2.0), cand, {}) == Configuration{1});
    CHECK(discrepancy_score(linear_1d(1.0, 1.0), linear_1d(2.0, 2.0), Configuration{1}, {}) ==
          doctest::Approx(0.5));
    CHECK(discrepancy_score(linear_1d(1.0, 1.0), linear_1d(2.0, 1.0), Configuration{2}, {}) == 0.0);

    // a negative prediction engages the anomaly branch
    PolyModel neg = linear_1d(-5.0, 1.0);
    PolyModel pos = linear_1d(1.0, 2.0);
    double s = discrepancy_score(neg, pos, Configuration{1}, {10.0, 10.0});
    CHECK(s > 0.0);
    CHECK(s == doctest::Approx(std::sqrt(0.5 * 0.5)));
    CHECK(select_refinement_batch(neg, pos, cand, {10.0, 10.0}, 5).size() == 2);
}

TEST_CASE("predicted front merges measured points")
{
    Platform p = small();
    PolyModel zero;
    zero.basis = MonomialBasis(3, 1);
    zero.ips_coefficients = Eigen::VectorXd::Zero(4);
    zero.power_coefficients = Eigen::VectorXd::Zero(4);
    std::vector<OperatingPoint> measured{make_point(Configuration{1, 0, 0}, p, 3.0, 2.0, Provenance::measured),
                                         make_point(Configuration{0, 0, 1}, p, 1.0, 1.0, Provenance::measured)};
    auto f = predicted_front(zero, p, measured);
    CHECK(f == pareto_filter(measured));

    std::vector<TrainingRow> rows;
    for (const auto& c : enumerate_configurations(p))
        rows.push_back({c, 1.0 + c.as_vector().sum(), 1.0 + 2.0 * c.as_vector().sum()});
    PolyModel m = fit_model(rows, 3, 1);
    auto g = predicted_front(m, p, measured);
    for (const auto& pt : pareto_filter(measured)) {
        auto it = std::find_if(g.begin(), g.end(), [&](const OperatingPoint& q) { return q.config == pt.config; });
        REQUIRE(it != g.end());
        CHECK(it->provenance == Provenance::measured);
        CHECK(it->utility == pt.utility);
    }
    CHECK(std::any_of(g.begin(), g.end(), [](const OperatingPoint& q) { return q.provenance == Provenance::predicted; }));
}

TEST_CASE("learned front before and after the initial stage")
{
    Platform p = small();
    Application app = with_history(enumerate_configurations(p), 2);
    auto measured_only = learned_front(app.history, Stage::initial, p);
    for (const auto& pt : measured_only)
        CHECK(pt.provenance == Provenance::measured);
    auto model = learned_front(app.history, Stage::refinement, p);
    CHECK_FALSE(model.empty());
    MeasurementHistory empty;
    CHECK(learned_front(empty, Stage::refinement, p).empty());
}

TEST_CASE("exploration trace header")
{
    std::ostringstream os;
    ExplorationTrace tr(os);
    tr.write(1, "ep", Stage::refinement, Configuration{1, 0, 2}, 0.5, 1.0, 2.0);
    CHECK(os.str().rfind("round,app_id,stage,probe_config,score,model_mape_ips,model_mape_power\n", 0) == 0);
    CHECK(os.str().find("Refinement") != std::string::npos);
}
