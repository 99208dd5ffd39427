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
#include "hetmap/operating_point.hpp"

#include <algorithm>
#include <filesystem>
#include <random>

using namespace hetmap;

namespace {

OperatingPoint pt(std::vector<int> theta, double utility, double power)
{
    OperatingPoint p;
    p.config = Configuration(theta);
    p.theta = Eigen::Map<const Eigen::VectorXi>(theta.data(), static_cast<Eigen::Index>(theta.size()));
    p.utility = utility;
    p.power = power;
    return p;
}

// O(n^2) reference: keep points nobody dominates, drop later exact duplicates
std::vector<OperatingPoint> brute_filter(const std::vector<OperatingPoint>& s)
{
    std::vector<OperatingPoint> out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        bool keep = true;
        for (std::size_t j = 0; j < s.size() && keep; ++j) {
            bool ge = (s[j].theta.array() <= s[i].theta.array()).all() && s[j].utility >= s[i].utility &&
                      s[j].power <= s[i].power;
            bool strict = (s[j].theta.array() < s[i].theta.array()).any() || s[j].utility > s[i].utility ||
                          s[j].power < s[i].power;
            if (ge && strict)
                keep = false;
            if (j < i && s[j].theta == s[i].theta && s[j].utility == s[i].utility && s[j].power == s[i].power)
                keep = false;
        }
        if (keep)
            out.push_back(s[i]);
    }
    std::stable_sort(out.begin(), out.end(), [](const OperatingPoint& a, const OperatingPoint& b) {
        std::vector<int> ta(a.theta.data(), a.theta.data() + a.theta.size());
        std::vector<int> tb(b.theta.data(), b.theta.data() + b.theta.size());
        if (ta != tb)
            return ta < tb;
        return a.utility > b.utility;
    });
    return out;
}

std::vector<OperatingPoint> random_points(std::mt19937_64& rng, std::size_t n, std::size_t m)
{
    std::uniform_int_distribution<int> core(0, 3);
    std::uniform_int_distribution<int> val(1, 6);
    std::vector<OperatingPoint> s;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<int> theta(m);
        for (auto& t : theta)
            t = core(rng);
        // coarse grid values force ties and duplicates
        s.push_back(pt(theta, val(rng), val(rng)));
    }
    return s;
}

Platform two_type()
{
    return Platform("pe", {{"P", 2, 2, 3.0}, {"E", 4, 1, 1.0}});
}

} // namespace

TEST_CASE("energy utility cost")
{
    CHECK(energy_utility_cost(2.0, 4.0) == doctest::Approx(0.125));
    CHECK(energy_utility_cost(1.0, 1.0) == 1.0);
    CHECK(energy_utility_cost(10.0, 2.0) == doctest::Approx(2.5));
    CHECK(energy_utility_cost(pt({1, 0}, 4.0, 2.0)) == doctest::Approx(0.125));
    CHECK_THROWS_AS(energy_utility_cost(1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(energy_utility_cost(1.0, -1.0), std::domain_error);
}

TEST_CASE("cost is monotone in utility and power")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.1, 100.0);
    for (int i = 0; i < 200; ++i) {
        double p = u(rng), v = u(rng), h = 1e-6 * v;
        CHECK(energy_utility_cost(p, v + h) < energy_utility_cost(p, v));
        CHECK(energy_utility_cost(p + h, v) > energy_utility_cost(p, v));
    }
}

TEST_CASE("dominance examples")
{
    CHECK(dominates(pt({1, 0}, 2, 1), pt({1, 0}, 1, 1)));
    CHECK_FALSE(dominates(pt({1, 0}, 2, 1), pt({1, 0}, 2, 1)));
    CHECK_FALSE(dominates(pt({1, 0}, 2, 2), pt({0, 1}, 1, 1)));
    CHECK_THROWS_AS(dominates(pt({1, 0}, 2, 1), pt({1}, 1, 1)), DimensionError);
}

TEST_CASE("dominance is a strict partial order on random triples")
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 2000; ++i) {
        auto s = random_points(rng, 3, 2);
        const auto &a = s[0], &b = s[1], &c = s[2];
        CHECK_FALSE(dominates(a, a));
        CHECK_FALSE((dominates(a, b) && dominates(b, a)));
        if (dominates(a, b) && dominates(b, c))
            CHECK(dominates(a, c));
    }
}

TEST_CASE("pareto filter examples")
{
    auto f = pareto_filter(std::vector<OperatingPoint>{pt({1}, 1, 1), pt({1}, 2, 1)});
    REQUIRE(f.size() == 1);
    CHECK(f[0].utility == 2.0);
    CHECK(pareto_filter(std::vector<OperatingPoint>{}).empty());
}

TEST_CASE("pareto filter matches the pairwise oracle")
{
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> size(0, 50);
    std::uniform_int_distribution<std::size_t> dims(1, 3);
    for (int c = 0; c < 1000; ++c) {
        auto s = random_points(rng, size(rng), dims(rng));
        auto fast = pareto_filter(s);
        auto slow = brute_filter(s);
        REQUIRE(fast.size() == slow.size());
        for (std::size_t i = 0; i < fast.size(); ++i)
            CHECK(fast[i] == slow[i]);
        CHECK(pareto_filter(fast) == fast);
        for (const auto& a : fast)
            for (const auto& b : fast)
                CHECK_FALSE(dominates(a, b));
    }
}

TEST_CASE("make_point validates")
{
    Platform p = two_type();
    auto a = make_point(Configuration{1, 1, 2}, p, 3.0, 4.0);
    CHECK(a.theta == (CoreVector(2) << 2, 2).finished());
    CHECK_THROWS(make_point(Configuration{1, 1, 2}, p, 0.0, 4.0));
    CHECK_THROWS(make_point(Configuration{1, 1, 2}, p, 1.0, -4.0));
    CHECK_THROWS_AS(make_point(Configuration{1, 1}, p, 1.0, 1.0), DimensionError);
}

TEST_CASE("description files")
{
    Platform p = two_type();
    const char* text = R"({"app_id":"ep","utility_units":"ips","points":[
        {"config":[1,0,0],"utility":1.0,"power":1.0},
        {"config":[1,0,0],"utility":2.0,"power":1.0},
        {"config":[0,1,2],"utility":5.0,"power":4.0}]})";
    LoadedDescription d = app_description_from_json_text(text, p);
    CHECK(d.description.points.size() <= 3);
    CHECK(d.description.points.size() == 2);
    CHECK(d.filtered_out);
    CHECK(d.description.points[0].provenance == Provenance::declared);

    auto path = std::filesystem::temp_directory_path() / "hetmap_description_test.json";
    save_app_description(d.description, path);
    LoadedDescription back = load_app_description(path, p);
    CHECK(back.description == d.description);
    CHECK_FALSE(back.filtered_out);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(app_description_from_json_text(R"({"app_id":"x","points":[{"config":[1,0],"utility":1,"power":1}]})", p),
                    DimensionError);
    CHECK_THROWS_AS(app_description_from_json_text("[", p), ParseError);
}
