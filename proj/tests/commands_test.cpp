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

#include "hetmap/behavior.hpp"
#include "hetmap/commands.hpp"
#include "hetmap/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hetmap;
namespace fs = std::filesystem;

namespace {

const fs::path kData = HETMAP_DATA_DIR;

fs::path fresh_dir(const std::string& name)
{
    fs::path d = fs::temp_directory_path() / ("hetmap_cmd_test_" + name);
    fs::remove_all(d);
    return d;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string l; std::getline(is, l);)
        out.push_back(l);
    return out;
}

RunSpec spec_for(const std::string& scenario, const std::string& out)
{
    RunSpec s;
    s.platform = kData / "platforms/raptor-lake.json";
    s.scenario = kData / "scenarios" / (scenario + ".json");
    s.out = fresh_dir(out);
    return s;
}

} // namespace

TEST_CASE("missing inputs exit with code 2")
{
    std::ostringstream log;
    RunSpec s = spec_for("single-ep", "missing");
    s.platform = "/nonexistent/platform.json";
    CHECK(cmd_run(s, log) == kExitMissingInput);
    CHECK(log.str().find("error: platform file not found: /nonexistent/platform.json") != std::string::npos);

    s = spec_for("nope", "missing");
    CHECK(cmd_explore(s, log) == kExitMissingInput);
    CHECK(log.str().find("scenario file not found") != std::string::npos);
}

TEST_CASE("invalid scenarios exit with code 1")
{
    fs::path dir = fresh_dir("invalid");
    fs::create_directories(dir);
    std::ofstream(dir / "bad.json") << R"({"apps": []})";
    RunSpec s = spec_for("single-ep", "invalid_out");
    s.scenario = dir / "bad.json";
    std::ostringstream log;
    CHECK(cmd_run(s, log) == kExitFailure);
    CHECK(log.str().find("no applications") != std::string::npos);
}

TEST_CASE("run writes reports, aggregates and improvements")
{
    RunSpec s = spec_for("multi-hetero", "run");
    s.reps = 2;
    std::ostringstream log;
    REQUIRE(cmd_run(s, log) == kExitOk);
    for (const char* pol : {"emapper", "baseline_spread"}) {
        fs::path dir = s.out / pol;
        for (int i = 1; i <= 2; ++i) {
            std::string stem = "run_" + std::to_string(i);
            REQUIRE(fs::exists(dir / (stem + ".json")));
            Report r = report_from_json_text(slurp(dir / (stem + ".json")));
            CHECK(r.policy == pol);
            CHECK(report_to_json_text(r) == slurp(dir / (stem + ".json")));
            auto csv = lines(slurp(dir / (stem + ".csv")));
            REQUIRE(csv.size() == r.per_app.size() + 2);
            CHECK(csv.front() == "app_id,arrival_ms,completion_ms,energy_j,configs_used,reconfigurations,discarded_windows");
            CHECK(csv.back().rfind("__total__,", 0) == 0);
        }
        Aggregate a = aggregate_from_json_text(slurp(dir / "aggregate.json"));
        CHECK(a.runs == 2);
        CHECK(a.policy == pol);
    }
    auto imp = lines(slurp(s.out / "improvement.csv"));
    REQUIRE(imp.size() == 2);
    CHECK(imp[0] == "policy,time_factor,energy_factor");
    CHECK(imp[1].rfind("emapper,", 0) == 0);

    // compare rebuilds the same table from the aggregates
    std::string before = slurp(s.out / "improvement.csv");
    fs::remove(s.out / "improvement.csv");
    CHECK(cmd_compare(s, log) == kExitOk);
    CHECK(slurp(s.out / "improvement.csv") == before);
}

TEST_CASE("traces are written on request")
{
    RunSpec s = spec_for("single-ep", "trace");
    s.policies = {"emapper"};
    s.trace = true;
    std::ostringstream log;
    REQUIRE(cmd_run(s, log) == kExitOk);
    for (const char* suffix : {"_monitor.csv", "_exploration.csv", "_lambda.csv"})
        CHECK(fs::exists(s.out / "emapper" / (std::string("run_1") + suffix)));
    CHECK_FALSE(fs::exists(s.out / "improvement.csv"));
}

TEST_CASE("explore carries state between runs")
{
    RunSpec s = spec_for("single-ep", "explore");
    s.reps = 4;
    std::ostringstream log;
    REQUIRE(cmd_explore(s, log) == kExitOk);
    auto rows = lines(slurp(s.out / "explore.csv"));
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == "run,label,makespan_ms,total_energy_j,stable_apps,apps");
    CHECK(rows[1].rfind("1,Training,", 0) == 0);
    LearnedState st = learned_state_from_json_text(slurp(s.out / "state/learned.json"));
    REQUIRE(st.histories.count("ep") == 1);
    CHECK(learned_state_to_json_text(st) == slurp(s.out / "state/learned.json"));
    CHECK(fs::exists(s.out / "state/ep.json"));

    // a second invocation continues from the saved state
    RunSpec again = s;
    again.reps = 1;
    std::size_t before = st.histories.at("ep").configurations_with_samples(1);
    REQUIRE(cmd_explore(again, log) == kExitOk);
    LearnedState st2 = learned_state_from_json_text(slurp(s.out / "state/learned.json"));
    CHECK(st2.histories.at("ep").configurations_with_samples(1) >= before);
}

TEST_CASE("eval-regression table")
{
    RunSpec s = spec_for("single-ep", "regression");
    s.sizes = {5, 20};
    s.degrees = {1, 2};
    s.seeds = 2;
    std::ostringstream log;
    REQUIRE(cmd_eval_regression(s, log) == kExitOk);
    auto rows = lines(slurp(s.out / "regression.csv"));
    REQUIRE(rows.size() == 1 + 2 * 2 * 2);
    CHECK(rows[0] == "app_id,size,degree,seed,under_determined,mape_ips,mape_power,igd,common_ratio");
    // 5 points cannot fit the 10 quadratic terms in 3 dims
    CHECK(rows[2] == "ep,5,2,0,1,,,,");
    CHECK(rows[1].rfind("ep,5,1,0,0,", 0) == 0);
}

TEST_CASE("sweep writes ground-truth descriptions")
{
    RunSpec s = spec_for("single-ep", "sweep");
    std::ostringstream log;
    REQUIRE(cmd_sweep(s, log) == kExitOk);
    Platform p = load_platform(s.platform);
    Scenario sc = load_scenario(s.scenario);
    auto loaded = load_app_description(s.out / "ep.json", p).description;
    auto direct = sweep_description("ep", sc.apps[0].behavior, p);
    REQUIRE(loaded.points.size() == direct.points.size());
    for (std::size_t i = 0; i < direct.points.size(); ++i) {
        CHECK(loaded.points[i].config == direct.points[i].config);
        CHECK(loaded.points[i].utility == doctest::Approx(direct.points[i].utility));
    }
}

TEST_CASE("aggregates and improvement factors")
{
    Report a, b;
    a.scenario = b.scenario = "s";
    a.policy = b.policy = "emapper";
    a.makespan_ms = 100;
    b.makespan_ms = 300;
    a.total_energy_j = 10;
    b.total_energy_j = 20;
    a.per_app["x"].completion_ms = 100;
    b.per_app["x"].completion_ms = 300;
    std::vector<Report> both{a, b};
    Aggregate agg = aggregate_reports(both);
    CHECK(agg.runs == 2);
    CHECK(agg.makespan_ms == 200);
    CHECK(agg.total_energy_j == 15);
    CHECK(agg.completion_ms.at("x") == 200);
    CHECK(aggregate_from_json_text(aggregate_to_json_text(agg)) == agg);

    Aggregate base = agg;
    base.makespan_ms = 400;
    base.total_energy_j = 30;
    Improvement imp = improvement_factor(base, agg);
    CHECK(imp.time == doctest::Approx(2.0));
    CHECK(imp.energy == doctest::Approx(2.0));
    CHECK_THROWS_AS(aggregate_reports(std::span<const Report>{}), std::invalid_argument);
}
