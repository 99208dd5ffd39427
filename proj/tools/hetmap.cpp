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


#include "hetmap/commands.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

void add_common(CLI::App* cmd, hetmap::RunSpec& spec)
{
    cmd->add_option("--platform", spec.platform, "Platform JSON file")->required();
    cmd->add_option("--scenario", spec.scenario, "Scenario JSON file")->required();
    cmd->add_option("--out", spec.out, "Output directory")->required();
    cmd->add_option("--reps", spec.reps, "Repetitions")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", spec.seed, "Top-level seed (default: scenario seed)");
    cmd->add_option("--window-ms", spec.window_ms, "Monitoring window length")->check(CLI::PositiveNumber);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"hetmap: energy-aware application mapping on heterogeneous processors (simulated)"};
    app.require_subcommand(1);
    app.footer("Improvement factors are baseline / policy for makespan and energy: values above 1 mean the\n"
               "policy is faster or uses less energy. Set HETMAP_LOG=info or debug for diagnostics.");

    hetmap::RunSpec spec;

    auto* run = app.add_subcommand("run", "Run a scenario under one or more policies");
    add_common(run, spec);
    run->add_option("--policy", spec.policies, "emapper, baseline_spread, static_points")->delimiter(',');
    run->add_flag("--trace", spec.trace, "Write monitor, exploration and lambda CSV traces");

    auto* explore = app.add_subcommand("explore", "Sequential runs that learn operating points from scratch");
    add_common(explore, spec);
    explore->add_flag("--trace", spec.trace, "Write monitor and exploration CSV traces");

    auto* regression = app.add_subcommand("eval-regression", "Regression quality over training sizes and degrees");
    add_common(regression, spec);
    regression->add_option("--sizes", spec.sizes, "Training sizes")->delimiter(',');
    regression->add_option("--degrees", spec.degrees, "Polynomial degrees")->delimiter(',');
    regression->add_option("--seeds", spec.seeds, "Seeds per size")->check(CLI::PositiveNumber);
    regression->add_option("--noise", spec.noise_sigma, "Multiplicative noise sigma");

    auto* compare = app.add_subcommand("compare", "Improvement factors from existing run aggregates");
    compare->add_option("--out", spec.out, "Directory written by `run`")->required();
    compare->add_option("--policy", spec.policies, "Policies to compare against baseline_spread")->delimiter(',');

    auto* sweep = app.add_subcommand("sweep", "Exhaustive ground-truth description files for scenario apps");
    add_common(sweep, spec);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (run->parsed())
        return hetmap::cmd_run(spec, std::cerr);
    if (explore->parsed())
        return hetmap::cmd_explore(spec, std::cerr);
    if (regression->parsed())
        return hetmap::cmd_eval_regression(spec, std::cerr);
    if (compare->parsed())
        return hetmap::cmd_compare(spec, std::cerr);
    return hetmap::cmd_sweep(spec, std::cerr);
}
