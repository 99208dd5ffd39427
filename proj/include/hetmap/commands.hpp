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


#ifndef HETMAP_COMMANDS_HPP
#define HETMAP_COMMANDS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace hetmap {

/// Exit codes of the subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitMissingInput = 2;

struct RunSpec {
    std::filesystem::path platform;
    std::filesystem::path scenario;
    std::filesystem::path out;
    std::vector<std::string> policies{"emapper", "baseline_spread"};
    int reps = 1;
    /// Overrides the scenario seed.
    std::optional<std::uint64_t> seed;
    std::optional<int> window_ms;
    bool trace = false;

    // eval-regression
    std::vector<std::size_t> sizes{10, 15, 20, 25, 30, 40};
    std::vector<int> degrees{1, 2, 3};
    std::size_t seeds = 10;
    /// Overrides the scenario noise level.
    std::optional<double> noise_sigma;
};

/**
 * Runs the scenario `reps` times per policy.
 *
 * Writes out/<policy>/run_<i>.json and .csv, out/<policy>/aggregate.json
 * and, when baseline_spread is among the policies, out/improvement.csv.
 */
int cmd_run(const RunSpec& spec, std::ostream& log);

/**
 * Sequential emapper runs starting without operating points. State carries
 * over through out/state/; learned descriptions are exported next to it.
 * out/explore.csv holds one row per run labeled Training or Stable.
 */
int cmd_explore(const RunSpec& spec, std::ostream& log);

/// Regression quality over sizes x degrees x seeds, written to
/// out/regression.csv. One block of rows per application.
int cmd_eval_regression(const RunSpec& spec, std::ostream& log);

/// Reads out/<policy>/aggregate.json and writes out/improvement.csv.
int cmd_compare(const RunSpec& spec, std::ostream& log);

/// Writes the exhaustive ground-truth description of every scenario app
/// to out/<app_id>.json.
int cmd_sweep(const RunSpec& spec, std::ostream& log);

} // namespace hetmap

#endif
