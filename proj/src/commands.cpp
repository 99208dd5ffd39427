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

#include "hetmap/behavior.hpp"
#include "hetmap/error.hpp"
#include "hetmap/explorer.hpp"
#include "hetmap/metrics.hpp"
#include "hetmap/report.hpp"
#include "hetmap/scenario.hpp"
#include "hetmap/seed.hpp"
#include "hetmap/simulator.hpp"

#include <cstdlib>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>

namespace hetmap {

namespace fs = std::filesystem;

namespace {

enum class LogLevel { quiet, info, debug };

LogLevel log_level()
{
    const char* v = std::getenv("HETMAP_LOG");
    if (!v)
        return LogLevel::quiet;
    std::string s(v);
    if (s == "debug")
        return LogLevel::debug;
    if (s == "info")
        return LogLevel::info;
    return LogLevel::quiet;
}

void info(std::ostream& log, const std::string& msg)
{
    if (log_level() != LogLevel::quiet)
        log << "[info] " << msg << '\n';
}

void debug(std::ostream& log, const std::string& msg)
{
    if (log_level() == LogLevel::debug)
        log << "[debug] " << msg << '\n';
}

std::string read_text(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path);
    out << text;
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
}

std::unique_ptr<std::ofstream> open_csv(const fs::path& path)
{
    auto out = std::make_unique<std::ofstream>(path);
    if (!*out)
        throw std::runtime_error("cannot write " + path.string());
    return out;
}

/// Returns an exit code if a required input is missing.
std::optional<int> check_inputs(const RunSpec& spec, std::ostream& log)
{
    if (spec.platform.empty() || !fs::exists(spec.platform)) {
        log << "error: platform file not found: " << spec.platform.string() << '\n';
        return kExitMissingInput;
    }
    if (spec.scenario.empty() || !fs::exists(spec.scenario)) {
        log << "error: scenario file not found: " << spec.scenario.string() << '\n';
        return kExitMissingInput;
    }
    if (spec.out.empty()) {
        log << "error: no output directory given\n";
        return kExitMissingInput;
    }
    if (spec.reps < 1) {
        log << "error: --reps must be at least 1\n";
        return kExitFailure;
    }
    return std::nullopt;
}

struct Inputs {
    Platform platform;
    Scenario scenario;
    std::uint64_t seed;
};

Inputs load_inputs(const RunSpec& spec)
{
    Platform p = load_platform(spec.platform);
    Scenario s = load_scenario(spec.scenario);
    if (spec.window_ms)
        s.window_ms = *spec.window_ms;
    validate_scenario(s, p);
    std::uint64_t seed = spec.seed.value_or(s.seed);
    return {std::move(p), std::move(s), seed};
}

template <class F>
int guarded(std::ostream& log, F&& body)
{
    try {
        return body();
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

void write_improvements(const fs::path& path, const Aggregate& baseline, const std::vector<Aggregate>& others)
{
    std::ostringstream os;
    os.precision(17);
    os << "policy,time_factor,energy_factor\n";
    for (const auto& a : others) {
        Improvement imp = improvement_factor(baseline, a);
        os << imp.policy << ',' << imp.time << ',' << imp.energy << '\n';
    }
    write_text(path, os.str());
}

} // namespace

int cmd_run(const RunSpec& spec, std::ostream& log)
{
    if (auto code = check_inputs(spec, log))
        return *code;
    return guarded(log, [&] {
        Inputs in = load_inputs(spec);
        std::vector<Policy> policies;
        for (const auto& name : spec.policies)
            policies.push_back(policy_from_string(name));

        std::vector<Aggregate> aggregates;
        for (Policy policy : policies) {
            fs::path dir = spec.out / to_string(policy);
            fs::create_directories(dir);
            std::vector<Report> reports;
            for (int i = 0; i < spec.reps; ++i) {
                Scenario s = in.scenario;
                s.seed = derive_seed(in.seed, static_cast<std::uint64_t>(i));
                const std::string stem = "run_" + std::to_string(i + 1);
                SimOptions opt;
                std::unique_ptr<std::ofstream> mon, exp, lam;
                if (spec.trace) {
                    mon = open_csv(dir / (stem + "_monitor.csv"));
                    exp = open_csv(dir / (stem + "_exploration.csv"));
                    lam = open_csv(dir / (stem + "_lambda.csv"));
                    opt.monitor_trace = mon.get();
                    opt.exploration_trace = exp.get();
                    opt.lambda_trace = lam.get();
                }
                Report r = run_scenario(s, in.platform, policy, opt);
                write_text(dir / (stem + ".json"), report_to_json_text(r));
                std::ostringstream csv;
                write_report_csv(csv, r);
                write_text(dir / (stem + ".csv"), csv.str());
                debug(log, std::string(to_string(policy)) + " run " + std::to_string(i + 1) +
                               ": makespan_ms=" + std::to_string(r.makespan_ms) +
                               " energy_j=" + std::to_string(r.total_energy_j));
                reports.push_back(std::move(r));
            }
            Aggregate agg = aggregate_reports(reports);
            write_text(dir / "aggregate.json", aggregate_to_json_text(agg));
            info(log, std::string(to_string(policy)) + ": mean makespan_ms=" + std::to_string(agg.makespan_ms) +
                          " mean energy_j=" + std::to_string(agg.total_energy_j));
            aggregates.push_back(std::move(agg));
        }
        auto base = std::find_if(aggregates.begin(), aggregates.end(),
                                 [](const Aggregate& a) { return a.policy == "baseline_spread"; });
        if (base != aggregates.end()) {
            std::vector<Aggregate> others;
            for (const auto& a : aggregates)
                if (a.policy != "baseline_spread")
                    others.push_back(a);
            write_improvements(spec.out / "improvement.csv", *base, others);
        }
        return kExitOk;
    });
}

int cmd_explore(const RunSpec& spec, std::ostream& log)
{
    if (auto code = check_inputs(spec, log))
        return *code;
    return guarded(log, [&] {
        Inputs in = load_inputs(spec);
        const fs::path state_dir = spec.out / "state";
        const fs::path runs_dir = spec.out / "runs";
        const fs::path state_file = state_dir / "learned.json";
        fs::create_directories(runs_dir);

        std::ostringstream csv;
        csv.precision(17);
        csv << "run,label,makespan_ms,total_energy_j,stable_apps,apps\n";
        for (int i = 1; i <= spec.reps; ++i) {
            LearnedState learned;
            if (fs::exists(state_file))
                learned = learned_state_from_json_text(read_text(state_file));
            Scenario s = in.scenario;
            s.seed = derive_seed(in.seed, static_cast<std::uint64_t>(i - 1));
            SimOptions opt;
            opt.learned = &learned;
            const std::string stem = "run_" + std::to_string(i);
            std::unique_ptr<std::ofstream> mon, exp;
            if (spec.trace) {
                mon = open_csv(runs_dir / (stem + "_monitor.csv"));
                exp = open_csv(runs_dir / (stem + "_exploration.csv"));
                opt.monitor_trace = mon.get();
                opt.exploration_trace = exp.get();
            }
            Report r = run_scenario(s, in.platform, Policy::emapper, opt);

            bool training = false;
            std::size_t stable_end = 0;
            for (const auto& [id, a] : r.per_app) {
                training = training || a.stage_at_start != Stage::stable;
                stable_end += a.stage_at_end == Stage::stable;
            }
            fs::create_directories(state_dir);
            write_text(state_file, learned_state_to_json_text(learned));
            for (const auto& [id, h] : learned.histories) {
                auto front = learned_front(h, learned.stages.at(id), in.platform, s.policy_options.model_degree);
                if (!front.empty())
                    save_app_description(AppDescription{id, "ips", front}, state_dir / (id + ".json"));
            }
            write_text(runs_dir / (stem + ".json"), report_to_json_text(r));
            const char* label = training ? "Training" : "Stable";
            csv << i << ',' << label << ',' << r.makespan_ms << ',' << r.total_energy_j << ',' << stable_end << ','
                << r.per_app.size() << '\n';
            info(log, "run " + std::to_string(i) + ": " + label);
        }
        write_text(spec.out / "explore.csv", csv.str());
        return kExitOk;
    });
}

int cmd_eval_regression(const RunSpec& spec, std::ostream& log)
{
    if (auto code = check_inputs(spec, log))
        return *code;
    return guarded(log, [&] {
        Inputs in = load_inputs(spec);
        const Platform& p = in.platform;
        const auto configs = enumerate_configurations(p);
        const double sigma = spec.noise_sigma.value_or(in.scenario.policy_options.noise_sigma);
        fs::create_directories(spec.out);

        std::ostringstream csv;
        csv.precision(17);
        csv << "app_id,size,degree,seed,under_determined,mape_ips,mape_power,igd,common_ratio\n";
        for (std::size_t a = 0; a < in.scenario.apps.size(); ++a) {
            const AppSpec& app = in.scenario.apps[a];
            std::optional<int> threads;
            if (app.kind == AppKind::static_threads)
                threads = app.threads;
            std::vector<Throughput> truth;
            for (const auto& cfg : configs)
                truth.push_back(ground_truth(app.behavior, cfg, p, threads));
            const auto reference = sweep_description(app.app_id, app.behavior, p, threads).points;

            for (std::size_t size : spec.sizes) {
                for (std::size_t seed = 0; seed < spec.seeds; ++seed) {
                    std::mt19937_64 rng(derive_seed(derive_seed(derive_seed(in.seed, a), size), seed));
                    std::normal_distribution<double> noise(0.0, 1.0);
                    std::vector<std::size_t> order(configs.size());
                    for (std::size_t i = 0; i < order.size(); ++i)
                        order[i] = i;
                    const std::size_t n = std::min(size, order.size());
                    for (std::size_t i = 0; i < n; ++i) {
                        std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
                        std::swap(order[i], order[pick(rng)]);
                    }
                    std::vector<TrainingRow> rows;
                    for (std::size_t i = 0; i < n; ++i) {
                        const Throughput& t = truth[order[i]];
                        rows.push_back({configs[order[i]], std::max(0.0, t.ips * (1.0 + sigma * noise(rng))),
                                        std::max(0.0, t.power * (1.0 + sigma * noise(rng)))});
                    }
                    for (int degree : spec.degrees) {
                        csv << app.app_id << ',' << size << ',' << degree << ',' << seed << ',';
                        if (n < MonomialBasis::count(p.dimensions(), degree)) {
                            csv << "1,,,,\n";
                            continue;
                        }
                        PolyModel model = fit_model(rows, p.dimensions(), degree);
                        std::vector<double> pi, ai, pp, ap;
                        for (std::size_t c = 0; c < configs.size(); ++c) {
                            Eigen::VectorXd x = configs[c].as_vector();
                            if (truth[c].ips > 0.0) {
                                pi.push_back(model.predict_ips(x));
                                ai.push_back(truth[c].ips);
                            }
                            if (truth[c].power > 0.0) {
                                pp.push_back(model.predict_power(x));
                                ap.push_back(truth[c].power);
                            }
                        }
                        auto front = predicted_front(model, p, {});
                        csv << "0," << mape(pi, ai) << ',' << mape(pp, ap) << ',';
                        if (front.empty())
                            csv << "inf,0\n";
                        else
                            csv << igd(reference, front) << ',' << common_ratio(reference, front) << '\n';
                    }
                }
            }
            info(log, "evaluated " + app.app_id);
        }
        write_text(spec.out / "regression.csv", csv.str());
        return kExitOk;
    });
}

int cmd_compare(const RunSpec& spec, std::ostream& log)
{
    if (spec.out.empty()) {
        log << "error: no output directory given\n";
        return kExitMissingInput;
    }
    const fs::path base_file = spec.out / "baseline_spread" / "aggregate.json";
    if (!fs::exists(base_file)) {
        log << "error: aggregate not found: " << base_file.string() << '\n';
        return kExitMissingInput;
    }
    return guarded(log, [&] {
        Aggregate base = aggregate_from_json_text(read_text(base_file));
        std::vector<Aggregate> others;
        for (const auto& name : spec.policies) {
            if (name == "baseline_spread")
                continue;
            fs::path f = spec.out / name / "aggregate.json";
            if (!fs::exists(f)) {
                log << "error: aggregate not found: " << f.string() << '\n';
                return kExitMissingInput;
            }
            others.push_back(aggregate_from_json_text(read_text(f)));
        }
        write_improvements(spec.out / "improvement.csv", base, others);
        for (const auto& a : others) {
            Improvement imp = improvement_factor(base, a);
            log << imp.policy << ": time x" << imp.time << ", energy x" << imp.energy << '\n';
        }
        return kExitOk;
    });
}

int cmd_sweep(const RunSpec& spec, std::ostream& log)
{
    if (auto code = check_inputs(spec, log))
        return *code;
    return guarded(log, [&] {
        Inputs in = load_inputs(spec);
        fs::create_directories(spec.out);
        for (const auto& app : in.scenario.apps) {
            std::optional<int> threads;
            if (app.kind == AppKind::static_threads)
                threads = app.threads;
            AppDescription d = sweep_description(app.app_id, app.behavior, in.platform, threads);
            save_app_description(d, spec.out / (app.app_id + ".json"));
            info(log, app.app_id + ": " + std::to_string(d.points.size()) + " points");
        }
        return kExitOk;
    });
}

} // namespace hetmap
