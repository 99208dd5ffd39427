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

#include "hetmap/simulator.hpp"

#include "hetmap/error.hpp"
#include "hetmap/explorer.hpp"
#include "hetmap/seed.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <stdexcept>

namespace hetmap {

const char* to_string(Policy p)
{
    switch (p) {
    case Policy::emapper:
        return "emapper";
    case Policy::baseline_spread:
        return "baseline_spread";
    case Policy::static_points:
        return "static_points";
    }
    return "emapper";
}

Policy policy_from_string(const std::string& s)
{
    if (s == "emapper")
        return Policy::emapper;
    if (s == "baseline_spread")
        return Policy::baseline_spread;
    if (s == "static_points")
        return Policy::static_points;
    throw std::invalid_argument("unknown policy '" + s + "'");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();


struct AppState {
    const AppSpec* spec = nullptr;
    Application app;
    std::optional<int> static_threads;
    MeasurementChannel channel;

    bool arrived = false;
    bool done = false;
    double remaining = 0.0;
    double accumulated = 0.0;
    std::optional<Configuration> cfg;
    std::vector<CoreSlot> slots;
    double share = 1.0;
    bool coallocated = false;
    double stall_until = 0.0;
    Throughput truth;

    std::deque<Configuration> probes;
    std::optional<Configuration> probe;
    std::size_t stable_windows = 0;

    AppReport report;
    std::set<Configuration> used;

    AppState(const AppSpec* s, std::uint64_t seed, const PolicyOptions& po)
        : spec(s), channel(seed, po.noise_sigma, po.discard_windows)
    {
        app.app_id = s->app_id;
        app.priority = s->priority;
        app.history = MeasurementHistory(po.ema_alpha);
        remaining = s->behavior.total_work;
        if (s->kind == AppKind::static_threads)
            static_threads = s->threads;
    }

    bool running() const { return arrived && !done; }
    bool declared() const { return app.description.has_value(); }
    double ips() const { return truth.ips * share; }
    double power() const { return truth.power * share; }
};

} // namespace

struct Simulator::Impl {
    Scenario sc;
    Platform pf;
    Policy policy;
    SimOptions opt;

    std::vector<Configuration> all_configs;
    std::vector<AppState> apps;
    std::vector<std::size_t> arrival_order;
    std::size_t arrival_pos = 0;
    std::vector<ScriptedReconfiguration> script;
    std::size_t script_pos = 0;

    double now = 0.0;
    bool realloc_pending = false;
    std::size_t explore_round = 0;
    std::set<std::string> overflowed;

    Eigen::VectorXd idle_core_power;
    Eigen::VectorXd busy_time;
    double idle_energy = 0.0;
    double platform_energy = 0.0;

    std::unique_ptr<MonitorTrace> monitor_trace;
    std::unique_ptr<ExplorationTrace> exploration_trace;
    std::vector<LambdaTraceRow> lambda_rows;

    Impl(Scenario s, Platform p, Policy pol, SimOptions o)
        : sc(std::move(s)), pf(std::move(p)), policy(pol), opt(o)
    {
        validate_scenario(sc, pf);
        all_configs = enumerate_configurations(pf);
        std::sort(sc.apps.begin(), sc.apps.end(),
                  [](const AppSpec& a, const AppSpec& b) { return a.app_id < b.app_id; });
        apps.reserve(sc.apps.size());
        for (std::size_t i = 0; i < sc.apps.size(); ++i) {
            apps.emplace_back(&sc.apps[i], derive_seed(sc.seed, i), sc.policy_options);
            auto& a = apps.back();
            if (sc.apps[i].description_file)
                a.app.description = load_app_description(*sc.apps[i].description_file, pf).description;
            if (policy == Policy::static_points && !a.declared())
                throw ValidationError("static_points policy needs a description file for '" + a.app.app_id + "'");
        }
        arrival_order.resize(apps.size());
        for (std::size_t i = 0; i < apps.size(); ++i)
            arrival_order[i] = i;
        std::stable_sort(arrival_order.begin(), arrival_order.end(), [&](std::size_t a, std::size_t b) {
            return apps[a].spec->arrival_ms < apps[b].spec->arrival_ms;
        });
        script = sc.policy_options.reconfigurations;
        std::stable_sort(script.begin(), script.end(), [](const auto& a, const auto& b) {
            if (a.time_ms != b.time_ms)
                return a.time_ms < b.time_ms;
            return a.app_id < b.app_id;
        });

        // Idle cores draw a fraction of the static power the workload's
        // behaviors declare for that core type.
        idle_core_power = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pf.num_types()));
        for (std::size_t k = 0; k < pf.num_types(); ++k) {
            double sum = 0.0;
            int n = 0;
            for (const auto& a : sc.apps)
                if (!a.behavior.polynomial) {
                    sum += a.behavior.static_power_per_core[k];
                    ++n;
                }
            double base = n ? sum / n : pf.core_type(k).power_coefficient;
            idle_core_power[static_cast<Eigen::Index>(k)] = sc.policy_options.idle_factor * base;
        }
        busy_time = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pf.num_types()));
        if (opt.monitor_trace)
            monitor_trace = std::make_unique<MonitorTrace>(*opt.monitor_trace);
        if (opt.exploration_trace)
            exploration_trace = std::make_unique<ExplorationTrace>(*opt.exploration_trace);
    }

    AppState* find(const std::string& id)
    {
        for (auto& a : apps)
            if (a.app.app_id == id)
                return &a;
        return nullptr;
    }

    std::size_t running_count() const
    {
        return static_cast<std::size_t>(std::count_if(apps.begin(), apps.end(), [](const AppState& a) { return a.running(); }));
    }

    // ---- time integration -------------------------------------------------

    double completion_time(const AppState& a) const
    {
        if (!a.cfg || a.ips() <= 0.0)
            return kInf;
        double start = std::max(now, a.stall_until);
        return start + a.remaining / a.ips() * 1000.0;
    }

    void advance(double t)
    {
        const double dt = t - now;
        if (dt <= 0.0)
            return;
        std::vector<std::vector<std::vector<const AppState*>>> users(pf.num_types());
        for (std::size_t k = 0; k < pf.num_types(); ++k)
            users[k].resize(static_cast<std::size_t>(pf.core_type(k).count));
        for (auto& a : apps) {
            if (!a.running() || !a.cfg)
                continue;
            double stalled = std::clamp(a.stall_until - now, 0.0, dt);
            double work = a.ips() * (dt - stalled) / 1000.0;
            work = std::min(work, a.remaining);
            a.remaining -= work;
            a.accumulated += work;
            a.report.energy_j += a.power() * dt / 1000.0;
            for (const auto& s : a.slots)
                users[s.type][static_cast<std::size_t>(s.core)].push_back(&a);
        }
        for (std::size_t k = 0; k < pf.num_types(); ++k) {
            for (const auto& on_core : users[k]) {
                if (on_core.empty()) {
                    double e = idle_core_power[static_cast<Eigen::Index>(k)] * dt / 1000.0;
                    idle_energy += e;
                    platform_energy += e;
                    continue;
                }
                busy_time[static_cast<Eigen::Index>(k)] += dt / 1000.0;
                for (const AppState* a : on_core)
                    platform_energy += a->power() / static_cast<double>(a->slots.size()) * dt / 1000.0;
            }
        }
        now = t;
    }

    // ---- configuration changes ------------------------------------------

    void reconfigure(AppState& a, const Configuration& cfg)
    {
        if (a.cfg && *a.cfg == cfg)
            return;
        if (a.cfg) {
            a.channel.notify_reconfiguration();
            a.stall_until = std::max(a.stall_until, now + sc.policy_options.reconfig_cost_windows * sc.window_ms);
            ++a.report.reconfigurations;
        }
        a.cfg = cfg;
        a.truth = ground_truth(a.spec->behavior, cfg, pf, a.static_threads);
        if (a.used.insert(cfg).second)
            a.report.configs_used.push_back(cfg);
    }

    void apply_targets(const std::map<std::string, Configuration>& targets)
    {
        std::map<std::string, OperatingPoint> choices;
        for (const auto& [id, cfg] : targets)
            choices.emplace(id, OperatingPoint{cfg, footprint(cfg, pf), 1.0, 1.0, Provenance::predicted});
        CoreAssignment assignment = assign_cores(choices, pf, overflowed);
        place(assignment, targets);

        // non-overflowed apps never share a core
        std::map<std::pair<std::size_t, int>, std::vector<std::string>> holders;
        for (const auto& [id, slots] : assignment)
            for (const auto& s : slots)
                holders[{s.type, s.core}].push_back(id);
        for (const auto& [core, ids] : holders)
            if (ids.size() > 1 && std::none_of(ids.begin(), ids.end(), [&](const auto& id) { return overflowed.count(id) > 0; }))
                throw std::logic_error("capacity violated: apps share a core without co-allocation");
    }

    void place(const CoreAssignment& assignment, const std::map<std::string, Configuration>& targets)
    {
        std::map<std::pair<std::size_t, int>, int> users;
        for (const auto& [id, slots] : assignment)
            for (const auto& s : slots)
                ++users[{s.type, s.core}];
        for (auto& a : apps) {
            if (!a.running())
                continue;
            auto t = targets.find(a.app.app_id);
            if (t == targets.end())
                continue;
            a.slots = assignment.at(a.app.app_id);
            double share = 0.0;
            for (const auto& s : a.slots)
                share += 1.0 / users.at({s.type, s.core});
            a.share = a.slots.empty() ? 1.0 : share / static_cast<double>(a.slots.size());
            a.coallocated = a.share < 1.0;
            reconfigure(a, t->second);
        }
    }

    std::map<std::string, Configuration> current_targets() const
    {
        std::map<std::string, Configuration> t;
        for (const auto& a : apps)
            if (a.running() && a.cfg)
                t.emplace(a.app.app_id, *a.cfg);
        return t;
    }

    // ---- exploration ------------------------------------------------------

    std::vector<Configuration> plan_exploration(AppState& a, const Eigen::VectorXi& budget)
    {
        const auto& th = sc.thresholds;
        std::vector<Configuration> candidates;
        for (const auto& cfg : all_configs) {
            if (!(footprint(cfg, pf).array() <= budget.array()).all())
                continue;
            const ConfigRecord* rec = a.app.history.find(cfg);
            if (rec && rec->samples >= th.stable_samples)
                continue;
            candidates.push_back(cfg);
        }
        if (candidates.empty())
            return {};

        std::vector<Configuration> plan;
        auto rows = training_rows(a.app.history);
        std::optional<int> deg;
        if (a.app.stage == Stage::refinement)
            deg = usable_degree(rows.size(), pf.dimensions(), sc.policy_options.model_degree);
        ++explore_round;
        if (!deg) {
            std::vector<Configuration> measured;
            for (const auto& r : rows)
                measured.push_back(r.config);
            plan = select_initial_batch(measured, candidates, th.refinement_batch);
            if (exploration_trace)
                for (const auto& p : plan)
                    exploration_trace->write(explore_round, a.app.app_id, a.app.stage, p, 0.0, 0.0, 0.0);
            return plan;
        }
        PolyModel main = fit_model(rows, pf.dimensions(), *deg);
        PolyModel aux = fit_aux_model(rows, pf.dimensions(), *deg);
        MetricScale scale{0.0, 0.0};
        for (const auto& r : rows) {
            scale.ips = std::max(scale.ips, r.ips);
            scale.power = std::max(scale.power, r.power);
        }
        if (!(scale.ips > 0.0))
            scale.ips = 1.0;
        if (!(scale.power > 0.0))
            scale.power = 1.0;
        plan = select_refinement_batch(main, aux, candidates, scale, th.refinement_batch);
        if (exploration_trace) {
            double mi = 0.0, mp = 0.0;
            std::size_t n = 0;
            for (const auto& r : rows) {
                if (r.ips <= 0.0 || r.power <= 0.0)
                    continue;
                Eigen::VectorXd x = r.config.as_vector();
                mi += std::abs(main.predict_ips(x) - r.ips) / r.ips;
                mp += std::abs(main.predict_power(x) - r.power) / r.power;
                ++n;
            }
            if (n) {
                mi = mi / n * 100.0;
                mp = mp / n * 100.0;
            }
            for (const auto& p : plan)
                exploration_trace->write(explore_round, a.app.app_id, a.app.stage, p,
                                         discrepancy_score(main, aux, p, scale), mi, mp);
        }
        return plan;
    }

    // ---- allocation -------------------------------------------------------

    void reallocate()
    {
        std::vector<AppState*> running;
        for (auto& a : apps)
            if (a.running())
                running.push_back(&a);
        if (running.empty())
            return;

        std::map<std::string, Configuration> targets;
        if (policy == Policy::baseline_spread) {
            overflowed.clear();
            Configuration full = full_configuration(pf);
            for (auto* a : running)
                targets.emplace(a->app.app_id, full);
            // every app on every core, time-multiplexed equally
            CoreAssignment assignment;
            std::map<std::string, OperatingPoint> one;
            one.emplace("all", OperatingPoint{full, footprint(full, pf), 1.0, 1.0, Provenance::predicted});
            auto slots = assign_cores(one, pf).at("all");
            for (auto* a : running)
                assignment[a->app.app_id] = slots;
            place(assignment, targets);
            return;
        }

        AllocationRequest req{pf, {}};
        for (auto* a : running) {
            AppCandidates c;
            c.app_id = a->app.app_id;
            c.priority = a->app.priority;
            c.points = a->declared() ? a->app.description->points
                                     : learned_front(a->app.history, a->app.stage, pf,
                                                     sc.policy_options.model_degree);
            req.apps.push_back(std::move(c));
        }
        LagrangianOptions lo;
        if (opt.lambda_trace)
            lo.trace = &lambda_rows;
        Allocation alloc = allocate(req, lo);
        overflowed = alloc.overflowed;
        for (const auto& [id, pt] : alloc.choices)
            targets.emplace(id, pt.config);

        Eigen::VectorXi free = pf.capacity();
        for (const auto& [id, pt] : alloc.choices)
            free -= pt.theta;
        for (auto* a : running) {
            a->probes.clear();
            a->probe.reset();
            bool explores = policy == Policy::emapper && !a->declared() && a->app.stage != Stage::stable &&
                            alloc.feasible;
            if (!explores)
                continue;
            const Eigen::VectorXi budget = alloc.choices.at(a->app.app_id).theta + free;
            auto plan = plan_exploration(*a, budget);
            if (plan.empty())
                continue;
            Eigen::VectorXi reserve = Eigen::VectorXi::Zero(budget.size());
            for (const auto& p : plan)
                reserve = reserve.cwiseMax(footprint(p, pf));
            free = budget - reserve;
            a->probe = plan.front();
            a->probes.assign(plan.begin() + 1, plan.end());
            targets[a->app.app_id] = plan.front();
        }
        apply_targets(targets);
    }

    void next_probe(AppState& a)
    {
        if (a.probes.empty()) {
            a.probe.reset();
            realloc_pending = true;
            return;
        }
        a.probe = a.probes.front();
        a.probes.pop_front();
        auto targets = current_targets();
        targets[a.app.app_id] = *a.probe;
        apply_targets(targets);
    }

    // ---- events -----------------------------------------------------------

    void on_tick()
    {
        for (auto& a : apps) {
            if (!a.running() || !a.cfg)
                continue;
            Measurement m = a.channel.sample(*a.cfg, a.ips(), a.power(), sc.window_ms, now);
            if (m.discard)
                ++a.report.discarded_windows;
            if (a.coallocated)
                ++a.report.coallocated_windows;
            bool monitored = policy == Policy::emapper && !a.declared() && !a.coallocated;
            if (monitored && a.app.history.ingest(m)) {
                ++a.report.accepted_windows;
                on_accepted(a);
            }
            if (monitor_trace)
                monitor_trace->write(a.app.app_id, m, a.app.history.find(*a.cfg));
        }
    }

    void on_accepted(AppState& a)
    {
        const auto& th = sc.thresholds;
        Stage before = a.app.stage;
        a.app.advance_to(stage_of(a.app, th));
        if (a.app.stage != before) {
            realloc_pending = true;
            return;
        }
        if (a.app.stage == Stage::stable) {
            if (++a.stable_windows >= th.stable_reassess) {
                a.stable_windows = 0;
                realloc_pending = true;
            }
            return;
        }
        if (a.probe && *a.cfg == *a.probe) {
            const ConfigRecord* rec = a.app.history.find(*a.cfg);
            if (rec && rec->samples >= th.stable_samples)
                next_probe(a);
        }
    }

    void arrive(AppState& a)
    {
        a.arrived = true;
        a.report.arrival_ms = now;
        if (a.declared()) {
            a.app.stage = Stage::stable;
        } else if (opt.learned) {
            auto h = opt.learned->histories.find(a.app.app_id);
            if (h != opt.learned->histories.end())
                a.app.history = h->second;
            auto s = opt.learned->stages.find(a.app.app_id);
            if (s != opt.learned->stages.end())
                a.app.advance_to(s->second);
            a.app.advance_to(stage_of(a.app, sc.thresholds));
        }
        a.report.stage_at_start = a.app.stage;
        realloc_pending = true;
    }

    void complete(AppState& a)
    {
        a.accumulated += a.remaining;
        a.remaining = 0.0;
        a.done = true;
        a.report.completion_ms = now;
        a.report.stage_at_end = a.app.stage;
        a.slots.clear();
        a.probes.clear();
        a.probe.reset();
        overflowed.erase(a.app.app_id);
        realloc_pending = true;
    }

    Report run()
    {
        const double window = sc.window_ms;
        std::uint64_t tick_index = 1;
        double next_tick = window;
        while (std::any_of(apps.begin(), apps.end(), [](const AppState& a) { return !a.done; })) {
            double t = next_tick;
            if (arrival_pos < arrival_order.size())
                t = std::min(t, apps[arrival_order[arrival_pos]].spec->arrival_ms);
            if (script_pos < script.size())
                t = std::min(t, std::max(now, script[script_pos].time_ms));
            std::vector<AppState*> finishing;
            for (auto& a : apps) {
                if (!a.running())
                    continue;
                double tc = completion_time(a);
                if (tc < t) {
                    t = tc;
                    finishing.assign(1, &a);
                } else if (tc == t) {
                    finishing.push_back(&a);
                }
            }
            if (!std::isfinite(t))
                throw std::logic_error("simulation stalled: no application can make progress");
            // drop completions that belong to a later candidate time
            finishing.erase(std::remove_if(finishing.begin(), finishing.end(),
                                           [&](AppState* a) { return completion_time(*a) != t; }),
                            finishing.end());
            advance(t);

            for (auto& a : apps)
                if (a.running() && (std::find(finishing.begin(), finishing.end(), &a) != finishing.end() ||
                                    a.remaining <= 1e-12 * a.spec->behavior.total_work))
                    complete(a);
            while (arrival_pos < arrival_order.size() && apps[arrival_order[arrival_pos]].spec->arrival_ms <= now)
                arrive(apps[arrival_order[arrival_pos++]]);
            while (script_pos < script.size() && script[script_pos].time_ms <= now) {
                const auto& r = script[script_pos++];
                AppState* a = find(r.app_id);
                if (a && a->running() && a->cfg) {
                    auto targets = current_targets();
                    targets[r.app_id] = r.config;
                    apply_targets(targets);
                }
            }
            if (now >= next_tick) {
                on_tick();
                ++tick_index;
                next_tick = static_cast<double>(tick_index) * window;
            }
            if (realloc_pending) {
                realloc_pending = false;
                reallocate();
            }
        }
        return make_report();
    }

    Report make_report()
    {
        Report r;
        r.scenario = sc.name;
        r.policy = to_string(policy);
        r.seed = sc.seed;
        double work = 0.0, declared_work = 0.0, app_energy = 0.0;
        for (auto& a : apps) {
            r.per_app.emplace(a.app.app_id, a.report);
            r.makespan_ms = std::max(r.makespan_ms, a.report.completion_ms);
            app_energy += a.report.energy_j;
            work += a.accumulated;
            declared_work += a.spec->behavior.total_work;
            if (opt.learned && policy == Policy::emapper && !a.declared()) {
                opt.learned->histories.insert_or_assign(a.app.app_id, a.app.history);
                opt.learned->stages.insert_or_assign(a.app.app_id, a.app.stage);
            }
        }
        r.idle_energy_j = idle_energy;
        r.total_energy_j = app_energy + idle_energy;
        r.platform_energy_j = platform_energy;
        r.work_ratio = work / declared_work;
        Eigen::VectorXd gamma(static_cast<Eigen::Index>(pf.num_types()));
        for (std::size_t k = 0; k < pf.num_types(); ++k)
            gamma[static_cast<Eigen::Index>(k)] = pf.core_type(k).power_coefficient;
        if (busy_time.sum() > 0.0) {
            EnergySplit split = attribute_energy(r.total_energy_j, busy_time, gamma);
            r.per_type_energy_j.assign(split.per_type_energy.data(),
                                       split.per_type_energy.data() + split.per_type_energy.size());
        } else {
            r.per_type_energy_j.assign(pf.num_types(), 0.0);
        }
        if (opt.lambda_trace)
            write_lambda_trace_csv(*opt.lambda_trace, lambda_rows);
        return r;
    }
};

Simulator::Simulator(Scenario scenario, Platform platform, Policy policy, SimOptions options)
    : impl_(std::make_unique<Impl>(std::move(scenario), std::move(platform), policy, options))
{
}

Simulator::~Simulator() = default;

Report Simulator::run()
{
    return impl_->run();
}

Report run_scenario(const Scenario& scenario, const Platform& platform, Policy policy, SimOptions options)
{
    Simulator sim(scenario, platform, policy, options);
    return sim.run();
}

} // namespace hetmap
