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

#include "hetmap/allocator.hpp"

#include "hetmap/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace hetmap {

double scaled_cost(const OperatingPoint& pt, double max_utility, double priority)
{
    double u = priority * pt.utility / max_utility;
    return energy_utility_cost(pt.power, u);
}

namespace {

/// Candidates in app-id order with precomputed costs and weights.
struct Problem {
    const Platform* platform = nullptr;
    std::vector<AppCandidates> apps;
    std::vector<std::vector<double>> cost;
    std::vector<std::vector<Eigen::VectorXd>> weight;
    Eigen::VectorXd capacity;
};

OperatingPoint synthetic_point(const Platform& p)
{
    std::size_t cheapest = 0;
    for (std::size_t k = 1; k < p.num_types(); ++k)
        if (p.core_type(k).power_coefficient < p.core_type(cheapest).power_coefficient)
            cheapest = k;
    std::vector<int> dims(p.dimensions(), 0);
    dims[p.first_bucket(cheapest)] = 1;
    return make_point(Configuration(std::move(dims)), p, 1.0, p.core_type(cheapest).power_coefficient,
                      Provenance::predicted);
}

Problem prepare(const AllocationRequest& req)
{
    Problem pr;
    pr.platform = &req.platform;
    pr.apps = req.apps;
    std::sort(pr.apps.begin(), pr.apps.end(),
              [](const AppCandidates& a, const AppCandidates& b) { return a.app_id < b.app_id; });
    for (std::size_t i = 1; i < pr.apps.size(); ++i)
        if (pr.apps[i].app_id == pr.apps[i - 1].app_id)
            throw ValidationError("duplicate application '" + pr.apps[i].app_id + "' in allocation request");
    pr.capacity = req.platform.capacity().cast<double>();
    for (auto& app : pr.apps) {
        if (app.points.empty())
            app.points.push_back(synthetic_point(req.platform));
        double umax = 0.0;
        for (const auto& pt : app.points) {
            if (pt.theta.size() != pr.capacity.size())
                throw DimensionError("candidate of '" + app.app_id + "' has wrong footprint length");
            umax = std::max(umax, pt.utility);
        }
        std::vector<double> c;
        std::vector<Eigen::VectorXd> w;
        for (const auto& pt : app.points) {
            c.push_back(scaled_cost(pt, umax, app.priority));
            w.push_back(pt.theta.cast<double>());
        }
        pr.cost.push_back(std::move(c));
        pr.weight.push_back(std::move(w));
    }
    return pr;
}

using Selection = std::vector<std::size_t>;

Eigen::VectorXd demand_of(const Problem& pr, const Selection& sel)
{
    Eigen::VectorXd d = Eigen::VectorXd::Zero(pr.capacity.size());
    for (std::size_t i = 0; i < sel.size(); ++i)
        d += pr.weight[i][sel[i]];
    return d;
}

double cost_of(const Problem& pr, const Selection& sel)
{
    double c = 0.0;
    for (std::size_t i = 0; i < sel.size(); ++i)
        c += pr.cost[i][sel[i]];
    return c;
}

bool fits(const Eigen::VectorXd& demand, const Eigen::VectorXd& capacity)
{
    return (demand.array() <= capacity.array()).all();
}

double excess_of(const Eigen::VectorXd& demand, const Eigen::VectorXd& capacity)
{
    return (demand - capacity).cwiseMax(0.0).sum();
}

Allocation finish(const Problem& pr, const Selection& sel, bool feasible)
{
    Allocation a;
    for (std::size_t i = 0; i < sel.size(); ++i) {
        a.choices.emplace(pr.apps[i].app_id, pr.apps[i].points[sel[i]]);
        a.choice_index.emplace(pr.apps[i].app_id, sel[i]);
    }
    a.feasible = feasible;
    a.total_cost = cost_of(pr, sel);
    a.core_assignment = assign_cores(a.choices, *pr.platform);
    return a;
}

// Local search neighbourhoods change up to three apps at once, each size
// only while it stays under this many candidate moves.
inline constexpr double kMoveBudget = 250'000;
inline constexpr std::size_t kMaxMoveSize = 3;

struct Move {
    std::vector<std::pair<std::size_t, std::size_t>> changes;
    double delta_cost = 0.0;
    Eigen::VectorXd delta_demand;
};

// Number of moves changing exactly `size` apps.
double neighbourhood_size(const Problem& pr, std::size_t size)
{
    // elementary symmetric polynomial of (p_i - 1)
    std::vector<double> e(size + 1, 0.0);
    e[0] = 1.0;
    for (const auto& c : pr.cost)
        for (std::size_t k = size; k >= 1; --k)
            e[k] += e[k - 1] * static_cast<double>(c.size() - 1);
    return e[size];
}

// Visits every move that changes exactly `size` apps, apps in index order.
template <class F>
void for_each_move(const Problem& pr, const Selection& sel, std::size_t size, Move& m, std::size_t from, F&& f)
{
    if (m.changes.size() == size) {
        f(m);
        return;
    }
    for (std::size_t i = from; i < sel.size(); ++i) {
        for (std::size_t j = 0; j < pr.cost[i].size(); ++j) {
            if (j == sel[i])
                continue;
            const double dc = pr.cost[i][j] - pr.cost[i][sel[i]];
            m.changes.emplace_back(i, j);
            m.delta_cost += dc;
            m.delta_demand += pr.weight[i][j] - pr.weight[i][sel[i]];
            for_each_move(pr, sel, size, m, i + 1, f);
            m.delta_demand -= pr.weight[i][j] - pr.weight[i][sel[i]];
            m.delta_cost -= dc;
            m.changes.pop_back();
        }
    }
}

void apply(const Move& m, Selection& sel, Eigen::VectorXd& demand)
{
    for (auto [i, j] : m.changes)
        sel[i] = j;
    demand += m.delta_demand;
}

// Cheapest feasible move of the smallest size that lowers the cost,
// repeated until none exists.
void improve(const Problem& pr, Selection& sel)
{
    Eigen::VectorXd demand = demand_of(pr, sel);
    while (true) {
        std::optional<Move> best;
        for (std::size_t size = 1; size <= kMaxMoveSize && size <= sel.size() && !best; ++size) {
            if (size > 1 && neighbourhood_size(pr, size) > kMoveBudget)
                break;
            Move m;
            m.delta_demand = Eigen::VectorXd::Zero(demand.size());
            double best_delta = -1e-12;
            for_each_move(pr, sel, size, m, 0, [&](const Move& cand) {
                if (cand.delta_cost >= best_delta || !fits(demand + cand.delta_demand, pr.capacity))
                    return;
                best_delta = cand.delta_cost;
                best = cand;
            });
        }
        if (!best)
            return;
        apply(*best, sel, demand);
    }
}

// Moves toward feasibility, each step taking the move with the lowest cost
// increase per unit of removed over-capacity demand. Returns false if stuck.
bool repair(const Problem& pr, Selection& sel)
{
    Eigen::VectorXd demand = demand_of(pr, sel);
    double excess = excess_of(demand, pr.capacity);
    while (excess > 0.0) {
        std::optional<Move> best;
        for (std::size_t size = 1; size <= kMaxMoveSize && size <= sel.size() && !best; ++size) {
            if (size > 1 && neighbourhood_size(pr, size) > kMoveBudget)
                break;
            Move m;
            m.delta_demand = Eigen::VectorXd::Zero(demand.size());
            double best_ratio = std::numeric_limits<double>::infinity();
            for_each_move(pr, sel, size, m, 0, [&](const Move& cand) {
                double reduction = excess - excess_of(demand + cand.delta_demand, pr.capacity);
                if (reduction <= 0.0)
                    return;
                double ratio = cand.delta_cost / reduction;
                if (ratio < best_ratio) {
                    best_ratio = ratio;
                    best = cand;
                }
            });
        }
        if (!best)
            return false;
        apply(*best, sel, demand);
        excess = excess_of(demand, pr.capacity);
    }
    return true;
}

std::size_t smallest_footprint(const Problem& pr, std::size_t i)
{
    std::size_t best = 0;
    for (std::size_t j = 1; j < pr.cost[i].size(); ++j) {
        double sj = pr.weight[i][j].sum();
        double sb = pr.weight[i][best].sum();
        if (sj < sb || (sj == sb && pr.cost[i][j] < pr.cost[i][best]))
            best = j;
    }
    return best;
}

Allocation fallback_from(const AllocationRequest& req, const Problem& pr)
{
    // Pack smallest footprints first; whoever does not fit is left for the
    // co-allocation fallback.
    std::vector<std::size_t> order(pr.apps.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pr.weight[a][smallest_footprint(pr, a)].sum() < pr.weight[b][smallest_footprint(pr, b)].sum();
    });
    Allocation partial;
    Eigen::VectorXd residual = pr.capacity;
    for (std::size_t i : order) {
        std::size_t j = smallest_footprint(pr, i);
        if (!fits(pr.weight[i][j], residual))
            continue;
        residual -= pr.weight[i][j];
        partial.choices.emplace(pr.apps[i].app_id, pr.apps[i].points[j]);
        partial.choice_index.emplace(pr.apps[i].app_id, j);
    }
    AllocationRequest prepared{req.platform, pr.apps};
    return coallocate_fallback(prepared, std::move(partial));
}

} // namespace

double allocation_cost(const AllocationRequest& req, const Allocation& alloc)
{
    double total = 0.0;
    for (const auto& app : req.apps) {
        auto it = alloc.choices.find(app.app_id);
        if (it == alloc.choices.end())
            continue;
        double umax = it->second.utility;
        for (const auto& pt : app.points)
            umax = std::max(umax, pt.utility);
        total += scaled_cost(it->second, umax, app.priority);
    }
    return total;
}

Allocation allocate(const AllocationRequest& req, const LagrangianOptions& opts)
{
    Problem pr = prepare(req);
    const std::size_t n = pr.apps.size();
    if (n == 0) {
        Allocation empty;
        empty.feasible = true;
        return empty;
    }
    const Eigen::Index m = pr.capacity.size();

    // Multipliers live in cost units per core; scale the step by the
    // typical per-app cost so the schedule is independent of ρ/υ units.
    double cost_scale = 0.0;
    for (const auto& c : pr.cost)
        cost_scale += *std::min_element(c.begin(), c.end());
    cost_scale = std::max(cost_scale / static_cast<double>(n), std::numeric_limits<double>::min());
    const double eta0 = cost_scale / std::max(pr.capacity.sum(), 1.0);

    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
    Selection sel(n, 0), prev;
    std::optional<Selection> best;
    double best_cost = std::numeric_limits<double>::infinity();

    for (int it = 1; it <= opts.max_iterations; ++it) {
        double relaxed = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best_val = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < pr.cost[i].size(); ++j) {
                double v = pr.cost[i][j] + lambda.dot(pr.weight[i][j]);
                if (v < best_val) {
                    best_val = v;
                    sel[i] = j;
                }
            }
            relaxed += best_val;
        }
        relaxed -= lambda.dot(pr.capacity);
        Eigen::VectorXd demand = demand_of(pr, sel);
        bool feasible = fits(demand, pr.capacity);
        if (opts.trace)
            opts.trace->push_back({it, lambda, demand.cast<int>(), relaxed, feasible});
        if (feasible) {
            double c = cost_of(pr, sel);
            if (c < best_cost) {
                best_cost = c;
                best = sel;
            }
            if (sel == prev)
                break;
        } else if (sel != prev) {
            // every new relaxed selection also seeds a repaired candidate
            Selection r = sel;
            if (repair(pr, r)) {
                double c = cost_of(pr, r);
                if (c < best_cost) {
                    best_cost = c;
                    best = r;
                }
            }
        }
        prev = sel;
        double eta = eta0 / std::sqrt(static_cast<double>(it));
        lambda = (lambda + eta * (demand - pr.capacity)).cwiseMax(0.0);
    }

    if (!best) {
        Selection b(n);
        for (std::size_t i = 0; i < n; ++i)
            b[i] = smallest_footprint(pr, i);
        if (repair(pr, b))
            best = b;
        else
            return fallback_from(req, pr);
    }
    improve(pr, *best);
    return finish(pr, *best, true);
}

Allocation allocate_exact(const AllocationRequest& req, std::size_t bound)
{
    Problem pr = prepare(req);
    const std::size_t n = pr.apps.size();
    if (n == 0) {
        Allocation empty;
        empty.feasible = true;
        return empty;
    }
    double combos = 1.0;
    for (const auto& c : pr.cost)
        combos *= static_cast<double>(c.size());
    if (combos > static_cast<double>(bound))
        throw InstanceTooLargeError("exact allocation over " + std::to_string(static_cast<long long>(combos)) +
                                   " selections exceeds bound " + std::to_string(bound));

    Selection sel(n, 0);
    std::optional<Selection> best;
    double best_cost = std::numeric_limits<double>::infinity();
    while (true) {
        if (fits(demand_of(pr, sel), pr.capacity)) {
            double c = cost_of(pr, sel);
            if (c < best_cost) {
                best_cost = c;
                best = sel;
            }
        }
        // odometer, last app fastest: visits selections lexicographically
        std::size_t i = n;
        bool done = true;
        while (i > 0) {
            --i;
            if (++sel[i] < pr.cost[i].size()) {
                done = false;
                break;
            }
            sel[i] = 0;
        }
        if (done)
            break;
    }
    if (!best)
        return fallback_from(req, pr);
    return finish(pr, *best, true);
}

Allocation coallocate_fallback(const AllocationRequest& req, Allocation partial)
{
    Problem pr = prepare(req);
    std::vector<std::size_t> uncovered;
    for (std::size_t i = 0; i < pr.apps.size(); ++i)
        if (!partial.choices.count(pr.apps[i].app_id))
            uncovered.push_back(i);
    if (uncovered.empty())
        return partial;

    Eigen::VectorXd residual = pr.capacity;
    for (const auto& [id, pt] : partial.choices)
        residual -= pt.theta.cast<double>();

    std::stable_sort(uncovered.begin(), uncovered.end(), [&](std::size_t a, std::size_t b) {
        return pr.weight[a][smallest_footprint(pr, a)].sum() < pr.weight[b][smallest_footprint(pr, b)].sum();
    });
    for (std::size_t i : uncovered) {
        std::size_t j = smallest_footprint(pr, i);
        const auto& id = pr.apps[i].app_id;
        partial.choices.insert_or_assign(id, pr.apps[i].points[j]);
        partial.choice_index.insert_or_assign(id, j);
        if (fits(pr.weight[i][j], residual))
            residual -= pr.weight[i][j];
        else
            partial.overflowed.insert(id);
    }
    partial.feasible = false;
    partial.total_cost = 0.0;
    for (std::size_t i = 0; i < pr.apps.size(); ++i)
        partial.total_cost += pr.cost[i][partial.choice_index.at(pr.apps[i].app_id)];
    partial.core_assignment = assign_cores(partial.choices, req.platform, partial.overflowed);
    partial.coallocated = sharing_apps(partial.core_assignment);
    return partial;
}

CoreAssignment assign_cores(const std::map<std::string, OperatingPoint>& choices, const Platform& p,
                            const std::set<std::string>& overflowed)
{
    std::vector<std::vector<int>> users(p.num_types());
    for (std::size_t k = 0; k < p.num_types(); ++k)
        users[k].assign(static_cast<std::size_t>(p.core_type(k).count), 0);

    CoreAssignment out;
    auto place = [&](const std::string& id, const OperatingPoint& pt, bool shared) {
        auto& slots = out[id];
        for (std::size_t d = 0; d < p.dimensions(); ++d) {
            std::size_t k = p.bucket_type(d);
            auto& u = users[k];
            for (int c = 0; c < pt.config[d]; ++c) {
                std::size_t core = u.size();
                if (!shared) {
                    auto it = std::find(u.begin(), u.end(), 0);
                    if (it == u.end())
                        throw std::logic_error("core assignment for '" + id + "' exceeds " + p.core_type(k).id +
                                               " capacity without co-allocation");
                    core = static_cast<std::size_t>(it - u.begin());
                } else {
                    // least-loaded core not yet held by this app, lowest index first
                    for (std::size_t cand = 0; cand < u.size(); ++cand) {
                        bool own = std::any_of(slots.begin(), slots.end(), [&](const CoreSlot& s) {
                            return s.type == k && s.core == static_cast<int>(cand);
                        });
                        if (!own && (core == u.size() || u[cand] < u[core]))
                            core = cand;
                    }
                    // a footprint larger than the type: wrap onto held cores
                    if (core == u.size())
                        core = static_cast<std::size_t>(std::min_element(u.begin(), u.end()) - u.begin());
                }
                ++u[core];
                slots.push_back({k, static_cast<int>(core), p.bucket_threads(d)});
            }
        }
        std::sort(slots.begin(), slots.end());
    };
    for (const auto& [id, pt] : choices)
        if (!overflowed.count(id))
            place(id, pt, false);
    for (const auto& [id, pt] : choices)
        if (overflowed.count(id))
            place(id, pt, true);
    return out;
}

std::set<std::string> sharing_apps(const CoreAssignment& assignment)
{
    std::map<std::pair<std::size_t, int>, std::vector<std::string>> holders;
    for (const auto& [id, slots] : assignment)
        for (const auto& s : slots)
            holders[{s.type, s.core}].push_back(id);
    std::set<std::string> out;
    for (const auto& [core, ids] : holders)
        if (ids.size() > 1)
            out.insert(ids.begin(), ids.end());
    return out;
}

void write_lambda_trace_csv(std::ostream& os, const std::vector<LambdaTraceRow>& trace)
{
    os << "iteration";
    if (!trace.empty()) {
        for (Eigen::Index k = 0; k < trace.front().lambda.size(); ++k)
            os << ",lambda_" << k;
        for (Eigen::Index k = 0; k < trace.front().demand.size(); ++k)
            os << ",demand_" << k;
    }
    os << ",relaxed_cost,feasible\n";
    for (const auto& row : trace) {
        os << row.iteration;
        for (Eigen::Index k = 0; k < row.lambda.size(); ++k)
            os << ',' << row.lambda[k];
        for (Eigen::Index k = 0; k < row.demand.size(); ++k)
            os << ',' << row.demand[k];
        os << ',' << row.relaxed_cost << ',' << (row.feasible ? 1 : 0) << '\n';
    }
}

} // namespace hetmap
