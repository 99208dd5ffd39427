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


#include "hetmap/report.hpp"

#include "hetmap/error.hpp"
#include "json.hpp"

#include <stdexcept>

namespace hetmap {

using nlohmann::json;

namespace {

Stage stage_from_string(const std::string& s)
{
    if (s == "Initial")
        return Stage::initial;
    if (s == "Refinement")
        return Stage::refinement;
    if (s == "Stable")
        return Stage::stable;
    throw ParseError("unknown stage '" + s + "'");
}

json app_to_json(const AppReport& a)
{
    json configs = json::array();
    for (const auto& c : a.configs_used)
        configs.push_back(c.dims);
    return {{"arrival_ms", a.arrival_ms},
            {"completion_ms", a.completion_ms},
            {"energy_j", a.energy_j},
            {"configs_used", configs},
            {"reconfigurations", a.reconfigurations},
            {"discarded_windows", a.discarded_windows},
            {"accepted_windows", a.accepted_windows},
            {"coallocated_windows", a.coallocated_windows},
            {"stage_at_start", to_string(a.stage_at_start)},
            {"stage_at_end", to_string(a.stage_at_end)}};
}

AppReport app_from_json(const json& j)
{
    AppReport a;
    a.arrival_ms = j.at("arrival_ms").get<double>();
    a.completion_ms = j.at("completion_ms").get<double>();
    a.energy_j = j.at("energy_j").get<double>();
    for (const auto& c : j.at("configs_used"))
        a.configs_used.emplace_back(c.get<std::vector<int>>());
    a.reconfigurations = j.at("reconfigurations").get<std::size_t>();
    a.discarded_windows = j.at("discarded_windows").get<std::size_t>();
    a.accepted_windows = j.at("accepted_windows").get<std::size_t>();
    a.coallocated_windows = j.at("coallocated_windows").get<std::size_t>();
    a.stage_at_start = stage_from_string(j.at("stage_at_start").get<std::string>());
    a.stage_at_end = stage_from_string(j.at("stage_at_end").get<std::string>());
    return a;
}

template <class F>
auto parse_with(const std::string& text, const char* what, F&& f)
{
    try {
        return f(json::parse(text));
    } catch (const json::exception& e) {
        throw ParseError(std::string(what) + ": " + e.what());
    }
}

} // namespace

std::string report_to_json_text(const Report& r)
{
    json apps = json::object();
    for (const auto& [id, a] : r.per_app)
        apps[id] = app_to_json(a);
    json j = {{"scenario", r.scenario},
              {"policy", r.policy},
              {"seed", r.seed},
              {"per_app", apps},
              {"makespan_ms", r.makespan_ms},
              {"total_energy_j", r.total_energy_j},
              {"idle_energy_j", r.idle_energy_j},
              {"platform_energy_j", r.platform_energy_j},
              {"per_type_energy_j", r.per_type_energy_j},
              {"work_ratio", r.work_ratio}};
    return j.dump(2);
}

Report report_from_json_text(const std::string& text)
{
    return parse_with(text, "report", [](const json& j) {
        Report r;
        r.scenario = j.at("scenario").get<std::string>();
        r.policy = j.at("policy").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& [id, a] : j.at("per_app").items())
            r.per_app.emplace(id, app_from_json(a));
        r.makespan_ms = j.at("makespan_ms").get<double>();
        r.total_energy_j = j.at("total_energy_j").get<double>();
        r.idle_energy_j = j.at("idle_energy_j").get<double>();
        r.platform_energy_j = j.at("platform_energy_j").get<double>();
        r.per_type_energy_j = j.at("per_type_energy_j").get<std::vector<double>>();
        r.work_ratio = j.at("work_ratio").get<double>();
        return r;
    });
}

void write_report_csv(std::ostream& os, const Report& r)
{
    const auto old = os.precision(17);
    os << "app_id,arrival_ms,completion_ms,energy_j,configs_used,reconfigurations,discarded_windows\n";
    for (const auto& [id, a] : r.per_app) {
        os << id << ',' << a.arrival_ms << ',' << a.completion_ms << ',' << a.energy_j << ",\"";
        for (std::size_t i = 0; i < a.configs_used.size(); ++i)
            os << (i ? ";" : "") << a.configs_used[i].to_string();
        os << "\"," << a.reconfigurations << ',' << a.discarded_windows << '\n';
    }
    std::size_t reconf = 0, discarded = 0;
    for (const auto& [id, a] : r.per_app) {
        reconf += a.reconfigurations;
        discarded += a.discarded_windows;
    }
    os << "__total__,0," << r.makespan_ms << ',' << r.total_energy_j << ",\"\"," << reconf << ',' << discarded << '\n';
    os.precision(old);
}

Aggregate aggregate_reports(std::span<const Report> runs)
{
    if (runs.empty())
        throw std::invalid_argument("aggregate_reports: no runs");
    Aggregate a;
    a.scenario = runs.front().scenario;
    a.policy = runs.front().policy;
    a.runs = runs.size();
    const double n = static_cast<double>(runs.size());
    for (const auto& r : runs) {
        a.makespan_ms += r.makespan_ms;
        a.total_energy_j += r.total_energy_j;
        a.idle_energy_j += r.idle_energy_j;
        for (const auto& [id, app] : r.per_app) {
            a.completion_ms[id] += app.completion_ms;
            a.energy_j[id] += app.energy_j;
        }
    }
    if (runs.size() > 1) {
        a.makespan_ms /= n;
        a.total_energy_j /= n;
        a.idle_energy_j /= n;
        for (auto& [id, v] : a.completion_ms)
            v /= n;
        for (auto& [id, v] : a.energy_j)
            v /= n;
    }
    return a;
}

std::string aggregate_to_json_text(const Aggregate& a)
{
    json j = {{"scenario", a.scenario},
              {"policy", a.policy},
              {"runs", a.runs},
              {"makespan_ms", a.makespan_ms},
              {"total_energy_j", a.total_energy_j},
              {"idle_energy_j", a.idle_energy_j},
              {"completion_ms", a.completion_ms},
              {"energy_j", a.energy_j}};
    return j.dump(2);
}

Aggregate aggregate_from_json_text(const std::string& text)
{
    return parse_with(text, "aggregate", [](const json& j) {
        Aggregate a;
        a.scenario = j.at("scenario").get<std::string>();
        a.policy = j.at("policy").get<std::string>();
        a.runs = j.at("runs").get<std::size_t>();
        a.makespan_ms = j.at("makespan_ms").get<double>();
        a.total_energy_j = j.at("total_energy_j").get<double>();
        a.idle_energy_j = j.at("idle_energy_j").get<double>();
        a.completion_ms = j.at("completion_ms").get<std::map<std::string, double>>();
        a.energy_j = j.at("energy_j").get<std::map<std::string, double>>();
        return a;
    });
}

Improvement improvement_factor(const Aggregate& baseline, const Aggregate& policy)
{
    if (!(policy.makespan_ms > 0.0) || !(policy.total_energy_j > 0.0))
        throw std::domain_error("improvement_factor: policy aggregate has zero makespan or energy");
    return {policy.policy, baseline.makespan_ms / policy.makespan_ms, baseline.total_energy_j / policy.total_energy_j};
}

std::string learned_state_to_json_text(const LearnedState& s)
{
    json apps = json::array();
    for (const auto& [id, h] : s.histories) {
        json configs = json::array();
        for (const auto& [cfg, rec] : h.records())
            configs.push_back({{"config", cfg.dims},
                               {"ips_ema", rec.ips.value},
                               {"power_ema", rec.power.value},
                               {"samples", rec.samples}});
        auto st = s.stages.find(id);
        apps.push_back({{"app_id", id},
                        {"stage", to_string(st == s.stages.end() ? Stage::initial : st->second)},
                        {"alpha", h.alpha()},
                        {"configs", configs}});
    }
    return json{{"apps", apps}}.dump(2);
}

LearnedState learned_state_from_json_text(const std::string& text)
{
    return parse_with(text, "learned state", [](const json& j) {
        LearnedState s;
        for (const auto& a : j.at("apps")) {
            std::string id = a.at("app_id").get<std::string>();
            double alpha = a.value("alpha", kDefaultEmaAlpha);
            MeasurementHistory h(alpha);
            for (const auto& c : a.at("configs")) {
                ConfigRecord rec;
                rec.ips = EmaState{c.at("ips_ema").get<double>(), alpha, true};
                rec.power = EmaState{c.at("power_ema").get<double>(), alpha, true};
                rec.samples = c.at("samples").get<std::size_t>();
                h.restore(Configuration(c.at("config").get<std::vector<int>>()), rec);
            }
            s.histories.insert_or_assign(id, std::move(h));
            s.stages[id] = stage_from_string(a.at("stage").get<std::string>());
        }
        return s;
    });
}

} // namespace hetmap
