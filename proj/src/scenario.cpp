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

#include "hetmap/scenario.hpp"

#include "hetmap/error.hpp"
#include "json.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace hetmap {

namespace {

TrueBehavior parse_behavior(const nlohmann::json& j)
{
    TrueBehavior b;
    b.total_work = j.at("total_work").get<double>();
    if (j.contains("polynomial")) {
        PolynomialBehavior poly;
        poly.ips = j.at("polynomial").at("ips").get<std::vector<double>>();
        poly.power = j.at("polynomial").at("power").get<std::vector<double>>();
        b.polynomial = std::move(poly);
        return b;
    }
    b.parallel_fraction = j.at("parallel_fraction").get<double>();
    b.per_type_rate = j.at("per_type_rate").get<std::vector<double>>();
    b.smt_factor = j.value("smt_factor", b.smt_factor);
    b.static_power_per_core = j.at("static_power_per_core").get<std::vector<double>>();
    b.dynamic_power_per_core = j.at("dynamic_power_per_core").get<std::vector<double>>();
    b.interference_penalty = j.value("interference_penalty", 0.0);
    return b;
}

} // namespace

Scenario scenario_from_json_text(const std::string& text, const std::filesystem::path& base_dir)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("scenario: ") + e.what());
    }
    Scenario s;
    try {
        s.name = j.value("name", std::string{});
        s.seed = j.value("seed", std::uint64_t{0});
        s.window_ms = j.value("window_ms", kDefaultWindowMs);
        for (const auto& a : j.at("apps")) {
            AppSpec spec;
            spec.app_id = a.at("app_id").get<std::string>();
            spec.arrival_ms = a.value("arrival_ms", 0.0);
            spec.behavior = parse_behavior(a.at("behavior"));
            if (a.contains("description_file") && !a.at("description_file").is_null()) {
                std::filesystem::path path = a.at("description_file").get<std::string>();
                spec.description_file = path.is_absolute() ? path : base_dir / path;
            }
            std::string type = a.value("type", std::string("scalable"));
            if (type == "scalable")
                spec.kind = AppKind::scalable;
            else if (type == "static")
                spec.kind = AppKind::static_threads;
            else
                throw ParseError("app '" + spec.app_id + "' has unknown type '" + type + "'");
            spec.threads = a.value("threads", 0);
            spec.priority = a.value("priority", 1.0);
            s.apps.push_back(std::move(spec));
        }
        if (j.contains("policy_options")) {
            const auto& o = j.at("policy_options");
            auto& po = s.policy_options;
            po.noise_sigma = o.value("noise_sigma", po.noise_sigma);
            po.ema_alpha = o.value("ema_alpha", po.ema_alpha);
            po.idle_factor = o.value("idle_factor", po.idle_factor);
            po.reconfig_cost_windows = o.value("reconfig_cost_windows", po.reconfig_cost_windows);
            po.discard_windows = o.value("discard_windows", po.discard_windows);
            po.model_degree = o.value("model_degree", po.model_degree);
            if (o.contains("reconfigurations"))
                for (const auto& r : o.at("reconfigurations"))
                    po.reconfigurations.push_back({r.at("app_id").get<std::string>(), r.at("time_ms").get<double>(),
                                                   Configuration(r.at("config").get<std::vector<int>>())});
        }
        if (j.contains("thresholds")) {
            const auto& t = j.at("thresholds");
            auto& th = s.thresholds;
            th.initial_exit = t.value("initial_exit", th.initial_exit);
            th.stable_points = t.value("stable_points", th.stable_points);
            th.stable_samples = t.value("stable_samples", th.stable_samples);
            th.refinement_batch = t.value("refinement_batch", th.refinement_batch);
            th.stable_reassess = t.value("stable_reassess", th.stable_reassess);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("scenario: ") + e.what());
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open scenario file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    Scenario s = scenario_from_json_text(ss.str(), path.parent_path());
    if (s.name.empty())
        s.name = path.stem().string();
    return s;
}

void validate_scenario(const Scenario& s, const Platform& p)
{
    if (s.window_ms <= 0)
        throw ValidationError("window_ms must be positive");
    if (s.apps.empty())
        throw ValidationError("scenario '" + s.name + "' has no applications");
    s.thresholds.validate();
    const auto& po = s.policy_options;
    if (!(po.ema_alpha > 0.0) || po.ema_alpha > 1.0)
        throw ValidationError("ema_alpha outside (0, 1]");
    if (po.noise_sigma < 0.0 || po.idle_factor < 0.0 || po.reconfig_cost_windows < 0 || po.discard_windows < 0)
        throw ValidationError("negative policy option");
    if (po.model_degree < 1 || po.model_degree > 3)
        throw ValidationError("model_degree must be 1, 2 or 3");
    std::set<std::string> ids;
    for (const auto& a : s.apps) {
        if (a.app_id.empty() || !ids.insert(a.app_id).second)
            throw ValidationError("empty or duplicate app_id '" + a.app_id + "'");
        if (a.arrival_ms < 0.0)
            throw ValidationError("app '" + a.app_id + "' arrives before time zero");
        if (a.kind == AppKind::static_threads && a.threads < 1)
            throw ValidationError("static app '" + a.app_id + "' needs threads >= 1");
        if (!(a.priority > 0.0))
            throw ValidationError("app '" + a.app_id + "' has non-positive priority");
        validate_behavior(a.behavior, p);
    }
    for (const auto& r : po.reconfigurations) {
        if (!ids.count(r.app_id))
            throw ValidationError("scripted reconfiguration for unknown app '" + r.app_id + "'");
        validate_configuration(r.config, p);
        if (r.config.is_zero())
            throw ValidationError("scripted reconfiguration to the empty configuration");
    }
}

} // namespace hetmap
