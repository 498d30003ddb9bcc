// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#include "nrpos/config.hpp"

#include "nrpos/common.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace nrpos
{
using nlohmann::json;

std::string to_string(LosMode mode)
{
    return mode == LosMode::mixed ? "mixed" : "open";
}

LosMode los_mode_from_string(const std::string& s)
{
    if (s == "mixed")
        return LosMode::mixed;
    if (s == "open")
        return LosMode::open;
    throw ConfigError("los_mode must be \"mixed\" or \"open\", got \"" + s + "\"");
}

namespace
{

json build_defaults()
{
    const ScenarioConfig s;
    const OptimizerConfig o;
    const ExperimentConfig e;
    json d;
    d["scenario"] = {
        {"num_anchors", s.num_anchors},
        {"num_users", s.num_users},
        {"area_m", s.area_m},
        {"ap_position_m", s.ap_position_m},
        {"user_height_m", s.user_height_m},
        {"anchor_height_m", s.anchor_height_m},
        {"bandwidth_hz", s.bandwidth_hz},
        {"carrier_hz", s.carrier_hz},
        {"comb_size", s.comb_size},
        {"numerology_count", s.numerology_count},
        {"noise_psd_w_per_hz", s.noise_psd_w_per_hz},
        {"los_mode", to_string(s.los_mode)},
        {"ap_p_max_w", s.ap_p_max_w},
        {"anchor_p_max_w", s.anchor_p_max_w},
        {"power_reference_bandwidth_hz", s.power_reference_bandwidth_hz},
        {"sensor_var_m2", s.sensor_var_m2},
        {"dp_sensitivity", s.dp_sensitivity},
        {"eps_min", s.eps_min},
        {"delta_min", s.delta_min},
        {"xi2_min_override_m2", *s.xi2_min_override_m2},
        {"irs",
         {{"position_m", s.irs.position_m},
          {"elements_h", s.irs.elements_h},
          {"elements_v", s.irs.elements_v},
          {"codebook_size", s.irs.codebook_size}}},
        {"dll",
         {{"early_late_spacing_chips", s.dll.early_late_spacing_chips},
          {"frontend_bw_factor", s.dll.frontend_bw_factor},
          {"loop_bw_hz", s.dll.loop_bw_hz},
          {"coherent_time_s", s.dll.coherent_time_s}}},
    };
    d["optimizer"] = {
        {"tol_rel", o.tol_rel},
        {"max_outer", o.max_outer},
        {"power_floor_ratio", o.power_floor_ratio},
        {"kkt_tol", o.kkt_tol},
        {"max_swaps", o.max_swaps},
        {"dqn",
         {{"hidden", o.dqn.hidden},
          {"learning_rate", o.dqn.learning_rate},
          {"gamma", o.dqn.gamma},
          {"replay_capacity", o.dqn.replay_capacity},
          {"batch_size", o.dqn.batch_size},
          {"target_refresh", o.dqn.target_refresh},
          {"eps_start", o.dqn.eps_start},
          {"eps_end", o.dqn.eps_end},
          {"eps_decay", o.dqn.eps_decay},
          {"steps_per_iteration", o.dqn.steps_per_iteration},
          {"episode_length", o.dqn.episode_length}}},
    };
    d["experiment"] = {
        {"realizations", e.realizations},
        {"schemes", e.schemes},
        {"seed", e.seed},
        {"threads", e.threads},
        {"cdf_path", e.cdf_path},
    };
    return d;
}

// Nullable leaves may hold null in the defaults or in user input.
bool nullable_leaf(const std::string& path)
{
    return path == "scenario.xi2_min_override_m2";
}

void merge_into(json& base, const json& patch, const std::string& prefix)
{
    if (!patch.is_object())
        throw ConfigError("config section \"" + (prefix.empty() ? std::string("<root>") : prefix) + "\" must be an object");
    for (auto it = patch.begin(); it != patch.end(); ++it)
    {
        const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (!base.contains(it.key()))
            throw ConfigError("unknown config key \"" + path + "\"");
        json& target = base[it.key()];
        if (target.is_object())
            merge_into(target, it.value(), path);
        else
        {
            if (it.value().is_null() && !nullable_leaf(path))
                throw ConfigError("config key \"" + path + "\" may not be null");
            target = it.value();
        }
    }
}

std::vector<std::string> split_path(const std::string& dotted)
{
    std::vector<std::string> parts;
    std::stringstream ss(dotted);
    std::string item;
    while (std::getline(ss, item, '.'))
    {
        if (item.empty())
            throw ConfigError("malformed config path \"" + dotted + "\"");
        parts.push_back(item);
    }
    if (parts.empty())
        throw ConfigError("empty config path");
    return parts;
}

template <typename T>
T read(const json& j, const char* key, const std::string& section)
{
    try
    {
        return j.at(key).get<T>();
    }
    catch (const json::exception& e)
    {
        throw ConfigError("config key \"" + section + "." + key + "\": " + e.what());
    }
}

} // namespace

const json& Config::defaults()
{
    static const json d = build_defaults();
    return d;
}

Config::Config() : doc_(defaults()) {}

Config Config::from_json(const json& doc)
{
    Config c;
    merge_into(c.doc_, doc, "");
    // fail early on type errors
    (void)c.scenario();
    (void)c.optimizer();
    (void)c.experiment();
    return c;
}

Config Config::from_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file \"" + path + "\"");
    json doc;
    try
    {
        doc = json::parse(in, nullptr, true, true);
    }
    catch (const json::parse_error& e)
    {
        throw ConfigError("cannot parse \"" + path + "\": " + e.what());
    }
    return from_json(doc);
}

void Config::set_json(const std::string& dotted_path, const json& value)
{
    const auto parts = split_path(dotted_path);
    json patch = value;
    for (auto it = parts.rbegin(); it != parts.rend(); ++it)
        patch = json{{*it, patch}};
    json next = doc_;
    merge_into(next, patch, "");
    std::swap(doc_, next);
    try
    {
        (void)scenario();
        (void)optimizer();
        (void)experiment();
    }
    catch (...)
    {
        std::swap(doc_, next);
        throw;
    }
}

void Config::set(const std::string& dotted_path, const std::string& value_text)
{
    json value;
    try
    {
        value = json::parse(value_text);
    }
    catch (const json::parse_error&)
    {
        value = value_text;
    }
    set_json(dotted_path, value);
}

const json& Config::get(const std::string& dotted_path) const
{
    const json* node = &doc_;
    for (const auto& p : split_path(dotted_path))
    {
        if (!node->is_object() || !node->contains(p))
            throw ConfigError("unknown config key \"" + dotted_path + "\"");
        node = &(*node)[p];
    }
    return *node;
}

ScenarioConfig Config::scenario() const
{
    const json& s = doc_.at("scenario");
    const std::string sec = "scenario";
    ScenarioConfig c;
    c.num_anchors = read<int>(s, "num_anchors", sec);
    c.num_users = read<int>(s, "num_users", sec);
    c.area_m = read<std::array<double, 2>>(s, "area_m", sec);
    c.ap_position_m = read<std::array<double, 3>>(s, "ap_position_m", sec);
    c.user_height_m = read<double>(s, "user_height_m", sec);
    c.anchor_height_m = read<double>(s, "anchor_height_m", sec);
    c.bandwidth_hz = read<double>(s, "bandwidth_hz", sec);
    c.carrier_hz = read<double>(s, "carrier_hz", sec);
    c.comb_size = read<int>(s, "comb_size", sec);
    c.numerology_count = read<int>(s, "numerology_count", sec);
    c.noise_psd_w_per_hz = read<double>(s, "noise_psd_w_per_hz", sec);
    c.los_mode = los_mode_from_string(read<std::string>(s, "los_mode", sec));
    c.ap_p_max_w = read<double>(s, "ap_p_max_w", sec);
    c.anchor_p_max_w = read<double>(s, "anchor_p_max_w", sec);
    c.power_reference_bandwidth_hz = read<double>(s, "power_reference_bandwidth_hz", sec);
    c.sensor_var_m2 = read<double>(s, "sensor_var_m2", sec);
    c.dp_sensitivity = read<double>(s, "dp_sensitivity", sec);
    c.eps_min = read<double>(s, "eps_min", sec);
    c.delta_min = read<double>(s, "delta_min", sec);
    if (s.at("xi2_min_override_m2").is_null())
        c.xi2_min_override_m2.reset();
    else
        c.xi2_min_override_m2 = read<double>(s, "xi2_min_override_m2", sec);
    const json& irs = s.at("irs");
    c.irs.position_m = read<std::array<double, 3>>(irs, "position_m", "scenario.irs");
    c.irs.elements_h = read<int>(irs, "elements_h", "scenario.irs");
    c.irs.elements_v = read<int>(irs, "elements_v", "scenario.irs");
    c.irs.codebook_size = read<int>(irs, "codebook_size", "scenario.irs");
    const json& dll = s.at("dll");
    c.dll.early_late_spacing_chips = read<double>(dll, "early_late_spacing_chips", "scenario.dll");
    c.dll.frontend_bw_factor = read<double>(dll, "frontend_bw_factor", "scenario.dll");
    c.dll.loop_bw_hz = read<double>(dll, "loop_bw_hz", "scenario.dll");
    c.dll.coherent_time_s = read<double>(dll, "coherent_time_s", "scenario.dll");
    return c;
}

OptimizerConfig Config::optimizer() const
{
    const json& o = doc_.at("optimizer");
    const std::string sec = "optimizer";
    OptimizerConfig c;
    c.tol_rel = read<double>(o, "tol_rel", sec);
    c.max_outer = read<int>(o, "max_outer", sec);
    c.power_floor_ratio = read<double>(o, "power_floor_ratio", sec);
    c.kkt_tol = read<double>(o, "kkt_tol", sec);
    c.max_swaps = read<int>(o, "max_swaps", sec);
    const json& d = o.at("dqn");
    const std::string dsec = "optimizer.dqn";
    c.dqn.hidden = read<std::vector<int>>(d, "hidden", dsec);
    c.dqn.learning_rate = read<double>(d, "learning_rate", dsec);
    c.dqn.gamma = read<double>(d, "gamma", dsec);
    c.dqn.replay_capacity = read<int>(d, "replay_capacity", dsec);
    c.dqn.batch_size = read<int>(d, "batch_size", dsec);
    c.dqn.target_refresh = read<int>(d, "target_refresh", dsec);
    c.dqn.eps_start = read<double>(d, "eps_start", dsec);
    c.dqn.eps_end = read<double>(d, "eps_end", dsec);
    c.dqn.eps_decay = read<double>(d, "eps_decay", dsec);
    c.dqn.steps_per_iteration = read<int>(d, "steps_per_iteration", dsec);
    c.dqn.episode_length = read<int>(d, "episode_length", dsec);
    return c;
}

ExperimentConfig Config::experiment() const
{
    const json& e = doc_.at("experiment");
    const std::string sec = "experiment";
    ExperimentConfig c;
    c.realizations = read<int>(e, "realizations", sec);
    c.schemes = read<std::vector<std::string>>(e, "schemes", sec);
    c.seed = read<std::uint64_t>(e, "seed", sec);
    c.threads = read<int>(e, "threads", sec);
    c.cdf_path = read<std::string>(e, "cdf_path", sec);
    return c;
}

std::vector<std::string> validate_config(const ScenarioConfig& c)
{
    std::vector<std::string> v;
    auto finite = [](double x) { return std::isfinite(x); };
    if (c.num_anchors < 1)
        v.push_back("num_anchors must be >= 1 (one anchor is the AP)");
    if (c.num_users < 1)
        v.push_back("num_users must be >= 1");
    if (!(c.area_m[0] > 0.0) || !(c.area_m[1] > 0.0) || !finite(c.area_m[0]) || !finite(c.area_m[1]))
        v.push_back("area_m must be positive in both dimensions");
    if (!(c.bandwidth_hz > 0.0) || !finite(c.bandwidth_hz))
        v.push_back("bandwidth_hz must be > 0");
    if (!(c.carrier_hz > 0.0) || !finite(c.carrier_hz))
        v.push_back("carrier_hz must be > 0");
    if (c.comb_size < 1)
        v.push_back("comb_size must be >= 1");
    if (c.numerology_count < 1 || c.numerology_count > 7)
        v.push_back("numerology_count must be in [1, 7]");
    if (c.comb_size >= 1 && c.bandwidth_hz > 0.0 && c.bandwidth_hz < c.comb_size * 15000.0)
        v.push_back("bandwidth_hz must hold at least one comb group at numerology 0");
    if (!(c.noise_psd_w_per_hz >= 0.0) || !finite(c.noise_psd_w_per_hz))
        v.push_back("noise_psd_w_per_hz must be >= 0");
    if (!(c.ap_p_max_w > 0.0) || !(c.anchor_p_max_w > 0.0))
        v.push_back("p_max_w must be > 0");
    if (c.power_reference_bandwidth_hz < 0.0)
        v.push_back("power_reference_bandwidth_hz must be >= 0");
    if (!(c.sensor_var_m2 >= 0.0))
        v.push_back("sensor_var_m2 must be >= 0");
    if (!(c.dp_sensitivity > 0.0))
        v.push_back("dp_sensitivity must be > 0");
    if (!(c.eps_min > 0.0))
        v.push_back("eps_min must be > 0");
    if (!(c.delta_min > 0.0))
        v.push_back("delta_min must be > 0");
    if (!(c.delta_min < 0.8))
        v.push_back("delta_min must be < 4/5");
    if (c.xi2_min_override_m2 && !(*c.xi2_min_override_m2 >= 0.0))
        v.push_back("xi2_min_override_m2 must be >= 0");
    if (c.irs.elements_h < 1 || c.irs.elements_v < 1)
        v.push_back("irs elements_h and elements_v must be >= 1");
    if (c.irs.codebook_size < 1)
        v.push_back("irs codebook_size must be >= 1");
    else if (c.irs.codebook_size > c.irs.elements_h * c.irs.elements_v)
        v.push_back("irs codebook_size must not exceed elements_h * elements_v");
    const auto& d = c.dll;
    if (!(d.early_late_spacing_chips > 0.0) || !(d.frontend_bw_factor > 0.0) || !(d.loop_bw_hz > 0.0) ||
        !(d.coherent_time_s > 0.0))
        v.push_back("dll parameters must all be > 0");
    else if (!(d.loop_bw_hz * (1.0 - 0.5 * d.loop_bw_hz * d.coherent_time_s) > 0.0))
        v.push_back("dll loop factor a = B_L (1 - 0.5 B_L T_coh) must be > 0");
    if (!finite(c.user_height_m) || !finite(c.anchor_height_m))
        v.push_back("node heights must be finite");
    auto inside = [&](const std::array<double, 3>& p) {
        return finite(p[2]) && p[0] >= 0.0 && p[0] <= c.area_m[0] && p[1] >= 0.0 && p[1] <= c.area_m[1];
    };
    if (c.area_m[0] > 0.0 && c.area_m[1] > 0.0)
    {
        if (!inside(c.ap_position_m))
            v.push_back("ap_position_m must lie inside the area");
        if (!inside(c.irs.position_m))
            v.push_back("irs position_m must lie inside the area");
    }
    return v;
}

std::vector<std::string> validate_config(const OptimizerConfig& c)
{
    std::vector<std::string> v;
    if (!(c.tol_rel > 0.0))
        v.push_back("optimizer.tol_rel must be > 0");
    if (c.max_outer < 1)
        v.push_back("optimizer.max_outer must be >= 1");
    if (!(c.power_floor_ratio > 0.0 && c.power_floor_ratio < 1.0))
        v.push_back("optimizer.power_floor_ratio must be in (0, 1)");
    if (!(c.kkt_tol > 0.0))
        v.push_back("optimizer.kkt_tol must be > 0");
    if (c.max_swaps < 1)
        v.push_back("optimizer.max_swaps must be >= 1");
    const auto& d = c.dqn;
    if (d.hidden.size() != 3)
        v.push_back("optimizer.dqn.hidden must list exactly 3 widths");
    for (int w : d.hidden)
        if (w < 1)
            v.push_back("optimizer.dqn.hidden widths must be >= 1");
    if (!(d.learning_rate > 0.0))
        v.push_back("optimizer.dqn.learning_rate must be > 0");
    if (!(d.gamma >= 0.0 && d.gamma <= 1.0))
        v.push_back("optimizer.dqn.gamma must be in [0, 1]");
    if (d.replay_capacity < 1 || d.batch_size < 1 || d.target_refresh < 1)
        v.push_back("optimizer.dqn replay_capacity, batch_size and target_refresh must be >= 1");
    if (!(d.eps_end >= 0.0 && d.eps_end <= d.eps_start && d.eps_start <= 1.0))
        v.push_back("optimizer.dqn requires 0 <= eps_end <= eps_start <= 1");
    if (!(d.eps_decay > 0.0 && d.eps_decay <= 1.0))
        v.push_back("optimizer.dqn.eps_decay must be in (0, 1]");
    if (d.steps_per_iteration < 1 || d.episode_length < 1)
        v.push_back("optimizer.dqn steps_per_iteration and episode_length must be >= 1");
    return v;
}

} // namespace nrpos
