// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#include "nrpos/scenario.hpp"

#include "nrpos/rng.hpp"

namespace nrpos
{

void require_valid(const ScenarioConfig& cfg)
{
    const auto violations = validate_config(cfg);
    if (violations.empty())
        return;
    std::string msg = "invalid scenario configuration:";
    for (const auto& v : violations)
        msg += "\n  - " + v;
    throw ConfigError(msg);
}

Scenario generate_scenario(const ScenarioConfig& cfg, std::uint64_t seed)
{
    require_valid(cfg);

    CounterRng placement = CounterRng(seed).split(0);

    Scenario s;
    s.seed = seed;
    s.bandwidth_hz = cfg.bandwidth_hz;
    s.carrier_hz = cfg.carrier_hz;
    s.comb_size = cfg.comb_size;
    s.numerology_count = cfg.numerology_count;
    s.noise_psd_w_per_hz = cfg.noise_psd_w_per_hz;
    s.los_mode = cfg.los_mode;
    s.area_x_m = cfg.area_m[0];
    s.area_y_m = cfg.area_m[1];
    s.xi2_min_override_m2 = cfg.xi2_min_override_m2;

    s.dll.early_late_spacing_chips = cfg.dll.early_late_spacing_chips;
    s.dll.frontend_bw_hz = cfg.dll.frontend_bw_factor * cfg.bandwidth_hz;
    s.dll.loop_bw_hz = cfg.dll.loop_bw_hz;
    s.dll.coherent_time_s = cfg.dll.coherent_time_s;

    s.irs.position_m = Vec3(cfg.irs.position_m[0], cfg.irs.position_m[1], cfg.irs.position_m[2]);
    s.irs.elements_h = cfg.irs.elements_h;
    s.irs.elements_v = cfg.irs.elements_v;
    s.irs.codebook_size = cfg.irs.codebook_size;

    const double power_scale =
        cfg.power_reference_bandwidth_hz > 0.0 ? cfg.bandwidth_hz / cfg.power_reference_bandwidth_hz : 1.0;

    s.anchors.resize(cfg.num_anchors);
    for (int j = 0; j < cfg.num_anchors; ++j)
    {
        Anchor& a = s.anchors[j];
        a.sensor_var_m2 = cfg.sensor_var_m2;
        a.dp_sensitivity = cfg.dp_sensitivity;
        a.eps_min = cfg.eps_min;
        a.delta_min = cfg.delta_min;
        if (j == 0)
        {
            a.is_ap = true;
            a.position_m = Vec3(cfg.ap_position_m[0], cfg.ap_position_m[1], cfg.ap_position_m[2]);
            a.p_max_w = cfg.ap_p_max_w * power_scale;
        }
        else
        {
            const double x = placement.uniform(0.0, cfg.area_m[0]);
            const double y = placement.uniform(0.0, cfg.area_m[1]);
            a.position_m = Vec3(x, y, cfg.anchor_height_m);
            a.p_max_w = cfg.anchor_p_max_w * power_scale;
        }
    }

    s.users.resize(cfg.num_users);
    for (auto& u : s.users)
    {
        const double x = placement.uniform(0.0, cfg.area_m[0]);
        const double y = placement.uniform(0.0, cfg.area_m[1]);
        u.position_m = Vec3(x, y, cfg.user_height_m);
    }
    return s;
}

} // namespace nrpos
