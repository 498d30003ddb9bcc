// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#pragma once

#include "nrpos/common.hpp"
#include "nrpos/config.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace nrpos
{

struct Anchor
{
    Vec3 position_m = Vec3::Zero();
    double sensor_var_m2 = 0.0;
    double p_max_w = 0.05;
    double dp_sensitivity = 1.0;
    double eps_min = 1.0;
    double delta_min = 0.05;
    bool is_ap = false;
};

struct UserNode
{
    Vec3 position_m = Vec3::Zero();
};

struct IrsPanel
{
    Vec3 position_m = Vec3(50.0, 50.0, 3.0);
    int elements_h = 5;
    int elements_v = 5;
    int codebook_size = 25;

    int m0() const { return elements_h * elements_v; }
};

struct DllParams
{
    double early_late_spacing_chips = 0.02; // D
    double frontend_bw_hz = 8e6;            // B_e
    double loop_bw_hz = 0.2;                // B_L
    double coherent_time_s = 0.02;          // T_coh

    // a = B_L (1 - 0.5 B_L T_coh)
    double loop_factor() const { return loop_bw_hz * (1.0 - 0.5 * loop_bw_hz * coherent_time_s); }
};

struct Scenario
{
    std::vector<Anchor> anchors;
    std::vector<UserNode> users;
    IrsPanel irs;
    double bandwidth_hz = 4e6;
    double carrier_hz = 3.5e9;
    int comb_size = 4;
    int numerology_count = 2;
    DllParams dll;
    double noise_psd_w_per_hz = 3.1812e-20;
    LosMode los_mode = LosMode::open;
    double area_x_m = 100.0;
    double area_y_m = 100.0;
    std::optional<double> xi2_min_override_m2;
    std::uint64_t seed = 0;

    int num_anchors() const { return static_cast<int>(anchors.size()); }
    int num_users() const { return static_cast<int>(users.size()); }
    double noise_power_w() const { return bandwidth_hz * noise_psd_w_per_hz; }
};

// Places anchors and users uniformly in the area. Anchor 0 is the AP at the configured
// position; the IRS is fixed. Identical (config, seed) pairs give identical scenarios.
Scenario generate_scenario(const ScenarioConfig& cfg, std::uint64_t seed);

// Throws ConfigError listing every violation.
void require_valid(const ScenarioConfig& cfg);

} // namespace nrpos
