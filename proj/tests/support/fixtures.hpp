// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#pragma once

#include "nrpos/channel.hpp"
#include "nrpos/config.hpp"
#include "nrpos/problem.hpp"
#include "nrpos/rng.hpp"
#include "nrpos/scenario.hpp"

#include <cstdint>
#include <memory>

namespace nrpos::testing
{

// Scenario, channels and problem with stable addresses
struct Instance
{
    std::unique_ptr<Scenario> scenario;
    std::unique_ptr<ChannelRealization> channels;
    std::unique_ptr<Problem> problem;
};

// Small, fast configuration: 1 MHz band, comb 2, two numerologies, 3x3 IRS
inline ScenarioConfig small_config(int num_anchors, int num_users)
{
    ScenarioConfig c;
    c.num_anchors = num_anchors;
    c.num_users = num_users;
    c.bandwidth_hz = 1e6;
    c.dll.frontend_bw_factor = 2.0;
    c.comb_size = 2;
    c.numerology_count = 2;
    c.irs.elements_h = 3;
    c.irs.elements_v = 3;
    c.irs.codebook_size = 9;
    return c;
}

inline Instance make_instance(const ScenarioConfig& cfg, std::uint64_t seed)
{
    Instance inst;
    CounterRng root(seed);
    inst.scenario = std::make_unique<Scenario>(generate_scenario(cfg, seed));
    CounterRng ch_rng = root.split(1);
    inst.channels = std::make_unique<ChannelRealization>(draw_direct_channels(*inst.scenario, ch_rng));
    inst.problem = std::make_unique<Problem>(*inst.scenario, *inst.channels, root.split(2));
    return inst;
}

} // namespace nrpos::testing
