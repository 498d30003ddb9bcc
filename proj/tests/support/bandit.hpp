// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#pragma once

#include "nrpos/config.hpp"
#include "nrpos/dqn.hpp"
#include "nrpos/rng.hpp"

#include <cstdint>

namespace nrpos::testing
{

// Contextual bandit with one dominant arm: reward 0.9 for the dominant beam and 0.1 otherwise,
// whatever the context. Returns the fraction of greedy picks of the dominant beam on fresh contexts.
inline double bandit_greedy_rate(int training_steps, std::uint64_t seed, int num_beams = 9, int dominant = 4,
                                 int state_dim = 6)
{
    DqnConfig cfg;
    cfg.hidden = {16, 16, 16};
    cfg.eps_start = 1.0;
    cfg.eps_end = 0.05;
    cfg.eps_decay = 0.995;
    DqnAgent agent(state_dim, num_beams, cfg, seed);
    CounterRng env(seed ^ 0x9e3779b97f4a7c15ULL);
    auto context = [&] {
        Eigen::VectorXd s(state_dim);
        for (int d = 0; d < state_dim; ++d)
            s(d) = env.uniform();
        return s;
    };
    Eigen::VectorXd s = context();
    for (int step = 0; step < training_steps; ++step)
    {
        const int a = agent.select(s, true);
        const double r = a == dominant ? 0.9 : 0.1;
        Eigen::VectorXd sn = context();
        agent.remember({s, a, r, sn, true});
        agent.train_step();
        agent.end_episode();
        s = std::move(sn);
    }
    int hits = 0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t)
        hits += agent.select(context(), false) == dominant ? 1 : 0;
    return static_cast<double>(hits) / trials;
}

} // namespace nrpos::testing
