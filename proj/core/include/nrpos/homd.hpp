// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#pragma once

#include "nrpos/config.hpp"
#include "nrpos/problem.hpp"
#include "nrpos/ranging.hpp"

#include <cstdint>
#include <vector>

namespace nrpos
{
class CounterRng;

// Random U, V, beam and X (3 to J anchors per user), p at the cap, xi^2 at the floor.
// Redraws X when the drawn geometry is degenerate.
AssignmentState random_initial_state(const Problem& problem, CounterRng& rng);

struct IterationRecord
{
    double after_power = 0.0;
    double after_association = 0.0;
    double after_numerology = 0.0;
    double after_beam = 0.0;
    double kkt_residual = 0.0;
    int association_moves = 0;
    int numerology_moves = 0;
    int beam = 0;
    double mean_reward = 0.0;
    int clipped_rewards = 0;
};

struct HomdSolution
{
    AssignmentState state;          // best state seen
    double objective = 0.0;         // max_k Phi_k of state, m
    std::vector<double> history;    // best-seen objective after each outer iteration
    std::vector<IterationRecord> iterations;
};

// Alternates power/privacy solve, user-anchor matching, numerology/offset matching and DQN
// beam selection until the best objective improves by less than tol_rel in an outer iteration.
HomdSolution homd(const Problem& problem, const AssignmentState& init, const OptimizerConfig& cfg,
                  std::uint64_t agent_seed);

// DQN state: per (k, j) l2 norm of the composite channel under codeword beam, scaled by its maximum
Eigen::VectorXd beam_state(const Problem& problem, int beam);

} // namespace nrpos
