// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace nrpos
{
struct AssignmentState;
class Problem;

// Brute-force references for the main implementations. None of them call the code
// they are used to check.
namespace oracles
{

struct OracleReport
{
    std::string case_id;
    double main_value = 0.0;
    double oracle_value = 0.0;
    double rel_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

OracleReport compare(const std::string& case_id, double main_value, double oracle_value, double tolerance);

struct QuadratureResult
{
    double value = 0.0;
    double error = 0.0;
};

// Adaptive Gauss-Kronrod (G7/K15) on each panel between consecutive breakpoints.
// Throws NumericalError when a panel misses the relative tolerance.
QuadratureResult adaptive_quadrature(const std::function<double(double)>& f, double lo, double hi,
                                     std::vector<double> breakpoints, double rel_tol);

// Moore-Penrose pseudo-inverse through a full SVD
Eigen::MatrixXd dense_pinv(const Eigen::MatrixXd& a);

// Central differences of f at x; step h must lie in [1e-6, 1e-3] (relative to max(1, |x_i|)).
Eigen::VectorXd finite_diff_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                     const Eigen::VectorXd& x, double h);

// ---- matching ----

// Ranging variances come from the realization's RangingModel; geometry, preferences and
// move generation are computed here from scratch.
struct MatchingInstance
{
    const Problem* problem = nullptr;
};

struct ExhaustiveResult
{
    std::vector<AssignmentState> stable;   // exchange-stable states
    double best_objective = 0.0;           // global min of max_k Phi_k
    std::uint64_t states_enumerated = 0;
    std::vector<double> stable_objectives;
};

// Enumerates every (l, i) assignment of the anchors with X, xi2 and beam fixed; each anchor keeps
// its power at the fraction of the cap it has in base.
ExhaustiveResult exhaustive_numerology_matching(const MatchingInstance& inst, const AssignmentState& base,
                                                std::uint64_t max_states = 1000000);

// Enumerates every association matrix X with >= 3 anchors per user, with U, V, p, xi2, beam fixed.
// Stable states admit no blocking pair swap, user move or anchor move.
ExhaustiveResult exhaustive_user_anchor_matching(const MatchingInstance& inst, const AssignmentState& base,
                                                 std::uint64_t max_states = 1000000);

// Independent swap-blocking scans over a given state
bool numerology_blocking_pair_exists(const MatchingInstance& inst, const AssignmentState& state);
bool user_anchor_blocking_pair_exists(const MatchingInstance& inst, const AssignmentState& state);

// ---- convex power subproblem ----

// Minimum over a grid_n x grid_n log-spaced grid of (p_1, p_2) in [floor_ratio * cap, cap]
// of max_k sum_j lambda^2 (xi^2 + sigma^2) with sigma^2 from the A-term form. lambda is J x K
// (0 where unassociated); xi^2 is taken from base. Throws std::invalid_argument for J > 2.
struct GridPowerResult
{
    double objective = 0.0;
    std::vector<double> power_w;
};
GridPowerResult grid_power_solver(const MatchingInstance& inst, const AssignmentState& base,
                                  const Eigen::MatrixXd& lambda, int grid_n, double floor_ratio);

} // namespace oracles
} // namespace nrpos
