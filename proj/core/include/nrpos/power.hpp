// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#pragma once

#include <Eigen/Core>

namespace nrpos
{
class Problem;
struct AssignmentState;

struct PowerOptions
{
    double floor_ratio = 1e-3; // lower box bound as a fraction of the cap
    double kkt_tol = 1e-6;
    int max_newton = 500;
};

struct PowerSolution
{
    Eigen::VectorXd power_w;
    Eigen::VectorXd anchor_var_m2;
    double epsilon_obj = 0.0;  // max_k sum_j lambda^2 (xi^2 + sigma^2), m^2
    double kkt_residual = 0.0; // log-power domain, objective scaled to the starting point
    int newton_iterations = 0;
};

// Minimizes the epigraph variable over log-powers inside [floor_ratio * cap, cap] with
// xi^2 held at its floor (the objective is increasing in xi^2). X, U, V and the beam are fixed.
PowerSolution solve_power_privacy(const Problem& problem, const AssignmentState& state, const PowerOptions& opt);

// Same with caller-supplied lambda (J x K, zero where unassociated)
PowerSolution solve_power_privacy(const Problem& problem, const AssignmentState& state,
                                  const Eigen::MatrixXd& lambda, const PowerOptions& opt);

} // namespace nrpos
