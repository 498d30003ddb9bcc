// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#pragma once

#include "nrpos/common.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace nrpos
{
struct Anchor;
class CounterRng;

struct GeometryFactors
{
    Eigen::MatrixXd g_check; // |X_k| x 3 unit directions from anchor to user
    Eigen::MatrixXd g_pinv;  // 3 x |X_k|
    Eigen::VectorXd lambda;  // column norms of g_pinv
};

// Throws std::invalid_argument for fewer than 3 anchors and NumericalError when the
// condition number of G^T G exceeds 1e8 or a user coincides with an anchor.
GeometryFactors geometry_factors(const Vec3& user, const std::vector<Vec3>& anchors);

constexpr double kMaxGeometryCondition = 1e8;

// Phi = sqrt(sum lambda^2 (xi^2 + sigma^2)); throws std::invalid_argument on length mismatch
double positioning_error(const Eigen::VectorXd& lambda, const Eigen::VectorXd& xi2, const Eigen::VectorXd& sigma2);
double positioning_error(const Eigen::VectorXd& lambda, const Eigen::VectorXd& total_var);

// xi_1^2 making the Gaussian mechanism hold with equality; throws for delta outside (0, 4/5)
double dp_noise_variance(double epsilon, double delta, double sensitivity);

// Smallest delta certified by noise variance xi1_var: (4/5) exp(-xi1_var eps^2 / (2 Delta^2))
double dp_delta_bound(double xi1_var, double epsilon, double sensitivity);

// xi_0^2 + xi_1^2 at (eps_min, delta_min)
double min_anchor_variance(const Anchor& anchor);

// override, when present, replaces the privacy-derived value
double min_anchor_variance(const Anchor& anchor, std::optional<double> override_m2);

// position + N(0, xi1_var) independently on each axis
Vec3 perturb_location(const Vec3& position, double xi1_var, CounterRng& rng);

} // namespace nrpos
