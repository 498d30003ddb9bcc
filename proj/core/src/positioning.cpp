// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#include "nrpos/positioning.hpp"

#include "nrpos/rng.hpp"
#include "nrpos/scenario.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace nrpos
{

GeometryFactors geometry_factors(const Vec3& user, const std::vector<Vec3>& anchors)
{
    const int n = static_cast<int>(anchors.size());
    if (n < 3)
        throw std::invalid_argument("geometry needs at least 3 anchors, got " + std::to_string(n));
    GeometryFactors g;
    g.g_check.resize(n, 3);
    for (int r = 0; r < n; ++r)
    {
        const Vec3 d = user - anchors[r];
        const double norm = d.norm();
        if (!(norm > 0.0))
            throw NumericalError("user coincides with anchor " + std::to_string(r));
        g.g_check.row(r) = (d / norm).transpose();
    }
    const Eigen::Matrix3d gram = g.g_check.transpose() * g.g_check;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(gram, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues()(0);
    const double hi = eig.eigenvalues()(2);
    if (!(lo > 0.0) || hi / lo > kMaxGeometryCondition)
        throw NumericalError("degenerate anchor geometry (condition number of G^T G above 1e8)");
    g.g_pinv = gram.ldlt().solve(g.g_check.transpose());
    g.lambda = g.g_pinv.colwise().norm().transpose();
    return g;
}

double positioning_error(const Eigen::VectorXd& lambda, const Eigen::VectorXd& xi2, const Eigen::VectorXd& sigma2)
{
    if (lambda.size() != xi2.size() || lambda.size() != sigma2.size())
        throw std::invalid_argument("positioning error inputs differ in length");
    return positioning_error(lambda, xi2 + sigma2);
}

double positioning_error(const Eigen::VectorXd& lambda, const Eigen::VectorXd& total_var)
{
    if (lambda.size() != total_var.size())
        throw std::invalid_argument("positioning error inputs differ in length");
    return std::sqrt((lambda.array().square() * total_var.array()).sum());
}

double dp_noise_variance(double epsilon, double delta, double sensitivity)
{
    if (!(epsilon > 0.0))
        throw std::invalid_argument("epsilon must be > 0");
    if (!(delta > 0.0) || !(delta < 0.8))
        throw std::invalid_argument("delta must lie in (0, 4/5)");
    if (!(sensitivity >= 0.0))
        throw std::invalid_argument("sensitivity must be >= 0");
    return -2.0 * sensitivity * sensitivity / (epsilon * epsilon) * std::log(1.25 * delta);
}

double dp_delta_bound(double xi1_var, double epsilon, double sensitivity)
{
    if (!(sensitivity > 0.0))
        throw std::invalid_argument("sensitivity must be > 0");
    return 0.8 * std::exp(-xi1_var * epsilon * epsilon / (2.0 * sensitivity * sensitivity));
}

double min_anchor_variance(const Anchor& anchor)
{
    return anchor.sensor_var_m2 + dp_noise_variance(anchor.eps_min, anchor.delta_min, anchor.dp_sensitivity);
}

double min_anchor_variance(const Anchor& anchor, std::optional<double> override_m2)
{
    if (override_m2)
    {
        if (!(*override_m2 >= 0.0))
            throw std::invalid_argument("minimum anchor variance override must be >= 0");
        return *override_m2;
    }
    return min_anchor_variance(anchor);
}

Vec3 perturb_location(const Vec3& position, double xi1_var, CounterRng& rng)
{
    if (!(xi1_var >= 0.0))
        throw std::invalid_argument("location noise variance must be >= 0");
    const double sd = std::sqrt(xi1_var);
    Vec3 out = position;
    for (int a = 0; a < 3; ++a)
        out(a) += sd * rng.normal();
    return out;
}

} // namespace nrpos
