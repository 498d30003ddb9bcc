// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#include "nrpos/common.hpp"
#include "nrpos/oracles.hpp"
#include "nrpos/positioning.hpp"
#include "nrpos/rng.hpp"
#include "nrpos/scenario.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

using namespace nrpos;

TEST_CASE("orthonormal geometry", "[positioning]")
{
    const GeometryFactors g = geometry_factors(Vec3::Zero(), {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)});
    CHECK(g.g_check.isApprox(-Eigen::Matrix3d::Identity(), 0.0));
    CHECK(g.g_pinv.isApprox(-Eigen::Matrix3d::Identity(), 0.0));
    CHECK(g.lambda(0) == 1.0);
    CHECK(g.lambda(1) == 1.0);
    CHECK(g.lambda(2) == 1.0);
}

TEST_CASE("degenerate geometry is rejected", "[positioning]")
{
    const Vec3 u(0, 0, 0);
    REQUIRE_THROWS_AS(geometry_factors(u, {Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(3, 0, 0)}), NumericalError);
    REQUIRE_THROWS_AS(geometry_factors(u, {Vec3(1, 0, 0), Vec3(0, 1, 0)}), std::invalid_argument);
    REQUIRE_THROWS_AS(geometry_factors(u, {Vec3(0, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)}), NumericalError);
}

TEST_CASE("tetrahedron geometry matches a dense pseudo-inverse", "[positioning]")
{
    const std::vector<Vec3> a{Vec3(1, 1, 1), Vec3(1, -1, -1), Vec3(-1, 1, -1), Vec3(-1, -1, 1)};
    const Vec3 centroid = Vec3::Zero();
    const GeometryFactors g = geometry_factors(centroid, a);
    Eigen::MatrixXd gc(4, 3);
    for (int r = 0; r < 4; ++r)
        gc.row(r) = (centroid - a[r]).normalized().transpose();
    const Eigen::MatrixXd pinv = oracles::dense_pinv(gc);
    for (int r = 0; r < 4; ++r)
        CHECK(std::abs(g.lambda(r) - pinv.col(r).norm()) < 1e-10);

    CounterRng rng(8);
    for (int t = 0; t < 20; ++t)
    {
        std::vector<Vec3> anchors;
        for (int r = 0; r < 5; ++r)
            anchors.emplace_back(rng.uniform(0, 100), rng.uniform(0, 100), rng.uniform(0, 10));
        const Vec3 u(rng.uniform(0, 100), rng.uniform(0, 100), rng.uniform(0, 10));
        const GeometryFactors f = geometry_factors(u, anchors);
        Eigen::MatrixXd m(5, 3);
        for (int r = 0; r < 5; ++r)
            m.row(r) = (u - anchors[r]).normalized().transpose();
        const Eigen::MatrixXd p = oracles::dense_pinv(m);
        for (int r = 0; r < 5; ++r)
            REQUIRE(std::abs(f.lambda(r) - p.col(r).norm()) <= 1e-9 * p.col(r).norm());
    }
}

TEST_CASE("positioning error", "[positioning]")
{
    const Eigen::Vector3d lam(1, 1, 1);
    CHECK(positioning_error(lam, Eigen::Vector3d::Zero(), Eigen::Vector3d::Constant(0.01)) ==
          Catch::Approx(std::sqrt(0.03)).epsilon(1e-15));
    CHECK(positioning_error(lam, Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()) == 0.0);
    const Eigen::Vector3d l2(0.7, 1.3, 2.1), xi(0.005, 0.01, 0.002), s2(0.02, 0.3, 0.04);
    CHECK(positioning_error(l2, 4 * xi, 4 * s2) == Catch::Approx(2 * positioning_error(l2, xi, s2)).epsilon(1e-14));
    REQUIRE_THROWS_AS(positioning_error(lam, Eigen::Vector2d::Zero(), Eigen::Vector3d::Zero()), std::invalid_argument);
}

TEST_CASE("differential privacy noise calibration", "[privacy]")
{
    CHECK(dp_noise_variance(1.0, 0.05, 1.0) == Catch::Approx(-2.0 * std::log(0.0625)).epsilon(1e-14));
    CHECK(dp_noise_variance(1.0, 0.05, 1.0) == Catch::Approx(5.5452).margin(1e-4));
    CHECK(dp_noise_variance(2.0, 0.05, 1.0) == Catch::Approx(5.5452 / 4).margin(1e-4));
    CHECK(dp_noise_variance(1.0, 0.8 - 1e-12, 1.0) < 1e-11);
    REQUIRE_THROWS_AS(dp_noise_variance(1.0, 0.8, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(dp_noise_variance(1.0, 0.0, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(dp_noise_variance(0.0, 0.05, 1.0), std::invalid_argument);

    CounterRng r(3);
    for (int t = 0; t < 100; ++t)
    {
        const double eps = r.uniform(0.1, 5.0), delta = r.uniform(1e-6, 0.79), sens = r.uniform(0.1, 10.0);
        const double v = dp_noise_variance(eps, delta, sens);
        REQUIRE(std::abs(dp_delta_bound(v, eps, sens) - delta) <= 1e-12 * delta);
    }
}

TEST_CASE("minimum anchor variance", "[privacy]")
{
    Anchor a;
    a.sensor_var_m2 = 0.0;
    CHECK(min_anchor_variance(a) == Catch::Approx(5.5452).margin(1e-4));
    a.sensor_var_m2 = 0.25;
    a.dp_sensitivity = 0.0;
    CHECK(min_anchor_variance(a) == 0.25);
    CHECK(min_anchor_variance(a, 0.005) == 0.005);
    CHECK(min_anchor_variance(a, std::nullopt) == 0.25);
}

TEST_CASE("location perturbation statistics", "[privacy]")
{
    CounterRng r(12);
    const Vec3 p(10, 20, 3);
    CHECK(perturb_location(p, 0.0, r) == p);
    const int n = 100000;
    const double var = 0.5;
    Eigen::Vector3d sum = Eigen::Vector3d::Zero(), sum2 = Eigen::Vector3d::Zero();
    for (int t = 0; t < n; ++t)
    {
        const Vec3 d = perturb_location(p, var, r) - p;
        sum += d;
        sum2 += d.cwiseProduct(d);
    }
    for (int ax = 0; ax < 3; ++ax)
    {
        CHECK(std::abs(sum(ax) / n) <= 3.0 * std::sqrt(var / n));
        CHECK(sum2(ax) / n == Catch::Approx(var).epsilon(0.03));
    }
    REQUIRE_THROWS_AS(perturb_location(p, -1.0, r), std::invalid_argument);
}
