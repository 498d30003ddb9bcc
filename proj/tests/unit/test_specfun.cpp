// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#include "nrpos/common.hpp"
#include "nrpos/numerology.hpp"
#include "nrpos/oracles.hpp"
#include "nrpos/rng.hpp"
#include "nrpos/specfun.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <array>

#include <cmath>
#include <stdexcept>

using namespace nrpos;

namespace
{
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double sinc_ref(double x) { return x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x); }
} // namespace

TEST_CASE("sine integral", "[specfun]")
{
    CHECK(si(0.0) == 0.0);
    CHECK(si(kPi) == Catch::Approx(1.8519370).margin(1e-7));
    CHECK(si(1e4) == Catch::Approx(kPi / 2).margin(1e-3));
    CounterRng r(1);
    for (int t = 0; t < 50; ++t)
    {
        const double x = r.uniform(0.0, 40.0);
        const auto q = oracles::adaptive_quadrature([](double u) { return u == 0.0 ? 1.0 : std::sin(u) / u; }, 0.0, x,
                                                    {}, 1e-13);
        REQUIRE(rel(si(x), q.value) < 1e-10);
        REQUIRE(si(-x) == -si(x));
    }
}

TEST_CASE("entire cosine integral", "[specfun]")
{
    CHECK(cin(0.0) == 0.0);
    CHECK(cin(1.0) == Catch::Approx(0.2398117).margin(1e-7));
    CounterRng r(2);
    for (int t = 0; t < 50; ++t)
    {
        const double x = r.uniform(0.01, 40.0);
        REQUIRE(cin(-x) == cin(x));
        const auto q = oracles::adaptive_quadrature(
            [](double u) { return u < 1e-4 ? u / 2 - u * u * u / 24 : (1.0 - std::cos(u)) / u; }, 0.0, x, {}, 1e-13);
        REQUIRE(rel(cin(x), q.value) < 1e-10);
    }
}

TEST_CASE("partial fractions", "[specfun]")
{
    const PartialFractionCoeffs eq = partial_fractions(30e3, 30e3);
    REQUIRE(eq.case_tag == PoleCase::equal);
    CHECK(eq.e[0] == 1.0);
    CHECK(eq.e[1] == 6e4);
    CHECK(eq.e[2] == 9e8);

    CounterRng r(3);
    for (int t = 0; t < 20; ++t)
    {
        // subcarrier centres live on the 15 kHz grid
        const double a = (static_cast<double>(r.below(267)) - 133) * 15e3;
        double b = (static_cast<double>(r.below(267)) - 133) * 15e3;
        if (b == a)
            b += 15e3;
        const PartialFractionCoeffs pf = partial_fractions(a, b);
        REQUIRE(pf.case_tag == PoleCase::distinct);
        // coefficients solve the defining linear system (dense LU oracle)
        // solved in units of |a - b| so the system is well scaled
        const double u = std::abs(a - b), as = a / u, bs = b / u;
        Eigen::Matrix4d m;
        m << 1, 0, 1, 0, as - bs, 1, 0, 1, bs * bs - as * as, -2 * bs, 0, -2 * as, as * as * bs - as * bs * bs, bs * bs,
            0, as * as;
        Eigen::Vector4d sol = m.fullPivLu().solve(Eigen::Vector4d(0, 1, 0, 0));
        sol(0) /= u;
        sol(2) /= u;
        const double unit[4] = {1.0 / std::abs(a - b), 1.0, 1.0 / std::abs(a - b), 1.0};
        for (int c = 0; c < 4; ++c)
            REQUIRE(std::abs(pf.d[c] - sol(c)) <= 1e-9 * std::max(std::abs(sol(c)), unit[c]));
        for (int s = 0; s < 20; ++s)
        {
            const double f = r.uniform(-4e6, 4e6);
            const double lhs = f * f / ((f - a) * (f - a) * (f - b) * (f - b));
            const std::array<double, 4> terms{pf.d[0] / (f - a), pf.d[1] / ((f - a) * (f - a)), pf.d[2] / (f - b),
                                              pf.d[3] / ((f - b) * (f - b))};
            const double rhs = terms[0] + terms[1] + terms[2] + terms[3];
            // the terms cancel near f = 0, so the error is scaled by their magnitude
            const double mag = std::abs(terms[0]) + std::abs(terms[1]) + std::abs(terms[2]) + std::abs(terms[3]);
            REQUIRE(std::abs(rhs - lhs) <= 1e-9 * std::max(std::abs(lhs), mag));
        }
    }

    const PartialFractionCoeffs sym = partial_fractions(45e3, -45e3);
    CHECK(sym.d[0] == Catch::Approx(-sym.d[2]).epsilon(1e-12));
    CHECK(sym.d[1] == Catch::Approx(sym.d[3]).epsilon(1e-12));
}

TEST_CASE("E primitives", "[specfun]")
{
    const double h = 1e6;
    const double c = 2 * h;
    CHECK(e_primitive(1, h, 0.0, 0.0, c) == Catch::Approx(std::log(std::abs((h - c) / (-h - c)))).epsilon(1e-14));

    CounterRng r(4);
    for (int t = 0; t < 20; ++t)
    {
        const double a = r.uniform(-2e-4, 2e-4), b = r.uniform(-3.0, 3.0);
        const double cc = (r.uniform() < 0.5 ? -1.0 : 1.0) * r.uniform(1.05 * h, 3 * h);
        CHECK(e_primitive(0, h, a, b + kPi, cc) == Catch::Approx(-e_primitive(0, h, a, b, cc)).epsilon(1e-10));
        for (int kind = 0; kind <= 4; ++kind)
        {
            auto f = [&](double x) {
                const double den = std::pow(x - cc, kind == 0 ? 1 : (kind == 1 ? 1 : kind));
                return (kind == 0 ? std::sin(a * x + b) : std::cos(a * x + b)) / den;
            };
            const double ref = oracles::adaptive_quadrature(f, -h, h, {}, 1e-13).value;
            const double scale = oracles::adaptive_quadrature([&](double x) { return std::abs(f(x)); }, -h, h, {}, 1e-12)
                                     .value;
            REQUIRE(std::abs(e_primitive(kind, h, a, b, cc) - ref) <= 1e-7 * scale);
        }
    }
    REQUIRE_THROWS_AS(e_primitive(0, h, 1.0, 0.0, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(e_primitive(5, h, 1.0, 0.0, 3 * h), std::invalid_argument);
}

TEST_CASE("Q closed form", "[specfun]")
{
    const NumerologyConfig n0 = numerology_params(0, 4e6, 4);
    const double h = 4e6;
    // n = 0 leaves only the b0 term
    const double T = n0.symbol_s;
    const double b0 = h * T - std::sin(2 * kPi * h * T) / (2 * kPi);
    CHECK(q_closed(0, n0, h) == Catch::Approx(b0 / (T * T * T * kPi * kPi)).epsilon(1e-12));

    CounterRng r(5);
    for (int t = 0; t < 30; ++t)
    {
        const int l = static_cast<int>(r.below(3));
        const NumerologyConfig nc = numerology_params(l, 4e6, 2);
        const double be = r.uniform(1.0, 3.0) * 4e6;
        const int kb = band_centre_shift(l, 4e6);
        const int n = static_cast<int>(r.below(nc.n_subcarriers)) - kb;
        const double ref = oracles::adaptive_quadrature(
                               [&](double f) {
                                   const double s = sinc_ref((f - n * nc.scs_hz) * nc.symbol_s);
                                   return f * f * s * s;
                               },
                               -be / 2, be / 2, {n * nc.scs_hz}, 1e-12)
                               .value;
        const double q = q_closed(n, nc, be / 2);
        REQUIRE(q > 0.0);
        REQUIRE(rel(q, ref) < 1e-6);
        REQUIRE(rel(q_quadrature(n, nc, be / 2), ref) < 1e-8);
    }
}

TEST_CASE("C closed form", "[specfun]")
{
    const double h = 4e6;
    // equal centres and periods: integral of f^2 sinc^4
    SincIntegralParams eq{45e3, 45e3, 1 / 15e3, 1 / 15e3, h};
    const double ref_eq = oracles::adaptive_quadrature(
                              [&](double f) {
                                  const double s = sinc_ref((f - 45e3) / 15e3);
                                  return f * f * s * s * s * s;
                              },
                              -h, h, {45e3}, 1e-12)
                              .value;
    CHECK(rel(c_closed(eq), ref_eq) < 1e-5);

    SincIntegralParams p{-120e3, 300e3, 1 / 15e3, 1 / 30e3, h};
    SincIntegralParams q{p.center_b, p.center_a, p.period_b, p.period_a, h};
    CHECK(c_closed(p) == Catch::Approx(c_closed(q)).epsilon(1e-10));
    CHECK(c_quadrature(p) == Catch::Approx(c_quadrature(q)).epsilon(1e-10));

    // mixed numerology, T_l = 2 T_lj
    CounterRng r(6);
    for (int t = 0; t < 20; ++t)
    {
        const double ta = 1 / 15e3, tb = 1 / 30e3;
        SincIntegralParams m{(static_cast<double>(r.below(200)) - 100) * 15e3,
                             (static_cast<double>(r.below(100)) - 50) * 30e3, ta, tb, h};
        const double c = c_closed(m);
        REQUIRE(c > 0.0);
        REQUIRE(rel(c, c_quadrature(m)) < 1e-5);
    }
}
