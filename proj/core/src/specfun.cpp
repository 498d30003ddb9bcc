// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#include "nrpos/specfun.hpp"

#include "nrpos/common.hpp"
#include "nrpos/numerology.hpp"
#include "nrpos/oracles.hpp"


#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace nrpos
{

namespace
{
constexpr double kEulerGamma = 0.57721566490153286061;

// Power series, accurate for |x| <= 2
void si_cin_series(double x, double& s, double& c)
{
    const double x2 = x * x;
    double term = x; // x^(2k+1) / (2k+1)!
    s = 0.0;
    for (int k = 0; k < 60; ++k)
    {
        const double add = term / (2 * k + 1);
        s += add;
        if (std::abs(add) < 1e-18 * std::abs(s))
            break;
        term *= -x2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
    }
    term = x2 / 2.0; // x^(2k) / (2k)!
    c = 0.0;
    for (int k = 1; k < 60; ++k)
    {
        const double add = term / (2 * k);
        c += add;
        if (std::abs(add) < 1e-18 * std::abs(c))
            break;
        term *= -x2 / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
    }
}

// Lentz continued fraction for E1(i x), x > 2
void si_ci_fraction(double x, double& s, double& ci)
{
    using std::complex;
    constexpr double tiny = 1e-300;
    complex<double> b(1.0, x);
    complex<double> c(1.0 / tiny, 0.0);
    complex<double> d = 1.0 / b;
    complex<double> h = d;
    for (int i = 2; i < 100000; ++i)
    {
        const double a = -static_cast<double>((i - 1) * (i - 1));
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const complex<double> del = c * d;
        h *= del;
        if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < 1e-16)
            break;
    }
    h *= complex<double>(std::cos(x), -std::sin(x));
    ci = -h.real();
    s = kPi / 2.0 + h.imag();
}

double sinc_pi(double x)
{
    if (std::abs(x) < 1e-8)
        return 1.0 - (kPi * x) * (kPi * x) / 6.0;
    return std::sin(kPi * x) / (kPi * x);
}

void check_params(const SincIntegralParams& p)
{
    if (!(p.period_a > 0.0) || !(p.period_b > 0.0))
        throw std::invalid_argument("sinc integral periods must be > 0");
    if (!(p.halfband > 0.0))
        throw std::invalid_argument("sinc integral halfband must be > 0");
}

bool on_edge(double c, double h)
{
    const double tol = 1e-12 * std::max(h, 1.0);
    return std::abs(c - h) <= tol || std::abs(c + h) <= tol;
}
} // namespace

void si_cin(double x, double& si_out, double& cin_out)
{
    const double ax = std::abs(x);
    if (ax <= 2.0)
    {
        si_cin_series(ax, si_out, cin_out);
    }
    else
    {
        double ci;
        si_ci_fraction(ax, si_out, ci);
        cin_out = kEulerGamma + std::log(ax) - ci;
    }
    if (x < 0.0)
        si_out = -si_out;
}

double si(double x)
{
    double s, c;
    si_cin(x, s, c);
    return s;
}

double cin(double x)
{
    double s, c;
    si_cin(x, s, c);
    return c;
}

PartialFractionCoeffs partial_fractions(double a, double b)
{
    PartialFractionCoeffs out;
    const double scale = std::max({std::abs(a), std::abs(b), 1.0});
    if (std::abs(a - b) < 1e-9 * scale)
    {
        out.case_tag = PoleCase::equal;
        out.e = {1.0, 2.0 * a, a * a};
        return out;
    }
    out.case_tag = PoleCase::distinct;
    // Closed-form solution of the 4x4 coefficient system: squaring
    // f / ((f-a)(f-b)) = (a/(a-b)) / (f-a) - (b/(a-b)) / (f-b)
    const double inv = 1.0 / (a - b);
    const double ra = a * inv, rb = b * inv;
    out.d = {-2.0 * ra * rb * inv, ra * ra, 2.0 * ra * rb * inv, rb * rb};
    return out;
}

namespace detail
{
std::array<double, 5> e_primitives_fp(double h, double a, double b, double c)
{
    const double y1 = -h - c, y2 = h - c;
    if (y1 == 0.0 || y2 == 0.0)
        throw NumericalError("primitive pole on the band edge");
    double s1, c1, s2, c2;
    si_cin(a * y1, s1, c1);
    si_cin(a * y2, s2, c2);
    const double phi = a * c + b;
    const double cphi = std::cos(phi), sphi = std::sin(phi);
    // int cos(a y)/y dy (principal value when y1 < 0 < y2) and int sin(a y)/y dy
    const double cos_part = std::log(std::abs(y2 / y1)) - (c2 - c1);
    const double sin_part = s2 - s1;

    std::array<double, 5> e{};
    e[0] = sphi * cos_part + cphi * sin_part;
    e[1] = cphi * cos_part - sphi * sin_part;

    const double cu = std::cos(a * h + b), su = std::sin(a * h + b);
    const double cl = std::cos(-a * h + b), sl = std::sin(-a * h + b);
    // bracket [g(x)]_{-h}^{h}
    auto br = [&](double gu, double gl) { return gu - gl; };
    e[2] = br(-cu / y2, -cl / y1) - a * e[0];
    e[3] = br(-cu / (2.0 * y2 * y2) + a * su / (2.0 * y2), -cl / (2.0 * y1 * y1) + a * sl / (2.0 * y1)) -
           0.5 * a * a * e[1];
    e[4] = br(-cu / (3.0 * y2 * y2 * y2) + a * su / (6.0 * y2 * y2) + a * a * cu / (6.0 * y2),
              -cl / (3.0 * y1 * y1 * y1) + a * sl / (6.0 * y1 * y1) + a * a * cl / (6.0 * y1)) +
           a * a * a / 6.0 * e[0];
    return e;
}
} // namespace detail

double e_primitive(int kind, double halfband, double a, double b, double c)
{
    if (kind < 0 || kind > 4)
        throw std::invalid_argument("primitive kind must be in [0, 4]");
    if (!(halfband > 0.0))
        throw std::invalid_argument("halfband must be > 0");
    if (c >= -halfband && c <= halfband)
        throw std::invalid_argument("primitive pole lies inside the integration interval");
    return detail::e_primitives_fp(halfband, a, b, c)[kind];
}

double q_closed(double center, double period, double halfband)
{
    if (!(period > 0.0) || !(halfband > 0.0))
        throw std::invalid_argument("q_closed requires period > 0 and halfband > 0");
    if (on_edge(center, halfband))
        throw NumericalError("subcarrier centre on the front-end band edge");
    const double T = period;
    const double s = center * T;            // n * scs * T
    const double q2 = (halfband - center) * T; // upper limit in q
    const double q1 = (-halfband - center) * T;
    // b0 = int sin^2(pi q) dq
    const double b0 = 0.5 * (q2 - q1) - (std::sin(2.0 * kPi * q2) - std::sin(2.0 * kPi * q1)) / (4.0 * kPi);
    // b1 = s * int (1 - cos 2 pi q) / q dq; the printed log and Ci differences collapse to Cin
    const double b1 = s * (cin(2.0 * kPi * q2) - cin(2.0 * kPi * q1));
    // b2 = s^2 * int sin^2(pi q) / q^2 dq
    const double sq2 = std::sin(kPi * q2), sq1 = std::sin(kPi * q1);
    const double b2 =
        s * s * (kPi * (si(2.0 * kPi * q2) - si(2.0 * kPi * q1)) - sq2 * sq2 / q2 + sq1 * sq1 / q1);
    return (b0 + b1 + b2) / (T * T * T * kPi * kPi);
}

double q_closed(int n, const NumerologyConfig& nc, double halfband)
{
    return q_closed(n * nc.scs_hz, nc.symbol_s, halfband);
}

double c_closed(const SincIntegralParams& p)
{
    check_params(p);
    const double h = p.halfband;
    const double a = p.center_a, b = p.center_b;
    const double Ta = p.period_a, Tb = p.period_b;
    if (on_edge(a, h) || on_edge(b, h))
        throw NumericalError("subcarrier centre on the front-end band edge");

    // 4 sin^2(pi (f-a) Ta) sin^2(pi (f-b) Tb)
    //   = 1 + cos(A-B)/2 + cos(A+B)/2 - cos A - cos B,  A = 2 pi Ta (f-a), B = 2 pi Tb (f-b)
    struct Term
    {
        double weight, alpha, beta;
    };
    const std::array<Term, 5> terms{{
        {1.0, 0.0, 0.0},
        {0.5, 2.0 * kPi * (Ta - Tb), -2.0 * kPi * a * Ta + 2.0 * kPi * b * Tb},
        {0.5, 2.0 * kPi * (Ta + Tb), -2.0 * kPi * a * Ta - 2.0 * kPi * b * Tb},
        {-1.0, 2.0 * kPi * Ta, -2.0 * kPi * a * Ta},
        {-1.0, 2.0 * kPi * Tb, -2.0 * kPi * b * Tb},
    }};

    const PartialFractionCoeffs pf = partial_fractions(a, b);
    // Each term is a finite-part integral; the divergent parts cancel across the five terms.
    double sum = 0.0;
    for (const Term& t : terms)
    {
        double cz;
        if (pf.case_tag == PoleCase::distinct)
        {
            const auto ea = detail::e_primitives_fp(h, t.alpha, t.beta, a);
            const auto eb = detail::e_primitives_fp(h, t.alpha, t.beta, b);
            cz = pf.d[0] * ea[1] + pf.d[1] * ea[2] + pf.d[2] * eb[1] + pf.d[3] * eb[2];
        }
        else
        {
            const auto ea = detail::e_primitives_fp(h, t.alpha, t.beta, a);
            cz = pf.e[0] * ea[2] + pf.e[1] * ea[3] + pf.e[2] * ea[4];
        }
        sum += t.weight * cz;
    }
    const double pi2 = kPi * kPi;
    return sum / (4.0 * pi2 * pi2 * Ta * Ta * Tb * Tb);
}

double q_quadrature(double center, double period, double halfband)
{
    if (!(period > 0.0) || !(halfband > 0.0))
        throw std::invalid_argument("q_quadrature requires period > 0 and halfband > 0");
    std::vector<double> breaks;
    const double k_lo = std::ceil((-halfband - center) * period);
    const double k_hi = std::floor((halfband - center) * period);
    for (double k = k_lo; k <= k_hi; k += 1.0)
        breaks.push_back(center + k / period);
    auto f = [&](double x) {
        const double s = sinc_pi((x - center) * period);
        return x * x * s * s;
    };
    return oracles::adaptive_quadrature(f, -halfband, halfband, breaks, 1e-12).value;
}

double q_quadrature(int n, const NumerologyConfig& nc, double halfband)
{
    return q_quadrature(n * nc.scs_hz, nc.symbol_s, halfband);
}

double c_quadrature(const SincIntegralParams& p)
{
    check_params(p);
    const double h = p.halfband;
    std::vector<double> breaks;
    for (const auto& [centre, T] : {std::pair{p.center_a, p.period_a}, std::pair{p.center_b, p.period_b}})
    {
        const double k_lo = std::ceil((-h - centre) * T);
        const double k_hi = std::floor((h - centre) * T);
        for (double k = k_lo; k <= k_hi; k += 1.0)
            breaks.push_back(centre + k / T);
    }
    auto f = [&](double x) {
        const double s1 = sinc_pi((x - p.center_a) * p.period_a);
        const double s2 = sinc_pi((x - p.center_b) * p.period_b);
        return x * x * s1 * s1 * s2 * s2;
    };
    return oracles::adaptive_quadrature(f, -h, h, breaks, 1e-12).value;
}

} // namespace nrpos
