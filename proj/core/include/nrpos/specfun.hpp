// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#pragma once

#include <array>

namespace nrpos
{
struct NumerologyConfig;

// Si(x) = int_0^x sin t / t dt
double si(double x);

// Cin(x) = int_0^x (1 - cos t) / t dt, the entire cosine integral
double cin(double x);

// Si and Cin evaluated together (they share the continued fraction for |x| > 2)
void si_cin(double x, double& si_out, double& cin_out);

struct SincIntegralParams
{
    double center_a = 0.0; // n * scs_l
    double center_b = 0.0; // n_j * scs_lj
    double period_a = 0.0; // T_l
    double period_b = 0.0; // T_lj
    double halfband = 0.0; // B_e / 2
};

enum class PoleCase
{
    distinct,
    equal
};

// f^2 / ((f-a)^2 (f-b)^2) = d0/(f-a) + d1/(f-a)^2 + d2/(f-b) + d3/(f-b)^2        (distinct)
// f^2 / (f-a)^4           = d4/(f-a)^2 + d5/(f-a)^3 + d6/(f-a)^4                   (equal)
struct PartialFractionCoeffs
{
    PoleCase case_tag = PoleCase::distinct;
    std::array<double, 4> d{}; // d0..d3
    std::array<double, 3> e{}; // d4..d6
};

PartialFractionCoeffs partial_fractions(double center_a, double center_b);

// Integrals over [-halfband, halfband] of
//   kind 0: sin(a x + b) / (x - c)
//   kind 1: cos(a x + b) / (x - c)
//   kind k in 2..4: cos(a x + b) / (x - c)^k
// The pole must lie outside the closed interval.
double e_primitive(int kind, double halfband, double a, double b, double c);

// Q = int_{-h}^{h} f^2 sinc^2((f - center) T) df
double q_closed(double center_hz, double period_s, double halfband);
double q_closed(int n, const NumerologyConfig& numerology, double halfband);

// C = int_{-h}^{h} f^2 sinc^2((f - a) T_a) sinc^2((f - b) T_b) df
double c_closed(const SincIntegralParams& p);

// Adaptive Gauss-Kronrod references, panels split at every sinc zero
double q_quadrature(double center_hz, double period_s, double halfband);
double q_quadrature(int n, const NumerologyConfig& numerology, double halfband);
double c_quadrature(const SincIntegralParams& p);

namespace detail
{
// Finite-part (Hadamard) versions of the five primitives; the pole may be interior.
std::array<double, 5> e_primitives_fp(double halfband, double a, double b, double c);
} // namespace detail

} // namespace nrpos
