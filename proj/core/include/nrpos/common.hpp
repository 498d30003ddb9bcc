// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#pragma once

#include <Eigen/Core>
#include <complex>
#include <stdexcept>
#include <string>

namespace nrpos
{
using Vec3 = Eigen::Vector3d;
using cd = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;
constexpr double kSpeedOfLight = 299792458.0;

// Invalid or inconsistent configuration (CLI exit code 2)
class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Numerical failure: degenerate geometry, non-convergence, infeasibility (CLI exit code 3)
class NumericalError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace nrpos
