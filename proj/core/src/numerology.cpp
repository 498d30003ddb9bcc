// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#include "nrpos/numerology.hpp"

#include "nrpos/common.hpp"
#include "nrpos/scenario.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nrpos
{

namespace
{
int pos_mod(int a, int n)
{
    const int r = a % n;
    return r < 0 ? r + n : r;
}

void check_l(int l)
{
    if (l < 0 || l > 6)
        throw std::invalid_argument("numerology index must be in [0, 6], got " + std::to_string(l));
}

void check_comb(int comb_size)
{
    if (comb_size < 1)
        throw std::invalid_argument("comb size must be >= 1");
}
} // namespace

double subcarrier_spacing_hz(int l)
{
    check_l(l);
    return std::ldexp(15000.0, l);
}

NumerologyConfig numerology_params(int l, double bandwidth_hz, int comb_size)
{
    check_comb(comb_size);
    NumerologyConfig c;
    c.index_l = l;
    c.scs_hz = subcarrier_spacing_hz(l);
    c.symbol_s = 1.0 / c.scs_hz;
    const double groups = std::floor(bandwidth_hz / (comb_size * c.scs_hz));
    if (!(groups >= 1.0))
        throw std::invalid_argument("bandwidth " + std::to_string(bandwidth_hz) + " Hz holds no comb group of size " +
                                    std::to_string(comb_size) + " at numerology " + std::to_string(l));
    c.n_subcarriers = comb_size * static_cast<int>(groups);
    c.n_active = c.n_subcarriers / comb_size;
    return c;
}

int comb_symbol_shift(int m, int comb_size)
{
    check_comb(comb_size);
    if (m < 0)
        throw std::invalid_argument("symbol index must be >= 0");
    const int r = m % comb_size;
    const double kappa = r / 2.0 + 0.75 * (1.0 - ((r % 2 == 0) ? 1.0 : -1.0));
    const double rounded = std::round(kappa);
    if (std::abs(kappa - rounded) > 1e-12)
        throw NumericalError("comb symbol shift is not an integer for m=" + std::to_string(m));
    return static_cast<int>(rounded);
}

int band_centre_shift(int l, double bandwidth_hz)
{
    return static_cast<int>(std::floor(bandwidth_hz / (2.0 * subcarrier_spacing_hz(l))));
}

int comb_residue(int m, int i, int comb_size)
{
    check_comb(comb_size);
    if (i < 0 || i >= comb_size)
        throw std::invalid_argument("comb offset index must be in [0, comb_size)");
    return pos_mod(i + comb_symbol_shift(m, comb_size), comb_size);
}

int comb_offset(int m, int i, int l, double bandwidth_hz, int comb_size)
{
    return comb_residue(m, i, comb_size) - band_centre_shift(l, bandwidth_hz);
}

std::vector<int> prs_subcarriers(int m, int i, int l, double bandwidth_hz, int comb_size)
{
    const NumerologyConfig nc = numerology_params(l, bandwidth_hz, comb_size);
    const int k = comb_offset(m, i, l, bandwidth_hz, comb_size);
    std::vector<int> out(nc.n_active);
    for (int n = 0; n < nc.n_active; ++n)
        out[n] = comb_size * n + k;
    return out;
}

std::vector<int> prs_subcarriers(int m, int i, int l, const Scenario& s)
{
    return prs_subcarriers(m, i, l, s.bandwidth_hz, s.comb_size);
}

double subcarrier_frequency(int n_index, int m, int i, int l, double bandwidth_hz, int comb_size)
{
    const NumerologyConfig nc = numerology_params(l, bandwidth_hz, comb_size);
    if (n_index < 0 || n_index >= nc.n_active)
        throw std::invalid_argument("subcarrier index outside [0, N_{l,a})");
    return (comb_size * n_index + comb_offset(m, i, l, bandwidth_hz, comb_size)) * subcarrier_spacing_hz(l);
}

double subcarrier_frequency(int n_index, int m, int i, int l, const Scenario& s)
{
    return subcarrier_frequency(n_index, m, i, l, s.bandwidth_hz, s.comb_size);
}

} // namespace nrpos
