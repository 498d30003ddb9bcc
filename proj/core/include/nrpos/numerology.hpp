// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#pragma once

#include <vector>

namespace nrpos
{
struct Scenario;

struct NumerologyConfig
{
    int index_l = 0;
    double scs_hz = 15000.0;      // 2^l * 15 kHz
    double symbol_s = 1.0 / 15e3; // T_l = 1 / scs
    int n_subcarriers = 0;        // N_l
    int n_active = 0;             // N_{l,a} = N_l / comb
};

struct CombAssignment
{
    int offset_index_i = 0;
    int symbol_index_m = 0;
    int numerology_l = 0;
};

double subcarrier_spacing_hz(int l);

// N_l is the largest multiple of comb_size that fits in the bandwidth.
// Throws std::invalid_argument when l is outside [0, 6] or the band holds no full comb group.
NumerologyConfig numerology_params(int l, double bandwidth_hz, int comb_size);

// kappa_m before the band-centre shift; asserts the half-integer terms combine to an integer.
int comb_symbol_shift(int m, int comb_size);

// kappa_bar = floor(B / (2 scs))
int band_centre_shift(int l, double bandwidth_hz);

// kappa_{m,i} = mod(i + kappa_m, comb) - kappa_bar
int comb_offset(int m, int i, int l, double bandwidth_hz, int comb_size);

// mod(i + kappa_m, comb): residue class actually occupied on symbol m
int comb_residue(int m, int i, int comb_size);

// {comb * n + kappa_{m,i} : 0 <= n < N_{l,a}}, ascending
std::vector<int> prs_subcarriers(int m, int i, int l, double bandwidth_hz, int comb_size);
std::vector<int> prs_subcarriers(int m, int i, int l, const Scenario& s);

// (comb * n_index + kappa_{m,i}) * scs
double subcarrier_frequency(int n_index, int m, int i, int l, double bandwidth_hz, int comb_size);
double subcarrier_frequency(int n_index, int m, int i, int l, const Scenario& s);

} // namespace nrpos
