// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#pragma once

#include "nrpos/common.hpp"
#include "nrpos/config.hpp"

#include <Eigen/Core>

#include <vector>

namespace nrpos
{
struct Scenario;
struct IrsPanel;
class CounterRng;

using CVec = Eigen::VectorXcd;

struct Codebook
{
    std::vector<CVec> entries;
    int size() const { return static_cast<int>(entries.size()); }
};

// Direct gains per (numerology l, anchor j, user k, grid position), where grid position
// p = subcarrier index + kappa_bar runs over [0, N_l). IRS vectors are frequency flat.
struct ChannelRealization
{
    int num_anchors = 0;
    int num_users = 0;
    std::vector<std::vector<CVec>> direct; // [l][j * K + k] -> length N_l
    Eigen::MatrixXd beta;                  // J x K linear pathloss gain of the direct links
    std::vector<CVec> irs_user;            // [k] -> M0, includes sqrt(beta_LoS)
    std::vector<CVec> irs_anchor;          // [j] -> M0, includes sqrt(beta_LoS)

    const CVec& direct_gains(int l, int j, int k) const { return direct[l][j * num_users + k]; }
};

// Squared magnitudes of the composite channel for one IRS codeword
struct ChannelGains
{
    int num_anchors = 0;
    int num_users = 0;
    std::vector<std::vector<Eigen::VectorXd>> gain2; // [l][j * K + k] -> |h|^2 per grid position

    const Eigen::VectorXd& at(int l, int j, int k) const { return gain2[l][j * num_users + k]; }
};

// 3GPP indoor LoS probability; throws std::invalid_argument for negative distance.
double los_probability(double d2d_in_m, LosMode mode);

// LoS / NLoS pathloss in dB with the carrier converted to GHz; throws for d3d_m <= 0.
double pathloss_db(double d3d_m, double carrier_hz, bool los);

// beta = 10^(-PL/10) with PL = Pr_LoS PL_LoS + (1 - Pr_LoS) PL_NLoS, blended in dB
double expected_pathloss_gain(double d2d_m, double d3d_m, double carrier_hz, LosMode mode);
double expected_pathloss_gain(const Vec3& tx, const Vec3& rx, double carrier_hz, LosMode mode);

// Uniform planar array response, half-wavelength spacing, element index v * H + h
CVec steering_vector(double azimuth, double elevation, const IrsPanel& panel);

// Kronecker products of horizontal and vertical DFT columns, codeword c = cv * H + ch
Codebook kronecker_codebook(const IrsPanel& panel);

// h_direct + sum_m g_k[m] theta[m] conj(g_j[m]); throws std::invalid_argument on size mismatch
cd composite_channel(cd h_direct, const CVec& g_user, const CVec& theta, const CVec& g_anchor);

// Draws i.i.d. CN(0, beta) direct gains on every numerology grid plus deterministic LoS IRS links.
ChannelRealization draw_direct_channels(const Scenario& s, CounterRng& rng);

// Composite squared gains for codeword theta
ChannelGains compute_gains(const ChannelRealization& ch, const CVec& theta);

// l2 norm over the numerology-0 grid of the composite channel for every (k, j); length K * J
Eigen::VectorXd channel_norms(const ChannelRealization& ch, const CVec& theta);

} // namespace nrpos
