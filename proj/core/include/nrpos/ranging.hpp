// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#pragma once

#include "nrpos/channel.hpp"
#include "nrpos/common.hpp"

#include <Eigen/Core>

#include <memory>
#include <mutex>
#include <vector>

namespace nrpos
{
struct Scenario;

// Decision variables of the full problem. power_w is per active subcarrier.
struct AssignmentState
{
    Eigen::MatrixXi assoc_x;      // J x K
    Eigen::MatrixXi numerology_u; // J x L
    Eigen::MatrixXi offset_v;     // J x comb
    Eigen::VectorXd power_w;      // J
    Eigen::VectorXd anchor_var_m2; // J
    int beam_index = 0;

    static AssignmentState empty(int num_anchors, int num_users, int numerology_count, int comb_size);

    int num_anchors() const { return static_cast<int>(assoc_x.rows()); }
    int num_users() const { return static_cast<int>(assoc_x.cols()); }
    int numerology_of(int j) const; // -1 when none selected
    int offset_of(int j) const;     // -1 when none selected
    void assign(int j, int l, int i);
    std::vector<int> anchors_of(int k) const;
    std::vector<int> users_of(int j) const;

    bool operator==(const AssignmentState& o) const;
};

// Per-link variance in the posynomial form sigma2 = c0 / p_j + sum_j' cross(j') p_j' / p_j, in m^2
struct RangingTerms
{
    double c0 = 0.0;
    Eigen::VectorXd cross; // length J, zero at j
};

struct RangingReport
{
    Eigen::MatrixXd sigma2; // J x K, m^2; every pair is evaluated regardless of association
};

// Evaluates PSDs and ranging variances for one scenario and channel realization. Composite
// gains are computed lazily per codeword and kept for the lifetime of the model.
class RangingModel
{
public:
    RangingModel(const Scenario& s, const ChannelRealization& ch);

    const Scenario& scenario() const { return *scenario_; }
    const ChannelRealization& channels() const { return *channels_; }
    const Codebook& codebook() const { return codebook_; }
    const ChannelGains& gains(int beam_index) const;

    double halfband_hz() const;
    double q_value(int l, int grid_pos) const { return q_[l](grid_pos); }

    // Received PSD of anchor j at user k on symbol m; normalized divides by the total mass
    double psd_value(double f, int j, int k, int m, const AssignmentState& st, bool normalized) const;
    double interference_psd(double f, int j, int k, int m, const AssignmentState& st) const;

    // Delay-tracking variance in m^2 averaged over the numerology-0 slot m_prime
    double ranging_variance_A(int j, int k, int m_prime, const AssignmentState& st) const;
    double ranging_variance_zeta(int j, int k, int m_prime, const AssignmentState& st) const;

    // Coefficient of 1 / p_j, and of p_j' / p_j, for victim (j, l_j, i_j) and interferer (j', l', i')
    double noise_term(int j, int k, int l_j, int i_j, int beam, int m_prime) const;
    double cross_term(int j, int k, int l_j, int i_j, int jp, int l_p, int i_p, int beam, int m_prime) const;

    RangingTerms ranging_terms(int j, int k, int m_prime, const AssignmentState& st) const;
    RangingReport report(const AssignmentState& st, int m_prime = 0) const;

    // C values between interferer subcarriers (rows) and victim subcarriers (cols)
    std::shared_ptr<const Eigen::MatrixXd> c_matrix(int l_victim, int r_victim, int l_interf, int r_interf) const;

private:
    struct Link;
    Link victim_link(int j, int k, int m, const AssignmentState& st) const;
    Link victim_link(int j, int k, int m, int l, int i, int beam) const;
    int symbol_alignment(int l_victim, int l_interf) const;

    const Scenario* scenario_;
    const ChannelRealization* channels_;
    Codebook codebook_;
    std::vector<Eigen::VectorXd> q_; // [l] -> Q per grid position
    mutable std::mutex gains_mutex_;
    mutable std::vector<std::unique_ptr<ChannelGains>> gains_;
};

// Drops every cached C matrix
void clear_c_matrix_cache();
std::size_t c_matrix_cache_size();

} // namespace nrpos
