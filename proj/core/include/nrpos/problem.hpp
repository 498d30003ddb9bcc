// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#pragma once

#include "nrpos/channel.hpp"
#include "nrpos/common.hpp"
#include "nrpos/ranging.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <mutex>
#include <unordered_map>
#include <vector>

namespace nrpos
{
struct Scenario;
class CounterRng;

struct PositioningReport
{
    Eigen::MatrixXd sigma2; // J x K ranging variances, m^2
    Eigen::MatrixXd lambda; // J x K, zero where unassociated
    Eigen::VectorXd phi;    // K, m
    double objective = 0.0; // max_k phi
};

// Ranging coefficients of every link: sigma2(j,k) = (c0(j,k) + sum_j' cross[k](j,j') p_j') / p_j
struct TermTable
{
    Eigen::MatrixXd c0;                // J x K
    std::vector<Eigen::MatrixXd> cross; // [k] -> J x J
};

// One realization: scenario, channels, the broadcast anchor positions users see, and the
// privacy floor of every anchor. Ranging coefficients are memoized per configuration.
class Problem
{
public:
    Problem(const Scenario& s, const ChannelRealization& ch, CounterRng privacy_rng);

    const Scenario& scenario() const { return *scenario_; }
    const ChannelRealization& channels() const { return *channels_; }
    const RangingModel& model() const { return model_; }
    const std::vector<Vec3>& broadcast_positions() const { return broadcast_; }
    const Eigen::VectorXd& xi2_min() const { return xi2_min_; }

    int num_anchors() const;
    int num_users() const;
    int numerology_count() const;
    int comb_size() const;
    int codebook_size() const { return model_.codebook().size(); }

    // Per-subcarrier cap P_max / N_{l,a}
    double power_cap(int j, int l) const;
    // Clamps every power into [floor_ratio * cap, cap] for the anchor's current numerology
    void project_power(AssignmentState& st, double floor_ratio) const;
    // Moves anchor j to (l, i) keeping its power at the same fraction of the cap
    void reassign(AssignmentState& st, int j, int l, int i) const;

    TermTable terms(const AssignmentState& st) const;
    Eigen::MatrixXd sigma2(const AssignmentState& st) const;
    Eigen::MatrixXd sigma2(const TermTable& t, const Eigen::VectorXd& power_w) const;

    // lambda of user k for the anchor subset (in broadcast positions)
    Eigen::VectorXd lambda(int k, const std::vector<int>& anchors) const;

    // Throws std::invalid_argument when a user has < 3 anchors, NumericalError on degenerate geometry
    PositioningReport evaluate(const AssignmentState& st) const;
    PositioningReport evaluate(const AssignmentState& st, const Eigen::MatrixXd& sigma2) const;

    // max_k Phi_k, or +inf when the state is inadmissible
    double objective(const AssignmentState& st) const;

private:
    double cached_noise(int j, int k, int lj, int ij, int beam) const;
    double cached_cross(int j, int k, int lj, int ij, int jp, int lp, int ip, int beam) const;

    const Scenario* scenario_;
    const ChannelRealization* channels_;
    RangingModel model_;
    std::vector<Vec3> broadcast_;
    Eigen::VectorXd xi2_min_;
    mutable std::mutex memo_mutex_;
    mutable std::unordered_map<std::uint64_t, double> memo_;
};

} // namespace nrpos
