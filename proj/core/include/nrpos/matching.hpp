// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#pragma once

#include "nrpos/problem.hpp"
#include "nrpos/ranging.hpp"

#include <Eigen/Core>

#include <vector>

namespace nrpos
{

struct MatchingOptions
{
    int max_swaps = 100000;
};

struct MatchingResult
{
    AssignmentState state;
    int swaps = 0;
    int hole_moves = 0;
    bool converged = true;             // false when max_swaps stopped the scan
    std::vector<double> objective_trace; // max_k Phi_k before the first and after every accepted move
};

// Preference values, lower is better. Empty maxima are 0.
struct NumerologyPreferences
{
    Eigen::VectorXd anchor; // U^o_j = max over served users of Phi_k
    double option = 0.0;    // U^o_(l,i) = max_k Phi_k, shared by every (l, i)
};

struct AssociationPreferences
{
    Eigen::VectorXd user;   // U^A_k = sum_{j in X_k} lambda_jk sigma_jk
    Eigen::VectorXd anchor; // U^A_j = max over matched users of Phi_k
};

NumerologyPreferences numerology_preferences(const PositioningReport& rep, const AssignmentState& st);
AssociationPreferences association_preferences(const PositioningReport& rep, const AssignmentState& st);

// Swap matching between anchors and (numerology, offset) options. A move is accepted when no
// involved party's preference rises and max_k Phi_k strictly falls. An anchor that changes
// numerology keeps its power at the same fraction of the per-subcarrier cap.
MatchingResult numerology_offset_matching(const Problem& problem, const AssignmentState& init,
                                          const MatchingOptions& opt);

// Swap matching between anchors and users with at least 3 anchors per user. Moves: pair swaps
// (j,k),(j',k') -> (j,k'),(j',k); user k moving from j to an anchor outside X_k; anchor j moving
// from user k to a user it does not serve.
MatchingResult user_anchor_matching(const Problem& problem, const AssignmentState& init, const MatchingOptions& opt);

} // namespace nrpos
