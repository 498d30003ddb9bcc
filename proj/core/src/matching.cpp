// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#include "nrpos/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nrpos
{

namespace
{
// Relative margin for the strict decrease of max_k Phi_k; guards against round-off cycles
constexpr double kStrictMargin = 1e-12;

bool strictly_lower(double next, double prev) { return next < prev * (1.0 - kStrictMargin); }

bool try_evaluate(const Problem& problem, const AssignmentState& st, PositioningReport& out)
{
    try
    {
        out = problem.evaluate(st);
        return true;
    }
    catch (const NumericalError&)
    {
        return false;
    }
    catch (const std::invalid_argument&)
    {
        return false;
    }
}

bool try_evaluate(const Problem& problem, const AssignmentState& st, const Eigen::MatrixXd& sigma2,
                  PositioningReport& out)
{
    try
    {
        out = problem.evaluate(st, sigma2);
        return true;
    }
    catch (const NumericalError&)
    {
        return false;
    }
    catch (const std::invalid_argument&)
    {
        return false;
    }
}

void record(MatchingResult& res, double value)
{
    if (!strictly_lower(value, res.objective_trace.back()))
        throw std::logic_error("accepted move did not strictly decrease max_k Phi_k");
    res.objective_trace.push_back(value);
}
} // namespace

NumerologyPreferences numerology_preferences(const PositioningReport& rep, const AssignmentState& st)
{
    const int J = st.num_anchors();
    NumerologyPreferences p;
    p.anchor = Eigen::VectorXd::Zero(J);
    for (int j = 0; j < J; ++j)
        for (int k : st.users_of(j))
            p.anchor(j) = std::max(p.anchor(j), rep.phi(k));
    p.option = rep.phi.size() > 0 ? rep.phi.maxCoeff() : 0.0;
    return p;
}

AssociationPreferences association_preferences(const PositioningReport& rep, const AssignmentState& st)
{
    const int J = st.num_anchors(), K = st.num_users();
    AssociationPreferences p;
    p.user = Eigen::VectorXd::Zero(K);
    p.anchor = Eigen::VectorXd::Zero(J);
    for (int k = 0; k < K; ++k)
        for (int j : st.anchors_of(k))
            p.user(k) += rep.lambda(j, k) * std::sqrt(rep.sigma2(j, k));
    for (int j = 0; j < J; ++j)
        for (int k : st.users_of(j))
            p.anchor(j) = std::max(p.anchor(j), rep.phi(k));
    return p;
}

MatchingResult numerology_offset_matching(const Problem& problem, const AssignmentState& init,
                                          const MatchingOptions& opt)
{
    const int J = problem.num_anchors();
    const int L = problem.numerology_count();
    const int comb = problem.comb_size();

    MatchingResult res;
    res.state = init;
    PositioningReport rep = problem.evaluate(res.state);
    NumerologyPreferences pref = numerology_preferences(rep, res.state);
    res.objective_trace.push_back(rep.objective);

    auto blocking = [&](const PositioningReport& nrep, const AssignmentState& nst, int j, int jp) {
        if (!strictly_lower(nrep.objective, rep.objective))
            return false;
        const NumerologyPreferences np = numerology_preferences(nrep, nst);
        if (np.anchor(j) > pref.anchor(j))
            return false;
        if (jp >= 0 && np.anchor(jp) > pref.anchor(jp))
            return false;
        return np.option <= pref.option;
    };

    for (;;)
    {
        if (res.swaps + res.hole_moves >= opt.max_swaps)
        {
            res.converged = false;
            break;
        }
        bool moved = false;
        for (int j = 0; j < J && !moved; ++j)
        {
            const int lj = res.state.numerology_of(j), ij = res.state.offset_of(j);
            for (int jp = j + 1; jp < J && !moved; ++jp)
            {
                const int lp = res.state.numerology_of(jp), ip = res.state.offset_of(jp);
                if (lp == lj && ip == ij)
                    continue;
                AssignmentState cand = res.state;
                problem.reassign(cand, j, lp, ip);
                problem.reassign(cand, jp, lj, ij);
                PositioningReport nrep;
                if (!try_evaluate(problem, cand, nrep) || !blocking(nrep, cand, j, jp))
                    continue;
                res.state = std::move(cand);
                rep = std::move(nrep);
                pref = numerology_preferences(rep, res.state);
                record(res, rep.objective);
                ++res.swaps;
                moved = true;
            }
            for (int l = 0; l < L && !moved; ++l)
                for (int i = 0; i < comb && !moved; ++i)
                {
                    if (l == lj && i == ij)
                        continue;
                    AssignmentState cand = res.state;
                    problem.reassign(cand, j, l, i);
                    PositioningReport nrep;
                    if (!try_evaluate(problem, cand, nrep) || !blocking(nrep, cand, j, -1))
                        continue;
                    res.state = std::move(cand);
                    rep = std::move(nrep);
                    pref = numerology_preferences(rep, res.state);
                    record(res, rep.objective);
                    ++res.hole_moves;
                    moved = true;
                }
        }
        if (!moved)
            break;
    }
    return res;
}

MatchingResult user_anchor_matching(const Problem& problem, const AssignmentState& init, const MatchingOptions& opt)
{
    const int J = problem.num_anchors();
    const int K = problem.num_users();
    if (J < 3)
        throw NumericalError("user-anchor association is infeasible with fewer than 3 anchors");

    MatchingResult res;
    res.state = init;
    for (int k = 0; k < K; ++k)
        if (res.state.anchors_of(k).size() < 3)
            throw std::invalid_argument("initial association gives user " + std::to_string(k) + " fewer than 3 anchors");
    const Eigen::MatrixXd sig2 = problem.sigma2(res.state);
    PositioningReport rep = problem.evaluate(res.state, sig2);
    AssociationPreferences pref = association_preferences(rep, res.state);
    res.objective_trace.push_back(rep.objective);

    // parties: anchors and users whose preference must not rise
    auto blocking = [&](const PositioningReport& nrep, const AssignmentState& nst, std::initializer_list<int> anchors,
                        std::initializer_list<int> users) {
        if (!strictly_lower(nrep.objective, rep.objective))
            return false;
        const AssociationPreferences np = association_preferences(nrep, nst);
        for (int a : anchors)
            if (np.anchor(a) > pref.anchor(a))
                return false;
        for (int u : users)
            if (np.user(u) > pref.user(u))
                return false;
        return true;
    };

    auto accept = [&](AssignmentState&& cand, PositioningReport&& nrep, bool hole) {
        res.state = std::move(cand);
        rep = std::move(nrep);
        pref = association_preferences(rep, res.state);
        record(res, rep.objective);
        if (hole)
            ++res.hole_moves;
        else
            ++res.swaps;
    };

    for (;;)
    {
        if (res.swaps + res.hole_moves >= opt.max_swaps)
        {
            res.converged = false;
            break;
        }
        bool moved = false;
        const Eigen::MatrixXi& X = res.state.assoc_x;
        for (int j = 0; j < J && !moved; ++j)
        {
            const std::vector<int> served = res.state.users_of(j);
            // pair swaps
            for (int k : served)
            {
                for (int jp = j + 1; jp < J && !moved; ++jp)
                    for (int kp = 0; kp < K && !moved; ++kp)
                    {
                        if (kp == k || X(jp, kp) == 0 || X(j, kp) != 0 || X(jp, k) != 0)
                            continue;
                        AssignmentState cand = res.state;
                        cand.assoc_x(j, k) = 0;
                        cand.assoc_x(jp, kp) = 0;
                        cand.assoc_x(j, kp) = 1;
                        cand.assoc_x(jp, k) = 1;
                        PositioningReport nrep;
                        if (!try_evaluate(problem, cand, sig2, nrep) || !blocking(nrep, cand, {j, jp}, {k, kp}))
                            continue;
                        accept(std::move(cand), std::move(nrep), false);
                        moved = true;
                    }
                if (moved)
                    break;
            }
            // user k leaves j for an anchor outside X_k
            for (size_t idx = 0; idx < served.size() && !moved; ++idx)
            {
                const int k = served[idx];
                for (int jn = 0; jn < J && !moved; ++jn)
                {
                    if (X(jn, k) != 0)
                        continue;
                    AssignmentState cand = res.state;
                    cand.assoc_x(j, k) = 0;
                    cand.assoc_x(jn, k) = 1;
                    PositioningReport nrep;
                    if (!try_evaluate(problem, cand, sig2, nrep) || !blocking(nrep, cand, {j, jn}, {k}))
                        continue;
                    accept(std::move(cand), std::move(nrep), true);
                    moved = true;
                }
            }
            // anchor j leaves user k for a user it does not serve
            for (size_t idx = 0; idx < served.size() && !moved; ++idx)
            {
                const int k = served[idx];
                if (res.state.anchors_of(k).size() <= 3)
                    continue;
                for (int kn = 0; kn < K && !moved; ++kn)
                {
                    if (X(j, kn) != 0)
                        continue;
                    AssignmentState cand = res.state;
                    cand.assoc_x(j, k) = 0;
                    cand.assoc_x(j, kn) = 1;
                    PositioningReport nrep;
                    if (!try_evaluate(problem, cand, sig2, nrep) || !blocking(nrep, cand, {j}, {k, kn}))
                        continue;
                    accept(std::move(cand), std::move(nrep), true);
                    moved = true;
                }
            }
        }
        if (!moved)
            break;
    }
    return res;
}

} // namespace nrpos
