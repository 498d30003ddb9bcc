// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#include "nrpos/problem.hpp"

#include "nrpos/numerology.hpp"
#include "nrpos/positioning.hpp"
#include "nrpos/rng.hpp"
#include "nrpos/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace nrpos
{

namespace
{
// Field widths of the memo key: beam 10, j 7, k 8, l 3, i 5, jp 7, lp 3, ip 5, tag 1
std::uint64_t memo_key(bool cross, int beam, int j, int k, int lj, int ij, int jp, int lp, int ip)
{
    std::uint64_t key = static_cast<std::uint64_t>(beam);
    key = (key << 7) | static_cast<std::uint64_t>(j);
    key = (key << 8) | static_cast<std::uint64_t>(k);
    key = (key << 3) | static_cast<std::uint64_t>(lj);
    key = (key << 5) | static_cast<std::uint64_t>(ij);
    key = (key << 7) | static_cast<std::uint64_t>(jp);
    key = (key << 3) | static_cast<std::uint64_t>(lp);
    key = (key << 5) | static_cast<std::uint64_t>(ip);
    return (key << 1) | (cross ? 1u : 0u);
}
} // namespace

Problem::Problem(const Scenario& s, const ChannelRealization& ch, CounterRng privacy_rng)
    : scenario_(&s), channels_(&ch), model_(s, ch)
{
    if (s.num_anchors() > 127 || s.num_users() > 255 || s.comb_size > 31 || model_.codebook().size() > 1023)
        throw ConfigError("problem size exceeds the supported limits (J <= 127, K <= 255, comb <= 31, N_cb <= 1023)");
    const int J = s.num_anchors();
    xi2_min_.resize(J);
    broadcast_.reserve(J);
    for (int j = 0; j < J; ++j)
    {
        const Anchor& a = s.anchors[j];
        xi2_min_(j) = min_anchor_variance(a, s.xi2_min_override_m2);
        CounterRng rng = privacy_rng.split(static_cast<std::uint64_t>(j));
        broadcast_.push_back(perturb_location(a.position_m, std::max(0.0, xi2_min_(j) - a.sensor_var_m2), rng));
    }
}

int Problem::num_anchors() const { return scenario_->num_anchors(); }
int Problem::num_users() const { return scenario_->num_users(); }
int Problem::numerology_count() const { return scenario_->numerology_count; }
int Problem::comb_size() const { return scenario_->comb_size; }

double Problem::power_cap(int j, int l) const
{
    const Scenario& s = *scenario_;
    return s.anchors[j].p_max_w / numerology_params(l, s.bandwidth_hz, s.comb_size).n_active;
}

void Problem::project_power(AssignmentState& st, double floor_ratio) const
{
    for (int j = 0; j < num_anchors(); ++j)
    {
        const int l = st.numerology_of(j);
        if (l < 0)
            continue;
        const double cap = power_cap(j, l);
        st.power_w(j) = std::clamp(st.power_w(j), floor_ratio * cap, cap);
    }
}

void Problem::reassign(AssignmentState& st, int j, int l, int i) const
{
    const int old = st.numerology_of(j);
    if (old >= 0 && old != l)
        st.power_w(j) *= power_cap(j, l) / power_cap(j, old);
    st.assign(j, l, i);
}

double Problem::cached_noise(int j, int k, int lj, int ij, int beam) const
{
    const std::uint64_t key = memo_key(false, beam, j, k, lj, ij, 0, 0, 0);
    {
        std::lock_guard<std::mutex> lock(memo_mutex_);
        auto it = memo_.find(key);
        if (it != memo_.end())
            return it->second;
    }
    const double v = model_.noise_term(j, k, lj, ij, beam, 0);
    std::lock_guard<std::mutex> lock(memo_mutex_);
    memo_.emplace(key, v);
    return v;
}

double Problem::cached_cross(int j, int k, int lj, int ij, int jp, int lp, int ip, int beam) const
{
    const std::uint64_t key = memo_key(true, beam, j, k, lj, ij, jp, lp, ip);
    {
        std::lock_guard<std::mutex> lock(memo_mutex_);
        auto it = memo_.find(key);
        if (it != memo_.end())
            return it->second;
    }
    const double v = model_.cross_term(j, k, lj, ij, jp, lp, ip, beam, 0);
    std::lock_guard<std::mutex> lock(memo_mutex_);
    memo_.emplace(key, v);
    return v;
}

TermTable Problem::terms(const AssignmentState& st) const
{
    const int J = num_anchors(), K = num_users();
    std::vector<int> ls(J), is(J);
    for (int j = 0; j < J; ++j)
    {
        ls[j] = st.numerology_of(j);
        is[j] = st.offset_of(j);
        if (ls[j] < 0 || is[j] < 0)
            throw std::invalid_argument("anchor " + std::to_string(j) + " has no numerology or offset selected");
    }
    TermTable t;
    t.c0.resize(J, K);
    t.cross.assign(K, Eigen::MatrixXd::Zero(J, J));
    for (int k = 0; k < K; ++k)
        for (int j = 0; j < J; ++j)
        {
            t.c0(j, k) = cached_noise(j, k, ls[j], is[j], st.beam_index);
            for (int jp = 0; jp < J; ++jp)
                if (jp != j)
                    t.cross[k](j, jp) = cached_cross(j, k, ls[j], is[j], jp, ls[jp], is[jp], st.beam_index);
        }
    return t;
}

Eigen::MatrixXd Problem::sigma2(const TermTable& t, const Eigen::VectorXd& p) const
{
    const int J = num_anchors(), K = num_users();
    Eigen::MatrixXd out(J, K);
    for (int k = 0; k < K; ++k)
        for (int j = 0; j < J; ++j)
            out(j, k) = (t.c0(j, k) + t.cross[k].row(j).dot(p)) / p(j);
    return out;
}

Eigen::MatrixXd Problem::sigma2(const AssignmentState& st) const { return sigma2(terms(st), st.power_w); }

Eigen::VectorXd Problem::lambda(int k, const std::vector<int>& anchors) const
{
    std::vector<Vec3> pos;
    pos.reserve(anchors.size());
    for (int j : anchors)
        pos.push_back(broadcast_[j]);
    return geometry_factors(scenario_->users[k].position_m, pos).lambda;
}

PositioningReport Problem::evaluate(const AssignmentState& st) const { return evaluate(st, sigma2(st)); }

PositioningReport Problem::evaluate(const AssignmentState& st, const Eigen::MatrixXd& sig2) const
{
    const int J = num_anchors(), K = num_users();
    PositioningReport r;
    r.sigma2 = sig2;
    r.lambda = Eigen::MatrixXd::Zero(J, K);
    r.phi.resize(K);
    r.objective = 0.0;
    for (int k = 0; k < K; ++k)
    {
        const std::vector<int> xk = st.anchors_of(k);
        if (xk.size() < 3)
            throw std::invalid_argument("user " + std::to_string(k) + " has fewer than 3 anchors");
        const Eigen::VectorXd lam = lambda(k, xk);
        double acc = 0.0;
        for (size_t idx = 0; idx < xk.size(); ++idx)
        {
            const int j = xk[idx];
            r.lambda(j, k) = lam(static_cast<Eigen::Index>(idx));
            acc += lam(static_cast<Eigen::Index>(idx)) * lam(static_cast<Eigen::Index>(idx)) *
                   (st.anchor_var_m2(j) + sig2(j, k));
        }
        r.phi(k) = std::sqrt(acc);
        r.objective = std::max(r.objective, r.phi(k));
    }
    return r;
}

double Problem::objective(const AssignmentState& st) const
{
    try
    {
        return evaluate(st).objective;
    }
    catch (const NumericalError&)
    {
        return std::numeric_limits<double>::infinity();
    }
    catch (const std::invalid_argument&)
    {
        return std::numeric_limits<double>::infinity();
    }
}

} // namespace nrpos
