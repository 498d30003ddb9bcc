// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#include "nrpos/ranging.hpp"

#include "nrpos/numerology.hpp"
#include "nrpos/scenario.hpp"
#include "nrpos/specfun.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>

namespace nrpos
{

namespace
{
// Modulation symbols are unit-variance; all power lives in p_j
constexpr double kSymbolVar = 1.0;

double sinc(double x)
{
    if (x == 0.0)
        return 1.0;
    const double px = kPi * x;
    return std::sin(px) / px;
}

using CacheKey = std::tuple<double, double, int, int, int, int, int>;

std::mutex& cache_mutex()
{
    static std::mutex m;
    return m;
}

std::map<CacheKey, std::shared_ptr<const Eigen::MatrixXd>>& cache()
{
    static std::map<CacheKey, std::shared_ptr<const Eigen::MatrixXd>> c;
    return c;
}
} // namespace

void clear_c_matrix_cache()
{
    std::lock_guard<std::mutex> lock(cache_mutex());
    cache().clear();
}

std::size_t c_matrix_cache_size()
{
    std::lock_guard<std::mutex> lock(cache_mutex());
    return cache().size();
}

// ---------------------------------------------------------------- AssignmentState

AssignmentState AssignmentState::empty(int J, int K, int L, int comb)
{
    AssignmentState s;
    s.assoc_x = Eigen::MatrixXi::Zero(J, K);
    s.numerology_u = Eigen::MatrixXi::Zero(J, L);
    s.offset_v = Eigen::MatrixXi::Zero(J, comb);
    s.power_w = Eigen::VectorXd::Zero(J);
    s.anchor_var_m2 = Eigen::VectorXd::Zero(J);
    return s;
}

int AssignmentState::numerology_of(int j) const
{
    for (int l = 0; l < numerology_u.cols(); ++l)
        if (numerology_u(j, l) != 0)
            return l;
    return -1;
}

int AssignmentState::offset_of(int j) const
{
    for (int i = 0; i < offset_v.cols(); ++i)
        if (offset_v(j, i) != 0)
            return i;
    return -1;
}

void AssignmentState::assign(int j, int l, int i)
{
    numerology_u.row(j).setZero();
    offset_v.row(j).setZero();
    numerology_u(j, l) = 1;
    offset_v(j, i) = 1;
}

std::vector<int> AssignmentState::anchors_of(int k) const
{
    std::vector<int> out;
    for (int j = 0; j < assoc_x.rows(); ++j)
        if (assoc_x(j, k) != 0)
            out.push_back(j);
    return out;
}

std::vector<int> AssignmentState::users_of(int j) const
{
    std::vector<int> out;
    for (int k = 0; k < assoc_x.cols(); ++k)
        if (assoc_x(j, k) != 0)
            out.push_back(k);
    return out;
}

bool AssignmentState::operator==(const AssignmentState& o) const
{
    return assoc_x == o.assoc_x && numerology_u == o.numerology_u && offset_v == o.offset_v &&
           power_w == o.power_w && anchor_var_m2 == o.anchor_var_m2 && beam_index == o.beam_index;
}

// ---------------------------------------------------------------- RangingModel

struct RangingModel::Link
{
    int l = 0;
    int residue = 0;
    double period = 0.0;
    std::vector<int> positions;
    Eigen::VectorXd gain2; // |h|^2 on the positions
    Eigen::VectorXd q;     // Q on the positions
};

RangingModel::RangingModel(const Scenario& s, const ChannelRealization& ch)
    : scenario_(&s), channels_(&ch), codebook_(kronecker_codebook(s.irs))
{
    const double hb = halfband_hz();
    q_.resize(s.numerology_count);
    for (int l = 0; l < s.numerology_count; ++l)
    {
        const NumerologyConfig nc = numerology_params(l, s.bandwidth_hz, s.comb_size);
        const int kbar = band_centre_shift(l, s.bandwidth_hz);
        q_[l].resize(nc.n_subcarriers);
        for (int p = 0; p < nc.n_subcarriers; ++p)
            q_[l](p) = q_closed((p - kbar) * nc.scs_hz, nc.symbol_s, hb);
    }
    gains_.resize(codebook_.size());
}

double RangingModel::halfband_hz() const { return 0.5 * scenario_->dll.frontend_bw_hz; }

const ChannelGains& RangingModel::gains(int beam_index) const
{
    if (beam_index < 0 || beam_index >= codebook_.size())
        throw std::invalid_argument("beam index " + std::to_string(beam_index) + " outside the codebook");
    std::lock_guard<std::mutex> lock(gains_mutex_);
    auto& slot = gains_[beam_index];
    if (!slot)
        slot = std::make_unique<ChannelGains>(compute_gains(*channels_, codebook_.entries[beam_index]));
    return *slot;
}

int RangingModel::symbol_alignment(int l_victim, int l_interf) const
{
    return l_interf > l_victim ? (1 << (l_interf - l_victim)) : 1;
}

RangingModel::Link RangingModel::victim_link(int j, int k, int m, const AssignmentState& st) const
{
    const int l = st.numerology_of(j);
    const int i = st.offset_of(j);
    if (l < 0 || i < 0)
        throw std::invalid_argument("anchor " + std::to_string(j) + " has no numerology or offset selected");
    return victim_link(j, k, m, l, i, st.beam_index);
}

RangingModel::Link RangingModel::victim_link(int j, int k, int m, int l, int i, int beam) const
{
    const Scenario& s = *scenario_;
    const NumerologyConfig nc = numerology_params(l, s.bandwidth_hz, s.comb_size);
    Link link;
    link.l = l;
    link.residue = comb_residue(m, i, s.comb_size);
    link.period = nc.symbol_s;
    link.positions.resize(nc.n_active);
    link.gain2.resize(nc.n_active);
    link.q.resize(nc.n_active);
    const Eigen::VectorXd& g = gains(beam).at(l, j, k);
    for (int n = 0; n < nc.n_active; ++n)
    {
        const int p = s.comb_size * n + link.residue;
        link.positions[n] = p;
        link.gain2(n) = g(p);
        link.q(n) = q_[l](p);
    }
    return link;
}

std::shared_ptr<const Eigen::MatrixXd> RangingModel::c_matrix(int lv, int rv, int li, int ri) const
{
    const Scenario& s = *scenario_;
    const CacheKey key{s.bandwidth_hz, s.dll.frontend_bw_hz, s.comb_size, lv, rv, li, ri};
    {
        std::lock_guard<std::mutex> lock(cache_mutex());
        auto it = cache().find(key);
        if (it != cache().end())
            return it->second;
    }
    const NumerologyConfig nv = numerology_params(lv, s.bandwidth_hz, s.comb_size);
    const NumerologyConfig ni = numerology_params(li, s.bandwidth_hz, s.comb_size);
    const int kv = band_centre_shift(lv, s.bandwidth_hz);
    const int ki = band_centre_shift(li, s.bandwidth_hz);
    auto mat = std::make_shared<Eigen::MatrixXd>(ni.n_active, nv.n_active);
    SincIntegralParams p;
    p.period_a = ni.symbol_s;
    p.period_b = nv.symbol_s;
    p.halfband = halfband_hz();
    const bool symmetric = (lv == li && rv == ri);
    for (int a = 0; a < ni.n_active; ++a)
    {
        p.center_a = (s.comb_size * a + ri - ki) * ni.scs_hz;
        for (int b = 0; b < nv.n_active; ++b)
        {
            if (symmetric && b < a)
            {
                (*mat)(a, b) = (*mat)(b, a);
                continue;
            }
            p.center_b = (s.comb_size * b + rv - kv) * nv.scs_hz;
            (*mat)(a, b) = c_closed(p);
        }
    }
    std::lock_guard<std::mutex> lock(cache_mutex());
    auto [it, inserted] = cache().emplace(key, std::move(mat));
    (void)inserted;
    return it->second;
}

double RangingModel::psd_value(double f, int j, int k, int m, const AssignmentState& st, bool normalized) const
{
    const Link link = victim_link(j, k, m, st);
    const Scenario& s = *scenario_;
    const double scs = 1.0 / link.period;
    const int kbar = band_centre_shift(link.l, s.bandwidth_hz);
    const double p = st.power_w(j);
    double acc = 0.0;
    for (size_t n = 0; n < link.positions.size(); ++n)
    {
        const double fc = (link.positions[n] - kbar) * scs;
        const double v = sinc((f - fc) * link.period);
        acc += p * link.gain2(n) * v * v;
    }
    acc *= link.period * kSymbolVar;
    if (!normalized)
        return acc;
    const double mass = kSymbolVar * p * link.gain2.sum();
    if (!(mass > 0.0))
        throw NumericalError("received PSD has zero mass");
    return acc / mass;
}

double RangingModel::interference_psd(double f, int j, int k, int m, const AssignmentState& st) const
{
    const Scenario& s = *scenario_;
    const int lv = st.numerology_of(j);
    if (lv < 0)
        throw std::invalid_argument("anchor " + std::to_string(j) + " has no numerology selected");
    double total = 0.0;
    for (int jp = 0; jp < s.num_anchors(); ++jp)
    {
        if (jp == j)
            continue;
        const int li = st.numerology_of(jp);
        const int ii = st.offset_of(jp);
        if (li < 0 || ii < 0)
            throw std::invalid_argument("anchor " + std::to_string(jp) + " has no numerology or offset selected");
        const NumerologyConfig ni = numerology_params(li, s.bandwidth_hz, s.comb_size);
        const int ki = band_centre_shift(li, s.bandwidth_hz);
        const int w = symbol_alignment(lv, li);
        const Eigen::VectorXd& g = gains(st.beam_index).at(li, jp, k);
        double acc = 0.0;
        for (int mp = m * w; mp < (m + 1) * w; ++mp)
        {
            const int r = comb_residue(mp, ii, s.comb_size);
            for (int n = 0; n < ni.n_active; ++n)
            {
                const int pos = s.comb_size * n + r;
                const double v = sinc((f - (pos - ki) * ni.scs_hz) * ni.symbol_s);
                acc += g(pos) * v * v;
            }
        }
        total += acc * st.power_w(jp) * ni.symbol_s * kSymbolVar / w;
    }
    return total;
}

double RangingModel::ranging_variance_A(int j, int k, int m_prime, const AssignmentState& st) const
{
    const Scenario& s = *scenario_;
    const double a = s.dll.loop_factor();
    const double D = s.dll.early_late_spacing_chips;
    const double noise = s.noise_power_w();
    const double pj = st.power_w(j);
    const int lj = st.numerology_of(j);
    if (lj < 0)
        throw std::invalid_argument("anchor " + std::to_string(j) + " has no numerology selected");
    const int window = 1 << lj;

    double acc = 0.0;
    for (int m = m_prime * window; m < (m_prime + 1) * window; ++m)
    {
        const Link v = victim_link(j, k, m, st);
        const double T = v.period;
        const Eigen::VectorXd W = pj * v.gain2;
        const double S = W.sum();
        const double alpha = kPi / (kSymbolVar * S);
        const double mass = kPi * kSymbolVar * S;
        const double WQ = W.dot(v.q);
        const double A0 = noise * alpha * kPi * D * D * T * T * T * WQ;
        const double A2 = alpha * D * T * T * WQ;
        double A1 = 0.0;
        for (int jp = 0; jp < s.num_anchors(); ++jp)
        {
            if (jp == j)
                continue;
            const int li = st.numerology_of(jp);
            const int ii = st.offset_of(jp);
            const int w = symbol_alignment(lj, li);
            const double Ti = numerology_params(li, s.bandwidth_hz, s.comb_size).symbol_s;
            const Eigen::VectorXd& gi = gains(st.beam_index).at(li, jp, k);
            for (int mp = m * w; mp < (m + 1) * w; ++mp)
            {
                const int ri = comb_residue(mp, ii, s.comb_size);
                const auto C = c_matrix(lj, v.residue, li, ri);
                Eigen::VectorXd hi(C->rows());
                for (Eigen::Index n = 0; n < hi.size(); ++n)
                    hi(n) = st.power_w(jp) * gi(s.comb_size * n + ri);
                const double cross = hi.dot(*C * W);
                A1 += Ti * kSymbolVar * alpha * kPi * D * D * T * T * T * cross / w;
            }
        }
        if (!(A2 != 0.0) || !std::isfinite(A2))
            throw NumericalError("degenerate spectrum: A2 = 0 for anchor " + std::to_string(j) + ", user " +
                                 std::to_string(k));
        acc += a * (A0 + A1) / (4.0 * kPi * kPi * mass * A2 * A2);
    }
    return acc / window * kSpeedOfLight * kSpeedOfLight;
}

double RangingModel::noise_term(int j, int k, int lj, int ij, int beam, int m_prime) const
{
    const Scenario& s = *scenario_;
    const double a = s.dll.loop_factor();
    const double noise = s.noise_power_w();
    const int window = 1 << lj;
    double acc = 0.0;
    for (int m = m_prime * window; m < (m_prime + 1) * window; ++m)
    {
        const Link v = victim_link(j, k, m, lj, ij, beam);
        const double T = v.period;
        const double G = v.gain2.dot(v.q);
        const double zeta2 = std::sqrt(4.0 * kSymbolVar * kPi * kPi * kPi) * G / T;
        if (!(zeta2 != 0.0) || !std::isfinite(zeta2))
            throw NumericalError("degenerate spectrum: zeta2 = 0 for anchor " + std::to_string(j) + ", user " +
                                 std::to_string(k));
        const double zeta0 = a * noise * G / (T * T * T);
        acc += zeta0 / (zeta2 * zeta2);
    }
    return acc / window * kSpeedOfLight * kSpeedOfLight;
}

double RangingModel::cross_term(int j, int k, int lj, int ij, int jp, int lp, int ip, int beam, int m_prime) const
{
    const Scenario& s = *scenario_;
    const double a = s.dll.loop_factor();
    const int window = 1 << lj;
    const int w = symbol_alignment(lj, lp);
    const double Tp = numerology_params(lp, s.bandwidth_hz, s.comb_size).symbol_s;
    const Eigen::VectorXd& gp = gains(beam).at(lp, jp, k);
    double acc = 0.0;
    for (int m = m_prime * window; m < (m_prime + 1) * window; ++m)
    {
        const Link v = victim_link(j, k, m, lj, ij, beam);
        const double T = v.period;
        const double G = v.gain2.dot(v.q);
        const double zeta2 = std::sqrt(4.0 * kSymbolVar * kPi * kPi * kPi) * G / T;
        if (!(zeta2 != 0.0) || !std::isfinite(zeta2))
            throw NumericalError("degenerate spectrum: zeta2 = 0 for anchor " + std::to_string(j) + ", user " +
                                 std::to_string(k));
        for (int mp = m * w; mp < (m + 1) * w; ++mp)
        {
            const int rp = comb_residue(mp, ip, s.comb_size);
            const auto C = c_matrix(lj, v.residue, lp, rp);
            Eigen::VectorXd hp(C->rows());
            for (Eigen::Index n = 0; n < hp.size(); ++n)
                hp(n) = gp(s.comb_size * n + rp);
            const double H = hp.dot(*C * v.gain2);
            const double zeta_cross = a * Tp * kSymbolVar * H / (T * T * T);
            acc += zeta_cross / (zeta2 * zeta2) / w;
        }
    }
    return acc / window * kSpeedOfLight * kSpeedOfLight;
}

RangingTerms RangingModel::ranging_terms(int j, int k, int m_prime, const AssignmentState& st) const
{
    const int J = scenario_->num_anchors();
    const int lj = st.numerology_of(j);
    const int ij = st.offset_of(j);
    if (lj < 0 || ij < 0)
        throw std::invalid_argument("anchor " + std::to_string(j) + " has no numerology or offset selected");
    RangingTerms t;
    t.c0 = noise_term(j, k, lj, ij, st.beam_index, m_prime);
    t.cross = Eigen::VectorXd::Zero(J);
    for (int jp = 0; jp < J; ++jp)
    {
        if (jp == j)
            continue;
        const int lp = st.numerology_of(jp);
        const int ip = st.offset_of(jp);
        if (lp < 0 || ip < 0)
            throw std::invalid_argument("anchor " + std::to_string(jp) + " has no numerology or offset selected");
        t.cross(jp) = cross_term(j, k, lj, ij, jp, lp, ip, st.beam_index, m_prime);
    }
    return t;
}

double RangingModel::ranging_variance_zeta(int j, int k, int m_prime, const AssignmentState& st) const
{
    const RangingTerms t = ranging_terms(j, k, m_prime, st);
    const double pj = st.power_w(j);
    return (t.c0 + t.cross.dot(st.power_w)) / pj;
}

RangingReport RangingModel::report(const AssignmentState& st, int m_prime) const
{
    const int J = scenario_->num_anchors(), K = scenario_->num_users();
    RangingReport r;
    r.sigma2.resize(J, K);
    for (int j = 0; j < J; ++j)
        for (int k = 0; k < K; ++k)
            r.sigma2(j, k) = ranging_variance_zeta(j, k, m_prime, st);
    return r;
}

} // namespace nrpos
