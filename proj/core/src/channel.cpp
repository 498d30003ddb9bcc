// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#include "nrpos/channel.hpp"

#include "nrpos/numerology.hpp"
#include "nrpos/rng.hpp"
#include "nrpos/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nrpos
{

double los_probability(double d, LosMode mode)
{
    if (!(d >= 0.0))
        throw std::invalid_argument("LoS probability needs a non-negative distance");
    double p;
    if (mode == LosMode::mixed)
    {
        if (d <= 1.2)
            p = 1.0;
        else if (d <= 6.5)
            p = std::exp(-(d - 1.2) / 4.7);
        else
            p = std::exp(-(d - 6.5) / 32.6) * 0.32;
    }
    else
    {
        if (d <= 5.0)
            p = 1.0;
        else if (d <= 49.0)
            p = std::exp(-(d - 5.0) / 70.8);
        else
            p = std::exp(-(d - 49.0) / 211.7) * 0.54;
    }
    return std::clamp(p, 0.0, 1.0);
}

double pathloss_db(double d3d, double carrier_hz, bool los)
{
    if (!(d3d > 0.0))
        throw std::invalid_argument("pathloss needs a positive 3D distance");
    if (!(carrier_hz > 0.0))
        throw std::invalid_argument("pathloss needs a positive carrier");
    const double fc = carrier_hz / 1e9;
    const double pl_los = 32.4 + 17.3 * std::log10(d3d) + 20.0 * std::log10(fc);
    if (los)
        return pl_los;
    return std::max(pl_los, 17.3 + 38.3 * std::log10(d3d) + 24.9 * std::log10(fc));
}

double expected_pathloss_gain(double d2d, double d3d, double carrier_hz, LosMode mode)
{
    const double pr = los_probability(d2d, mode);
    const double pl = pr * pathloss_db(d3d, carrier_hz, true) + (1.0 - pr) * pathloss_db(d3d, carrier_hz, false);
    return std::pow(10.0, -pl / 10.0);
}

double expected_pathloss_gain(const Vec3& tx, const Vec3& rx, double carrier_hz, LosMode mode)
{
    const Vec3 d = rx - tx;
    return expected_pathloss_gain(d.head<2>().norm(), d.norm(), carrier_hz, mode);
}

CVec steering_vector(double azimuth, double elevation, const IrsPanel& panel)
{
    const int H = panel.elements_h, V = panel.elements_v;
    const double uh = kPi * std::sin(azimuth) * std::cos(elevation);
    const double uv = kPi * std::sin(elevation);
    CVec a(H * V);
    for (int v = 0; v < V; ++v)
        for (int h = 0; h < H; ++h)
            a(v * H + h) = std::polar(1.0, uh * h + uv * v);
    return a;
}

Codebook kronecker_codebook(const IrsPanel& panel)
{
    const int H = panel.elements_h, V = panel.elements_v;
    if (panel.codebook_size < 1 || panel.codebook_size > H * V)
        throw std::invalid_argument("codebook size must be in [1, elements_h * elements_v]");
    Codebook cb;
    cb.entries.reserve(panel.codebook_size);
    for (int c = 0; c < panel.codebook_size; ++c)
    {
        const int ch = c % H, cv = c / H;
        CVec w(H * V);
        for (int v = 0; v < V; ++v)
            for (int h = 0; h < H; ++h)
                w(v * H + h) = std::polar(1.0, 2.0 * kPi * (static_cast<double>(ch * h) / H + static_cast<double>(cv * v) / V));
        cb.entries.push_back(std::move(w));
    }
    return cb;
}

cd composite_channel(cd h_direct, const CVec& g_user, const CVec& theta, const CVec& g_anchor)
{
    if (g_user.size() != theta.size() || g_anchor.size() != theta.size())
        throw std::invalid_argument("IRS channel and codeword dimensions differ");
    cd acc = h_direct;
    for (Eigen::Index m = 0; m < theta.size(); ++m)
        acc += g_user(m) * theta(m) * std::conj(g_anchor(m));
    return acc;
}

namespace
{
CVec irs_link(const Vec3& node, const Scenario& s)
{
    const Vec3 d = node - s.irs.position_m;
    const double az = std::atan2(d.y(), d.x());
    const double el = std::atan2(d.z(), d.head<2>().norm());
    const double beta_los = std::pow(10.0, -pathloss_db(d.norm(), s.carrier_hz, true) / 10.0);
    return steering_vector(az, el, s.irs) * std::sqrt(beta_los);
}
} // namespace

ChannelRealization draw_direct_channels(const Scenario& s, CounterRng& rng)
{
    ChannelRealization ch;
    const int J = s.num_anchors(), K = s.num_users();
    ch.num_anchors = J;
    ch.num_users = K;
    ch.beta.resize(J, K);
    for (int j = 0; j < J; ++j)
        for (int k = 0; k < K; ++k)
            ch.beta(j, k) =
                expected_pathloss_gain(s.anchors[j].position_m, s.users[k].position_m, s.carrier_hz, s.los_mode);

    ch.direct.resize(s.numerology_count);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int l = 0; l < s.numerology_count; ++l)
    {
        const int n_l = numerology_params(l, s.bandwidth_hz, s.comb_size).n_subcarriers;
        ch.direct[l].resize(static_cast<size_t>(J) * K);
        for (int j = 0; j < J; ++j)
            for (int k = 0; k < K; ++k)
            {
                CVec g(n_l);
                const double amp = std::sqrt(ch.beta(j, k)) * inv_sqrt2;
                for (int p = 0; p < n_l; ++p)
                {
                    const double re = rng.normal();
                    const double im = rng.normal();
                    g(p) = cd(re, im) * amp;
                }
                ch.direct[l][j * K + k] = std::move(g);
            }
    }

    ch.irs_user.reserve(K);
    for (const auto& u : s.users)
        ch.irs_user.push_back(irs_link(u.position_m, s));
    ch.irs_anchor.reserve(J);
    for (const auto& a : s.anchors)
        ch.irs_anchor.push_back(irs_link(a.position_m, s));
    return ch;
}

ChannelGains compute_gains(const ChannelRealization& ch, const CVec& theta)
{
    ChannelGains g;
    const int J = ch.num_anchors, K = ch.num_users;
    g.num_anchors = J;
    g.num_users = K;
    g.gain2.resize(ch.direct.size());
    for (size_t l = 0; l < ch.direct.size(); ++l)
    {
        g.gain2[l].resize(static_cast<size_t>(J) * K);
        for (int j = 0; j < J; ++j)
            for (int k = 0; k < K; ++k)
            {
                const cd irs = composite_channel(cd(0.0, 0.0), ch.irs_user[k], theta, ch.irs_anchor[j]);
                const CVec& d = ch.direct_gains(static_cast<int>(l), j, k);
                g.gain2[l][j * K + k] = (d.array() + irs).abs2();
            }
    }
    return g;
}

Eigen::VectorXd channel_norms(const ChannelRealization& ch, const CVec& theta)
{
    const int J = ch.num_anchors, K = ch.num_users;
    Eigen::VectorXd out(static_cast<Eigen::Index>(K) * J);
    for (int k = 0; k < K; ++k)
        for (int j = 0; j < J; ++j)
        {
            const cd irs = composite_channel(cd(0.0, 0.0), ch.irs_user[k], theta, ch.irs_anchor[j]);
            out(k * J + j) = std::sqrt((ch.direct_gains(0, j, k).array() + irs).abs2().sum());
        }
    return out;
}

} // namespace nrpos
