// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#include "nrpos/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nrpos
{

namespace
{
Eigen::MatrixXd logistic(const Eigen::MatrixXd& z) { return (1.0 + (-z.array()).exp()).inverse().matrix(); }
} // namespace

Mlp::Mlp(int input_dim, const std::vector<int>& hidden, int output_dim, CounterRng& rng)
{
    if (input_dim < 1 || output_dim < 1)
        throw std::invalid_argument("network dimensions must be >= 1");
    std::vector<int> dims{input_dim};
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(output_dim);
    for (size_t layer = 0; layer + 1 < dims.size(); ++layer)
    {
        const int fan_in = dims[layer], fan_out = dims[layer + 1];
        if (fan_out < 1)
            throw std::invalid_argument("hidden widths must be >= 1");
        const double bound = std::sqrt(6.0 / fan_in);
        Eigen::MatrixXd w(fan_out, fan_in);
        for (int c = 0; c < fan_in; ++c)
            for (int r = 0; r < fan_out; ++r)
                w(r, c) = rng.uniform(-bound, bound);
        weights.push_back(std::move(w));
        biases.push_back(Eigen::VectorXd::Zero(fan_out));
    }
}

int Mlp::input_dim() const { return weights.empty() ? 0 : static_cast<int>(weights.front().cols()); }
int Mlp::output_dim() const { return weights.empty() ? 0 : static_cast<int>(weights.back().rows()); }

Eigen::MatrixXd Mlp::forward_batch(const Eigen::MatrixXd& x) const
{
    Eigen::MatrixXd h = x;
    for (size_t layer = 0; layer < weights.size(); ++layer)
    {
        Eigen::MatrixXd z = weights[layer] * h;
        z.colwise() += biases[layer];
        if (layer + 1 < weights.size())
            h = z.cwiseMax(0.0);
        else
            h = logistic(z);
    }
    return h;
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x) const { return forward_batch(x).col(0); }

double Mlp::loss_and_grad(const Eigen::MatrixXd& states, const std::vector<int>& actions,
                          const Eigen::VectorXd& targets, Eigen::VectorXd* grad) const
{
    const Eigen::Index B = states.cols();
    if (static_cast<Eigen::Index>(actions.size()) != B || targets.size() != B)
        throw std::invalid_argument("batch sizes differ");
    if (B == 0)
        throw std::invalid_argument("empty batch");
    const size_t nl = weights.size();
    std::vector<Eigen::MatrixXd> acts(nl + 1); // inputs of each layer plus output
    acts[0] = states;
    for (size_t layer = 0; layer < nl; ++layer)
    {
        Eigen::MatrixXd z = weights[layer] * acts[layer];
        z.colwise() += biases[layer];
        acts[layer + 1] = (layer + 1 < nl) ? Eigen::MatrixXd(z.cwiseMax(0.0)) : logistic(z);
    }
    const Eigen::MatrixXd& q = acts[nl];
    double loss = 0.0;
    Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(q.rows(), B);
    for (Eigen::Index b = 0; b < B; ++b)
    {
        const int a = actions[b];
        if (a < 0 || a >= q.rows())
            throw std::invalid_argument("action out of range");
        const double diff = targets(b) - q(a, b);
        loss += diff * diff;
        delta(a, b) = -2.0 * diff / B * q(a, b) * (1.0 - q(a, b));
    }
    loss /= B;
    if (!grad)
        return loss;

    std::vector<Eigen::MatrixXd> gw(nl);
    std::vector<Eigen::VectorXd> gb(nl);
    for (size_t layer = nl; layer-- > 0;)
    {
        gw[layer] = delta * acts[layer].transpose();
        gb[layer] = delta.rowwise().sum();
        if (layer > 0)
        {
            Eigen::MatrixXd back = weights[layer].transpose() * delta;
            delta = (acts[layer].array() > 0.0).select(back, 0.0);
        }
    }
    grad->resize(num_params());
    Eigen::Index off = 0;
    for (size_t layer = 0; layer < nl; ++layer)
    {
        const Eigen::Index nw = gw[layer].size();
        grad->segment(off, nw) = Eigen::Map<const Eigen::VectorXd>(gw[layer].data(), nw);
        off += nw;
        grad->segment(off, gb[layer].size()) = gb[layer];
        off += gb[layer].size();
    }
    return loss;
}

Eigen::Index Mlp::num_params() const
{
    Eigen::Index n = 0;
    for (size_t layer = 0; layer < weights.size(); ++layer)
        n += weights[layer].size() + biases[layer].size();
    return n;
}

Eigen::VectorXd Mlp::params() const
{
    Eigen::VectorXd p(num_params());
    Eigen::Index off = 0;
    for (size_t layer = 0; layer < weights.size(); ++layer)
    {
        const Eigen::Index nw = weights[layer].size();
        p.segment(off, nw) = Eigen::Map<const Eigen::VectorXd>(weights[layer].data(), nw);
        off += nw;
        p.segment(off, biases[layer].size()) = biases[layer];
        off += biases[layer].size();
    }
    return p;
}

void Mlp::set_params(const Eigen::VectorXd& p)
{
    if (p.size() != num_params())
        throw std::invalid_argument("parameter vector has the wrong length");
    Eigen::Index off = 0;
    for (size_t layer = 0; layer < weights.size(); ++layer)
    {
        const Eigen::Index nw = weights[layer].size();
        Eigen::Map<Eigen::VectorXd>(weights[layer].data(), nw) = p.segment(off, nw);
        off += nw;
        biases[layer] = p.segment(off, biases[layer].size());
        off += biases[layer].size();
    }
}

Adam::Adam(double lr, double beta1, double beta2, double eps) : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps) {}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad)
{
    if (m_.size() != params.size())
    {
        m_ = Eigen::VectorXd::Zero(params.size());
        v_ = Eigen::VectorXd::Zero(params.size());
        t_ = 0;
    }
    ++t_;
    m_ = b1_ * m_ + (1.0 - b1_) * grad;
    v_ = b2_ * v_ + (1.0 - b2_) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
    params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

ReplayBuffer::ReplayBuffer(int capacity) : capacity_(capacity)
{
    if (capacity < 1)
        throw std::invalid_argument("replay capacity must be >= 1");
}

void ReplayBuffer::push(Transition t)
{
    if (static_cast<int>(items_.size()) < capacity_)
        items_.push_back(std::move(t));
    else
        items_[next_] = std::move(t);
    next_ = (next_ + 1) % static_cast<std::size_t>(capacity_);
}

std::vector<Transition> ReplayBuffer::sample(int batch, CounterRng& rng) const
{
    std::vector<Transition> out;
    if (items_.empty())
        return out;
    out.reserve(batch);
    for (int b = 0; b < batch; ++b)
        out.push_back(items_[rng.below(items_.size())]);
    return out;
}

DqnAgent::DqnAgent(int state_dim, int num_actions, const DqnConfig& cfg, std::uint64_t seed)
    : state_dim_(state_dim), num_actions_(num_actions), cfg_(cfg), rng_(seed), adam_(cfg.learning_rate),
      buffer_(cfg.replay_capacity), epsilon_(cfg.eps_start)
{
    CounterRng init = rng_.split(0);
    rng_ = rng_.split(1);
    online_ = Mlp(state_dim, cfg.hidden, num_actions, init);
    target_ = online_;
}

int DqnAgent::select(const Eigen::VectorXd& state, bool explore)
{
    if (state.size() != state_dim_)
        throw std::invalid_argument("state has dimension " + std::to_string(state.size()) + ", expected " +
                                    std::to_string(state_dim_));
    if (explore && rng_.uniform() < epsilon_)
        return static_cast<int>(rng_.below(static_cast<std::uint64_t>(num_actions_)));
    const Eigen::VectorXd q = online_.forward(state);
    Eigen::Index best = 0;
    q.maxCoeff(&best);
    return static_cast<int>(best);
}

void DqnAgent::remember(Transition t) { buffer_.push(std::move(t)); }

double DqnAgent::train_step()
{
    if (buffer_.size() == 0)
        return 0.0;
    return train_step(buffer_.sample(std::min(cfg_.batch_size, buffer_.size()), rng_));
}

double DqnAgent::train_step(const std::vector<Transition>& batch)
{
    const Eigen::Index B = static_cast<Eigen::Index>(batch.size());
    if (B == 0)
        return 0.0;
    Eigen::MatrixXd s(state_dim_, B), sn(state_dim_, B);
    std::vector<int> actions(B);
    for (Eigen::Index b = 0; b < B; ++b)
    {
        s.col(b) = batch[b].state;
        sn.col(b) = batch[b].next_state.size() == state_dim_ ? batch[b].next_state : batch[b].state;
        actions[b] = batch[b].action;
    }
    const Eigen::MatrixXd qn = target_.forward_batch(sn);
    Eigen::VectorXd y(B);
    for (Eigen::Index b = 0; b < B; ++b)
        y(b) = batch[b].reward + (batch[b].done ? 0.0 : cfg_.gamma * qn.col(b).maxCoeff());
    Eigen::VectorXd grad;
    const double loss = online_.loss_and_grad(s, actions, y, &grad);
    Eigen::VectorXd p = online_.params();
    adam_.step(p, grad);
    online_.set_params(p);
    ++steps_;
    if (cfg_.target_refresh > 0 && steps_ % cfg_.target_refresh == 0)
        sync_target();
    return loss;
}

void DqnAgent::end_episode() { epsilon_ = std::max(cfg_.eps_end, epsilon_ * cfg_.eps_decay); }

} // namespace nrpos
