// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#pragma once

#include "nrpos/config.hpp"
#include "nrpos/rng.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace nrpos
{

// Fully connected net: ReLU hidden layers, logistic output
class Mlp
{
public:
    Mlp() = default;
    Mlp(int input_dim, const std::vector<int>& hidden, int output_dim, CounterRng& rng);

    int input_dim() const;
    int output_dim() const;

    Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& x) const; // columns are samples

    // Mean over the batch of (target - Q(s, a))^2; fills grad (flattened like params()) when non-null
    double loss_and_grad(const Eigen::MatrixXd& states, const std::vector<int>& actions,
                         const Eigen::VectorXd& targets, Eigen::VectorXd* grad) const;

    Eigen::Index num_params() const;
    Eigen::VectorXd params() const;
    void set_params(const Eigen::VectorXd& p);

    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
};

class Adam
{
public:
    explicit Adam(double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
    void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);

private:
    double lr_, b1_, b2_, eps_;
    long t_ = 0;
    Eigen::VectorXd m_, v_;
};

struct Transition
{
    Eigen::VectorXd state;
    int action = 0;
    double reward = 0.0;
    Eigen::VectorXd next_state;
    bool done = true;
};

class ReplayBuffer
{
public:
    explicit ReplayBuffer(int capacity);
    void push(Transition t);
    std::vector<Transition> sample(int batch, CounterRng& rng) const;
    int size() const { return static_cast<int>(items_.size()); }

private:
    int capacity_;
    std::size_t next_ = 0;
    std::vector<Transition> items_;
};

class DqnAgent
{
public:
    DqnAgent(int state_dim, int num_actions, const DqnConfig& cfg, std::uint64_t seed);

    // Greedy argmax of the online net, or epsilon-greedy when explore is set.
    // Throws std::invalid_argument on a state of the wrong dimension.
    int select(const Eigen::VectorXd& state, bool explore);

    void remember(Transition t);
    // One Adam step on a replay sample; returns the batch loss (0 when the buffer is empty)
    double train_step();
    double train_step(const std::vector<Transition>& batch);
    void end_episode(); // decays epsilon

    double epsilon() const { return epsilon_; }
    void set_epsilon(double e) { epsilon_ = e; }
    long steps() const { return steps_; }
    int num_actions() const { return num_actions_; }
    int state_dim() const { return state_dim_; }

    Mlp& online() { return online_; }
    Mlp& target() { return target_; }
    const Mlp& online() const { return online_; }
    const Mlp& target() const { return target_; }
    void sync_target() { target_ = online_; }

private:
    int state_dim_;
    int num_actions_;
    DqnConfig cfg_;
    CounterRng rng_;
    Mlp online_, target_;
    Adam adam_;
    ReplayBuffer buffer_;
    double epsilon_;
    long steps_ = 0;
};

} // namespace nrpos
