// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#include "nrpos/homd.hpp"

#include "nrpos/channel.hpp"
#include "nrpos/dqn.hpp"
#include "nrpos/matching.hpp"
#include "nrpos/power.hpp"
#include "nrpos/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nrpos
{

AssignmentState random_initial_state(const Problem& problem, CounterRng& rng)
{
    const int J = problem.num_anchors(), K = problem.num_users();
    const int L = problem.numerology_count(), comb = problem.comb_size();
    if (J < 3)
        throw NumericalError("at least 3 anchors are needed to position a user");
    AssignmentState st = AssignmentState::empty(J, K, L, comb);
    for (int j = 0; j < J; ++j)
    {
        const int l = static_cast<int>(rng.below(static_cast<std::uint64_t>(L)));
        const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(comb)));
        st.assign(j, l, i);
        st.power_w(j) = problem.power_cap(j, l);
    }
    st.anchor_var_m2 = problem.xi2_min();
    st.beam_index = static_cast<int>(rng.below(static_cast<std::uint64_t>(problem.codebook_size())));

    for (int attempt = 0; attempt < 1000; ++attempt)
    {
        st.assoc_x.setZero();
        for (int k = 0; k < K; ++k)
        {
            const int count = 3 + static_cast<int>(rng.below(static_cast<std::uint64_t>(J - 2)));
            std::vector<int> order(J);
            for (int j = 0; j < J; ++j)
                order[j] = j;
            for (int j = J - 1; j > 0; --j)
                std::swap(order[j], order[rng.below(static_cast<std::uint64_t>(j + 1))]);
            for (int c = 0; c < count; ++c)
                st.assoc_x(order[c], k) = 1;
        }
        if (std::isfinite(problem.objective(st)))
            return st;
    }
    throw NumericalError("no non-degenerate random association found");
}

Eigen::VectorXd beam_state(const Problem& problem, int beam)
{
    Eigen::VectorXd s = channel_norms(problem.channels(), problem.model().codebook().entries.at(beam));
    const double m = s.maxCoeff();
    if (m > 0.0)
        s /= m;
    return s;
}

HomdSolution homd(const Problem& problem, const AssignmentState& init, const OptimizerConfig& cfg,
                  std::uint64_t agent_seed)
{
    PowerOptions popt;
    popt.floor_ratio = cfg.power_floor_ratio;
    popt.kkt_tol = cfg.kkt_tol;
    MatchingOptions mopt;
    mopt.max_swaps = cfg.max_swaps;

    const int ncb = problem.codebook_size();
    DqnAgent agent(problem.num_users() * problem.num_anchors(), ncb, cfg.dqn, agent_seed);
    const int episode_length = std::max(1, cfg.dqn.episode_length);

    HomdSolution sol;
    AssignmentState st = init;
    sol.state = st;
    sol.objective = problem.objective(st);

    auto track = [&](const AssignmentState& s, double obj) {
        if (obj < sol.objective)
        {
            sol.objective = obj;
            sol.state = s;
        }
    };

    int prev_beam = st.beam_index;
    long step_counter = 0;
    for (int it = 0; it < cfg.max_outer; ++it)
    {
        const double start = sol.objective;
        IterationRecord rec;

        const PowerSolution ps = solve_power_privacy(problem, st, popt);
        st.power_w = ps.power_w;
        st.anchor_var_m2 = ps.anchor_var_m2;
        rec.kkt_residual = ps.kkt_residual;
        rec.after_power = problem.objective(st);
        track(st, rec.after_power);

        const MatchingResult ua = user_anchor_matching(problem, st, mopt);
        st = ua.state;
        rec.association_moves = ua.swaps + ua.hole_moves;
        rec.after_association = ua.objective_trace.back();
        track(st, rec.after_association);

        const MatchingResult nm = numerology_offset_matching(problem, st, mopt);
        st = nm.state;
        rec.numerology_moves = nm.swaps + nm.hole_moves;
        rec.after_numerology = nm.objective_trace.back();
        track(st, rec.after_numerology);

        if (ncb > 1)
        {
            Eigen::VectorXd s = beam_state(problem, prev_beam);
            double reward_sum = 0.0;
            for (int step = 0; step < cfg.dqn.steps_per_iteration; ++step)
            {
                const int a = agent.select(s, true);
                AssignmentState cand = st;
                cand.beam_index = a;
                const double obj = problem.objective(cand);
                track(cand, obj);
                double r = std::isfinite(obj) ? 1.0 - obj : 0.0;
                if (r < 0.0)
                {
                    r = 0.0;
                    ++rec.clipped_rewards;
                }
                reward_sum += r;
                Eigen::VectorXd sn = beam_state(problem, a);
                ++step_counter;
                const bool done = step_counter % episode_length == 0;
                agent.remember({s, a, r, sn, done});
                agent.train_step();
                if (done)
                    agent.end_episode();
                s = std::move(sn);
            }
            rec.mean_reward = cfg.dqn.steps_per_iteration > 0 ? reward_sum / cfg.dqn.steps_per_iteration : 0.0;
            const int a = agent.select(beam_state(problem, prev_beam), false);
            st.beam_index = a;
            prev_beam = a;
        }
        rec.beam = st.beam_index;
        rec.after_beam = problem.objective(st);
        track(st, rec.after_beam);

        sol.iterations.push_back(rec);
        sol.history.push_back(sol.objective);
        if (start - sol.objective < cfg.tol_rel * start)
            break;
    }
    return sol;
}

} // namespace nrpos
