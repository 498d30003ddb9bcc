// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#include "bandit.hpp"
#include "fixtures.hpp"

#include "nrpos/dqn.hpp"
#include "nrpos/homd.hpp"
#include "nrpos/matching.hpp"
#include "nrpos/oracles.hpp"
#include "nrpos/power.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

using namespace nrpos;
using nrpos::testing::make_instance;
using nrpos::testing::small_config;

namespace
{
AssignmentState full_state(const Problem& pb, CounterRng& rng)
{
    const int J = pb.num_anchors(), K = pb.num_users();
    AssignmentState st = AssignmentState::empty(J, K, pb.numerology_count(), pb.comb_size());
    st.assoc_x.setOnes();
    for (int j = 0; j < J; ++j)
    {
        const int l = static_cast<int>(rng.below(pb.numerology_count()));
        st.assign(j, l, static_cast<int>(rng.below(pb.comb_size())));
        st.power_w(j) = pb.power_cap(j, l);
    }
    st.anchor_var_m2 = pb.xi2_min();
    return st;
}

bool contains(const std::vector<AssignmentState>& set, const AssignmentState& st)
{
    return std::any_of(set.begin(), set.end(), [&](const AssignmentState& s) {
        return s.assoc_x == st.assoc_x && s.numerology_u == st.numerology_u && s.offset_v == st.offset_v;
    });
}
} // namespace

// ---------------------------------------------------------------- power / privacy

TEST_CASE("single link: power at the cap, privacy at the floor", "[power]")
{
    const auto inst = make_instance(small_config(1, 1), 2);
    const Problem& pb = *inst.problem;
    AssignmentState st = AssignmentState::empty(1, 1, 2, 2);
    st.assoc_x.setOnes();
    st.assign(0, 1, 0);
    st.power_w(0) = 0.3 * pb.power_cap(0, 1);
    st.anchor_var_m2 = Eigen::VectorXd::Constant(1, 1.0);
    const Eigen::MatrixXd lambda = Eigen::MatrixXd::Ones(1, 1);
    const PowerSolution sol = solve_power_privacy(pb, st, lambda, PowerOptions{});
    CHECK(sol.power_w(0) == Catch::Approx(pb.power_cap(0, 1)).epsilon(1e-6));
    CHECK(sol.anchor_var_m2(0) == pb.xi2_min()(0));
    CHECK(sol.kkt_residual <= 1e-6);
}

TEST_CASE("two-anchor power solve matches the grid oracle", "[power]")
{
    for (std::uint64_t seed = 0; seed < 3; ++seed)
    {
        const auto inst = make_instance(small_config(2, 1), 20 + seed);
        const Problem& pb = *inst.problem;
        CounterRng r(seed);
        AssignmentState st = full_state(pb, r);
        st.assign(1, st.numerology_of(0), st.offset_of(0)); // share the comb so interference binds
        st.power_w(1) = pb.power_cap(1, st.numerology_of(1));
        const Eigen::MatrixXd lambda = Eigen::MatrixXd::Constant(2, 1, 1.3);
        const PowerSolution sol = solve_power_privacy(pb, st, lambda, PowerOptions{});
        REQUIRE(sol.kkt_residual <= 1e-6);
        const oracles::MatchingInstance mi{&pb};
        const auto grid = oracles::grid_power_solver(mi, st, lambda, 200, 1e-3);
        REQUIRE(sol.epsilon_obj <= grid.objective * 1.01);
        REQUIRE(sol.epsilon_obj >= grid.objective * 0.99);
    }
}

TEST_CASE("raising the privacy floor never lowers the optimum", "[power]")
{
    ScenarioConfig lo = small_config(2, 1), hi = small_config(2, 1);
    lo.xi2_min_override_m2 = 0.005;
    hi.xi2_min_override_m2 = 0.05;
    const auto a = make_instance(lo, 4), b = make_instance(hi, 4);
    CounterRng r(1);
    const AssignmentState st = full_state(*a.problem, r);
    const Eigen::MatrixXd lambda = Eigen::MatrixXd::Ones(2, 1);
    const double ea = solve_power_privacy(*a.problem, st, lambda, PowerOptions{}).epsilon_obj;
    const double eb = solve_power_privacy(*b.problem, st, lambda, PowerOptions{}).epsilon_obj;
    CHECK(eb >= ea);
}

TEST_CASE("power solve never worsens the objective at the cap", "[power]")
{
    const auto inst = make_instance(small_config(4, 3), 9);
    const Problem& pb = *inst.problem;
    CounterRng r(9);
    const AssignmentState st = random_initial_state(pb, r);
    const PowerSolution sol = solve_power_privacy(pb, st, PowerOptions{});
    AssignmentState after = st;
    after.power_w = sol.power_w;
    after.anchor_var_m2 = sol.anchor_var_m2;
    CHECK(sol.kkt_residual <= 1e-6);
    CHECK(pb.objective(after) <= pb.objective(st) * (1 + 1e-9));
    CHECK(std::sqrt(sol.epsilon_obj) == Catch::Approx(pb.objective(after)).epsilon(1e-6));
    for (int j = 0; j < 4; ++j)
    {
        CHECK(sol.power_w(j) <= pb.power_cap(j, st.numerology_of(j)) * (1 + 1e-12));
        CHECK(sol.power_w(j) >= 1e-3 * pb.power_cap(j, st.numerology_of(j)) * (1 - 1e-12));
    }
}

// ---------------------------------------------------------------- preferences

TEST_CASE("preference values", "[matching]")
{
    PositioningReport rep;
    rep.phi = Eigen::Vector2d(0.4, 0.7);
    rep.lambda = Eigen::MatrixXd::Ones(3, 2);
    rep.sigma2 = Eigen::MatrixXd::Constant(3, 2, 0.04);
    AssignmentState st = AssignmentState::empty(3, 2, 1, 1);
    st.assoc_x << 1, 1, 1, 0, 0, 0;
    const NumerologyPreferences np = numerology_preferences(rep, st);
    CHECK(np.anchor(0) == 0.7);
    CHECK(np.anchor(1) == 0.4);
    CHECK(np.anchor(2) == 0.0);
    CHECK(np.option == 0.7);
    const AssociationPreferences ap = association_preferences(rep, st);
    CHECK(ap.user(0) == Catch::Approx(2 * 0.2).epsilon(1e-15));
    CHECK(ap.user(1) == Catch::Approx(0.2).epsilon(1e-15));
    CHECK(ap.anchor(2) == 0.0);

    const auto inst = make_instance(small_config(3, 2), 1);
    CounterRng r(1);
    const AssignmentState s2 = random_initial_state(*inst.problem, r);
    const PositioningReport full = inst.problem->evaluate(s2);
    CHECK(numerology_preferences(full, s2).option == full.phi.maxCoeff());
}

// ---------------------------------------------------------------- matching

TEST_CASE("numerology matching lands in the certified stable set", "[matching]")
{
    for (std::uint64_t seed = 0; seed < 3; ++seed)
    {
        const auto inst = make_instance(small_config(3, 2), 50 + seed);
        const Problem& pb = *inst.problem;
        CounterRng r(seed);
        const AssignmentState init = random_initial_state(pb, r);
        const oracles::MatchingInstance mi{&pb};
        const auto ex = oracles::exhaustive_numerology_matching(mi, init);
        REQUIRE(ex.states_enumerated == 64); // (L * comb)^J
        const MatchingResult res = numerology_offset_matching(pb, init, MatchingOptions{});
        REQUIRE(res.converged);
        REQUIRE(contains(ex.stable, res.state));
        REQUIRE(res.objective_trace.back() >= ex.best_objective * (1 - 1e-12));
        REQUIRE_FALSE(oracles::numerology_blocking_pair_exists(mi, res.state));
        for (size_t t = 1; t < res.objective_trace.size(); ++t)
            REQUIRE(res.objective_trace[t] < res.objective_trace[t - 1]);

        const MatchingResult again = numerology_offset_matching(pb, res.state, MatchingOptions{});
        CHECK(again.swaps + again.hole_moves == 0);
        CHECK(again.state == res.state);
    }
}

TEST_CASE("numerology matching with a single option per anchor is a fixed point", "[matching]")
{
    ScenarioConfig cfg = small_config(3, 1);
    cfg.numerology_count = 1;
    cfg.comb_size = 1;
    const auto inst = make_instance(cfg, 3);
    CounterRng r(3);
    const AssignmentState init = random_initial_state(*inst.problem, r);
    const oracles::MatchingInstance mi{inst.problem.get()};
    const auto ex = oracles::exhaustive_numerology_matching(mi, init);
    CHECK(ex.states_enumerated == 1);
    CHECK(ex.stable.size() == 1);
    const MatchingResult res = numerology_offset_matching(*inst.problem, init, MatchingOptions{});
    CHECK(res.swaps + res.hole_moves == 0);
}

TEST_CASE("user-anchor matching", "[matching]")
{
    SECTION("one user and three anchors keeps every link")
    {
        const auto inst = make_instance(small_config(3, 1), 5);
        CounterRng r(5);
        const AssignmentState init = random_initial_state(*inst.problem, r);
        const MatchingResult res = user_anchor_matching(*inst.problem, init, MatchingOptions{});
        CHECK(res.state.assoc_x.sum() == 3);
    }
    SECTION("output is certified stable")
    {
        for (std::uint64_t seed = 0; seed < 3; ++seed)
        {
            const auto inst = make_instance(small_config(4, 2), 60 + seed);
            const Problem& pb = *inst.problem;
            CounterRng r(seed);
            const AssignmentState init = random_initial_state(pb, r);
            const MatchingResult res = user_anchor_matching(pb, init, MatchingOptions{});
            const oracles::MatchingInstance mi{&pb};
            REQUIRE_FALSE(oracles::user_anchor_blocking_pair_exists(mi, res.state));
            const auto ex = oracles::exhaustive_user_anchor_matching(mi, init);
            REQUIRE(ex.states_enumerated == 25); // five subsets of size >= 3 per user
            REQUIRE(contains(ex.stable, res.state));
            for (size_t t = 1; t < res.objective_trace.size(); ++t)
                REQUIRE(res.objective_trace[t] < res.objective_trace[t - 1]);
            for (int k = 0; k < 2; ++k)
                REQUIRE(res.state.assoc_x.col(k).sum() >= 3);
        }
    }
    SECTION("the optimal subset drops an anchor that only adds error")
    {
        // anchor 3 is throttled to the power floor, so its ranging variance dominates
        const auto inst = make_instance(small_config(4, 1), 0);
        const Problem& pb = *inst.problem;
        CounterRng r(0);
        AssignmentState st = random_initial_state(pb, r);
        st.power_w(3) = 1e-3 * pb.power_cap(3, st.numerology_of(3));
        const oracles::MatchingInstance mi{&pb};
        const auto ex = oracles::exhaustive_user_anchor_matching(mi, st);
        double best_with = std::numeric_limits<double>::infinity();
        double best_without = std::numeric_limits<double>::infinity();
        for (int mask = 0; mask < 16; ++mask)
        {
            if (__builtin_popcount(mask) < 3)
                continue;
            AssignmentState c = st;
            for (int j = 0; j < 4; ++j)
                c.assoc_x(j, 0) = (mask >> j) & 1;
            const double obj = pb.objective(c);
            ((mask & 8) ? best_with : best_without) = std::min((mask & 8) ? best_with : best_without, obj);
        }
        CHECK(best_without < best_with);
        CHECK(ex.best_objective == Catch::Approx(best_without).epsilon(1e-12));
    }
}

// ---------------------------------------------------------------- DQN

TEST_CASE("greedy selection follows the output layer", "[dqn]")
{
    DqnConfig cfg;
    cfg.hidden = {4, 4, 4};
    DqnAgent agent(3, 5, cfg, 1);
    Mlp& net = agent.online();
    for (auto& w : net.weights)
        w.setZero();
    for (auto& b : net.biases)
        b.setZero();
    net.biases.back()(3) = 2.0;
    const Eigen::Vector3d s(0.1, 0.2, 0.3);
    CHECK(agent.select(s, false) == 3);
    CHECK(agent.select(s, false) == 3);
    REQUIRE_THROWS_AS(agent.select(Eigen::Vector2d(0, 0), false), std::invalid_argument);
}

TEST_CASE("fully exploring agent picks beams uniformly", "[dqn]")
{
    DqnConfig cfg;
    cfg.hidden = {4, 4, 4};
    DqnAgent agent(2, 5, cfg, 2);
    agent.set_epsilon(1.0);
    std::vector<int> counts(5, 0);
    const int n = 10000;
    for (int t = 0; t < n; ++t)
        ++counts[agent.select(Eigen::Vector2d(0.5, 0.5), true)];
    double chi2 = 0.0;
    for (int c : counts)
        chi2 += (c - n / 5.0) * (c - n / 5.0) / (n / 5.0);
    CHECK(chi2 < 18.47); // chi-square, 4 dof, p = 0.001
}

TEST_CASE("backprop matches finite differences", "[dqn]")
{
    CounterRng r(3);
    Mlp net(5, {8, 8, 8}, 4, r);
    Eigen::MatrixXd states(5, 6);
    for (Eigen::Index i = 0; i < states.size(); ++i)
        states.data()[i] = r.uniform(-1.0, 1.0);
    const std::vector<int> actions{0, 3, 1, 2, 3, 0};
    Eigen::VectorXd targets(6);
    for (int b = 0; b < 6; ++b)
        targets(b) = r.uniform();
    Eigen::VectorXd grad;
    net.loss_and_grad(states, actions, targets, &grad);
    const Eigen::VectorXd p0 = net.params();
    const Eigen::VectorXd fd = oracles::finite_diff_gradient(
        [&](const Eigen::VectorXd& p) {
            Mlp m = net;
            m.set_params(p);
            return m.loss_and_grad(states, actions, targets, nullptr);
        },
        p0, 1e-5);
    CHECK((grad - fd).norm() <= 1e-4 * fd.norm());
}

TEST_CASE("hand-built two-action net loss", "[dqn]")
{
    DqnConfig cfg;
    cfg.hidden = {2, 2, 2};
    cfg.gamma = 1.0;
    DqnAgent agent(2, 2, cfg, 4);
    for (Mlp* net : {&agent.online(), &agent.target()})
    {
        for (auto& w : net->weights)
            w.setZero();
        for (auto& b : net->biases)
            b.setZero();
        net->biases.back() << 0.3, 0.3; // Q = logistic(0.3) for both actions
    }
    const double q = 1.0 / (1.0 + std::exp(-0.3));
    const Eigen::Vector2d s(0.2, 0.4);
    // zero reward, bootstrapped: y = 0 + max_a Q' = q
    CHECK(agent.train_step({{s, 0, 0.0, s, false}}) == Catch::Approx(0.0).margin(1e-15));
    DqnAgent terminal(2, 2, cfg, 4);
    for (auto& w : terminal.online().weights)
        w.setZero();
    for (auto& b : terminal.online().biases)
        b.setZero();
    terminal.online().biases.back() << 0.3, 0.3;
    // terminal transition: y = 0
    CHECK(terminal.train_step({{s, 1, 0.0, s, true}}) == Catch::Approx(q * q).epsilon(1e-14));
}

TEST_CASE("DQN learns a dominant beam", "[dqn]")
{
    CHECK(nrpos::testing::bandit_greedy_rate(2000, 5) >= 0.9);
}

TEST_CASE("replay buffer is a ring", "[dqn]")
{
    ReplayBuffer buf(3);
    for (int i = 0; i < 5; ++i)
        buf.push({Eigen::VectorXd::Constant(1, i), i, 0.0, Eigen::VectorXd(), true});
    CHECK(buf.size() == 3);
    CounterRng r(1);
    for (const auto& t : buf.sample(50, r))
        CHECK(t.action >= 2);
}

// ---------------------------------------------------------------- HOMD

TEST_CASE("fully forced instance reduces to the power solve", "[homd]")
{
    ScenarioConfig cfg = small_config(3, 1);
    cfg.numerology_count = 1;
    cfg.comb_size = 1;
    cfg.irs.codebook_size = 1;
    const auto inst = make_instance(cfg, 8);
    const Problem& pb = *inst.problem;
    CounterRng r(8);
    const AssignmentState init = random_initial_state(pb, r);
    REQUIRE(init.assoc_x.sum() == 3);
    const HomdSolution sol = homd(pb, init, OptimizerConfig{}, 1);
    AssignmentState forced = init;
    const PowerSolution ps = solve_power_privacy(pb, init, PowerOptions{});
    forced.power_w = ps.power_w;
    forced.anchor_var_m2 = ps.anchor_var_m2;
    CHECK(sol.objective == Catch::Approx(pb.objective(forced)).epsilon(1e-9));
    CHECK(sol.state.assoc_x == init.assoc_x);
}

TEST_CASE("HOMD is deterministic, monotone across matchings and never worse than its start", "[homd]")
{
    int not_worse = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        const auto inst = make_instance(small_config(4, 3), 100 + seed);
        const Problem& pb = *inst.problem;
        CounterRng r(seed);
        const AssignmentState init = random_initial_state(pb, r);
        OptimizerConfig oc;
        oc.max_outer = 4;
        const HomdSolution a = homd(pb, init, oc, seed);
        not_worse += a.objective <= pb.objective(init) ? 1 : 0;
        for (const auto& rec : a.iterations)
        {
            REQUIRE(rec.after_association <= rec.after_power);
            REQUIRE(rec.after_numerology <= rec.after_association);
        }
        for (size_t t = 1; t < a.history.size(); ++t)
            REQUIRE(a.history[t] <= a.history[t - 1]);
        CHECK(pb.objective(a.state) == a.objective);
        if (seed < 3)
        {
            const HomdSolution b = homd(pb, init, oc, seed);
            REQUIRE(b.objective == a.objective);
            REQUIRE(b.history == a.history);
            REQUIRE(b.state == a.state);
        }
    }
    CHECK(not_worse >= 18);
}
