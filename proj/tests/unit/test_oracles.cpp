// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#include "fixtures.hpp"

#include "nrpos/dqn.hpp"
#include "nrpos/homd.hpp"
#include "nrpos/oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>

using namespace nrpos;
using nrpos::testing::make_instance;
using nrpos::testing::small_config;

TEST_CASE("oracle report pass flag", "[oracles]")
{
    const auto ok = oracles::compare("a", 1.0 + 1e-7, 1.0, 1e-6);
    CHECK(ok.pass);
    CHECK(ok.rel_error == Catch::Approx(1e-7).epsilon(1e-6));
    const auto bad = oracles::compare("b", 1.1, 1.0, 1e-6);
    CHECK_FALSE(bad.pass);
    CHECK(bad.case_id == "b");
}

TEST_CASE("adaptive quadrature", "[oracles]")
{
    const auto r = oracles::adaptive_quadrature([](double x) { return std::exp(-x * x); }, -8.0, 8.0, {0.0}, 1e-12);
    CHECK(r.value == Catch::Approx(std::sqrt(M_PI)).epsilon(1e-12));
    REQUIRE_THROWS_AS(oracles::adaptive_quadrature([](double) { return std::numeric_limits<double>::quiet_NaN(); },
                                                   0.0, 1.0, {}, 1e-10),
                      NumericalError);
    REQUIRE_THROWS_AS(oracles::adaptive_quadrature([](double x) { return x; }, 1.0, 0.0, {}, 1e-10),
                      std::invalid_argument);
}

TEST_CASE("dense pseudo-inverse", "[oracles]")
{
    Eigen::MatrixXd a(4, 3);
    a << 1, 2, 0, 0, 1, 1, 1, 0, 1, 2, 1, 0;
    const Eigen::MatrixXd p = oracles::dense_pinv(a);
    const Eigen::MatrixXd ref = (a.transpose() * a).inverse() * a.transpose();
    CHECK(p.isApprox(ref, 1e-12));
    CHECK((a * p * a).isApprox(a, 1e-12));
}

TEST_CASE("finite differences", "[oracles]")
{
    // one linear layer: exact gradient of w . x
    const Eigen::Vector3d x(0.3, -1.2, 2.5);
    const Eigen::Vector3d w(1.0, 2.0, -0.5);
    const Eigen::VectorXd g =
        oracles::finite_diff_gradient([&](const Eigen::VectorXd& v) { return v.dot(x); }, w, 1e-4);
    CHECK((g - x).norm() <= 1e-9);

    CounterRng r(4);
    Mlp net(3, {4, 4, 4}, 2, r);
    Eigen::MatrixXd s = Eigen::MatrixXd::Random(3, 4);
    const std::vector<int> acts{0, 1, 1, 0};
    const Eigen::Vector4d y(0.1, 0.5, 0.9, 0.2);
    Eigen::VectorXd grad;
    net.loss_and_grad(s, acts, y, &grad);
    const Eigen::VectorXd fd = oracles::finite_diff_gradient(
        [&](const Eigen::VectorXd& p) {
            Mlp m = net;
            m.set_params(p);
            return m.loss_and_grad(s, acts, y, nullptr);
        },
        net.params(), 1e-5);
    CHECK((fd - grad).norm() <= 1e-4 * grad.norm());

    REQUIRE_THROWS_AS(oracles::finite_diff_gradient([](const Eigen::VectorXd& v) { return v.sum(); }, w, 1e-1),
                      std::invalid_argument);
}

TEST_CASE("exhaustive numerology enumeration", "[oracles]")
{
    ScenarioConfig one = small_config(1, 1);
    one.numerology_count = 1;
    one.comb_size = 1;
    const auto inst1 = make_instance(one, 1);
    AssignmentState st1 = AssignmentState::empty(1, 1, 1, 1);
    st1.assoc_x.setOnes();
    st1.assign(0, 0, 0);
    st1.power_w(0) = inst1.problem->power_cap(0, 0);
    st1.anchor_var_m2 = inst1.problem->xi2_min();
    const auto ex1 = oracles::exhaustive_numerology_matching({inst1.problem.get()}, st1);
    CHECK(ex1.states_enumerated == 1);

    const auto inst = make_instance(small_config(3, 2), 2);
    CounterRng r(2);
    const AssignmentState init = random_initial_state(*inst.problem, r);
    const auto ex = oracles::exhaustive_numerology_matching({inst.problem.get()}, init);
    CHECK(ex.states_enumerated == 64);
    CHECK_FALSE(ex.stable.empty());
    for (double o : ex.stable_objectives)
        CHECK(o >= ex.best_objective);
    // the global optimum is always exchange-stable
    CHECK(*std::min_element(ex.stable_objectives.begin(), ex.stable_objectives.end()) == ex.best_objective);
    REQUIRE_THROWS_AS(oracles::exhaustive_numerology_matching({inst.problem.get()}, init, 10), std::invalid_argument);
}

TEST_CASE("grid power oracle", "[oracles]")
{
    const auto inst = make_instance(small_config(2, 1), 3);
    const Problem& pb = *inst.problem;
    AssignmentState st = AssignmentState::empty(2, 1, 2, 2);
    st.assoc_x.setOnes();
    st.assign(0, 0, 0);
    st.assign(1, 0, 0);
    st.power_w << 0.5 * pb.power_cap(0, 0), 0.5 * pb.power_cap(1, 0);
    st.anchor_var_m2 = pb.xi2_min();
    const Eigen::MatrixXd lambda = Eigen::MatrixXd::Ones(2, 1);

    const auto corner = oracles::grid_power_solver({&pb}, st, lambda, 1, 1e-3);
    AssignmentState cap = st;
    cap.power_w << pb.power_cap(0, 0), pb.power_cap(1, 0);
    double expect = 0.0;
    for (int j = 0; j < 2; ++j)
        expect += st.anchor_var_m2(j) + pb.model().ranging_variance_A(j, 0, 0, cap);
    CHECK(corner.objective == Catch::Approx(expect).epsilon(1e-14));
    CHECK(corner.power_w[0] == pb.power_cap(0, 0));

    const auto g50 = oracles::grid_power_solver({&pb}, st, lambda, 50, 1e-3);
    const auto g200 = oracles::grid_power_solver({&pb}, st, lambda, 200, 1e-3);
    CHECK(std::abs(g50.objective - g200.objective) <= 5e-3 * g200.objective);

    const auto big = make_instance(small_config(3, 1), 3);
    REQUIRE_THROWS_AS(oracles::grid_power_solver({big.problem.get()}, st, Eigen::MatrixXd::Ones(3, 1), 5, 1e-3),
                      std::invalid_argument);
}
