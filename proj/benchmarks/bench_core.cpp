// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#include "nrpos/channel.hpp"
#include "nrpos/dqn.hpp"
#include "nrpos/homd.hpp"
#include "nrpos/matching.hpp"
#include "nrpos/numerology.hpp"
#include "nrpos/power.hpp"
#include "nrpos/problem.hpp"
#include "nrpos/rng.hpp"
#include "nrpos/scenario.hpp"
#include "nrpos/specfun.hpp"

#include <benchmark/benchmark.h>

#include <memory>

using namespace nrpos;

namespace
{
struct Fixture
{
    std::unique_ptr<Scenario> scenario;
    std::unique_ptr<ChannelRealization> channels;
    std::unique_ptr<Problem> problem;
    AssignmentState init;
};

// Desk-scale instance: J = 4, K = 4, 3x3 IRS, B = 4 MHz
Fixture make_fixture(std::uint64_t seed)
{
    ScenarioConfig cfg;
    cfg.num_anchors = 4;
    cfg.num_users = 4;
    cfg.irs.elements_h = 3;
    cfg.irs.elements_v = 3;
    cfg.irs.codebook_size = 9;
    Fixture f;
    const CounterRng root(seed);
    f.scenario = std::make_unique<Scenario>(generate_scenario(cfg, seed));
    CounterRng ch = root.split(1);
    f.channels = std::make_unique<ChannelRealization>(draw_direct_channels(*f.scenario, ch));
    f.problem = std::make_unique<Problem>(*f.scenario, *f.channels, root.split(2));
    CounterRng init_rng = root.split(3);
    f.init = random_initial_state(*f.problem, init_rng);
    return f;
}

void BM_QClosed(benchmark::State& state)
{
    const NumerologyConfig nc = numerology_params(0, 4e6, 4);
    int n = -100;
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(q_closed(n, nc, 4e6));
        n = n < 100 ? n + 1 : -100;
    }
}
BENCHMARK(BM_QClosed);

void BM_CClosed(benchmark::State& state)
{
    const SincIntegralParams p{-120e3, 300e3, 1 / 15e3, 1 / 30e3, 4e6};
    for (auto _ : state)
        benchmark::DoNotOptimize(c_closed(p));
}
BENCHMARK(BM_CClosed);

void BM_CQuadrature(benchmark::State& state)
{
    const SincIntegralParams p{-120e3, 300e3, 1 / 15e3, 1 / 30e3, 4e6};
    for (auto _ : state)
        benchmark::DoNotOptimize(c_quadrature(p));
}
BENCHMARK(BM_CQuadrature)->Unit(benchmark::kMillisecond);

void BM_RangingReport(benchmark::State& state)
{
    const Fixture f = make_fixture(1);
    f.problem->model().report(f.init); // fill the C-matrix cache
    for (auto _ : state)
        benchmark::DoNotOptimize(f.problem->model().report(f.init));
}
BENCHMARK(BM_RangingReport)->Unit(benchmark::kMillisecond);

void BM_PowerSolve(benchmark::State& state)
{
    const Fixture f = make_fixture(1);
    const PowerOptions opt;
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_power_privacy(*f.problem, f.init, opt));
}
BENCHMARK(BM_PowerSolve)->Unit(benchmark::kMillisecond);

void BM_UserAnchorMatching(benchmark::State& state)
{
    const Fixture f = make_fixture(1);
    for (auto _ : state)
        benchmark::DoNotOptimize(user_anchor_matching(*f.problem, f.init, MatchingOptions{}));
}
BENCHMARK(BM_UserAnchorMatching)->Unit(benchmark::kMillisecond);

void BM_NumerologyMatching(benchmark::State& state)
{
    const Fixture f = make_fixture(1);
    numerology_offset_matching(*f.problem, f.init, MatchingOptions{}); // fill the C-matrix cache
    for (auto _ : state)
        benchmark::DoNotOptimize(numerology_offset_matching(*f.problem, f.init, MatchingOptions{}));
}
BENCHMARK(BM_NumerologyMatching)->Unit(benchmark::kMillisecond);

void BM_DqnTrainStep(benchmark::State& state)
{
    DqnConfig cfg;
    DqnAgent agent(16, 9, cfg, 1);
    CounterRng r(2);
    for (int i = 0; i < cfg.batch_size; ++i)
    {
        Eigen::VectorXd s(16);
        for (int d = 0; d < 16; ++d)
            s(d) = r.uniform();
        agent.remember({s, static_cast<int>(r.below(9)), r.uniform(), s, true});
    }
    for (auto _ : state)
        benchmark::DoNotOptimize(agent.train_step());
}
BENCHMARK(BM_DqnTrainStep)->Unit(benchmark::kMicrosecond);

void BM_Homd(benchmark::State& state)
{
    const Fixture f = make_fixture(1);
    const OptimizerConfig cfg;
    for (auto _ : state)
        benchmark::DoNotOptimize(homd(*f.problem, f.init, cfg, 7));
}
BENCHMARK(BM_Homd)->Unit(benchmark::kMillisecond);
} // namespace

BENCHMARK_MAIN();
