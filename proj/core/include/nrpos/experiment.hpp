// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#pragma once

#include "nrpos/config.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace nrpos
{

enum class Scheme
{
    BL0,      // random X, U, V, beam; p at the cap; xi^2 at the floor
    BL1,      // + power/privacy solve
    BL2,      // + user-anchor matching
    BL3,      // + numerology/offset matching
    proposed, // full HOMD loop with DQN beam selection
};

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s); // throws ConfigError
std::vector<Scheme> parse_schemes(const std::vector<std::string>& names);

// Objectives (max_k Phi_k, m) of every requested scheme on one realization. All schemes share
// the scenario, channels, broadcast positions and random initial state of the realization.
std::vector<double> run_realization(const ScenarioConfig& scfg, const OptimizerConfig& ocfg,
                                    const std::vector<Scheme>& schemes, std::uint64_t realization_seed);

// Seed of realization r: key of split(master, r)
std::uint64_t realization_seed(std::uint64_t master, int r);

struct MetricsRow
{
    std::string sweep = "none";
    std::string scheme;
    double mean_max_err_m = 0.0;
    double p50 = 0.0;
    double p90 = 0.0;
    int realizations = 0;
    std::uint64_t seed = 0;
    double wall_s = 0.0;
    std::vector<double> samples; // per-realization max_k Phi_k in realization order
};

// Single realization of one scheme
MetricsRow run_baseline(const Config& cfg, Scheme scheme, std::uint64_t realization_seed);

struct ExperimentSpec
{
    Config config;
    std::optional<std::string> sweep_param;
    std::vector<std::string> sweep_values; // JSON text per value
    std::vector<Scheme> schemes;
    int realizations = 1;
    std::uint64_t seed = 1;
    int threads = 0; // 0: hardware concurrency
};

// Validates an ExperimentSpec; throws ConfigError
void validate_spec(const ExperimentSpec& spec);

// Runs every (sweep value, scheme); rows come out ordered by sweep value then scheme.
// on_sweep_done receives all rows completed so far after each sweep value.
std::vector<MetricsRow> run_monte_carlo(const ExperimentSpec& spec,
                                        const std::function<void(const std::vector<MetricsRow>&)>& on_sweep_done = {});

// Linear-interpolated percentile, q in [0, 1]
double percentile(std::vector<double> values, double q);

// Header sweep,scheme,mean_max_err_m,p50,p90,realizations,seed; throws std::runtime_error when unwritable
void emit_csv(const std::vector<MetricsRow>& rows, const std::string& path);
std::vector<MetricsRow> read_csv(const std::string& path);

// Per-realization samples: sweep,scheme,realization,max_err_m
void emit_cdf(const std::vector<MetricsRow>& rows, const std::string& path);

} // namespace nrpos
