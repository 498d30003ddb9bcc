// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#pragma once

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nrpos
{

enum class LosMode
{
    mixed,
    open
};

struct DllConfig
{
    double early_late_spacing_chips = 0.02;
    double frontend_bw_factor = 2.0; // B_e = factor * B
    double loop_bw_hz = 0.2;
    double coherent_time_s = 0.02;
};

struct IrsConfig
{
    std::array<double, 3> position_m{50.0, 50.0, 3.0};
    int elements_h = 5;
    int elements_v = 5;
    int codebook_size = 25;
};

struct ScenarioConfig
{
    int num_anchors = 6;
    int num_users = 9;
    std::array<double, 2> area_m{100.0, 100.0};
    std::array<double, 3> ap_position_m{30.0, 30.0, 3.0};
    double user_height_m = 1.5;
    double anchor_height_m = 3.0;
    double bandwidth_hz = 4e6;
    double carrier_hz = 3.5e9;
    int comb_size = 4;
    int numerology_count = 2;
    double noise_psd_w_per_hz = 3.1812e-20;
    LosMode los_mode = LosMode::open;
    double ap_p_max_w = 0.22;
    double anchor_p_max_w = 0.05;
    double power_reference_bandwidth_hz = 0.0; // > 0: caps scale with B / reference
    double sensor_var_m2 = 0.0;
    double dp_sensitivity = 1.0;
    double eps_min = 1.0;
    double delta_min = 0.05;
    std::optional<double> xi2_min_override_m2 = 0.005;
    IrsConfig irs;
    DllConfig dll;
};

struct DqnConfig
{
    std::vector<int> hidden{64, 32, 32};
    double learning_rate = 1e-3;
    double gamma = 1.0;
    int replay_capacity = 10000;
    int batch_size = 64;
    int target_refresh = 100;
    double eps_start = 1.0;
    double eps_end = 0.05;
    double eps_decay = 0.995;
    int steps_per_iteration = 8;
    int episode_length = 1;
};

struct OptimizerConfig
{
    double tol_rel = 1e-4;
    int max_outer = 50;
    double power_floor_ratio = 1e-3;
    double kkt_tol = 1e-6;
    int max_swaps = 100000;
    DqnConfig dqn;
};

struct ExperimentConfig
{
    int realizations = 20;
    std::vector<std::string> schemes{"BL0", "BL1", "BL2", "BL3", "proposed"};
    std::uint64_t seed = 1;
    int threads = 0;
    std::string cdf_path;
};

// Full experiment configuration backed by a JSON document. Every leaf is addressable
// by a dotted path such as "scenario.irs.elements_h"; keys absent from the defaults
// are rejected.
class Config
{
public:
    Config();

    static Config from_file(const std::string& path);
    static Config from_json(const nlohmann::json& doc);

    // value_text is parsed as JSON when possible, otherwise taken as a string
    void set(const std::string& dotted_path, const std::string& value_text);
    void set_json(const std::string& dotted_path, const nlohmann::json& value);
    const nlohmann::json& get(const std::string& dotted_path) const;

    const nlohmann::json& doc() const { return doc_; }

    ScenarioConfig scenario() const;
    OptimizerConfig optimizer() const;
    ExperimentConfig experiment() const;

    static const nlohmann::json& defaults();

private:
    nlohmann::json doc_;
};

// Empty result iff every invariant of the generated scenario types holds.
std::vector<std::string> validate_config(const ScenarioConfig& cfg);
std::vector<std::string> validate_config(const OptimizerConfig& cfg);

std::string to_string(LosMode mode);
LosMode los_mode_from_string(const std::string& s);

} // namespace nrpos
