// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#include "nrpos/experiment.hpp"

#include "nrpos/channel.hpp"
#include "nrpos/common.hpp"
#include "nrpos/homd.hpp"
#include "nrpos/matching.hpp"
#include "nrpos/power.hpp"
#include "nrpos/problem.hpp"
#include "nrpos/rng.hpp"
#include "nrpos/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace nrpos
{

std::string to_string(Scheme s)
{
    switch (s)
    {
    case Scheme::BL0:
        return "BL0";
    case Scheme::BL1:
        return "BL1";
    case Scheme::BL2:
        return "BL2";
    case Scheme::BL3:
        return "BL3";
    case Scheme::proposed:
        return "proposed";
    }
    return "?";
}

Scheme scheme_from_string(const std::string& s)
{
    for (Scheme c : {Scheme::BL0, Scheme::BL1, Scheme::BL2, Scheme::BL3, Scheme::proposed})
        if (to_string(c) == s)
            return c;
    throw ConfigError("unknown scheme '" + s + "' (expected BL0, BL1, BL2, BL3 or proposed)");
}

std::vector<Scheme> parse_schemes(const std::vector<std::string>& names)
{
    std::vector<Scheme> out;
    for (const auto& n : names)
    {
        const Scheme s = scheme_from_string(n);
        if (std::find(out.begin(), out.end(), s) == out.end())
            out.push_back(s);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::uint64_t realization_seed(std::uint64_t master, int r)
{
    return split(master, static_cast<std::uint64_t>(r)).key();
}

std::vector<double> run_realization(const ScenarioConfig& scfg, const OptimizerConfig& ocfg,
                                    const std::vector<Scheme>& schemes, std::uint64_t seed)
{
    const Scenario scenario = generate_scenario(scfg, seed);
    const CounterRng root(seed);
    CounterRng channel_rng = root.split(1);
    const ChannelRealization channels = draw_direct_channels(scenario, channel_rng);
    const Problem problem(scenario, channels, root.split(2));
    CounterRng init_rng = root.split(3);
    const AssignmentState init = random_initial_state(problem, init_rng);

    PowerOptions popt;
    popt.floor_ratio = ocfg.power_floor_ratio;
    popt.kkt_tol = ocfg.kkt_tol;
    MatchingOptions mopt;
    mopt.max_swaps = ocfg.max_swaps;

    Scheme deepest = Scheme::BL0;
    for (Scheme s : schemes)
        if (s != Scheme::proposed)
            deepest = std::max(deepest, s);

    // Baselines are successive stages of one pass over the same initial state
    std::vector<double> stage(4, 0.0);
    AssignmentState st = init;
    stage[0] = problem.objective(st);
    if (deepest >= Scheme::BL1)
    {
        const PowerSolution ps = solve_power_privacy(problem, st, popt);
        st.power_w = ps.power_w;
        st.anchor_var_m2 = ps.anchor_var_m2;
        stage[1] = problem.objective(st);
    }
    if (deepest >= Scheme::BL2)
    {
        st = user_anchor_matching(problem, st, mopt).state;
        stage[2] = problem.objective(st);
    }
    if (deepest >= Scheme::BL3)
    {
        st = numerology_offset_matching(problem, st, mopt).state;
        stage[3] = problem.objective(st);
    }

    std::vector<double> out;
    out.reserve(schemes.size());
    for (Scheme s : schemes)
    {
        if (s == Scheme::proposed)
            out.push_back(homd(problem, init, ocfg, root.split(4).key()).objective);
        else
            out.push_back(stage[static_cast<int>(s)]);
    }
    return out;
}

double percentile(std::vector<double> v, double q)
{
    if (v.empty())
        return 0.0;
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<size_t>(std::floor(pos));
    const size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] + (v[hi] - v[lo]) * frac;
}

namespace
{
MetricsRow summarize(const std::string& sweep, Scheme scheme, std::vector<double> samples, std::uint64_t seed,
                     double wall)
{
    MetricsRow row;
    row.sweep = sweep;
    row.scheme = to_string(scheme);
    row.realizations = static_cast<int>(samples.size());
    row.seed = seed;
    row.wall_s = wall;
    row.mean_max_err_m = samples.empty() ? 0.0 : std::accumulate(samples.begin(), samples.end(), 0.0) / samples.size();
    row.p50 = percentile(samples, 0.5);
    row.p90 = percentile(samples, 0.9);
    row.samples = std::move(samples);
    return row;
}
} // namespace

MetricsRow run_baseline(const Config& cfg, Scheme scheme, std::uint64_t seed)
{
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> v = run_realization(cfg.scenario(), cfg.optimizer(), {scheme}, seed);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return summarize("none", scheme, v, seed, wall);
}

void validate_spec(const ExperimentSpec& spec)
{
    if (spec.realizations < 1)
        throw ConfigError("realizations must be >= 1");
    if (spec.schemes.empty())
        throw ConfigError("at least one scheme is required");
    if (spec.sweep_param && spec.sweep_values.empty())
        throw ConfigError("sweep values must be non-empty when a sweep parameter is given");
    if (spec.threads < 0)
        throw ConfigError("threads must be >= 0");
    if (spec.config.scenario().num_anchors < 3)
        throw ConfigError("experiments need at least 3 anchors so every user can be positioned");
    const auto sv = validate_config(spec.config.scenario());
    const auto ov = validate_config(spec.config.optimizer());
    std::string msg;
    for (const auto& v : sv)
        msg += v + "; ";
    for (const auto& v : ov)
        msg += v + "; ";
    if (!msg.empty())
        throw ConfigError("invalid configuration: " + msg);
}

std::vector<MetricsRow> run_monte_carlo(const ExperimentSpec& spec,
                                        const std::function<void(const std::vector<MetricsRow>&)>& on_sweep_done)
{
    validate_spec(spec);
    std::vector<std::pair<std::string, Config>> points;
    if (spec.sweep_param)
    {
        for (const auto& v : spec.sweep_values)
        {
            Config c = spec.config;
            c.set(*spec.sweep_param, v);
            points.emplace_back(v, std::move(c));
        }
    }
    else
        points.emplace_back("none", spec.config);

    const int R = spec.realizations;
    int threads = spec.threads > 0 ? spec.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, R);

    std::vector<MetricsRow> rows;
    for (const auto& [label, cfg] : points)
    {
        const ScenarioConfig scfg = cfg.scenario();
        const OptimizerConfig ocfg = cfg.optimizer();
        require_valid(scfg);
        const auto t0 = std::chrono::steady_clock::now();

        std::vector<std::vector<double>> results(R);
        std::atomic<int> next{0};
        std::mutex err_mutex;
        std::exception_ptr error;
        auto worker = [&]() {
            for (;;)
            {
                const int r = next.fetch_add(1);
                if (r >= R)
                    return;
                {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (error)
                        return;
                }
                try
                {
                    results[r] = run_realization(scfg, ocfg, spec.schemes, realization_seed(spec.seed, r));
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!error)
                        error = std::current_exception();
                }
            }
        };
        if (threads == 1)
            worker();
        else
        {
            std::vector<std::thread> pool;
            for (int t = 0; t < threads; ++t)
                pool.emplace_back(worker);
            for (auto& th : pool)
                th.join();
        }
        if (error)
        {
            if (on_sweep_done)
                on_sweep_done(rows);
            std::rethrow_exception(error);
        }
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (size_t s = 0; s < spec.schemes.size(); ++s)
        {
            std::vector<double> samples(R);
            for (int r = 0; r < R; ++r)
                samples[r] = results[r][s];
            rows.push_back(summarize(label, spec.schemes[s], std::move(samples), spec.seed, wall));
        }
        if (on_sweep_done)
            on_sweep_done(rows);
    }
    return rows;
}

namespace
{
std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s)
    {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i)
    {
        const char c = line[i];
        if (quoted)
        {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"')
            {
                cur += '"';
                ++i;
            }
            else if (c == '"')
                quoted = false;
            else
                cur += c;
        }
        else if (c == '"')
            quoted = true;
        else if (c == ',')
        {
            out.push_back(cur);
            cur.clear();
        }
        else
            cur += c;
    }
    out.push_back(cur);
    return out;
}
} // namespace

void emit_csv(const std::vector<MetricsRow>& rows, const std::string& path)
{
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("cannot write " + path);
    f << "sweep,scheme,mean_max_err_m,p50,p90,realizations,seed\n";
    f << std::setprecision(17);
    for (const auto& r : rows)
        f << csv_field(r.sweep) << ',' << r.scheme << ',' << r.mean_max_err_m << ',' << r.p50 << ',' << r.p90 << ','
          << r.realizations << ',' << r.seed << '\n';
    if (!f)
        throw std::runtime_error("cannot write " + path);
}

std::vector<MetricsRow> read_csv(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("cannot read " + path);
    std::string line;
    std::getline(f, line);
    std::vector<MetricsRow> rows;
    while (std::getline(f, line))
    {
        if (line.empty())
            continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 7)
            throw std::runtime_error("malformed CSV row in " + path);
        MetricsRow r;
        r.sweep = fields[0];
        r.scheme = fields[1];
        r.mean_max_err_m = std::stod(fields[2]);
        r.p50 = std::stod(fields[3]);
        r.p90 = std::stod(fields[4]);
        r.realizations = std::stoi(fields[5]);
        r.seed = std::stoull(fields[6]);
        rows.push_back(std::move(r));
    }
    return rows;
}

void emit_cdf(const std::vector<MetricsRow>& rows, const std::string& path)
{
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("cannot write " + path);
    f << "sweep,scheme,realization,max_err_m\n";
    f << std::setprecision(17);
    for (const auto& r : rows)
        for (size_t i = 0; i < r.samples.size(); ++i)
            f << csv_field(r.sweep) << ',' << r.scheme << ',' << i << ',' << r.samples[i] << '\n';
    if (!f)
        throw std::runtime_error("cannot write " + path);
}

} // namespace nrpos
