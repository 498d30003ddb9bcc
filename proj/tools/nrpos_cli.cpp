// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

// Command line runner: Monte Carlo runs, parameter sweeps, baseline comparisons and the
// integral oracle check.

#include "nrpos/common.hpp"
#include "nrpos/config.hpp"
#include "nrpos/experiment.hpp"
#include "nrpos/numerology.hpp"
#include "nrpos/oracles.hpp"
#include "nrpos/rng.hpp"
#include "nrpos/specfun.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace nrpos;
using nlohmann::json;

namespace
{
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr const char* kSeedEnv = "NRPOS_SEED";

struct Common
{
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out = "results.csv";
    std::optional<int> realizations;
    std::optional<int> threads;
    std::string cdf;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--config", c.config_path, "JSON config file; built-in defaults when omitted");
    app->add_option("--seed", c.seed, std::string("Master seed; overrides ") + kSeedEnv + " and the config");
    app->add_option("--out", c.out, "CSV output path")->capture_default_str();
    app->add_option("--realizations", c.realizations, "Monte Carlo realizations")->check(CLI::PositiveNumber);
    app->add_option("--threads", c.threads, "Worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
    app->add_option("--cdf", c.cdf, "Also write per-realization samples to this CSV");
    app->add_option("--set", c.overrides, "Override a config leaf, e.g. --set scenario.num_anchors=4");
}

// Splits on commas outside brackets and quotes so JSON arrays and objects stay whole
std::vector<std::string> split_values(const std::string& text)
{
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    bool quoted = false;
    for (size_t i = 0; i < text.size(); ++i)
    {
        const char ch = text[i];
        if (quoted)
        {
            if (ch == '\\' && i + 1 < text.size())
            {
                cur += ch;
                cur += text[++i];
                continue;
            }
            if (ch == '"')
                quoted = false;
        }
        else if (ch == '"')
            quoted = true;
        else if (ch == '[' || ch == '{')
            ++depth;
        else if (ch == ']' || ch == '}')
            --depth;
        else if (ch == ',' && depth == 0)
        {
            out.push_back(cur);
            cur.clear();
            continue;
        }
        cur += ch;
    }
    if (depth != 0 || quoted)
        throw ConfigError("unbalanced brackets or quotes in sweep values \"" + text + "\"");
    out.push_back(cur);
    for (const auto& v : out)
        if (v.empty())
            throw ConfigError("empty entry in sweep values \"" + text + "\"");
    return out;
}

json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open \"" + path + "\"");
    try
    {
        return json::parse(in, nullptr, true, true);
    }
    catch (const json::parse_error& e)
    {
        throw ConfigError("cannot parse \"" + path + "\": " + e.what());
    }
}

std::uint64_t parse_seed_env(const char* text)
{
    try
    {
        size_t used = 0;
        const unsigned long long v = std::stoull(text, &used, 0);
        if (used != std::string(text).size())
            throw std::invalid_argument("trailing characters");
        return v;
    }
    catch (const std::exception&)
    {
        throw ConfigError(std::string(kSeedEnv) + " must be an unsigned integer, got \"" + text + "\"");
    }
}

ExperimentSpec build_spec(const Common& c, const std::optional<json>& config_doc)
{
    ExperimentSpec spec;
    if (config_doc)
        spec.config = Config::from_json(*config_doc);
    else if (!c.config_path.empty())
        spec.config = Config::from_file(c.config_path);
    for (const auto& kv : c.overrides)
    {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("--set expects path=value, got \"" + kv + "\"");
        spec.config.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    const ExperimentConfig e = spec.config.experiment();
    spec.realizations = c.realizations.value_or(e.realizations);
    spec.threads = c.threads.value_or(e.threads);
    spec.schemes = parse_schemes(e.schemes);
    spec.seed = e.seed;
    if (const char* env = std::getenv(kSeedEnv); env && *env)
        spec.seed = parse_seed_env(env);
    if (c.seed)
        spec.seed = *c.seed;
    return spec;
}

void print_rows(const std::vector<MetricsRow>& rows)
{
    std::printf("%-24s %-9s %14s %12s %12s %5s\n", "sweep", "scheme", "mean_max_err_m", "p50", "p90", "n");
    for (const auto& r : rows)
        std::printf("%-24s %-9s %14.6g %12.6g %12.6g %5d\n", r.sweep.c_str(), r.scheme.c_str(), r.mean_max_err_m,
                    r.p50, r.p90, r.realizations);
}

int execute(const ExperimentSpec& spec, const Common& c)
{
    std::string cdf = c.cdf.empty() ? spec.config.experiment().cdf_path : c.cdf;
    // Rows are flushed after every sweep value so a failure keeps the finished part
    const auto flush = [&](const std::vector<MetricsRow>& rows) {
        emit_csv(rows, c.out);
        if (!cdf.empty())
            emit_cdf(rows, cdf);
    };
    const std::vector<MetricsRow> rows = run_monte_carlo(spec, flush);
    print_rows(rows);
    std::printf("wrote %s\n", c.out.c_str());
    return 0;
}

int validate_integrals(int cases, std::uint64_t seed, double q_tol, double c_tol)
{
    CounterRng r(seed);
    int failures = 0;
    double worst_q = 0.0, worst_c = 0.0;
    for (int t = 0; t < cases; ++t)
    {
        const double bws[] = {2e6, 4e6, 10e6};
        const int combs[] = {1, 2, 4};
        const double bw = bws[r.below(3)];
        const int comb = combs[r.below(3)];
        const double h = 0.5 * r.uniform(1.05, 3.0) * bw;
        const int l = static_cast<int>(r.below(2)), lj = static_cast<int>(r.below(2));
        const NumerologyConfig na = numerology_params(l, bw, comb), nb = numerology_params(lj, bw, comb);
        const int n = static_cast<int>(r.below(na.n_subcarriers)) - band_centre_shift(l, bw);
        const int nj = static_cast<int>(r.below(nb.n_subcarriers)) - band_centre_shift(lj, bw);
        const std::string id = "case " + std::to_string(t);
        const auto q = oracles::compare(id + " Q", q_closed(n, na, h), q_quadrature(n, na, h), q_tol);
        const SincIntegralParams p{n * na.scs_hz, nj * nb.scs_hz, na.symbol_s, nb.symbol_s, h};
        const auto cr = oracles::compare(id + " C", c_closed(p), c_quadrature(p), c_tol);
        worst_q = std::max(worst_q, q.rel_error);
        worst_c = std::max(worst_c, cr.rel_error);
        for (const auto& rep : {q, cr})
            if (!rep.pass)
            {
                ++failures;
                std::printf("FAIL %s: closed %.12g quadrature %.12g rel %.3e (tol %.0e)\n", rep.case_id.c_str(),
                            rep.main_value, rep.oracle_value, rep.rel_error, rep.tolerance);
            }
    }
    std::printf("%d cases, worst Q rel %.3e, worst C rel %.3e, %d failures\n", cases, worst_q, worst_c, failures);
    return failures == 0 ? 0 : kExitNumerical;
}
} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"nrpos: multi-user 5G NR positioning experiments"};
    app.require_subcommand(1);

    Common run_opts, sweep_opts, base_opts;

    CLI::App* run = app.add_subcommand("run", "Monte Carlo run of the configured schemes");
    add_common(run, run_opts);

    CLI::App* sweep = app.add_subcommand("sweep", "Sweep one config parameter");
    add_common(sweep, sweep_opts);
    std::string sweep_spec_path, sweep_param, sweep_values;
    sweep->add_option("--spec", sweep_spec_path, "Sweep spec file with \"config\" and \"sweep\" blocks");
    sweep->add_option("--param", sweep_param, "Dotted config path to sweep");
    sweep->add_option("--values", sweep_values, "Comma-separated JSON values");

    CLI::App* baselines = app.add_subcommand("baselines", "Compare BL0-BL3 and the proposed scheme");
    add_common(baselines, base_opts);
    std::string scheme_list = "BL0,BL1,BL2,BL3,proposed";
    baselines->add_option("--schemes", scheme_list, "Comma-separated scheme names")->capture_default_str();

    CLI::App* integrals = app.add_subcommand("validate-integrals", "Check closed-form integrals against quadrature");
    int cases = 200;
    std::uint64_t integral_seed = 1;
    double q_tol = 1e-6, c_tol = 1e-5;
    integrals->add_option("--cases", cases, "Random cases")->check(CLI::PositiveNumber)->capture_default_str();
    integrals->add_option("--seed", integral_seed, "Case generator seed")->capture_default_str();
    integrals->add_option("--q-tol", q_tol, "Relative tolerance for Q")->capture_default_str();
    integrals->add_option("--c-tol", c_tol, "Relative tolerance for C")->capture_default_str();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try
    {
        if (*run)
            return execute(build_spec(run_opts, std::nullopt), run_opts);

        if (*sweep)
        {
            std::optional<json> doc;
            std::string param = sweep_param;
            std::vector<std::string> values;
            if (!sweep_spec_path.empty())
            {
                const json s = read_json(sweep_spec_path);
                if (!s.is_object() || !s.contains("sweep"))
                    throw ConfigError("sweep spec \"" + sweep_spec_path + "\" needs a \"sweep\" block");
                for (auto it = s.begin(); it != s.end(); ++it)
                    if (it.key() != "config" && it.key() != "sweep")
                        throw ConfigError("unknown key \"" + it.key() + "\" in sweep spec");
                if (!sweep_opts.config_path.empty())
                    throw ConfigError("--config and --spec are mutually exclusive");
                doc = s.value("config", json::object());
                const json& sw = s.at("sweep");
                if (!sw.contains("param") || !sw.contains("values") || !sw.at("values").is_array())
                    throw ConfigError("sweep block needs \"param\" and a \"values\" array");
                if (param.empty())
                    param = sw.at("param").get<std::string>();
                for (const auto& v : sw.at("values"))
                    values.push_back(v.dump());
            }
            if (!sweep_values.empty())
                values = split_values(sweep_values);
            if (param.empty())
                throw ConfigError("sweep needs --param or a --spec file");
            ExperimentSpec spec = build_spec(sweep_opts, doc);
            spec.sweep_param = param;
            spec.sweep_values = values;
            return execute(spec, sweep_opts);
        }

        if (*baselines)
        {
            ExperimentSpec spec = build_spec(base_opts, std::nullopt);
            spec.schemes = parse_schemes(split_values(scheme_list));
            return execute(spec, base_opts);
        }

        if (*integrals)
            return validate_integrals(cases, integral_seed, q_tol, c_tol);
    }
    catch (const ConfigError& e)
    {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (const NumericalError& e)
    {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
