// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#include "nrpos/oracles.hpp"

#include "nrpos/common.hpp"
#include "nrpos/numerology.hpp"
#include "nrpos/problem.hpp"
#include "nrpos/ranging.hpp"
#include "nrpos/scenario.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace nrpos::oracles
{

OracleReport compare(const std::string& case_id, double main_value, double oracle_value, double tolerance)
{
    OracleReport r;
    r.case_id = case_id;
    r.main_value = main_value;
    r.oracle_value = oracle_value;
    r.tolerance = tolerance;
    const double denom = std::max(std::abs(oracle_value), std::numeric_limits<double>::min());
    r.rel_error = std::abs(main_value - oracle_value) / denom;
    r.pass = r.rel_error <= tolerance;
    return r;
}

QuadratureResult adaptive_quadrature(const std::function<double(double)>& f, double lo, double hi,
                                     std::vector<double> breakpoints, double rel_tol)
{
    if (!(hi > lo))
        throw std::invalid_argument("quadrature interval must have hi > lo");
    std::vector<double> pts{lo};
    std::sort(breakpoints.begin(), breakpoints.end());
    for (double b : breakpoints)
        if (b > pts.back() && b < hi)
            pts.push_back(b);
    pts.push_back(hi);

    // Global adaptive scheme: bisect the panel with the largest error estimate until the total
    // error meets the tolerance or the panel budget runs out
    struct Panel
    {
        double a, b, value, error, l1;
        bool operator<(const Panel& o) const { return error < o.error; }
    };
    auto estimate = [&](double a, double b) {
        Panel p{a, b, 0.0, 0.0, 0.0};
        p.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &p.error, &p.l1);
        return p;
    };
    std::vector<Panel> heap;
    double value = 0.0, error = 0.0, abs_sum = 0.0;
    for (size_t p = 0; p + 1 < pts.size(); ++p)
    {
        heap.push_back(estimate(pts[p], pts[p + 1]));
        value += heap.back().value;
        error += heap.back().error;
        abs_sum += heap.back().l1;
    }
    std::make_heap(heap.begin(), heap.end());
    constexpr std::size_t kMaxPanels = 1000000;
    for (std::size_t it = 1; !(error <= rel_tol * std::max(abs_sum, std::abs(value))) && std::isfinite(value) &&
                             heap.size() < kMaxPanels;
         ++it)
    {
        const Panel worst = heap.front();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b))
            break; // interval exhausted at double resolution
        std::pop_heap(heap.begin(), heap.end());
        heap.pop_back();
        const Panel left = estimate(worst.a, mid), right = estimate(mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        abs_sum += left.l1 + right.l1 - worst.l1;
        for (const Panel& pn : {left, right})
        {
            heap.push_back(pn);
            std::push_heap(heap.begin(), heap.end());
        }
        if (it % 1024 == 0)
        {
            // exact resummation against drift
            value = error = abs_sum = 0.0;
            for (const Panel& pn : heap)
            {
                value += pn.value;
                error += pn.error;
                abs_sum += pn.l1;
            }
        }
    }
    value = error = abs_sum = 0.0;
    for (const Panel& pn : heap)
    {
        value += pn.value;
        error += pn.error;
        abs_sum += pn.l1;
    }
    QuadratureResult res{value, error};
    if (!(res.error <= rel_tol * std::max(abs_sum, std::abs(res.value))) || !std::isfinite(res.value))
    {
        char buf[160];
        std::snprintf(buf, sizeof buf, "quadrature did not converge: achieved error %.3e against magnitude %.3e",
                      res.error, abs_sum);
        throw NumericalError(buf);
    }
    return res;
}

Eigen::MatrixXd dense_pinv(const Eigen::MatrixXd& a)
{
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd& s = svd.singularValues();
    const double cutoff = std::numeric_limits<double>::epsilon() * std::max(a.rows(), a.cols()) *
                          (s.size() > 0 ? s(0) : 0.0);
    Eigen::MatrixXd sinv = Eigen::MatrixXd::Zero(a.cols(), a.rows());
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > cutoff)
            sinv(i, i) = 1.0 / s(i);
    return svd.matrixV() * sinv * svd.matrixU().transpose();
}

Eigen::VectorXd finite_diff_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                     const Eigen::VectorXd& x, double h)
{
    if (!(h >= 1e-6) || !(h <= 1e-3))
        throw std::invalid_argument("finite-difference step outside [1e-6, 1e-3]");
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i)
    {
        const double step = h * std::max(1.0, std::abs(x(i)));
        xp(i) = x(i) + step;
        const double fp = f(xp);
        xp(i) = x(i) - step;
        const double fm = f(xp);
        xp(i) = x(i);
        g(i) = (fp - fm) / (2.0 * step);
    }
    return g;
}

// ---------------------------------------------------------------- matching oracles

namespace
{
constexpr double kStrictMargin = 1e-12;

struct Eval
{
    bool ok = false;
    Eigen::MatrixXd lambda; // J x K
    Eigen::VectorXd phi;    // K
    double objective = 0.0;
};

Eigen::VectorXd oracle_lambda(const Problem& pb, int k, const std::vector<int>& anchors, bool& ok)
{
    const Vec3 u = pb.scenario().users[k].position_m;
    Eigen::MatrixXd g(anchors.size(), 3);
    for (size_t r = 0; r < anchors.size(); ++r)
    {
        const Vec3 d = u - pb.broadcast_positions()[anchors[r]];
        g.row(static_cast<Eigen::Index>(r)) = d.transpose() / d.norm();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
    const Eigen::VectorXd s = svd.singularValues();
    // same degeneracy rule as the main path: cond(G^T G) = (s_max / s_min)^2 <= 1e8
    ok = anchors.size() >= 3 && s(2) > 0.0 && (s(0) / s(2)) * (s(0) / s(2)) <= 1e8;
    if (!ok)
        return {};
    return dense_pinv(g).colwise().norm().transpose();
}

Eval oracle_eval(const Problem& pb, const Eigen::MatrixXi& X, const Eigen::VectorXd& xi2, const Eigen::MatrixXd& sig2)
{
    const int J = static_cast<int>(X.rows()), K = static_cast<int>(X.cols());
    Eval e;
    e.lambda = Eigen::MatrixXd::Zero(J, K);
    e.phi = Eigen::VectorXd::Zero(K);
    for (int k = 0; k < K; ++k)
    {
        std::vector<int> a;
        for (int j = 0; j < J; ++j)
            if (X(j, k))
                a.push_back(j);
        bool ok = false;
        const Eigen::VectorXd lam = oracle_lambda(pb, k, a, ok);
        if (!ok)
            return e;
        double acc = 0.0;
        for (size_t r = 0; r < a.size(); ++r)
        {
            const double l = lam(static_cast<Eigen::Index>(r));
            e.lambda(a[r], k) = l;
            acc += l * l * (xi2(a[r]) + sig2(a[r], k));
        }
        e.phi(k) = std::sqrt(acc);
    }
    e.objective = e.phi.maxCoeff();
    e.ok = true;
    return e;
}

Eigen::MatrixXd oracle_sigma2(const Problem& pb, const AssignmentState& st)
{
    const int J = st.num_anchors(), K = st.num_users();
    Eigen::MatrixXd s(J, K);
    for (int j = 0; j < J; ++j)
        for (int k = 0; k < K; ++k)
            s(j, k) = pb.model().ranging_variance_zeta(j, k, 0, st);
    return s;
}

double served_max(const Eigen::MatrixXi& X, const Eigen::VectorXd& phi, int j)
{
    double m = 0.0;
    for (int k = 0; k < X.cols(); ++k)
        if (X(j, k))
            m = std::max(m, phi(k));
    return m;
}

double user_sum(const Eigen::MatrixXi& X, const Eval& e, const Eigen::MatrixXd& sig2, int k)
{
    double s = 0.0;
    for (int j = 0; j < X.rows(); ++j)
        if (X(j, k))
            s += e.lambda(j, k) * std::sqrt(sig2(j, k));
    return s;
}

// ---- numerology state encoding: digit j is l * comb + i
struct NumerologySpace
{
    int J, L, comb, options;
    std::uint64_t count;
};

NumerologySpace numerology_space(const Problem& pb, std::uint64_t max_states)
{
    NumerologySpace sp{pb.num_anchors(), pb.numerology_count(), pb.comb_size(), 0, 1};
    sp.options = sp.L * sp.comb;
    for (int j = 0; j < sp.J; ++j)
    {
        sp.count *= static_cast<std::uint64_t>(sp.options);
        if (sp.count > max_states)
            throw std::invalid_argument("decision space exceeds the oracle limit of " + std::to_string(max_states));
    }
    return sp;
}

AssignmentState numerology_state(const Problem& pb, const NumerologySpace& sp, const AssignmentState& base,
                                 std::uint64_t code)
{
    AssignmentState st = base;
    for (int j = 0; j < sp.J; ++j)
    {
        const int opt = static_cast<int>(code % sp.options);
        code /= sp.options;
        const int l = opt / sp.comb, i = opt % sp.comb;
        const int l0 = base.numerology_of(j);
        const double ratio = base.power_w(j) / pb.power_cap(j, l0);
        st.numerology_u.row(j).setZero();
        st.offset_v.row(j).setZero();
        st.numerology_u(j, l) = 1;
        st.offset_v(j, i) = 1;
        st.power_w(j) = ratio * pb.power_cap(j, l);
    }
    return st;
}

std::vector<int> digits(std::uint64_t code, int J, int options)
{
    std::vector<int> d(J);
    for (int j = 0; j < J; ++j)
    {
        d[j] = static_cast<int>(code % options);
        code /= options;
    }
    return d;
}

std::uint64_t encode(const std::vector<int>& d, int options)
{
    std::uint64_t c = 0;
    for (size_t j = d.size(); j-- > 0;)
        c = c * options + static_cast<std::uint64_t>(d[j]);
    return c;
}

bool numerology_blocking(const std::vector<Eval>& table, const Eigen::MatrixXi& X, std::uint64_t code,
                         const NumerologySpace& sp)
{
    const Eval& cur = table[code];
    const std::vector<int> d = digits(code, sp.J, sp.options);
    auto blocks = [&](std::uint64_t nc, int j, int jp) {
        const Eval& nx = table[nc];
        if (!nx.ok || !(nx.objective < cur.objective * (1.0 - kStrictMargin)))
            return false;
        if (served_max(X, nx.phi, j) > served_max(X, cur.phi, j))
            return false;
        if (jp >= 0 && served_max(X, nx.phi, jp) > served_max(X, cur.phi, jp))
            return false;
        return true;
    };
    for (int j = 0; j < sp.J; ++j)
    {
        for (int jp = 0; jp < sp.J; ++jp)
        {
            if (jp == j || d[jp] == d[j])
                continue;
            std::vector<int> nd = d;
            std::swap(nd[j], nd[jp]);
            if (blocks(encode(nd, sp.options), j, jp))
                return true;
        }
        for (int o = 0; o < sp.options; ++o)
        {
            if (o == d[j])
                continue;
            std::vector<int> nd = d;
            nd[j] = o;
            if (blocks(encode(nd, sp.options), j, -1))
                return true;
        }
    }
    return false;
}

std::vector<Eval> numerology_table(const Problem& pb, const NumerologySpace& sp, const AssignmentState& base)
{
    std::vector<Eval> table(sp.count);
    for (std::uint64_t c = 0; c < sp.count; ++c)
    {
        const AssignmentState st = numerology_state(pb, sp, base, c);
        table[c] = oracle_eval(pb, st.assoc_x, st.anchor_var_m2, oracle_sigma2(pb, st));
    }
    return table;
}

std::uint64_t numerology_code(const NumerologySpace& sp, const AssignmentState& st)
{
    std::vector<int> d(sp.J);
    for (int j = 0; j < sp.J; ++j)
        d[j] = st.numerology_of(j) * sp.comb + st.offset_of(j);
    return encode(d, sp.options);
}

// ---- association blocking scan over an explicit X
bool association_blocking(const Problem& pb, const Eigen::MatrixXi& X, const Eigen::VectorXd& xi2,
                          const Eigen::MatrixXd& sig2)
{
    const int J = static_cast<int>(X.rows()), K = static_cast<int>(X.cols());
    const Eval cur = oracle_eval(pb, X, xi2, sig2);
    if (!cur.ok)
        return false;
    auto blocks = [&](const Eigen::MatrixXi& nx, const std::vector<int>& anchors, const std::vector<int>& users) {
        for (int k = 0; k < K; ++k)
            if (nx.col(k).sum() < 3)
                return false;
        const Eval ne = oracle_eval(pb, nx, xi2, sig2);
        if (!ne.ok || !(ne.objective < cur.objective * (1.0 - kStrictMargin)))
            return false;
        for (int a : anchors)
            if (served_max(nx, ne.phi, a) > served_max(X, cur.phi, a))
                return false;
        for (int u : users)
            if (user_sum(nx, ne, sig2, u) > user_sum(X, cur, sig2, u))
                return false;
        return true;
    };
    for (int j = 0; j < J; ++j)
        for (int k = 0; k < K; ++k)
        {
            if (!X(j, k))
                continue;
            for (int jp = 0; jp < J; ++jp)
                for (int kp = 0; kp < K; ++kp)
                {
                    if (jp == j || kp == k || !X(jp, kp) || X(j, kp) || X(jp, k))
                        continue;
                    Eigen::MatrixXi nx = X;
                    nx(j, k) = 0;
                    nx(jp, kp) = 0;
                    nx(j, kp) = 1;
                    nx(jp, k) = 1;
                    if (blocks(nx, {j, jp}, {k, kp}))
                        return true;
                }
            for (int jn = 0; jn < J; ++jn)
            {
                if (X(jn, k))
                    continue;
                Eigen::MatrixXi nx = X;
                nx(j, k) = 0;
                nx(jn, k) = 1;
                if (blocks(nx, {j, jn}, {k}))
                    return true;
            }
            for (int kn = 0; kn < K; ++kn)
            {
                if (X(j, kn))
                    continue;
                Eigen::MatrixXi nx = X;
                nx(j, k) = 0;
                nx(j, kn) = 1;
                if (blocks(nx, {j}, {k, kn}))
                    return true;
            }
        }
    return false;
}
} // namespace

ExhaustiveResult exhaustive_numerology_matching(const MatchingInstance& inst, const AssignmentState& base,
                                                std::uint64_t max_states)
{
    const Problem& pb = *inst.problem;
    const NumerologySpace sp = numerology_space(pb, max_states);
    const std::vector<Eval> table = numerology_table(pb, sp, base);
    ExhaustiveResult res;
    res.states_enumerated = sp.count;
    res.best_objective = std::numeric_limits<double>::infinity();
    for (std::uint64_t c = 0; c < sp.count; ++c)
    {
        if (!table[c].ok)
            continue;
        res.best_objective = std::min(res.best_objective, table[c].objective);
        if (!numerology_blocking(table, base.assoc_x, c, sp))
        {
            res.stable.push_back(numerology_state(pb, sp, base, c));
            res.stable_objectives.push_back(table[c].objective);
        }
    }
    return res;
}

ExhaustiveResult exhaustive_user_anchor_matching(const MatchingInstance& inst, const AssignmentState& base,
                                                 std::uint64_t max_states)
{
    const Problem& pb = *inst.problem;
    const int J = pb.num_anchors(), K = pb.num_users();
    if (J < 3)
        throw std::invalid_argument("association oracle needs at least 3 anchors");
    std::vector<std::uint32_t> subsets;
    for (std::uint32_t m = 0; m < (1u << J); ++m)
        if (__builtin_popcount(m) >= 3)
            subsets.push_back(m);
    std::uint64_t count = 1;
    for (int k = 0; k < K; ++k)
    {
        count *= subsets.size();
        if (count > max_states)
            throw std::invalid_argument("decision space exceeds the oracle limit of " + std::to_string(max_states));
    }
    const Eigen::MatrixXd sig2 = oracle_sigma2(pb, base);
    ExhaustiveResult res;
    res.states_enumerated = count;
    res.best_objective = std::numeric_limits<double>::infinity();
    for (std::uint64_t c = 0; c < count; ++c)
    {
        AssignmentState st = base;
        std::uint64_t code = c;
        for (int k = 0; k < K; ++k)
        {
            const std::uint32_t m = subsets[code % subsets.size()];
            code /= subsets.size();
            for (int j = 0; j < J; ++j)
                st.assoc_x(j, k) = (m >> j) & 1u;
        }
        const Eval e = oracle_eval(pb, st.assoc_x, st.anchor_var_m2, sig2);
        if (!e.ok)
            continue;
        res.best_objective = std::min(res.best_objective, e.objective);
        if (!association_blocking(pb, st.assoc_x, st.anchor_var_m2, sig2))
        {
            res.stable_objectives.push_back(e.objective);
            res.stable.push_back(std::move(st));
        }
    }
    return res;
}

bool numerology_blocking_pair_exists(const MatchingInstance& inst, const AssignmentState& state)
{
    const Problem& pb = *inst.problem;
    const NumerologySpace sp = numerology_space(pb, std::numeric_limits<std::uint64_t>::max());
    // Only the current state and its one-move neighbours are needed
    const std::uint64_t code = numerology_code(sp, state);
    const std::vector<int> d = digits(code, sp.J, sp.options);
    std::vector<std::uint64_t> codes{code};
    for (int j = 0; j < sp.J; ++j)
    {
        for (int jp = j + 1; jp < sp.J; ++jp)
        {
            std::vector<int> nd = d;
            std::swap(nd[j], nd[jp]);
            codes.push_back(encode(nd, sp.options));
        }
        for (int o = 0; o < sp.options; ++o)
        {
            std::vector<int> nd = d;
            nd[j] = o;
            codes.push_back(encode(nd, sp.options));
        }
    }
    auto eval_code = [&](std::uint64_t c) {
        const AssignmentState st = numerology_state(pb, sp, state, c);
        return oracle_eval(pb, st.assoc_x, st.anchor_var_m2, oracle_sigma2(pb, st));
    };
    const Eval cur = eval_code(code);
    if (!cur.ok)
        return false;
    const Eigen::MatrixXi& X = state.assoc_x;
    for (int j = 0; j < sp.J; ++j)
    {
        auto blocks = [&](const std::vector<int>& nd, int jp) {
            const Eval nx = eval_code(encode(nd, sp.options));
            if (!nx.ok || !(nx.objective < cur.objective * (1.0 - kStrictMargin)))
                return false;
            if (served_max(X, nx.phi, j) > served_max(X, cur.phi, j))
                return false;
            if (jp >= 0 && served_max(X, nx.phi, jp) > served_max(X, cur.phi, jp))
                return false;
            return true;
        };
        for (int jp = 0; jp < sp.J; ++jp)
        {
            if (jp == j || d[jp] == d[j])
                continue;
            std::vector<int> nd = d;
            std::swap(nd[j], nd[jp]);
            if (blocks(nd, jp))
                return true;
        }
        for (int o = 0; o < sp.options; ++o)
        {
            if (o == d[j])
                continue;
            std::vector<int> nd = d;
            nd[j] = o;
            if (blocks(nd, -1))
                return true;
        }
    }
    return false;
}

bool user_anchor_blocking_pair_exists(const MatchingInstance& inst, const AssignmentState& state)
{
    const Problem& pb = *inst.problem;
    return association_blocking(pb, state.assoc_x, state.anchor_var_m2, oracle_sigma2(pb, state));
}

GridPowerResult grid_power_solver(const MatchingInstance& inst, const AssignmentState& base,
                                  const Eigen::MatrixXd& lambda, int grid_n, double floor_ratio)
{
    const Problem& pb = *inst.problem;
    const int J = pb.num_anchors(), K = pb.num_users();
    if (J > 2)
        throw std::invalid_argument("grid power oracle supports at most 2 anchors");
    if (grid_n < 1)
        throw std::invalid_argument("grid size must be >= 1");
    std::vector<std::vector<double>> axis(J);
    for (int j = 0; j < J; ++j)
    {
        const double cap = pb.power_cap(j, base.numerology_of(j));
        for (int g = 0; g < grid_n; ++g)
        {
            const double frac = grid_n == 1 ? 1.0 : static_cast<double>(g) / (grid_n - 1);
            axis[j].push_back(cap * std::pow(floor_ratio, 1.0 - frac));
        }
    }
    GridPowerResult best;
    best.objective = std::numeric_limits<double>::infinity();
    AssignmentState st = base;
    const int n1 = J > 1 ? grid_n : 1;
    for (int a = 0; a < grid_n; ++a)
        for (int b = 0; b < n1; ++b)
        {
            st.power_w(0) = axis[0][a];
            if (J > 1)
                st.power_w(1) = axis[1][b];
            double worst = 0.0;
            for (int k = 0; k < K; ++k)
            {
                double acc = 0.0;
                for (int j = 0; j < J; ++j)
                    if (lambda(j, k) != 0.0)
                        acc += lambda(j, k) * lambda(j, k) *
                               (base.anchor_var_m2(j) + pb.model().ranging_variance_A(j, k, 0, st));
                worst = std::max(worst, acc);
            }
            if (worst < best.objective)
            {
                best.objective = worst;
                best.power_w.assign(st.power_w.data(), st.power_w.data() + J);
            }
        }
    return best;
}

} // namespace nrpos::oracles
