// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 nrpos contributors

#include "nrpos/power.hpp"

#include "nrpos/problem.hpp"
#include "nrpos/ranging.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace nrpos
{

namespace
{
struct ExpTerm
{
    double weight;
    int minus; // index with coefficient -1
    int plus;  // index with coefficient +1, or -1 for none
};

struct UserConstraint
{
    double constant = 0.0;
    std::vector<ExpTerm> terms;
};

struct Evaluated
{
    double value = 0.0;
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
};

Evaluated eval_constraint(const UserConstraint& c, const Eigen::VectorXd& x, bool second_order)
{
    const Eigen::Index n = x.size();
    Evaluated e;
    e.value = c.constant;
    e.grad = Eigen::VectorXd::Zero(n);
    if (second_order)
        e.hess = Eigen::MatrixXd::Zero(n, n);
    for (const ExpTerm& t : c.terms)
    {
        const double arg = -x(t.minus) + (t.plus >= 0 ? x(t.plus) : 0.0);
        const double v = t.weight * std::exp(arg);
        e.value += v;
        e.grad(t.minus) -= v;
        if (t.plus >= 0)
            e.grad(t.plus) += v;
        if (second_order)
        {
            e.hess(t.minus, t.minus) += v;
            if (t.plus >= 0)
            {
                e.hess(t.plus, t.plus) += v;
                e.hess(t.plus, t.minus) -= v;
                e.hess(t.minus, t.plus) -= v;
            }
        }
    }
    return e;
}

class Barrier
{
public:
    Barrier(std::vector<UserConstraint> users, Eigen::VectorXd lo, Eigen::VectorXd hi)
        : users_(std::move(users)), lo_(std::move(lo)), hi_(std::move(hi)), J_(lo_.size())
    {
    }

    // y = (x, eps); +inf outside the domain
    double value(const Eigen::VectorXd& y, double t) const
    {
        const double eps = y(J_);
        double acc = t * eps;
        for (Eigen::Index j = 0; j < J_; ++j)
        {
            const double a = y(j) - lo_(j), b = hi_(j) - y(j);
            if (!(a > 0.0) || !(b > 0.0))
                return std::numeric_limits<double>::infinity();
            acc -= std::log(a) + std::log(b);
        }
        const Eigen::VectorXd x = y.head(J_);
        for (const auto& u : users_)
        {
            const double s = eps - eval_constraint(u, x, false).value;
            if (!(s > 0.0))
                return std::numeric_limits<double>::infinity();
            acc -= std::log(s);
        }
        return acc;
    }

    void derivatives(const Eigen::VectorXd& y, double t, Eigen::VectorXd& g, Eigen::MatrixXd& H) const
    {
        const Eigen::Index n = J_ + 1;
        g = Eigen::VectorXd::Zero(n);
        H = Eigen::MatrixXd::Zero(n, n);
        g(J_) = t;
        for (Eigen::Index j = 0; j < J_; ++j)
        {
            const double a = y(j) - lo_(j), b = hi_(j) - y(j);
            g(j) += -1.0 / a + 1.0 / b;
            H(j, j) += 1.0 / (a * a) + 1.0 / (b * b);
        }
        const Eigen::VectorXd x = y.head(J_);
        for (const auto& u : users_)
        {
            const Evaluated e = eval_constraint(u, x, true);
            const double s = y(J_) - e.value;
            Eigen::VectorXd dh(n);
            dh.head(J_) = e.grad;
            dh(J_) = -1.0;
            g += dh / s;
            H.topLeftCorner(J_, J_) += e.hess / s;
            H += dh * dh.transpose() / (s * s);
        }
    }

    double kkt_residual(const Eigen::VectorXd& y, double t) const
    {
        const Eigen::VectorXd x = y.head(J_);
        double sum_mu = 0.0;
        Eigen::VectorXd stat = Eigen::VectorXd::Zero(J_);
        double comp = 0.0, infeas = 0.0;
        for (const auto& u : users_)
        {
            const Evaluated e = eval_constraint(u, x, false);
            const double s = y(J_) - e.value;
            const double mu = 1.0 / (t * s);
            sum_mu += mu;
            stat += mu * e.grad;
            comp = std::max(comp, mu * s);
            infeas = std::max(infeas, -s);
        }
        for (Eigen::Index j = 0; j < J_; ++j)
        {
            const double a = y(j) - lo_(j), b = hi_(j) - y(j);
            const double nu_lo = 1.0 / (t * a), nu_hi = 1.0 / (t * b);
            stat(j) += nu_hi - nu_lo;
            comp = std::max({comp, nu_lo * a, nu_hi * b});
            infeas = std::max({infeas, -a, -b});
        }
        return std::max({std::abs(1.0 - sum_mu), stat.cwiseAbs().maxCoeff(), comp, infeas});
    }

    double max_constraint(const Eigen::VectorXd& x) const
    {
        double m = -std::numeric_limits<double>::infinity();
        for (const auto& u : users_)
            m = std::max(m, eval_constraint(u, x, false).value);
        return m;
    }

    std::size_t num_inequalities() const { return users_.size() + 2 * static_cast<std::size_t>(J_); }

private:
    std::vector<UserConstraint> users_;
    Eigen::VectorXd lo_, hi_;
    Eigen::Index J_;
};
} // namespace

PowerSolution solve_power_privacy(const Problem& problem, const AssignmentState& state, const PowerOptions& opt)
{
    const int J = problem.num_anchors(), K = problem.num_users();
    Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(J, K);
    for (int k = 0; k < K; ++k)
    {
        const std::vector<int> xk = state.anchors_of(k);
        const Eigen::VectorXd lam = problem.lambda(k, xk);
        for (size_t idx = 0; idx < xk.size(); ++idx)
            lambda(xk[idx], k) = lam(static_cast<Eigen::Index>(idx));
    }
    return solve_power_privacy(problem, state, lambda, opt);
}

PowerSolution solve_power_privacy(const Problem& problem, const AssignmentState& state,
                                  const Eigen::MatrixXd& lambda, const PowerOptions& opt)
{
    const int J = problem.num_anchors(), K = problem.num_users();
    if (lambda.rows() != J || lambda.cols() != K)
        throw std::invalid_argument("lambda must be J x K");
    if (!(opt.floor_ratio > 0.0) || !(opt.floor_ratio < 1.0))
        throw std::invalid_argument("power floor ratio must lie in (0, 1)");

    Eigen::VectorXd lo(J), hi(J);
    for (int j = 0; j < J; ++j)
    {
        const int l = state.numerology_of(j);
        if (l < 0)
            throw std::invalid_argument("anchor " + std::to_string(j) + " has no numerology selected");
        const double cap = problem.power_cap(j, l);
        if (!(cap > 0.0) || !std::isfinite(cap))
            throw NumericalError("power subproblem infeasible: cap of anchor " + std::to_string(j) + " is not positive");
        hi(j) = std::log(cap);
        lo(j) = std::log(opt.floor_ratio * cap);
    }

    const TermTable tt = problem.terms(state);
    const Eigen::VectorXd& xi2 = problem.xi2_min();

    // Scale so the objective is O(1) at the cap
    double scale = 0.0;
    {
        const Eigen::VectorXd pcap = hi.array().exp();
        const Eigen::MatrixXd s2 = problem.sigma2(tt, pcap);
        for (int k = 0; k < K; ++k)
        {
            double acc = 0.0;
            for (int j = 0; j < J; ++j)
                acc += lambda(j, k) * lambda(j, k) * (xi2(j) + s2(j, k));
            scale = std::max(scale, acc);
        }
    }
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw NumericalError("power subproblem has a non-finite objective at the cap");

    std::vector<UserConstraint> users;
    for (int k = 0; k < K; ++k)
    {
        UserConstraint c;
        bool any = false;
        for (int j = 0; j < J; ++j)
        {
            const double l2 = lambda(j, k) * lambda(j, k);
            if (l2 == 0.0)
                continue;
            any = true;
            c.constant += l2 * xi2(j) / scale;
            c.terms.push_back({l2 * tt.c0(j, k) / scale, j, -1});
            for (int jp = 0; jp < J; ++jp)
                if (jp != j && tt.cross[k](j, jp) != 0.0)
                    c.terms.push_back({l2 * tt.cross[k](j, jp) / scale, j, jp});
        }
        if (any)
            users.push_back(std::move(c));
    }
    if (users.empty())
        throw std::invalid_argument("power subproblem has no associated user");

    Barrier barrier(users, lo, hi);
    Eigen::VectorXd y(J + 1);
    for (int j = 0; j < J; ++j)
    {
        const double margin = 1e-3 * (hi(j) - lo(j));
        const double p = state.power_w(j) > 0.0 ? std::log(state.power_w(j)) : hi(j);
        y(j) = std::clamp(p, lo(j) + margin, hi(j) - margin);
    }
    y(J) = barrier.max_constraint(y.head(J)) + 1.0;

    const double m = static_cast<double>(barrier.num_inequalities());
    const double gap_target = 1e-2 * opt.kkt_tol;
    double t = 1.0;
    int iters = 0;
    for (;;)
    {
        for (int it = 0; it < opt.max_newton; ++it)
        {
            Eigen::VectorXd g;
            Eigen::MatrixXd H;
            barrier.derivatives(y, t, g, H);
            // symmetric diagonal scaling keeps the solve accurate when box terms dominate
            const Eigen::VectorXd d = H.diagonal().cwiseSqrt().cwiseInverse();
            const Eigen::MatrixXd Hs = d.asDiagonal() * H * d.asDiagonal();
            Eigen::LDLT<Eigen::MatrixXd> ldlt(Hs);
            Eigen::VectorXd dx = -(d.asDiagonal() * ldlt.solve(d.asDiagonal() * g)).eval();
            if (ldlt.info() != Eigen::Success || !dx.allFinite())
                throw NumericalError("power subproblem Newton system is singular");
            const double decrement = -g.dot(dx);
            ++iters;
            if (decrement / 2.0 <= 1e-14)
                break;
            double step = 1.0;
            const double f0 = barrier.value(y, t);
            for (;;)
            {
                const Eigen::VectorXd yn = y + step * dx;
                const double fn = barrier.value(yn, t);
                if (std::isfinite(fn) && fn <= f0 - 0.25 * step * decrement)
                {
                    y = yn;
                    break;
                }
                step *= 0.5;
                if (step < 1e-16)
                    break;
            }
            if (step < 1e-16)
                break;
        }
        if (m / t < gap_target || (m / t <= opt.kkt_tol && barrier.kkt_residual(y, t) <= 0.1 * opt.kkt_tol))
            break;
        t *= 20.0;
    }

    PowerSolution sol;
    sol.power_w = y.head(J).array().exp();
    sol.anchor_var_m2 = xi2;
    sol.epsilon_obj = barrier.max_constraint(y.head(J)) * scale;
    sol.kkt_residual = barrier.kkt_residual(y, t);

    // The barrier iterate stays strictly inside the box; keep the start point when it is at least as good
    Eigen::VectorXd x0(J);
    for (int j = 0; j < J; ++j)
        x0(j) = std::clamp(state.power_w(j) > 0.0 ? std::log(state.power_w(j)) : hi(j), lo(j), hi(j));
    const double eps0 = barrier.max_constraint(x0) * scale;
    if (eps0 <= sol.epsilon_obj)
    {
        sol.power_w = x0.array().exp();
        sol.epsilon_obj = eps0;
    }
    sol.newton_iterations = iters;
    return sol;
}

} // namespace nrpos
