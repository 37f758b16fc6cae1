#include "qot/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "qot/plan_analysis.hpp"

namespace qot {

namespace {

// Exact solve of sum_j (v_j - c)_+ w_j = eps for c: the left side is
// piecewise linear and decreasing, so sort the breakpoints and walk down.
double exact_scalar(std::vector<std::pair<double, double>>& vw, double eps) {
    std::sort(vw.begin(), vw.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    double S = 0, W = 0;
    size_t n = vw.size();
    for (size_t k = 0; k < n; ++k) {
        S += vw[k].first * vw[k].second;
        W += vw[k].second;
        double c = (S - eps) / W;
        double next = (k + 1 < n) ? vw[k + 1].first : -std::numeric_limits<double>::infinity();
        if (c >= next) return c;
    }
    return (S - eps) / W;  // unreachable for positive weights
}

}  // namespace

void DiscreteProblem::validate() const {
    if (x.empty() || y.empty()) throw std::invalid_argument("DiscreteProblem: empty atoms");
    if (x.size() != p.size() || y.size() != q.size())
        throw std::invalid_argument("DiscreteProblem: size mismatch");
    if (!(eps > 0)) throw std::invalid_argument("DiscreteProblem: eps must be positive");
    if (!std::is_sorted(x.begin(), x.end()) || !std::is_sorted(y.begin(), y.end()))
        throw std::invalid_argument("DiscreteProblem: atoms must be sorted");
    auto check_w = [](const std::vector<double>& w) {
        double s = std::accumulate(w.begin(), w.end(), 0.0);
        for (double v : w)
            if (!(v > 0)) throw std::invalid_argument("DiscreteProblem: weights must be positive");
        if (std::abs(s - 1.0) > 1e-10)
            throw std::invalid_argument("DiscreteProblem: weights must sum to 1");
    };
    check_w(p);
    check_w(q);
}

DiscreteCoupling solve_discrete(const DiscreteProblem& dp, const DiscreteConfig& cfg) {
    dp.validate();
    size_t n = dp.x.size(), m = dp.y.size();
    DiscreteCoupling dc;
    dc.f.assign(n, 0.0);
    dc.g.assign(m, 0.0);

    std::vector<std::pair<double, double>> vw;
    double tol = cfg.tol * std::max(1.0, dp.eps);
    bool converged = false;
    for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
        for (size_t i = 0; i < n; ++i) {
            vw.clear();
            for (size_t j = 0; j < m; ++j)
                vw.emplace_back(dp.x[i] * dp.y[j] - dc.g[j], dp.q[j]);
            dc.f[i] = exact_scalar(vw, dp.eps);
        }
        for (size_t j = 0; j < m; ++j) {
            vw.clear();
            for (size_t i = 0; i < n; ++i)
                vw.emplace_back(dp.x[i] * dp.y[j] - dc.f[i], dp.p[i]);
            dc.g[j] = exact_scalar(vw, dp.eps);
        }
        dc.sweeps = sweep + 1;
        // per-atom defects (the f-block was updated before g, so recheck it)
        double r0 = 0, r1 = 0;
        for (size_t i = 0; i < n; ++i) {
            double s = 0;
            for (size_t j = 0; j < m; ++j)
                s += std::max(0.0, dp.x[i] * dp.y[j] - dc.f[i] - dc.g[j]) * dp.q[j];
            r0 = std::max(r0, std::abs(s - dp.eps));
        }
        for (size_t j = 0; j < m; ++j) {
            double s = 0;
            for (size_t i = 0; i < n; ++i)
                s += std::max(0.0, dp.x[i] * dp.y[j] - dc.f[i] - dc.g[j]) * dp.p[i];
            r1 = std::max(r1, std::abs(s - dp.eps));
        }
        dc.resid_rows = r0;
        dc.resid_cols = r1;
        if (std::max(r0, r1) <= tol) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw SolveFailure("solve_discrete: max sweeps exceeded", dc.resid_rows, dc.resid_cols,
                           dc.sweeps);

    // symmetric gauge
    double mf = 0, mg = 0;
    for (size_t i = 0; i < n; ++i) mf += dc.f[i] * dp.p[i];
    for (size_t j = 0; j < m; ++j) mg += dc.g[j] * dp.q[j];
    double shift = 0.5 * (mg - mf);
    for (auto& v : dc.f) v += shift;
    for (auto& v : dc.g) v -= shift;

    dc.pi.assign(n * m, 0.0);
    double cost = 0, pen = 0, dual = 0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < m; ++j) {
            double xi = dp.x[i] * dp.y[j] - dc.f[i] - dc.g[j];
            double rel = std::max(0.0, xi) / dp.eps;
            double mass = rel * dp.p[i] * dp.q[j];
            dc.pi[i * m + j] = mass;
            double d = dp.x[i] - dp.y[j];
            cost += 0.5 * d * d * mass;
            pen += rel * rel * dp.p[i] * dp.q[j];
            dual -= 0.5 * std::max(0.0, xi) * std::max(0.0, xi) / dp.eps * dp.p[i] * dp.q[j];
        }
    dc.objective = cost + 0.5 * dp.eps * pen;
    for (size_t i = 0; i < n; ++i) dual += (0.5 * dp.x[i] * dp.x[i] - dc.f[i]) * dp.p[i];
    for (size_t j = 0; j < m; ++j) dual += (0.5 * dp.y[j] * dp.y[j] - dc.g[j]) * dp.q[j];
    dc.dual_value = dual;
    return dc;
}

DiscreteProblem discretize(const PotentialPair& p) {
    DiscreteProblem dp;
    dp.eps = p.eps;
    for (int i = 0; i + 1 < p.f.n(); ++i) {
        double lo = p.f.node(i), hi = p.f.node(i + 1);
        dp.x.push_back(0.5 * (lo + hi));
        dp.p.push_back(p.mu0.mass(lo, hi));
    }
    for (int j = 0; j + 1 < p.g.n(); ++j) {
        double lo = p.g.node(j), hi = p.g.node(j + 1);
        dp.y.push_back(0.5 * (lo + hi));
        dp.q.push_back(p.mu1.mass(lo, hi));
    }
    // renormalize away the CDF roundoff so validate() accepts the weights
    double sp = std::accumulate(dp.p.begin(), dp.p.end(), 0.0);
    double sq = std::accumulate(dp.q.begin(), dp.q.end(), 0.0);
    for (auto& v : dp.p) v /= sp;
    for (auto& v : dp.q) v /= sq;
    return dp;
}

double compare_with_continuous(const PotentialPair& p, const DiscreteProblem& dp,
                               const DiscreteCoupling& dc) {
    size_t n = dp.x.size(), m = dp.y.size();
    if (static_cast<int>(n) != p.f.n() - 1 || static_cast<int>(m) != p.g.n() - 1)
        throw std::invalid_argument("compare_with_continuous: grid mismatch");
    double cell = 0.5 * p.f.h();
    if (std::abs(dp.x.front() - (p.f.a + cell)) > 1e-9 * p.mu0.length())
        throw std::invalid_argument("compare_with_continuous: atoms are not cell midpoints");
    double worst = 0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < m; ++j) {
            double cont = plan_density(p, dp.x[i], dp.y[j]);
            double disc = dc.pi[i * m + j] / (dp.p[i] * dp.q[j]);
            worst = std::max(worst, std::abs(cont - disc));
        }
    return worst;
}

}  // namespace qot
