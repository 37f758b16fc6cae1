#include "qot/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qot {

namespace {

// One scalar marginal equation, phi(c) = integral of (psi(t) - c)_+ dmu(t),
// with psi piecewise linear on the nodes of `other`. phi is convex and
// decreasing; phi' = -mass of the active set.
struct ScalarEq {
    const Marginal& mu;
    double ta, tb;             // grid endpoints
    std::vector<double> psi;   // psi at the nodes
    double ht;
    double c_max;

    ScalarEq(double coef, const GridFn& other, const Marginal& mu_)
        : mu(mu_), ta(other.a), tb(other.b), psi(other.v.size()), ht(other.h()) {
        c_max = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < other.n(); ++i) {
            psi[static_cast<size_t>(i)] = coef * other.node(i) - other.v[static_cast<size_t>(i)];
            c_max = std::max(c_max, psi[static_cast<size_t>(i)]);
        }
    }

    // returns (phi(c), mass of {psi > c})
    std::pair<double, double> eval(double c) const {
        double val = 0, mass = 0;
        int nseg = static_cast<int>(psi.size()) - 1;
        for (int j = 0; j < nseg; ++j) {
            double p0 = psi[static_cast<size_t>(j)], p1 = psi[static_cast<size_t>(j + 1)];
            if (p0 <= c && p1 <= c) continue;
            double t0 = ta + ht * j, t1 = (j == nseg - 1) ? tb : t0 + ht;
            double s = (p1 - p0) / (t1 - t0);
            double lo = t0, hi = t1;
            if (p0 <= c) lo = t0 + (c - p0) / s;       // upcrossing
            else if (p1 <= c) hi = t0 + (c - p0) / s;  // downcrossing
            double m0 = mu.mass(lo, hi);
            double m1 = mu.moment1(lo, hi);
            val += s * (m1 - t0 * m0) + (p0 - c) * m0;
            mass += m0;
        }
        return {val, mass};
    }
};

double solve_scalar(const ScalarEq& eq, double eps, double c_init, double scalar_tol) {
    double scale = std::max(1.0, std::abs(eq.c_max));
    double ch = eq.c_max;  // phi(ch) = 0 <= eps
    double cl = -std::numeric_limits<double>::infinity();
    double c = std::min(c_init, eq.c_max - 1e-12 * scale);
    double delta = 1e-2 * scale;
    for (int it = 0; it < 200; ++it) {
        auto [val, mass] = eq.eval(c);
        if (val > eps) cl = std::max(cl, c);
        else ch = std::min(ch, c);
        if (std::abs(val - eps) <= scalar_tol) return c;
        double cn;
        if (mass > 0) {
            cn = c + (val - eps) / mass;  // Newton; phi' = -mass
            if (!(cn > cl && cn < ch)) {
                if (std::isfinite(cl)) cn = 0.5 * (cl + ch);
                else { cn = c - delta; delta *= 2; }
            }
        } else {
            cn = c - delta;  // flat region above the max; expand downward
            delta *= 2;
        }
        if (std::isfinite(cl) && ch - cl <= 1e-15 * scale) return 0.5 * (cl + ch);
        c = cn;
    }
    return c;  // tolerance of the bracket governs; phi is well conditioned
}

// inner integrals of F(xi(x,y)) dmu1(y) over the active set, with F applied
// to the piecewise-linear xi; used by the objective evaluations
template <class F>
double inner_active_integral(const PotentialPair& p, double x, F&& f_of_xi_and_y) {
    double fx = p.f(x);
    int n = p.g.n();
    double val = 0;
    double prev = x * p.g.node(0) - p.g.v[0] - fx;
    for (int j = 0; j + 1 < n; ++j) {
        double t0 = p.g.node(j), t1 = p.g.node(j + 1);
        double p0 = prev;
        double p1 = x * t1 - p.g.v[static_cast<size_t>(j + 1)] - fx;
        prev = p1;
        if (p0 <= 0 && p1 <= 0) continue;
        double s = (p1 - p0) / (t1 - t0);
        double lo = t0, hi = t1;
        if (p0 <= 0) lo = t0 + (0 - p0) / s;
        else if (p1 <= 0) hi = t0 + (0 - p0) / s;
        val += integrate_gl5(
            [&](double y) {
                double xi = p0 + s * (y - t0);
                return f_of_xi_and_y(xi, y) * p.mu1.density(y);
            },
            lo, hi);
    }
    return val;
}

template <class F>
double outer_integral(const PotentialPair& p, F&& per_x) {
    double s = 0;
    for (int i = 0; i + 1 < p.f.n(); ++i) {
        double lo = p.f.node(i), hi = p.f.node(i + 1);
        s += integrate_gl5([&](double x) { return per_x(x) * p.mu0.density(x); }, lo, hi);
    }
    return s;
}

}  // namespace

double potential_mean(const GridFn& fn, const Marginal& mu) {
    double s = 0;
    for (int j = 0; j + 1 < fn.n(); ++j) {
        double lo = fn.node(j), hi = fn.node(j + 1);
        s += integrate_gl5([&](double t) { return fn(t) * mu.density(t); }, lo, hi);
    }
    return s;
}

double active_integral(const PotentialPair& p, double x,
                       const std::function<double(double, double)>& F) {
    return inner_active_integral(p, x, F);
}

double scalar_potential_update(double coef, const GridFn& other, const Marginal& mu,
                               double eps, double c_init, double scalar_tol) {
    ScalarEq eq(coef, other, mu);
    return solve_scalar(eq, eps, c_init, scalar_tol);
}

std::pair<double, double> marginal_residual(const PotentialPair& p) {
    double r0 = 0, r1 = 0;
    for (int i = 0; i < p.f.n(); ++i) {
        ScalarEq eq(p.f.node(i), p.g, p.mu1);
        r0 = std::max(r0, std::abs(eq.eval(p.f.v[static_cast<size_t>(i)]).first - p.eps));
    }
    for (int j = 0; j < p.g.n(); ++j) {
        ScalarEq eq(p.g.node(j), p.f, p.mu0);
        r1 = std::max(r1, std::abs(eq.eval(p.g.v[static_cast<size_t>(j)]).first - p.eps));
    }
    return {r0, r1};
}

double dual_objective(const PotentialPair& p) {
    double mean_part =
        outer_integral(p, [&](double x) { return 0.5 * x * x - p.f(x); }) +
        [&] {
            double s = 0;
            for (int j = 0; j + 1 < p.g.n(); ++j) {
                double lo = p.g.node(j), hi = p.g.node(j + 1);
                s += integrate_gl5(
                    [&](double y) { return (0.5 * y * y - p.g(y)) * p.mu1.density(y); }, lo, hi);
            }
            return s;
        }();
    double sq = outer_integral(p, [&](double x) {
        return inner_active_integral(p, x, [](double xi, double) { return xi * xi; });
    });
    return mean_part - sq / (2.0 * p.eps);
}

std::pair<double, double> qot_objective(const PotentialPair& p) {
    double cost = outer_integral(p, [&](double x) {
        return inner_active_integral(p, x, [&](double xi, double y) {
            double d = x - y;
            return 0.5 * d * d * xi / p.eps;
        });
    });
    double pen = outer_integral(p, [&](double x) {
        return inner_active_integral(p, x, [&](double xi, double) {
            double dens = xi / p.eps;
            return dens * dens;
        });
    });
    return {cost, 0.5 * p.eps * pen};
}

PotentialPair transpose(const PotentialPair& p) {
    PotentialPair t{p.eps, p.mu1, p.mu0, p.g, p.f, p.normalization_shift,
                    p.resid1, p.resid0, p.iterations, p.objective_trace};
    return t;
}

PotentialPair solve(const Marginal& m0, const Marginal& m1, double eps,
                    const SolverConfig& cfg, const PotentialPair* warm) {
    if (!(eps > 0)) throw std::domain_error("solve: eps must be positive");
    if (cfg.nx < 64 || cfg.ny < 64) throw std::invalid_argument("solve: grid sizes >= 64");

    PotentialPair p{eps, m0, m1};
    p.f = GridFn{m0.a(), m0.b(), std::vector<double>(static_cast<size_t>(cfg.nx), 0.0)};
    p.g = GridFn{m1.a(), m1.b(), std::vector<double>(static_cast<size_t>(cfg.ny), 0.0)};

    if (warm != nullptr) {
        for (int i = 0; i < cfg.nx; ++i) p.f.v[static_cast<size_t>(i)] = warm->f(p.f.node(i));
        for (int j = 0; j < cfg.ny; ++j) p.g.v[static_cast<size_t>(j)] = warm->g(p.g.node(j));
    } else if (cfg.init == SolverInit::Kantorovich) {
        MongeSolution ms = solve_monge(m0, m1, cfg.nx, cfg.ny);
        p.f.v = ms.f0;
        p.g.v = ms.g0;
    } else if (cfg.init == SolverInit::Affine) {
        double my = m1.mean(), mx = m0.mean();
        for (int i = 0; i < cfg.nx; ++i) p.f.v[static_cast<size_t>(i)] = my * p.f.node(i);
        for (int j = 0; j < cfg.ny; ++j) p.g.v[static_cast<size_t>(j)] = mx * p.g.node(j);
    }  // Zero: keep zeros

    double r0 = 0, r1 = 0;
    bool converged = false;
    double best_r = std::numeric_limits<double>::infinity();
    int stalled = 0;
    for (int outer = 0; outer < cfg.max_outer; ++outer) {
        for (int i = 0; i < cfg.nx; ++i) {
            ScalarEq eq(p.f.node(i), p.g, m1);
            p.f.v[static_cast<size_t>(i)] =
                solve_scalar(eq, eps, p.f.v[static_cast<size_t>(i)], cfg.scalar_tol);
        }
        for (int j = 0; j < cfg.ny; ++j) {
            ScalarEq eq(p.g.node(j), p.f, m0);
            p.g.v[static_cast<size_t>(j)] =
                solve_scalar(eq, eps, p.g.v[static_cast<size_t>(j)], cfg.scalar_tol);
        }
        p.iterations = outer + 1;
        if (cfg.track_objective) p.objective_trace.push_back(dual_objective(p));
        std::tie(r0, r1) = marginal_residual(p);
        double r = std::max(r0, r1);
        if (r <= cfg.tol) {
            converged = true;
            break;
        }
        // discretization-floor detection: the residual has stopped improving
        if (r > best_r * (1.0 - 1e-3)) {
            if (++stalled >= 10) {
                if (r <= cfg.plateau_factor * eps) {
                    converged = true;
                    break;
                }
                throw SolveFailure("solve: residual stalled above the plateau tolerance",
                                   r0, r1, p.iterations);
            }
        } else {
            stalled = 0;
        }
        best_r = std::min(best_r, r);
    }
    p.resid0 = r0;
    p.resid1 = r1;
    if (!converged)
        throw SolveFailure("solve: max outer iterations exceeded", r0, r1, p.iterations);

    // gauge fixing: equal means of the two potentials
    double mean_f = potential_mean(p.f, m0);
    double mean_g = potential_mean(p.g, m1);
    double shift = 0.5 * (mean_g - mean_f);
    for (auto& v : p.f.v) v += shift;
    for (auto& v : p.g.v) v -= shift;
    p.normalization_shift = shift;
    return p;
}

}  // namespace qot
