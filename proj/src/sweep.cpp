#include "qot/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qot {

bool ViolationReport::all_pass() const {
    for (const auto& c : checks)
        if (c.applicable && !c.pass) return false;
    return true;
}

std::vector<double> default_eps_ladder() {
    std::vector<double> v;
    for (int k = 0; k < 7; ++k) v.push_back(1e-2 * std::pow(10.0, -0.5 * k));
    return v;
}

std::pair<int, int> grids_for_eps(const Marginal& m0, const Marginal& m1, double eps,
                                  const SweepConfig& cfg) {
    double width = 2.0 * std::cbrt(1.5 * eps);  // interior-scale section size
    auto pick = [&](double len, int base) {
        int n = static_cast<int>(std::ceil(cfg.nodes_in_support * len / width)) + 1;
        return std::clamp(n, base, cfg.max_grid);
    };
    return {pick(m0.length(), cfg.solver.nx), pick(m1.length(), cfg.solver.ny)};
}

RateFit fit_loglog(const std::vector<std::pair<double, double>>& points) {
    RateFit fit;
    std::vector<std::pair<double, double>> pts;
    for (const auto& [e, v] : points) {
        if (v > 0 && e > 0)
            pts.emplace_back(std::log(e), std::log(v));
        else
            ++fit.excluded;
    }
    if (points.size() < 4) throw std::invalid_argument("fit_loglog: need at least 4 points");
    if (pts.size() < 2) throw std::invalid_argument("fit_loglog: too few positive points");
    double n = static_cast<double>(pts.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0, ss_tot = 0, mean_y = sy / n;
    for (const auto& [x, y] : pts) {
        double r = y - (fit.intercept + fit.slope * x);
        ss_res += r * r;
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit.n_points = static_cast<int>(pts.size());
    fit.eps_min = std::exp(pts.back().first);
    fit.eps_max = std::exp(pts.front().first);
    for (const auto& [e, v] : points)
        if (v > 0) {
            fit.eps_min = std::min(fit.eps_min, e);
            fit.eps_max = std::max(fit.eps_max, e);
        }
    return fit;
}

namespace {

ViolationReport verify_invariants_impl(const PotentialPair& p) {
    ViolationReport rep;
    SectionTable t = section_table(p);
    if (!t.sparse) {
        rep.skipped = true;
        return rep;
    }
    double lam = p.mu1.lambda(), Lam = p.mu1.Lambda();

    {  // height of xi(x,.) against the section size, exact constants
        LemmaCheck c;
        c.name = "support_height_product";
        c.worst_margin = 1e300;
        for (int i = 0; i < p.f.n(); ++i) {
            double x = p.f.node(i);
            double fx = p.f.v[static_cast<size_t>(i)];
            double mx = -1e300;
            for (int j = 0; j < p.g.n(); ++j)
                mx = std::max(mx, x * p.g.node(j) - p.g.v[static_cast<size_t>(j)] - fx);
            double prod = mx * t.rows[static_cast<size_t>(i)].diameter();
            double lo_slack = prod - p.eps / Lam;
            double hi_slack = 2.0 * p.eps / lam - prod;
            c.worst_margin = std::min({c.worst_margin, lo_slack, hi_slack});
        }
        c.pass = c.worst_margin >= -1e-14;
        rep.checks.push_back(c);
    }

    {  // derivative located in the center half of the section (uniform marginals)
        LemmaCheck c;
        c.name = "derivative_in_center_half";
        c.applicable = p.mu0.family() == Family::Uniform && p.mu1.family() == Family::Uniform;
        c.worst_margin = 1e300;
        if (c.applicable) {
            for (const auto& s : t.rows) {
                double fp = p.mu1.moment1(s.y_m, s.y_M) / p.mu1.mass(s.y_m, s.y_M);
                double d = s.diameter();
                double m1 = fp - s.y_m, m2 = s.y_M - fp;
                c.worst_margin = std::min({c.worst_margin, m1 - 0.25 * d, d - m1,
                                           m2 - 0.25 * d, d - m2});
            }
            c.pass = c.worst_margin >= -1e-12;
        }
        rep.checks.push_back(c);
    }

    {  // first-order identity: the max of xi(., f'(x)) sits at x itself
        LemmaCheck c;
        c.name = "section_max_consistency";
        c.worst_margin = 1e300;
        double hx = p.f.h();
        double tol = std::max(1e-9, 5.0 * hx * hx);
        int stride = std::max(1, p.f.n() / 128);
        for (int i = 0; i < p.f.n(); i += stride) {
            double x = p.f.node(i);
            double y0 = f_prime(p, x);
            double at_x = p.xi(x, y0);
            double over_x = -1e300;
            for (int k = 0; k < p.f.n(); ++k)
                over_x = std::max(over_x, p.f.node(k) * y0 - p.f.v[static_cast<size_t>(k)] -
                                              p.g(y0));
            double fx = p.f.v[static_cast<size_t>(i)];
            double over_y = -1e300;
            for (int j = 0; j < p.g.n(); ++j)
                over_y = std::max(over_y, x * p.g.node(j) - p.g.v[static_cast<size_t>(j)] - fx);
            c.worst_margin = std::min({c.worst_margin, tol - std::abs(over_x - at_x),
                                       over_y - at_x + tol});
        }
        c.pass = c.worst_margin >= 0;
        rep.checks.push_back(c);
    }

    {  // monotone section boundaries
        LemmaCheck c;
        c.name = "monotone_section_boundaries";
        c.worst_margin = 1e300;
        for (size_t i = 0; i + 1 < t.rows.size(); ++i) {
            c.worst_margin = std::min(c.worst_margin, t.rows[i + 1].y_m - t.rows[i].y_m);
            c.worst_margin = std::min(c.worst_margin, t.rows[i + 1].y_M - t.rows[i].y_M);
        }
        c.pass = c.worst_margin >= -1e-12;
        rep.checks.push_back(c);
    }

    {  // strong convexity: positive curvature floor, finite ceiling
        LemmaCheck c;
        c.name = "strong_convexity";
        PlanDiagnostics d = diagnostics(p);
        c.worst_margin = d.sigma_m_f;
        c.pass = d.sigma_m_f > 0 && std::isfinite(d.sigma_M_f);
        std::ostringstream os;
        os << "sigma_m_f=" << d.sigma_m_f << " sigma_M_f=" << d.sigma_M_f;
        c.detail = os.str();
        rep.checks.push_back(c);
    }
    return rep;
}

}  // namespace

ViolationReport verify_invariants(const PotentialPair& p) {
    try {
        return verify_invariants_impl(p);
    } catch (const std::exception& e) {
        // a pair so damaged that the sections cannot even be computed
        ViolationReport rep;
        LemmaCheck c;
        c.name = "evaluation";
        c.pass = false;
        c.worst_margin = -1e300;
        c.detail = e.what();
        rep.checks.push_back(c);
        return rep;
    }
}

std::vector<SweepRecord> run_sweep(const Marginal& m0, const Marginal& m1,
                                   const std::vector<double>& eps_list,
                                   const SweepConfig& cfg) {
    if (eps_list.empty()) throw std::invalid_argument("run_sweep: empty eps list");
    for (double e : eps_list)
        if (!(e > 0)) throw std::invalid_argument("run_sweep: eps values must be positive");
    if (!std::is_sorted(eps_list.rbegin(), eps_list.rend()))
        throw std::invalid_argument("run_sweep: eps list must be sorted descending");

    std::vector<SweepRecord> records;
    PotentialPair prev;
    bool have_prev = false;
    double base_cost = cfg.collect_distances ? ot_cost(m0, m1) : 0.0;

    for (double eps : eps_list) {
        SweepRecord rec;
        rec.eps = eps;
        SolverConfig scfg = cfg.solver;
        std::tie(scfg.nx, scfg.ny) = grids_for_eps(m0, m1, eps, cfg);
        auto start = std::chrono::steady_clock::now();
        PotentialPair p;
        try {
            p = solve(m0, m1, eps, scfg, have_prev ? &prev : nullptr);
        } catch (const SolveFailure& f) {
            throw SweepFailure(std::string("run_sweep: ") + f.what() + " at eps=" +
                                   std::to_string(eps),
                               std::move(records));
        }
        rec.ms = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - start).count();
        rec.resid0 = p.resid0;
        rec.resid1 = p.resid1;
        rec.iters = p.iterations;

        PlanDiagnostics d = diagnostics(p);
        rec.sup_diam = d.sup_diam;
        rec.mean_diam = d.mean_diam;
        rec.sparse = d.sparse;
        rec.full_support = d.full_support;
        rec.sigma_m_f = d.sigma_m_f;
        rec.sigma_M_f = d.sigma_M_f;
        rec.sigma_m_g = d.sigma_m_g;
        rec.sigma_M_g = d.sigma_M_g;

        if (cfg.collect_distances) {
            auto [cost, pen] = qot_objective(p);
            rec.cost_gap = cost + pen - base_cost;
            MongeSolution ms = solve_monge(m0, m1, scfg.nx, scfg.ny);
            MongeDistances dist = distances_to_monge(p, ms);
            rec.l2_hausdorff = dist.l2_hausdorff;
            rec.l2_fprime_T0 = dist.l2_fprime_T0;
            rec.holder_f_f0 = dist.holder_f_f0;
            rec.l2_barycentric_T0 = dist.l2_barycentric_T0;
        }

        ViolationReport vr = verify_invariants(p);
        for (const auto& c : vr.checks)
            if (c.applicable && !c.pass) {
                std::ostringstream os;
                os << c.name << " margin=" << c.worst_margin;
                rec.violations.push_back(os.str());
            }

        records.push_back(std::move(rec));
        prev = std::move(p);
        have_prev = true;
    }
    return records;
}

}  // namespace qot
