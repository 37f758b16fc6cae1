// Acceptance gate: one line per criterion, exit code = number of failures.
// The two reference pairs are uniform[0,1] self-transport and
// uniform[0,1] -> uniform[0,2]; both sweeps use the default ladder.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "qot/discrete.hpp"
#include "qot/io.hpp"
#include "qot/sweep.hpp"

using namespace qot;

namespace {

int g_failures = 0;

void report(int idx, bool pass, const std::string& what) {
    std::printf("criterion %2d: %s — %s\n", idx, pass ? "PASS" : "FAIL", what.c_str());
    if (!pass) ++g_failures;
}

double median(std::vector<double> v) {
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

RateFit fit_of(const std::vector<SweepRecord>& recs, double SweepRecord::*field) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : recs)
        if (r.sparse) pts.emplace_back(r.eps, r.*field);
    return fit_loglog(pts);
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

bool duality_gap_ok(const PotentialPair& p) {
    auto [cost, pen] = qot_objective(p);
    double primal = cost + pen;
    return std::abs(dual_objective(p) - primal) <= 1e-6 * (1.0 + std::abs(primal));
}

}  // namespace

int main() {
    std::setbuf(stdout, nullptr);
    Marginal u01 = Marginal::uniform(0, 1);
    Marginal u02 = Marginal::uniform(0, 2);
    std::vector<double> ladder = default_eps_ladder();
    SweepConfig scfg;

    auto t0 = std::chrono::steady_clock::now();
    std::vector<SweepRecord> self = run_sweep(u01, u01, ladder, scfg);
    double sweep_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::vector<SweepRecord> asym = run_sweep(u01, u02, ladder, scfg);

    // solves reused by several criteria: the small-eps tail of the self
    // sweep (warm started down the ladder) and one asymmetric level
    std::vector<PotentialPair> tail;
    {
        PotentialPair prev;
        bool have_prev = false;
        for (double eps : ladder) {
            if (eps > 1e-3 * 1.0000001) continue;
            auto [nx, ny] = grids_for_eps(u01, u01, eps, scfg);
            SolverConfig cfg = scfg.solver;
            cfg.nx = nx;
            cfg.ny = ny;
            PotentialPair p = solve(u01, u01, eps, cfg, have_prev ? &prev : nullptr);
            tail.push_back(p);
            prev = p;
            have_prev = true;
        }
    }
    PotentialPair asym_pair;
    {
        // resolved well past the sweep grids: the discretization floor of
        // the asymmetric pair must sit below the duality-gap tolerance
        SolverConfig cfg = scfg.solver;
        cfg.nx = cfg.ny = 3073;
        asym_pair = solve(u01, u02, 1e-3, cfg);
    }

    // 1: sparsity exponent
    {
        RateFit f = fit_of(self, &SweepRecord::sup_diam);
        bool pass = std::abs(f.slope - 1.0 / 3.0) <= 0.02 && f.r2 >= 0.999 &&
                    sweep_seconds <= 600.0;
        report(1, pass,
               fmt("sup-section slope %.4f (target 1/3 ± 0.02), R² %.6f, sweep %.0fs",
                   f.slope, f.r2, sweep_seconds));
    }

    // 2: interior section width against the cube-root constant
    {
        bool pass = true;
        double worst = 1.0;
        for (const auto& p : tail) {
            double ratio =
                support_section(p, 0.5).diameter() / (2.0 * std::cbrt(1.5 * p.eps));
            if (std::abs(ratio - 1.0) > std::abs(worst - 1.0)) worst = ratio;
            pass = pass && ratio >= 0.95 && ratio <= 1.05;
        }
        report(2, pass,
               fmt("mid-section width / 2(3ε/2)^{1/3} worst ratio %.4f (target [0.95,1.05])",
                   worst));
    }

    // 3: cost-gap exponent and sharp constant
    {
        RateFit f = fit_of(self, &SweepRecord::cost_gap);
        double c_target = 0.2 * std::pow(1.5, 5.0 / 3.0);
        double c = self.back().cost_gap / std::pow(self.back().eps, 2.0 / 3.0);
        bool pass = std::abs(f.slope - 2.0 / 3.0) <= 0.03 &&
                    std::abs(c / c_target - 1.0) <= 0.05;
        report(3, pass,
               fmt("cost-gap slope %.4f (target 2/3 ± 0.03), constant %.4f vs %.4f",
                   f.slope, c, c_target));
    }

    // 4: uniform strong convexity bounds
    {
        double sm = 1e300, sM = 0;
        for (const auto& r : self)
            if (r.eps <= 1e-3 * 1.0000001 && r.sparse) {
                sm = std::min(sm, r.sigma_m_f);
                sM = std::max(sM, r.sigma_M_f);
            }
        double lo = 1e300, hi = -1e300;
        {
            // interior means past the kinks by half a section width: inside
            // the boundary layers the curvature legitimately deviates
            SectionTable t = section_table(asym_pair);
            auto kp = kink_points(asym_pair, &t);
            double margin = t.sup_diam / 2;
            for (int i = 0; i < asym_pair.f.n(); ++i) {
                double x = asym_pair.f.node(i);
                if (!kp || x < kp->first + margin || x > kp->second - margin) continue;
                try {
                    double v = f_second(asym_pair, x, &t);
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                } catch (const std::domain_error&) {
                }
            }
        }
        bool pass = sm >= 0.8 && sM <= 1.25 && lo >= 1.8 && hi <= 2.2;
        report(4, pass,
               fmt("self σ_m %.3f σ_M %.3f (target [0.8,1.25]); expanding f'' in "
                   "[%.3f,%.3f] (target [1.8,2.2])",
                   sm, sM, lo, hi));
    }

    // 5: convergence-rate exponents for the section and the derivative
    {
        RateFit hs = fit_of(self, &SweepRecord::l2_hausdorff);
        RateFit ha = fit_of(asym, &SweepRecord::l2_hausdorff);
        RateFit ds = fit_of(self, &SweepRecord::l2_fprime_T0);
        RateFit da = fit_of(asym, &SweepRecord::l2_fprime_T0);
        auto in_band = [](const RateFit& f) { return f.slope >= 0.30 && f.slope <= 0.37; };
        bool pass = in_band(hs) && in_band(ha) && in_band(ds) && in_band(da);
        report(5, pass,
               fmt("Hausdorff slopes %.4f/%.4f, f'−T0 slopes %.4f/%.4f (target [0.30,0.37])",
                   hs.slope, ha.slope, ds.slope, da.slope));
    }

    // 6: geometric lemma suite with zero violations
    {
        int bad = 0;
        for (const auto& r : self) bad += static_cast<int>(r.violations.size());
        for (const auto& r : asym) bad += static_cast<int>(r.violations.size());
        report(6, bad == 0, fmt("%d invariant violations across both sweeps", bad));
    }

    // 7: closed-form full-support regime at eps = 1/2
    {
        SolverConfig cfg;
        cfg.nx = cfg.ny = 513;
        PotentialPair p = solve(u01, u01, 0.5, cfg);
        double derr = 0;
        for (int i = 0; i <= 64; ++i)
            for (int j = 0; j <= 64; ++j) {
                double x = i / 64.0, y = j / 64.0;
                double exact = 1.0 + (x - 0.5) * (y - 0.5) / 0.5;
                derr = std::max(derr, std::abs(plan_density(p, x, y) - exact));
            }
        double serr = 0;
        double h = p.f.h();
        for (int i = 0; i + 1 < p.f.n(); ++i)
            serr = std::max(serr, std::abs((p.f.v[static_cast<size_t>(i + 1)] -
                                            p.f.v[static_cast<size_t>(i)]) /
                                               h -
                                           0.5));
        bool pass = derr <= 1e-8 && serr <= 1e-8 && duality_gap_ok(p);
        report(7, pass,
               fmt("density max abs err %.2e (≤1e-8), f-slope max dev %.2e (≤1e-8)", derr,
                   serr));
    }

    // 8: discrete-oracle equivalence
    {
        SolverConfig cfg;
        cfg.nx = cfg.ny = 201;  // 200 cells -> 200 atoms per side
        PotentialPair p = solve(u01, u01, 1e-2, cfg);
        DiscreteProblem dp = discretize(p);
        DiscreteCoupling dc = solve_discrete(dp);
        double dual_cont = dual_objective(p);
        double rel = std::abs(dc.dual_value - dual_cont) /
                     std::max(1.0, std::abs(dual_cont));
        double dens = compare_with_continuous(p, dp, dc);

        double kkt_err = 0;
        for (double eps : {0.5, 1.0, 0.25, 0.1}) {
            DiscreteProblem two{{0.0, 1.0}, {0.0, 1.0}, {0.5, 0.5}, {0.5, 0.5}, eps};
            double t_exact = std::max(0.0, 0.25 - 1.0 / (16.0 * eps));
            DiscreteCoupling c2 = solve_discrete(two);
            kkt_err = std::max(kkt_err, std::abs(c2.at(0, 1, 2) - t_exact));
            kkt_err = std::max(kkt_err, std::abs(c2.at(1, 0, 2) - t_exact));
        }
        bool pass = rel <= 1e-6 && dens <= 5e-2 && kkt_err <= 1e-10;
        report(8, pass,
               fmt("dual rel diff %.2e (≤1e-6), density diff %.2e (≤5e-2), 2x2 err %.1e "
                   "(≤1e-10)",
                   rel, dens, kkt_err));
    }

    // 9: internal consistency of the derivative formulas and strong duality
    {
        std::vector<double> rel_fp, rel_fs;
        bool gaps_ok = true;
        std::vector<const PotentialPair*> pairs;
        for (const auto& p : tail) pairs.push_back(&p);
        pairs.push_back(&asym_pair);
        for (const PotentialPair* pp : pairs) {
            const PotentialPair& p = *pp;
            double h = p.f.h();
            SectionTable t = section_table(p);
            std::vector<double> fp(static_cast<size_t>(p.f.n()));
            for (int i = 0; i < p.f.n(); ++i)
                fp[static_cast<size_t>(i)] = f_prime(p, p.f.node(i));
            for (int i = 1; i + 1 < p.f.n(); ++i) {
                double cd = (p.f.v[static_cast<size_t>(i + 1)] -
                             p.f.v[static_cast<size_t>(i - 1)]) /
                            (2 * h);
                rel_fp.push_back(std::abs(fp[static_cast<size_t>(i)] - cd) /
                                 std::max(1e-12, std::abs(cd)));
                try {
                    double fs = f_second(p, p.f.node(i), &t);
                    double dd = (fp[static_cast<size_t>(i + 1)] -
                                 fp[static_cast<size_t>(i - 1)]) /
                                (2 * h);
                    rel_fs.push_back(std::abs(fs - dd) / std::max(1e-12, std::abs(dd)));
                } catch (const std::domain_error&) {
                }
            }
            gaps_ok = gaps_ok && duality_gap_ok(p);
        }
        double m1 = median(rel_fp), m2 = median(rel_fs);
        bool pass = m1 <= 0.01 && m2 <= 0.02 && gaps_ok;
        report(9, pass,
               fmt("median rel err: f' vs differences %.2e (≤1e-2), f'' vs differences "
                   "%.2e (≤2e-2), duality gaps %s",
                   m1, m2, gaps_ok ? "ok" : "VIOLATED"));
    }

    // 10: barycentric projection rate
    {
        RateFit bs = fit_of(self, &SweepRecord::l2_barycentric_T0);
        RateFit ba = fit_of(asym, &SweepRecord::l2_barycentric_T0);
        bool pass = bs.slope >= 0.30 && ba.slope >= 0.30;
        report(10, pass, fmt("barycentric slopes %.4f/%.4f (target ≥ 0.30)", bs.slope,
                             ba.slope));
    }

    if (g_failures > 0)
        std::printf("%d criterion(s) failed; see README for the analysis of the "
                    "known gaps\n",
                    g_failures);
    return g_failures;
}
