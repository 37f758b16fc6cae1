#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qot/plan_analysis.hpp"
#include "qot/solver.hpp"

namespace qot {

/// Measurements collected for one regularization level of a sweep.
struct SweepRecord {
    double eps = 0;
    double sup_diam = 0, mean_diam = 0;
    double sigma_m_f = 0, sigma_M_f = 0, sigma_m_g = 0, sigma_M_g = 0;
    double l2_hausdorff = 0;
    double l2_fprime_T0 = 0;
    double holder_f_f0 = 0;
    double cost_gap = 0;  // regularized optimum minus transport cost
    double l2_barycentric_T0 = 0;
    double resid0 = 0, resid1 = 0;
    int iters = 0;
    double ms = 0;  // wall time of the solve
    bool sparse = false, full_support = false;
    std::vector<std::string> violations;  // invariant-check failures
};

struct RateFit {
    double slope = 0, intercept = 0, r2 = 0;
    int n_points = 0;
    double eps_min = 0, eps_max = 0;
    int excluded = 0;  // nonpositive values dropped before fitting
};

struct LemmaCheck {
    std::string name;
    bool applicable = true;
    bool pass = true;
    double worst_margin = 0;  // smallest slack; negative means violated
    std::string detail;
};

struct ViolationReport {
    bool skipped = false;  // outside the sparse regime
    std::vector<LemmaCheck> checks;
    bool all_pass() const;
};

struct SweepConfig {
    SolverConfig solver;
    int nodes_in_support = 64;  // grid-sizing rule for small eps
    int max_grid = 4096;
    bool collect_distances = true;
};

/// Default 7-point geometric ladder between 1e-2 and 1e-5.
std::vector<double> default_eps_ladder();

/// One solve per eps (descending, warm started), with diagnostics and
/// invariant checks attached to each record. A solve failure aborts the
/// sweep; the partial records collected so far are carried in the failure.
struct SweepFailure : std::runtime_error {
    SweepFailure(const std::string& msg, std::vector<SweepRecord> partial)
        : std::runtime_error(msg), records(std::move(partial)) {}
    std::vector<SweepRecord> records;
};

std::vector<SweepRecord> run_sweep(const Marginal& m0, const Marginal& m1,
                                   const std::vector<double>& eps_list,
                                   const SweepConfig& cfg = {});

/// Least-squares line through (log eps, log value).
RateFit fit_loglog(const std::vector<std::pair<double, double>>& points);

/// Geometric-decay lemma suite on one converged pair (never throws).
ViolationReport verify_invariants(const PotentialPair& p);

/// Grid sizes for one solve under the resolution rule.
std::pair<int, int> grids_for_eps(const Marginal& m0, const Marginal& m1, double eps,
                                  const SweepConfig& cfg);

}  // namespace qot
