#pragma once

#include <vector>

#include "qot/solver.hpp"

namespace qot {

/// Finitely supported instance of the regularized transport problem,
/// used as brute-force ground truth for the continuous solver.
struct DiscreteProblem {
    std::vector<double> x, y;  // atom locations, sorted ascending
    std::vector<double> p, q;  // positive weights summing to 1
    double eps = 0;

    void validate() const;  // throws on violation
};

struct DiscreteCoupling {
    std::vector<double> pi;  // row-major n*m masses
    std::vector<double> f, g;
    double objective = 0;
    double dual_value = 0;
    double resid_rows = 0, resid_cols = 0;
    int sweeps = 0;

    double at(size_t i, size_t j, size_t m) const { return pi[i * m + j]; }
};

struct DiscreteConfig {
    double tol = 1e-13;
    int max_sweeps = 100000;
};

/// Alternating exact per-atom solves (each scalar equation is piecewise
/// linear in the unknown and solved by a breakpoint sort).
DiscreteCoupling solve_discrete(const DiscreteProblem& dp, const DiscreteConfig& cfg = {});

/// Atoms at the cell midpoints of the pair's grids, cell masses as weights.
DiscreteProblem discretize(const PotentialPair& p);

/// Max over cells of |continuous plan density at the midpoint - discrete
/// relative density pi_ij/(p_i q_j)|.
double compare_with_continuous(const PotentialPair& p, const DiscreteProblem& dp,
                               const DiscreteCoupling& dc);

}  // namespace qot
