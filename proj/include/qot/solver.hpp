#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qot/grid.hpp"
#include "qot/marginal.hpp"
#include "qot/monge.hpp"

namespace qot {

enum class SolverInit { Kantorovich, Zero, Affine };

struct SolverConfig {
    int nx = 513;               // x-grid nodes (>= 64)
    int ny = 513;               // y-grid nodes (>= 64)
    double tol = 1e-10;         // sup-norm marginal residual target
    int max_outer = 500;
    double scalar_tol = 1e-13;  // inner scalar-solve tolerance
    // The two node-equation families are discretized against each other's
    // interpolant, so for asymmetric pairs the joint system is consistent
    // only up to O(h^2) and the residual plateaus there instead of reaching
    // `tol`. A stagnated iteration is accepted when the residual is below
    // plateau_factor*eps; otherwise it is a convergence failure.
    double plateau_factor = 1e-3;
    SolverInit init = SolverInit::Kantorovich;
    bool track_objective = false;  // record the dual objective per outer iteration
};

/// Grid-sampled dual potentials (f,g) for one regularization level.
/// Interpolation is piecewise linear on uniform grids.
struct PotentialPair {
    double eps = 0;
    Marginal mu0, mu1;
    GridFn f;  // over the source support
    GridFn g;  // over the target support
    double normalization_shift = 0;
    double resid0 = 0, resid1 = 0;
    int iterations = 0;
    std::vector<double> objective_trace;  // nonempty iff tracking was enabled

    double f_at(double x) const { return f(x); }
    double g_at(double y) const { return g(y); }
    /// xy - f(x) - g(y); the plan density is its positive part over eps.
    double xi(double x, double y) const { return x * y - f(x) - g(y); }
};

struct SolveFailure : std::runtime_error {
    SolveFailure(const std::string& msg, double r0, double r1, int iters)
        : std::runtime_error(msg), resid0(r0), resid1(r1), iterations(iters) {}
    double resid0, resid1;
    int iterations;
};

/// Solve the scalar marginal equation at a single node: the unique c with
///   integral of (coef*t - other(t) - c)_+ dmu(t) = eps,
/// where `other` is the frozen opposite potential. `c_init` is a warm start.
double scalar_potential_update(double coef, const GridFn& other, const Marginal& mu,
                               double eps, double c_init, double scalar_tol = 1e-13);

/// Alternating Gauss-Seidel sweeps of scalar updates until the sup-norm
/// marginal residual falls below cfg.tol. Symmetric normalization is applied
/// once after convergence. `warm` optionally supplies potentials to start
/// from (interpolated onto the configured grids).
PotentialPair solve(const Marginal& m0, const Marginal& m1, double eps,
                    const SolverConfig& cfg = {},
                    const PotentialPair* warm = nullptr);

/// Sup over grid nodes of the defects of the two marginal equations.
std::pair<double, double> marginal_residual(const PotentialPair& p);

/// Value of the dual functional at the stored potentials.
double dual_objective(const PotentialPair& p);

/// (transport cost, quadratic penalty) of the plan induced by the potentials.
std::pair<double, double> qot_objective(const PotentialPair& p);

/// Swap the roles of the two marginals (and of f and g).
PotentialPair transpose(const PotentialPair& p);

/// Integral over the active set {xi(x,.) > 0} of F(xi(x,y), y) dmu1(y),
/// with xi taken piecewise linear in y and the kinks located exactly.
double active_integral(const PotentialPair& p, double x,
                       const std::function<double(double, double)>& F);

/// Mean of a sampled potential under a marginal (segment-exact quadrature).
double potential_mean(const GridFn& fn, const Marginal& mu);

}  // namespace qot
