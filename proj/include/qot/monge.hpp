#pragma once

#include <vector>

#include "qot/marginal.hpp"

namespace qot {

/// Unregularized optimal transport between two marginals: the monotone map,
/// the convex potential whose derivative it is, and the transport cost.
/// Potentials are normalized symmetrically (equal means under the marginals).
struct MongeSolution {
    Marginal mu0, mu1;
    std::vector<double> x;    // uniform grid over the source support
    std::vector<double> map;  // T0 at the grid nodes
    std::vector<double> f0;   // source potential at the grid nodes
    std::vector<double> y;    // uniform grid over the target support
    std::vector<double> g0;   // target potential (convex conjugate of f0)
    double cost = 0;

    double map_at(double xq) const;  // piecewise-linear interpolation
    double f0_at(double xq) const;
    double g0_at(double yq) const;
};

/// T0(x) = F1^{-1}(F0(x)); x must lie in the source support.
double monge_map(const Marginal& m0, const Marginal& m1, double x);

/// Transport cost between the quantile functions, >= 0.
double ot_cost(const Marginal& m0, const Marginal& m1);

MongeSolution solve_monge(const Marginal& m0, const Marginal& m1,
                          int nx = 2049, int ny = 2049);

/// Normalized convex potential with derivative T0, evaluated at x.
double kantorovich_potential(const Marginal& m0, const Marginal& m1, double x);

}  // namespace qot
