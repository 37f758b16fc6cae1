#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qot/monge.hpp"
#include "qot/solver.hpp"

namespace qot {

/// One x-section of the optimal support: the interval of y receiving mass.
struct SupportSection {
    double x = 0;
    double y_m = 0, y_M = 0;
    bool clipped_lo = false;  // y_m sits on the lower support boundary
    bool clipped_hi = false;
    double diameter() const { return y_M - y_m; }
};

struct SectionTable {
    std::vector<SupportSection> rows;  // one per x-grid node
    double sup_diam = 0;
    double mean_diam = 0;
    bool sparse = false;  // sup_diam <= |support(mu1)| / 3
};

/// Curvature extremes and kink locations of a converged pair.
struct PlanDiagnostics {
    double sigma_m_f = 0, sigma_M_f = 0;
    double sigma_m_g = 0, sigma_M_g = 0;
    std::optional<double> x_kink_lo, x_kink_hi;  // where y_m leaves a1 / y_M reaches b1
    double sup_diam = 0, mean_diam = 0;
    bool sparse = false;
    bool full_support = false;
};

double xi(const PotentialPair& p, double x, double y);
double plan_density(const PotentialPair& p, double x, double y);

/// Zeros of the concave function xi(x,.) on the interpolant, clipped to the
/// target support. Throws if xi(x,.) is nonpositive everywhere.
SupportSection support_section(const PotentialPair& p, double x);

SectionTable section_table(const PotentialPair& p);

/// Conditional mean of y over the section: the derivative of f.
double f_prime(const PotentialPair& p, double x);
/// Symmetric counterpart for g.
double g_prime(const PotentialPair& p, double y);

/// Two-term curvature formula; requires the sparse regime and x away from
/// the kink points. Pass a precomputed table to avoid recomputation.
double f_second(const PotentialPair& p, double x, const SectionTable* table = nullptr);

/// The x where y_m leaves the lower target boundary and the x where y_M
/// reaches the upper one. Empty outside the sparse regime.
std::optional<std::pair<double, double>> kink_points(const PotentialPair& p,
                                                     const SectionTable* table = nullptr);

/// (y_m'(x), y_M'(x)) by the implicit-function formulas; a component is
/// absent where its formula does not apply (section clipped on that side).
std::pair<std::optional<double>, std::optional<double>>
boundary_derivatives(const PotentialPair& p, double x, const SectionTable* table = nullptr);

/// Conditional mean of y under the plan given x.
double barycentric_projection(const PotentialPair& p, double x);

/// True when the plan density is positive on the whole product rectangle.
bool full_support(const PotentialPair& p);

PlanDiagnostics diagnostics(const PotentialPair& p);

struct MongeDistances {
    double l2_hausdorff = 0;      // L2(dx) of sup_{y in S_x} |y - T0(x)|
    double l2_fprime_T0 = 0;      // L2(dx) of f' - T0
    double holder_f_f0 = 0;       // C^{0,1/2} grid estimate of f_eps - f0
    double l2_barycentric_T0 = 0; // L2(dx) of T0 - barycentric projection
};

/// Both inputs must carry the symmetric normalization.
MongeDistances distances_to_monge(const PotentialPair& p, const MongeSolution& ms);

}  // namespace qot
