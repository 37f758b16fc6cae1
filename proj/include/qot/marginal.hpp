#pragma once

#include <functional>
#include <string>

namespace qot {

enum class Family { Uniform, Linear, CosineBump };

/// A probability density on a compact interval [a,b], continuous and bounded
/// away from zero and infinity. Only families with closed-form CDF and
/// partial moments are supported, so the density bounds lambda/Lambda are
/// known exactly.
class Marginal {
public:
    Marginal();  // uniform on [0,1]

    static Marginal uniform(double a, double b);
    /// u(x) = c0 + c1*x; must be positive on [a,b] and integrate to 1.
    static Marginal linear(double a, double b, double c0, double c1);
    /// u(x) proportional to 1 + beta*cos(pi*(x-a)/(b-a)), |beta| < 1.
    static Marginal cosine_bump(double a, double b, double beta);

    double a() const { return a_; }
    double b() const { return b_; }
    double length() const { return b_ - a_; }
    Family family() const { return family_; }
    double lambda() const { return lambda_; }   // inf of the density
    double Lambda() const { return Lambda_; }   // sup of the density
    double mean() const { return moment1(a_, b_); }

    /// Density value; x must lie in [a,b].
    double density(double x) const;
    /// CDF; clamps to {0,1} outside [a,b].
    double cdf(double x) const;
    /// Inverse CDF on [0,1]; bisection to 1e-13 bracket width plus a Newton polish.
    double quantile(double p) const;

    /// Partial mass over [lo,hi] (closed form). Intervals are clipped to [a,b];
    /// lo > hi gives 0.
    double mass(double lo, double hi) const;
    /// Partial first moment: integral of y*u(y) dy over [lo,hi] (closed form).
    double moment1(double lo, double hi) const;

    /// Integral of h(y)*u(y) dy over [lo,hi] by composite Simpson at the
    /// configured resolution. Requires a <= lo and hi <= b; lo > hi gives 0.
    double integrate_against(const std::function<double(double)>& h,
                             double lo, double hi) const;

    int panels_per_unit() const { return panels_per_unit_; }
    void set_panels_per_unit(int n) { panels_per_unit_ = n; }

    std::string describe() const;

    // family parameters, exposed for serialization
    double param_c0() const { return c0_; }
    double param_c1() const { return c1_; }
    double param_beta() const { return beta_; }

private:
    Marginal(Family fam, double a, double b);

    Family family_;
    double a_, b_;
    double c0_ = 0, c1_ = 0;    // linear family
    double beta_ = 0;           // cosine family
    double norm_ = 1;           // cosine normalization constant (1/length)
    double lambda_ = 0, Lambda_ = 0;
    int panels_per_unit_ = 1 << 14;
};

}  // namespace qot
