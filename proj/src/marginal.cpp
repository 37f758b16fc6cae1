#include "qot/marginal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qot {

namespace {
constexpr double kNormTol = 1e-12;
}

Marginal::Marginal(Family fam, double a, double b) : family_(fam), a_(a), b_(b) {
    if (!(a < b)) throw std::invalid_argument("Marginal: need a < b");
}

Marginal::Marginal() : Marginal(Family::Uniform, 0.0, 1.0) { lambda_ = Lambda_ = 1.0; }

Marginal Marginal::uniform(double a, double b) {
    Marginal m(Family::Uniform, a, b);
    m.lambda_ = m.Lambda_ = 1.0 / (b - a);
    return m;
}

Marginal Marginal::linear(double a, double b, double c0, double c1) {
    Marginal m(Family::Linear, a, b);
    m.c0_ = c0;
    m.c1_ = c1;
    double total = c0 * (b - a) + 0.5 * c1 * (b * b - a * a);
    if (std::abs(total - 1.0) > kNormTol)
        throw std::invalid_argument("Marginal::linear: density does not integrate to 1");
    double ua = c0 + c1 * a, ub = c0 + c1 * b;
    m.lambda_ = std::min(ua, ub);
    m.Lambda_ = std::max(ua, ub);
    if (m.lambda_ <= 0)
        throw std::invalid_argument("Marginal::linear: density not positive on [a,b]");
    return m;
}

Marginal Marginal::cosine_bump(double a, double b, double beta) {
    if (!(std::abs(beta) < 1))
        throw std::invalid_argument("Marginal::cosine_bump: need |beta| < 1");
    Marginal m(Family::CosineBump, a, b);
    m.beta_ = beta;
    // the cosine integrates to zero over a full half-period
    m.norm_ = 1.0 / (b - a);
    m.lambda_ = (1.0 - std::abs(beta)) * m.norm_;
    m.Lambda_ = (1.0 + std::abs(beta)) * m.norm_;
    return m;
}

double Marginal::density(double x) const {
    double slack = 1e-12 * length();
    if (x < a_ - slack || x > b_ + slack)
        throw std::domain_error("Marginal::density: x outside support");
    x = std::clamp(x, a_, b_);
    switch (family_) {
        case Family::Uniform: return 1.0 / length();
        case Family::Linear: return c0_ + c1_ * x;
        case Family::CosineBump:
            return norm_ * (1.0 + beta_ * std::cos(M_PI * (x - a_) / length()));
    }
    return 0;  // unreachable
}

double Marginal::cdf(double x) const {
    if (x <= a_) return 0.0;
    if (x >= b_) return 1.0;
    switch (family_) {
        case Family::Uniform: return (x - a_) / length();
        case Family::Linear:
            return c0_ * (x - a_) + 0.5 * c1_ * (x * x - a_ * a_);
        case Family::CosineBump: {
            double t = (x - a_) / length();
            return t + (beta_ / M_PI) * std::sin(M_PI * t);
        }
    }
    return 0;  // unreachable
}

double Marginal::quantile(double p) const {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::domain_error("Marginal::quantile: p outside [0,1]");
    if (p == 0.0) return a_;
    if (p == 1.0) return b_;
    double lo = a_, hi = b_;
    while (hi - lo > 1e-13) {
        double mid = 0.5 * (lo + hi);
        if (cdf(mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    double x = 0.5 * (lo + hi);
    double u = density(x);
    if (u > 0) x -= (cdf(x) - p) / u;
    return std::clamp(x, a_, b_);
}

double Marginal::mass(double lo, double hi) const {
    if (lo > hi) return 0.0;
    return cdf(hi) - cdf(lo);
}

double Marginal::moment1(double lo, double hi) const {
    if (lo > hi) return 0.0;
    lo = std::clamp(lo, a_, b_);
    hi = std::clamp(hi, a_, b_);
    switch (family_) {
        case Family::Uniform:
            return 0.5 * (hi * hi - lo * lo) / length();
        case Family::Linear:
            return 0.5 * c0_ * (hi * hi - lo * lo) +
                   c1_ * (hi * hi * hi - lo * lo * lo) / 3.0;
        case Family::CosineBump: {
            double k = M_PI / length();
            // antiderivative of y*cos(k*(y-a)): with t = y-a,
            // (t+a)*cos(k t) integrates to (t sin(kt)/k + cos(kt)/k^2) + a sin(kt)/k
            auto anti = [&](double y) {
                double t = y - a_;
                double s = std::sin(k * t), c = std::cos(k * t);
                return t * s / k + c / (k * k) + a_ * s / k;
            };
            double base = 0.5 * (hi * hi - lo * lo);
            return norm_ * (base + beta_ * (anti(hi) - anti(lo)));
        }
    }
    return 0;  // unreachable
}

double Marginal::integrate_against(const std::function<double(double)>& h,
                                   double lo, double hi) const {
    if (lo > hi) return 0.0;
    double slack = 1e-12 * length();
    if (lo < a_ - slack || hi > b_ + slack)
        throw std::domain_error("Marginal::integrate_against: interval outside support");
    lo = std::clamp(lo, a_, b_);
    hi = std::clamp(hi, a_, b_);
    if (hi - lo == 0.0) return 0.0;
    long n = std::lround(std::ceil((hi - lo) * panels_per_unit_));
    n = std::max<long>(n, 8);
    double dx = (hi - lo) / static_cast<double>(n);
    auto f = [&](double y) { return h(y) * density(y); };
    double sum = f(lo) + f(hi);
    double four = 0, two = 0;
    for (long i = 0; i < n; ++i) {
        four += f(lo + (i + 0.5) * dx);
        if (i > 0) two += f(lo + i * dx);
    }
    return dx / 6.0 * (sum + 4.0 * four + 2.0 * two);
}

std::string Marginal::describe() const {
    std::ostringstream os;
    switch (family_) {
        case Family::Uniform: os << "uniform"; break;
        case Family::Linear: os << "linear(c0=" << c0_ << ",c1=" << c1_ << ")"; break;
        case Family::CosineBump: os << "cosine(beta=" << beta_ << ")"; break;
    }
    os << "[" << a_ << "," << b_ << "]";
    return os.str();
}

}  // namespace qot
