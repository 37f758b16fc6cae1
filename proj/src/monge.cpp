#include "qot/monge.hpp"

#include <cmath>
#include <stdexcept>

#include "qot/grid.hpp"

namespace qot {

namespace {

double interp(const std::vector<double>& grid_v, double a, double b, double xq) {
    GridFn f{a, b, grid_v};
    return f(xq);
}

}  // namespace

double MongeSolution::map_at(double xq) const { return interp(map, mu0.a(), mu0.b(), xq); }
double MongeSolution::f0_at(double xq) const { return interp(f0, mu0.a(), mu0.b(), xq); }
double MongeSolution::g0_at(double yq) const { return interp(g0, mu1.a(), mu1.b(), yq); }

double monge_map(const Marginal& m0, const Marginal& m1, double x) {
    double slack = 1e-12 * m0.length();
    if (x < m0.a() - slack || x > m0.b() + slack)
        throw std::domain_error("monge_map: x outside source support");
    return m1.quantile(m0.cdf(x));
}

double ot_cost(const Marginal& m0, const Marginal& m1) {
    // change of variables t = F0(x) turns the quantile-difference integral
    // into an integral against mu0
    return m0.integrate_against(
        [&](double x) {
            double d = x - monge_map(m0, m1, x);
            return 0.5 * d * d;
        },
        m0.a(), m0.b());
}

MongeSolution solve_monge(const Marginal& m0, const Marginal& m1, int nx, int ny) {
    MongeSolution ms{m0, m1};
    ms.x = linspace(m0.a(), m0.b(), nx);
    ms.y = linspace(m1.a(), m1.b(), ny);
    ms.map.resize(ms.x.size());
    for (size_t i = 0; i < ms.x.size(); ++i) ms.map[i] = monge_map(m0, m1, ms.x[i]);

    // f0 as the trapezoid antiderivative of the (Lipschitz) map
    ms.f0.assign(ms.x.size(), 0.0);
    double hx = (m0.b() - m0.a()) / (nx - 1);
    for (size_t i = 1; i < ms.x.size(); ++i)
        ms.f0[i] = ms.f0[i - 1] + 0.5 * (ms.map[i] + ms.map[i - 1]) * hx;

    // g0 as the discrete convex conjugate over the x grid
    ms.g0.resize(ms.y.size());
    for (size_t j = 0; j < ms.y.size(); ++j) {
        double best = -1e300;
        for (size_t i = 0; i < ms.x.size(); ++i)
            best = std::max(best, ms.x[i] * ms.y[j] - ms.f0[i]);
        ms.g0[j] = best;
    }

    // symmetric normalization: shift so both potentials have equal means
    GridFn ff{m0.a(), m0.b(), ms.f0};
    GridFn gg{m1.a(), m1.b(), ms.g0};
    double mean_f = m0.integrate_against([&](double x) { return ff(x); }, m0.a(), m0.b());
    double mean_g = m1.integrate_against([&](double y) { return gg(y); }, m1.a(), m1.b());
    double c = 0.5 * (mean_g - mean_f);
    for (auto& v : ms.f0) v += c;
    for (auto& v : ms.g0) v -= c;

    ms.cost = ot_cost(m0, m1);
    return ms;
}

double kantorovich_potential(const Marginal& m0, const Marginal& m1, double x) {
    double slack = 1e-12 * m0.length();
    if (x < m0.a() - slack || x > m0.b() + slack)
        throw std::domain_error("kantorovich_potential: x outside source support");
    MongeSolution ms = solve_monge(m0, m1);
    return ms.f0_at(x);
}

}  // namespace qot
