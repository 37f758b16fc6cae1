#include "qot/plan_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qot {

namespace {

// zeros of the concave piecewise-linear y -> coef*y - other(y) - c,
// clipped to the support of mu
SupportSection scan_section(double c, double coef, const GridFn& other, double at_x) {
    int n = other.n();
    std::vector<double> psi(static_cast<size_t>(n));
    int imax = 0;
    for (int j = 0; j < n; ++j) {
        psi[static_cast<size_t>(j)] = coef * other.node(j) - other.v[static_cast<size_t>(j)] - c;
        if (psi[static_cast<size_t>(j)] > psi[static_cast<size_t>(imax)]) imax = j;
    }
    if (psi[static_cast<size_t>(imax)] < 0)
        throw std::runtime_error("support_section: xi nonpositive everywhere (pair not converged?)");

    SupportSection sec;
    sec.x = at_x;
    // walk left from the max for the first sign change
    int j = imax;
    while (j > 0 && psi[static_cast<size_t>(j - 1)] >= 0) --j;
    if (j == 0) {
        sec.y_m = other.a;
        sec.clipped_lo = true;
    } else {
        double p0 = psi[static_cast<size_t>(j - 1)], p1 = psi[static_cast<size_t>(j)];
        sec.y_m = other.node(j - 1) + (0 - p0) / (p1 - p0) * (other.node(j) - other.node(j - 1));
    }
    j = imax;
    while (j < n - 1 && psi[static_cast<size_t>(j + 1)] >= 0) ++j;
    if (j == n - 1) {
        sec.y_M = other.b;
        sec.clipped_hi = true;
    } else {
        double p0 = psi[static_cast<size_t>(j)], p1 = psi[static_cast<size_t>(j + 1)];
        sec.y_M = other.node(j) + (0 - p0) / (p1 - p0) * (other.node(j + 1) - other.node(j));
    }
    return sec;
}

void check_domain(const PotentialPair& p, double x, double y) {
    double sx = 1e-12 * p.mu0.length(), sy = 1e-12 * p.mu1.length();
    if (x < p.mu0.a() - sx || x > p.mu0.b() + sx || y < p.mu1.a() - sy || y > p.mu1.b() + sy)
        throw std::domain_error("point outside the product support");
}

double section_mean(const SupportSection& s, const Marginal& mu) {
    double mass = mu.mass(s.y_m, s.y_M);
    if (mass <= 0) throw std::runtime_error("section_mean: empty section");
    return mu.moment1(s.y_m, s.y_M) / mass;
}

SupportSection section_y_side(const PotentialPair& p, double y) {
    return scan_section(p.g(y), y, p.f, y);
}

}  // namespace

double xi(const PotentialPair& p, double x, double y) {
    check_domain(p, x, y);
    return p.xi(x, y);
}

double plan_density(const PotentialPair& p, double x, double y) {
    check_domain(p, x, y);
    return std::max(0.0, p.xi(x, y) / p.eps);
}

SupportSection support_section(const PotentialPair& p, double x) {
    double slack = 1e-12 * p.mu0.length();
    if (x < p.mu0.a() - slack || x > p.mu0.b() + slack)
        throw std::domain_error("support_section: x outside source support");
    return scan_section(p.f(x), x, p.g, x);
}

SectionTable section_table(const PotentialPair& p) {
    SectionTable t;
    t.rows.reserve(static_cast<size_t>(p.f.n()));
    double sum = 0;
    for (int i = 0; i < p.f.n(); ++i) {
        SupportSection s = support_section(p, p.f.node(i));
        t.sup_diam = std::max(t.sup_diam, s.diameter());
        sum += s.diameter();
        t.rows.push_back(s);
    }
    t.mean_diam = sum / p.f.n();
    t.sparse = t.sup_diam <= p.mu1.length() / 3.0;
    return t;
}

double f_prime(const PotentialPair& p, double x) {
    return section_mean(support_section(p, x), p.mu1);
}

double g_prime(const PotentialPair& p, double y) {
    SupportSection s = section_y_side(p, y);
    double mass = p.mu0.mass(s.y_m, s.y_M);
    if (mass <= 0) throw std::runtime_error("g_prime: empty section");
    return p.mu0.moment1(s.y_m, s.y_M) / mass;
}

double f_second(const PotentialPair& p, double x, const SectionTable* table) {
    SectionTable local;
    if (table == nullptr) {
        local = section_table(p);
        table = &local;
    }
    if (!table->sparse)
        throw std::domain_error("f_second: sparse-regime hypothesis not satisfied");

    SupportSection s = support_section(p, x);
    double band = p.g.h();  // one grid cell
    bool lo_clipped = s.clipped_lo || (s.y_m - p.mu1.a() <= band);
    bool hi_clipped = s.clipped_hi || (p.mu1.b() - s.y_M <= band);
    // ambiguous classification: the section boundary sits in the one-cell
    // band but xi has already detached from the support boundary
    if (!s.clipped_lo && (s.y_m - p.mu1.a() <= band) && (s.y_m - p.mu1.a() > 0))
        throw std::domain_error("f_second: x at the lower kink point");
    if (!s.clipped_hi && (p.mu1.b() - s.y_M <= band) && (p.mu1.b() - s.y_M > 0))
        throw std::domain_error("f_second: x at the upper kink point");
    if (lo_clipped && hi_clipped)
        throw std::domain_error("f_second: section spans the whole target support");

    double fp = section_mean(s, p.mu1);
    double mass = p.mu1.mass(s.y_m, s.y_M);
    double val = 0;
    if (!lo_clipped) {
        double gp = g_prime(p, s.y_m);
        double d = fp - s.y_m;
        val += p.mu1.density(s.y_m) * d * d / ((x - gp) * mass);
    }
    if (!hi_clipped) {
        double gp = g_prime(p, s.y_M);
        double d = fp - s.y_M;
        val += p.mu1.density(s.y_M) * d * d / ((gp - x) * mass);
    }
    return val;
}

std::optional<std::pair<double, double>> kink_points(const PotentialPair& p,
                                                     const SectionTable* table) {
    SectionTable local;
    if (table == nullptr) {
        local = section_table(p);
        table = &local;
    }
    if (!table->sparse) return std::nullopt;

    auto edge_xi = [&](int i, double ybnd) {
        return p.f.node(i) * ybnd - p.f.v[static_cast<size_t>(i)] - p.g(ybnd);
    };
    // lower kink: last downcrossing of x -> xi(x, a1)
    double a1 = p.mu1.a(), b1 = p.mu1.b();
    std::optional<double> xm, xM;
    for (int i = 0; i + 1 < p.f.n(); ++i) {
        double v0 = edge_xi(i, a1), v1 = edge_xi(i + 1, a1);
        if (v0 >= 0 && v1 < 0)
            xm = p.f.node(i) + v0 / (v0 - v1) * (p.f.node(i + 1) - p.f.node(i));
        double w0 = edge_xi(i, b1), w1 = edge_xi(i + 1, b1);
        if (w0 < 0 && w1 >= 0 && !xM)
            xM = p.f.node(i) + (0 - w0) / (w1 - w0) * (p.f.node(i + 1) - p.f.node(i));
    }
    if (!xm || !xM) return std::nullopt;
    return std::make_pair(*xm, *xM);
}

std::pair<std::optional<double>, std::optional<double>>
boundary_derivatives(const PotentialPair& p, double x, const SectionTable* table) {
    (void)table;
    SupportSection s = support_section(p, x);
    double band = p.g.h();
    double fp = section_mean(s, p.mu1);
    std::optional<double> dm, dM;
    if (!s.clipped_lo && s.y_m - p.mu1.a() > band) {
        double gp = g_prime(p, s.y_m);
        dm = -(s.y_m - fp) / (x - gp);
    }
    if (!s.clipped_hi && p.mu1.b() - s.y_M > band) {
        double gp = g_prime(p, s.y_M);
        dM = -(s.y_M - fp) / (x - gp);
    }
    return {dm, dM};
}

double barycentric_projection(const PotentialPair& p, double x) {
    double slack = 1e-12 * p.mu0.length();
    if (x < p.mu0.a() - slack || x > p.mu0.b() + slack)
        throw std::domain_error("barycentric_projection: x outside source support");
    return active_integral(p, x, [&](double v, double y) { return y * v / p.eps; });
}

bool full_support(const PotentialPair& p) {
    for (int i = 0; i < p.f.n(); ++i)
        for (int j = 0; j < p.g.n(); ++j)
            if (p.f.node(i) * p.g.node(j) - p.f.v[static_cast<size_t>(i)] -
                    p.g.v[static_cast<size_t>(j)] < 0)
                return false;
    return true;
}

PlanDiagnostics diagnostics(const PotentialPair& p) {
    PlanDiagnostics d;
    SectionTable t = section_table(p);
    d.sup_diam = t.sup_diam;
    d.mean_diam = t.mean_diam;
    d.sparse = t.sparse;
    d.full_support = full_support(p);
    if (!t.sparse) return d;  // sigmas stay 0 outside the hypothesis

    auto kk = kink_points(p, &t);
    if (kk) {
        d.x_kink_lo = kk->first;
        d.x_kink_hi = kk->second;
    }
    auto sigma_range = [](const PotentialPair& q, const SectionTable& tbl,
                          const std::optional<double>& k1, const std::optional<double>& k2,
                          double& sm, double& sM) {
        double h = q.f.h();
        sm = 1e300;
        sM = -1e300;
        for (int i = 0; i < q.f.n(); ++i) {
            double x = q.f.node(i);
            if (k1 && std::abs(x - *k1) <= 3.0 * h) continue;
            if (k2 && std::abs(x - *k2) <= 3.0 * h) continue;
            try {
                double v = f_second(q, x, &tbl);
                sm = std::min(sm, v);
                sM = std::max(sM, v);
            } catch (const std::domain_error&) {
                // node inside a kink band; excluded by construction
            }
        }
        if (sm > sM) sm = sM = 0;
    };
    sigma_range(p, t, d.x_kink_lo, d.x_kink_hi, d.sigma_m_f, d.sigma_M_f);

    PotentialPair q = transpose(p);
    SectionTable tq = section_table(q);
    auto kq = kink_points(q, &tq);
    std::optional<double> kq1, kq2;
    if (kq) {
        kq1 = kq->first;
        kq2 = kq->second;
    }
    sigma_range(q, tq, kq1, kq2, d.sigma_m_g, d.sigma_M_g);
    return d;
}

MongeDistances distances_to_monge(const PotentialPair& p, const MongeSolution& ms) {
    double nf = potential_mean(p.f, p.mu0) - potential_mean(p.g, p.mu1);
    GridFn f0{ms.mu0.a(), ms.mu0.b(), ms.f0};
    GridFn g0{ms.mu1.a(), ms.mu1.b(), ms.g0};
    double n0 = potential_mean(f0, ms.mu0) - potential_mean(g0, ms.mu1);
    double scale = std::max(1.0, std::abs(potential_mean(p.f, p.mu0)));
    if (std::abs(nf) > 1e-6 * scale || std::abs(n0) > 1e-6 * scale)
        throw std::invalid_argument("distances_to_monge: potentials not symmetrically normalized");

    int n = p.f.n();
    double h = p.f.h();
    std::vector<double> haus2(static_cast<size_t>(n)), dfp2(static_cast<size_t>(n)),
        bary2(static_cast<size_t>(n)), dpot(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = p.f.node(i);
        SupportSection s = support_section(p, x);
        double t0 = ms.map_at(x);
        double hd = std::max(std::abs(s.y_m - t0), std::abs(s.y_M - t0));
        haus2[static_cast<size_t>(i)] = hd * hd;
        double dfp = section_mean(s, p.mu1) - t0;
        dfp2[static_cast<size_t>(i)] = dfp * dfp;
        double db = barycentric_projection(p, x) - t0;
        bary2[static_cast<size_t>(i)] = db * db;
        dpot[static_cast<size_t>(i)] = p.f.v[static_cast<size_t>(i)] - ms.f0_at(x);
    }
    MongeDistances d;
    d.l2_hausdorff = std::sqrt(trapz(haus2, h));
    d.l2_fprime_T0 = std::sqrt(trapz(dfp2, h));
    d.l2_barycentric_T0 = std::sqrt(trapz(bary2, h));

    double sup = 0;
    for (double v : dpot) sup = std::max(sup, std::abs(v));
    double quot = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double dx = (j - i) * h;  // >= one grid cell by construction
            quot = std::max(quot, std::abs(dpot[static_cast<size_t>(i)] -
                                           dpot[static_cast<size_t>(j)]) / std::sqrt(dx));
        }
    d.holder_f_f0 = sup + quot;
    return d;
}

}  // namespace qot
