#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "qot/marginal.hpp"

using namespace qot;

static std::vector<Marginal> corpus() {
    return {Marginal::uniform(0, 1),        Marginal::uniform(2, 4),
            Marginal::uniform(0, 2),        Marginal::linear(0, 1, 0.5, 1.0),
            Marginal::linear(1, 2, 1.9, -0.6), Marginal::cosine_bump(0, 1, 0.5),
            Marginal::cosine_bump(-1, 1, -0.8)};
}

TEST_CASE("density evaluation") {
    CHECK(Marginal::uniform(0, 1).density(0.3) == doctest::Approx(1.0));
    CHECK(Marginal::linear(0, 1, 0.5, 1.0).density(0.0) == doctest::Approx(0.5));

    // cosine-bump value at the midpoint: the bump vanishes there
    Marginal c = Marginal::cosine_bump(0, 1, 0.5);
    CHECK(c.density(0.5) == doctest::Approx(1.0));
    CHECK(c.density(0.0) == doctest::Approx(1.5));

    CHECK_THROWS_AS(Marginal::uniform(0, 1).density(1.5), std::domain_error);
    CHECK_THROWS_AS(Marginal::uniform(0, 1).density(-0.1), std::domain_error);
}

TEST_CASE("cdf") {
    CHECK(Marginal::uniform(0, 1).cdf(0.5) == doctest::Approx(0.5));
    CHECK(Marginal::uniform(2, 4).cdf(3.0) == doctest::Approx(0.5));
    CHECK(Marginal::linear(0, 1, 0.5, 1.0).cdf(0.5) == doctest::Approx(0.375));
    // clamps outside the support
    CHECK(Marginal::uniform(0, 1).cdf(-1.0) == 0.0);
    CHECK(Marginal::uniform(0, 1).cdf(2.0) == 1.0);
    for (const auto& m : corpus()) {
        CHECK(m.cdf(m.a()) == doctest::Approx(0.0));
        CHECK(m.cdf(m.b()) == doctest::Approx(1.0));
    }
}

TEST_CASE("quantile") {
    CHECK(Marginal::uniform(0, 1).quantile(0.25) == doctest::Approx(0.25));
    CHECK(Marginal::uniform(1, 3).quantile(0.5) == doctest::Approx(2.0));
    CHECK(Marginal::linear(0, 1, 0.5, 1.0).quantile(0.375) == doctest::Approx(0.5));
    CHECK_THROWS_AS(Marginal::uniform(0, 1).quantile(1.5), std::domain_error);
    CHECK_THROWS_AS(Marginal::uniform(0, 1).quantile(-0.1), std::domain_error);
}

TEST_CASE("quantile inverts cdf at random points") {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (const auto& m : corpus()) {
        for (int k = 0; k < 100; ++k) {
            double x = m.a() + (m.b() - m.a()) * unit(rng);
            CHECK(std::abs(m.quantile(m.cdf(x)) - x) < 1e-10);
        }
    }
}

TEST_CASE("integrate_against") {
    Marginal u = Marginal::uniform(0, 1);
    CHECK(u.integrate_against([](double) { return 1.0; }, 0, 1) == doctest::Approx(1.0));
    CHECK(u.integrate_against([](double y) { return y; }, 0, 1) == doctest::Approx(0.5));
    Marginal lin = Marginal::linear(0, 1, 0.5, 1.0);
    CHECK(lin.integrate_against([](double y) { return y; }, 0, 1) ==
          doctest::Approx(7.0 / 12.0));
    CHECK(u.integrate_against([](double) { return 1.0; }, 0.7, 0.3) == 0.0);
    CHECK_THROWS_AS(u.integrate_against([](double) { return 1.0; }, -0.5, 0.5),
                    std::domain_error);
    for (const auto& m : corpus())
        CHECK(std::abs(m.integrate_against([](double) { return 1.0; }, m.a(), m.b()) - 1.0) <
              1e-12);
}

TEST_CASE("closed-form partial mass and first moment match quadrature") {
    for (const auto& m : corpus()) {
        double lo = m.a() + 0.2 * (m.b() - m.a());
        double hi = m.a() + 0.77 * (m.b() - m.a());
        CHECK(m.mass(lo, hi) ==
              doctest::Approx(m.integrate_against([](double) { return 1.0; }, lo, hi))
                  .epsilon(1e-11));
        CHECK(m.moment1(lo, hi) ==
              doctest::Approx(m.integrate_against([](double y) { return y; }, lo, hi))
                  .epsilon(1e-11));
        CHECK(m.mass(hi, lo) == 0.0);
    }
}

TEST_CASE("density bounds hold on a fine grid") {
    for (const auto& m : corpus()) {
        for (int i = 0; i <= 10000; ++i) {
            double x = m.a() + (m.b() - m.a()) * i / 10000.0;
            double u = m.density(x);
            CHECK(u >= m.lambda() - 1e-12);
            CHECK(u <= m.Lambda() + 1e-12);
        }
    }
}

TEST_CASE("construction rejects invalid parameters") {
    CHECK_THROWS_AS(Marginal::uniform(1, 1), std::invalid_argument);
    CHECK_THROWS_AS(Marginal::cosine_bump(0, 1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Marginal::cosine_bump(0, 1, -1.2), std::invalid_argument);
    // integrates to 1.25, not 1
    CHECK_THROWS_AS(Marginal::linear(0, 1, 0.75, 1.0), std::invalid_argument);
    // normalized but negative at the right endpoint
    CHECK_THROWS_AS(Marginal::linear(0, 1, 2.0, -2.0), std::invalid_argument);
}

TEST_CASE("cosine bump lambda and Lambda") {
    Marginal c = Marginal::cosine_bump(0, 1, 0.99);
    CHECK(c.lambda() == doctest::Approx(0.01));
    CHECK(c.Lambda() == doctest::Approx(1.99));
    Marginal c2 = Marginal::cosine_bump(0, 2, 0.5);
    CHECK(c2.lambda() == doctest::Approx(0.25));
    CHECK(c2.Lambda() == doctest::Approx(0.75));
}

TEST_CASE("mean") {
    CHECK(Marginal::uniform(0, 1).mean() == doctest::Approx(0.5));
    CHECK(Marginal::uniform(0, 2).mean() == doctest::Approx(1.0));
    CHECK(Marginal::linear(0, 1, 0.5, 1.0).mean() == doctest::Approx(7.0 / 12.0));
    // the half-period bump is odd about the midpoint: mean shifts by -2 beta / pi^2
    CHECK(Marginal::cosine_bump(0, 1, 0.5).mean() ==
          doctest::Approx(0.5 - 1.0 / (M_PI * M_PI)).epsilon(1e-9));
}
