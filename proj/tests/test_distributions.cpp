#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>

#include "fprna/distributions.hpp"
#include "fprna/errors.hpp"

using namespace fprna;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

// Independent double-exponential integration over (0, inf).
template <class F>
double integrate(F f) {
    boost::math::quadrature::exp_sinh<double> q;
    return q.integrate(f, 0.0, kInf, 1e-14);
}

}  // namespace

TEST_CASE("gamma pdf values") {
    CHECK(gamma_pdf({1, 2}, 1e-12) == doctest::Approx(2.0).epsilon(1e-11));
    CHECK(gamma_pdf({2, 1}, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK_THROWS_AS(gamma_pdf({2, 1}, 0.0), DomainError);
    CHECK_THROWS_AS(gamma_pdf({2, 1}, -1.0), DomainError);
    CHECK_THROWS_AS(GammaParams(0, 1), InvalidParameter);
    CHECK_THROWS_AS(GammaParams(1, -2), InvalidParameter);
}

TEST_CASE("inverse gamma pdf values and change of variable") {
    CHECK(invgamma_pdf({2, 1}, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK_THROWS_AS(invgamma_pdf({2, 1}, 0.0), DomainError);
    for (double a : {0.5, 2.0, 7.3}) {
        for (double b : {0.3, 1.0, 9.0}) {
            for (double y : {0.05, 0.7, 3.0, 40.0}) {
                const GammaParams g(a, b);
                CHECK(invgamma_pdf(g, y) * y * y ==
                      doctest::Approx(gamma_pdf(g, 1.0 / y)).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("normalizer against an independent gamma function") {
    for (double a : {0.5, 1.0, 3.5, 9.0, 30.0}) {
        for (double b : {0.2, 1.0, 8.0}) {
            const double ref = a * std::log(b) - std::log(boost::math::tgamma(a));
            CHECK(GammaParams(a, b).log_normalizer() == doctest::Approx(ref).epsilon(1e-13));
        }
    }
}

TEST_CASE("densities integrate to one") {
    for (double a : {1.5, 3.0, 9.0}) {
        for (double b : {0.5, 2.0}) {
            const GammaParams g(a, b);
            CHECK(integrate([&](double x) { return gamma_pdf(g, x); }) ==
                  doctest::Approx(1.0).epsilon(1e-10));
            CHECK(integrate([&](double y) { return y > 0 ? invgamma_pdf(g, y) : 0.0; }) ==
                  doctest::Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("inverse gamma moments") {
    CHECK(invgamma_moment({3, 4}, 1) == 2.0);
    CHECK(invgamma_moment({3, 4}, 2) == 8.0);
    CHECK_THROWS_AS(invgamma_moment({1.5, 1}, 2), MomentDivergence);
    CHECK_THROWS_AS(invgamma_moment({1.0, 1}, 1), MomentDivergence);
    CHECK_THROWS_AS(invgamma_moment({3, 1}, 3), InvalidParameter);
    for (double a : {2.0, 5.0, 10.0}) {
        for (double b : {0.5, 1.0, 8.0}) {
            const GammaParams g(a, b);
            const double m = integrate([&](double y) { return y > 0 ? y * invgamma_pdf(g, y) : 0.0; });
            CHECK(invgamma_moment(g, 1) == doctest::Approx(m).epsilon(1e-8));
        }
    }
}

TEST_CASE("free densities have unit mean and the stated spread") {
    const auto q = DimensionlessParams::quadratic(8, 0, 0);
    CHECK(integrate([&](double r) { return r > 0 ? r * rho0(q, r) : 0.0; }) ==
          doctest::Approx(1.0).epsilon(1e-10));
    const auto l = DimensionlessParams::linear(4, 0, 0);
    const double m1 = integrate([&](double r) { return r > 0 ? r * rho0(l, r) : 0.0; });
    const double m2 = integrate([&](double r) { return r > 0 ? r * r * rho0(l, r) : 0.0; });
    CHECK(m1 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(m2 - m1 * m1 == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(cv_rho0(DimensionlessParams::quadratic(2, 0, 0)) == doctest::Approx(1.0));
    CHECK(cv_rho0(DimensionlessParams::quadratic(5, 0, 0)) == doctest::Approx(0.5));
    CHECK(cv_rho0(DimensionlessParams::linear(4, 0, 0)) == doctest::Approx(0.5));
    CHECK_THROWS_AS(cv_rho0(DimensionlessParams::quadratic(1, 0, 0)), MomentDivergence);
    CHECK_THROWS_AS(rho0(q, 0.0), DomainError);
}

TEST_CASE("fast density reduces to the free shape without binding") {
    for (double r : {0.01, 0.5, 1.0, 4.0}) {
        const auto q0 = DimensionlessParams::quadratic(3, 0, 2.5);
        const auto qp = DimensionlessParams::quadratic(3, 3, 0);
        CHECK(log_rhofast_unnormalized(q0, r) == log_rho0_shape(q0, r));
        CHECK(log_rhofast_unnormalized(qp, r) == log_rho0_shape(qp, r));
        const auto l0 = DimensionlessParams::linear(2, 0, 4);
        CHECK(log_rhofast_unnormalized(l0, r) == log_rho0_shape(l0, r));
    }
    CHECK(rhofast_unnormalized(DimensionlessParams::quadratic(2, 1, 1), 1.0) ==
          doctest::Approx(4.0 * std::exp(-2.0)).epsilon(1e-15));
    CHECK_THROWS_AS(rhofast_unnormalized(DimensionlessParams::quadratic(2, 1, 1), 0.0),
                    DomainError);
}

TEST_CASE("fast density is continuous at gamma = 0") {
    for (double r : {0.1, 1.0, 5.0}) {
        for (double p : {0.5, 1.0, 3.0}) {
            const auto a = DimensionlessParams::quadratic(8, 1e-12, p);
            const auto b = DimensionlessParams::quadratic(8, 0, p);
            const double va = rhofast_unnormalized(a, r);
            const double vb = rhofast_unnormalized(b, r);
            CHECK(std::fabs(va - vb) / vb < 1e-8);
        }
    }
}

TEST_CASE("fast density against a direct power evaluation") {
    const double d = 4.0, g = 0.7, p = 1.3, r = 0.8;
    const double direct =
        std::pow(1.0 + 1.0 / (g * r), g * p * d) * std::pow(r, -2.0 - d) * std::exp(-d / r);
    CHECK(rhofast_unnormalized(DimensionlessParams::quadratic(d, g, p), r) ==
          doctest::Approx(direct).epsilon(1e-13));
    const double e = 2.5;
    const double lin = std::pow(r, e - 1.0) * std::pow(1.0 + g * r, -p * e) * std::exp(-e * r);
    CHECK(rhofast_unnormalized(DimensionlessParams::linear(e, g, p), r) ==
          doctest::Approx(lin).epsilon(1e-13));
}

TEST_CASE("conditional law of microRNA") {
    const ModelParams m(2, 3, 2, 1, 1, 1, 1);
    const auto g = conditional_M(m, 1.0);
    CHECK(g.alpha == 4.0);
    CHECK(g.beta == 3.0);
    CHECK(invgamma_moment(g, 1) == doctest::Approx(j_fast(m, 1.0)));
    const ModelParams off(2, 3, 0, 1, 1, 1, 1);
    CHECK(conditional_M(off, 0.1).alpha == conditional_M(off, 10.0).alpha);
    for (double r : {0.1, 1.0, 7.0}) {
        CHECK(invgamma_moment(conditional_M(m, r), 1) == doctest::Approx(j_fast(m, r)));
    }
    CHECK_THROWS_AS(conditional_M(m, 0.0), DomainError);
}

TEST_CASE("dimensionless conditional law matches the dimensional one") {
    const ModelParams m(1.3, 0.7, 2.1, 5.5, 0.9, 1.7, 0.4);
    const auto dp = nondimensionalize(m, NoiseLaw::Quadratic);
    const auto [rbar, mubar] = characteristic_values(m);
    for (double r : {0.2, 1.0, 3.0}) {
        const auto a = conditional_M(m, r);
        const auto b = conditional_M(dp, r / rbar);
        CHECK(a.alpha == doctest::Approx(b.alpha).epsilon(1e-14));
        // Scaling mu by mubar scales the inverse gamma rate.
        CHECK(a.beta / mubar == doctest::Approx(b.beta).epsilon(1e-14));
        CHECK(invgamma_moment(b, 1) == doctest::Approx(j_fast(dp, r / rbar)).epsilon(1e-14));
        CHECK(j_fast(m, r) / mubar == doctest::Approx(j_fast(dp, r / rbar)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(conditional_M(DimensionlessParams::linear(1, 1, 1), 1.0),
                    UnsupportedConfiguration);
}

TEST_CASE("j_fast") {
    const ModelParams m(2, 3, 2, 1, 1, 1, 1);
    CHECK(j_fast(m, 0.0) == 3.0);
    CHECK(j_fast(m, 1.0) == 1.0);
    const ModelParams off(2, 3, 0, 1, 4, 1, 1);
    CHECK(j_fast(off, 0.0) == j_fast(off, 100.0));
    double last = j_fast(m, 0.0);
    for (int k = 1; k < 50; ++k) {
        const double v = j_fast(m, 0.1 * k);
        CHECK(v < last);
        last = v;
    }
}

TEST_CASE("uniform CV bound") {
    CHECK(c_delta_bound(3.0) == doctest::Approx(std::sqrt(0.6875)).epsilon(1e-14));
    CHECK(std::fabs(c_delta_bound(100.0) * std::sqrt(99.0) - 1.0) < 0.05);
    const double near = c_delta_bound(2.01);
    CHECK(std::isfinite(near));
    CHECK(near >= 1.0 / std::sqrt(1.01));
    for (double d : {2.2, 3.0, 5.0, 8.0, 20.0, 100.0}) {
        CHECK(c_delta_bound(d) >= cv_rho0(DimensionlessParams::quadratic(d, 0, 0)));
    }
    CHECK_THROWS_AS(c_delta_bound(2.0), DomainError);
    CHECK_THROWS_AS(c_delta_bound(1.0), DomainError);
}

TEST_CASE("Density1D bookkeeping") {
    const Density1D d({1.0, 2.0, 3.0}, {0.5, 0.5, 0.5});
    CHECK(d.normalization == doctest::Approx(1.5));
    CHECK_THROWS_AS(Density1D({1.0, 1.0}, {1.0, 1.0}), InvalidParameter);
    CHECK_THROWS_AS(Density1D({1.0, 2.0}, {1.0, -1.0}), InvalidParameter);
    CHECK_THROWS_AS(Density1D({1.0, 2.0}, {1.0}), InvalidParameter);
}
