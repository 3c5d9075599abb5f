#include "fprna/inequality_checks.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "fprna/cv_sweep.hpp"
#include "fprna/distributions.hpp"
#include "fprna/errors.hpp"
#include "fprna/quadrature.hpp"
#include "parallel.hpp"

namespace fprna {

namespace {

constexpr double kTol = 1e-10;

void require_shape(double alpha, double beta) {
    if (!(alpha > 1.0) || !(beta > 0.0)) {
        throw InvalidParameter("Poincare checks need alpha > 1 and beta > 0");
    }
}

// E[phi(X)] for X ~ gamma(alpha, beta). The primary route writes X = t/beta
// and uses the Laguerre rule for t^{alpha-1+q} e^{-t}, where x^q is the
// (nonpositive) power behaviour of phi at 0 folded into the weight; the
// order is doubled until two estimates agree. Logarithmic endpoint
// behaviour defeats that within the maximal order, in which case the
// integral is redone by double-exponential quadrature in x.
double gamma_expect(double alpha, double beta, const std::function<double(double)>& phi,
                    double power_at_zero) {
    const double q = std::min(power_at_zero, 0.0);
    const double a = alpha - 1.0 + q;
    const double log_norm = std::lgamma(alpha);
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int n = 16; n <= kMaxQuadratureOrder; n *= 2) {
        const auto rule = cached_laguerre_rule(n, a);
        double sum = 0.0;
        for (std::size_t i = 0; i < rule->nodes.size(); ++i) {
            if (!std::isfinite(rule->log_weights[i])) continue;
            const double t = rule->nodes[i];
            const double w = std::exp(rule->log_weights[i] - log_norm - q * std::log(t));
            if (w == 0.0) continue;
            sum += w * phi(t / beta);
        }
        if (!std::isfinite(sum)) break;
        if (std::isfinite(prev) &&
            std::fabs(sum - prev) <= kTol * std::max({std::fabs(sum), std::fabs(prev), 1e-300})) {
            return sum;
        }
        if (sum == 0.0 && prev == 0.0) return 0.0;
        prev = sum;
    }
    const GammaParams g(alpha, beta);
    boost::math::quadrature::exp_sinh<double> integrator;
    auto f = [&](double x) {
        if (!(x > 0.0) || !std::isfinite(x)) return 0.0;
        const double w = std::exp(log_gamma_pdf(g, x));
        return w == 0.0 ? 0.0 : phi(x) * w;
    };
    double err = 0.0;
    double l1 = 0.0;
    const double v = integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-13,
                                          &err, &l1);
    if (!std::isfinite(v) || err > 1e-9 * std::max(l1, 1e-300)) {
        throw ConvergenceError("gamma expectation did not converge", prev, v);
    }
    return v;
}

double invgamma_expect(double alpha, double beta, const std::function<double(double)>& phi) {
    const GammaParams g(alpha, beta);
    boost::math::quadrature::exp_sinh<double> integrator;
    auto f = [&](double y) {
        if (!(y > 0.0) || !std::isfinite(y)) return 0.0;
        const double w = std::exp(log_invgamma_pdf(g, y));
        return w == 0.0 ? 0.0 : phi(y) * w;
    };
    double err = 0.0;
    double l1 = 0.0;
    const double v = integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-13,
                                          &err, &l1);
    if (!std::isfinite(v) || err > 1e-9 * std::max(l1, 1e-300)) {
        throw ConvergenceError("inverse gamma expectation did not converge", v, err);
    }
    return v;
}

// Brute-force midpoint versions of two suite quantities, sharing no code
// with the quadrature routes.
PoincareGap midpoint_gap_gamma(double alpha, double beta, const TestFunction& u) {
    const GammaParams g(alpha, beta);
    const int n = 400000;
    const double h = (60.0 / beta) / n;
    double m0 = 0.0, m1 = 0.0, m2 = 0.0, d2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = (i + 0.5) * h;
        const double w = gamma_pdf(g, x) * h;
        const double v = u.value(x);
        const double dx = u.derivative(x) * x;
        m0 += w;
        m1 += w * v;
        m2 += w * v * v;
        d2 += w * dx * dx;
    }
    PoincareGap out;
    out.lhs = m2 / m0 - (m1 / m0) * (m1 / m0);
    out.rhs = d2 / m0 / (alpha - 1.0);
    out.gap = out.rhs - out.lhs;
    return out;
}

// Midpoint rule in log r.
double midpoint_cv_rhofast(const DimensionlessParams& dp) {
    const int n = 400000;
    const double lo = -10.0, hi = 14.0;
    const double h = (hi - lo) / n;
    const double shift = log_rhofast_unnormalized(dp, 1.0);
    double m[3] = {0.0, 0.0, 0.0};
    for (int i = 0; i < n; ++i) {
        const double r = std::exp(lo + (i + 0.5) * h);
        const double w = std::exp(log_rhofast_unnormalized(dp, r) - shift) * r;
        m[0] += w;
        m[1] += w * r;
        m[2] += w * r * r;
    }
    return std::sqrt(m[2] * m[0] / (m[1] * m[1]) - 1.0);
}

// Poincare terms of sin(w y) under the inverse gamma law, using
//   sin^2 = (1 - cos 2wy)/2,  cos^2 = (1 + cos 2wy)/2.
PoincareGap invgamma_sine_gap(double alpha, double beta, double w) {
    const GammaParams g(alpha, beta);
    auto pdf = [&](double y) { return y > 0.0 ? invgamma_pdf(g, y) : 0.0; };
    boost::math::quadrature::ooura_fourier_sin<double> fsin(1e-12);
    boost::math::quadrature::ooura_fourier_cos<double> fcos(1e-12);
    const auto [mean, e1] = fsin.integrate(pdf, w);
    const auto [c2, e2] = fcos.integrate(pdf, 2.0 * w);
    const auto [y2c2, e3] = fcos.integrate([&](double y) { return y * y * pdf(y); }, 2.0 * w);
    if (!(e1 < 1e-10) || !(e2 < 1e-10) || !(e3 < 1e-10 * std::max(1.0, std::fabs(y2c2)))) {
        throw ConvergenceError("Fourier quadrature did not converge", e2, e3);
    }
    const double y2 = invgamma_expect(alpha, beta, [](double y) { return y * y; });
    PoincareGap out;
    out.lhs = 0.5 - 0.5 * c2 - mean * mean;
    out.rhs = w * w * 0.5 * (y2 + y2c2) / (alpha - 1.0);
    out.gap = out.rhs - out.lhs;
    return out;
}

// Expect is called as expect(phi, power of phi at 0).
template <class Expect>
PoincareGap gap_with(const Expect& expect, double alpha, const TestFunction& u) {
    const double mean = expect([&](double x) { return u.value(x); }, u.at_zero);
    PoincareGap out;
    out.lhs = expect(
        [&](double x) {
            const double d = u.value(x) - mean;
            return d * d;
        },
        2.0 * u.at_zero);
    out.rhs = expect(
                  [&](double x) {
                      const double d = u.derivative(x) * x;
                      return d * d;
                  },
                  2.0 * (u.deriv_at_zero + 1.0)) /
              (alpha - 1.0);
    out.gap = out.rhs - out.lhs;
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

}  // namespace

std::vector<TestFunction> standard_battery() {
    return {
        {"x", [](double x) { return x; }, [](double) { return 1.0; }, 1, 1, 0, 0},
        {"x^2", [](double x) { return x * x; }, [](double x) { return 2.0 * x; }, 2, 2, 1, 1},
        {"1/x", [](double x) { return 1.0 / x; }, [](double x) { return -1.0 / (x * x); }, -1,
         -1, -2, -2},
        {"log x", [](double x) { return std::log(x); }, [](double x) { return 1.0 / x; }, 0, 0,
         -1, -1},
        {"sin x", [](double x) { return std::sin(x); }, [](double x) { return std::cos(x); }, 1,
         0, 0, 0, 1.0},
    };
}

TestFunction reflected(const TestFunction& u) {
    TestFunction v;
    v.name = u.name + " at 1/y";
    auto uv = u.value;
    auto ud = u.derivative;
    v.value = [uv](double y) { return uv(1.0 / y); };
    v.derivative = [ud](double y) { return -ud(1.0 / y) / (y * y); };
    v.at_zero = -u.at_infinity;
    v.at_infinity = -u.at_zero;
    v.deriv_at_zero = -u.deriv_at_infinity - 2.0;
    v.deriv_at_infinity = -u.deriv_at_zero - 2.0;
    return v;
}

TestFunction constant_function(double c) {
    return {"const", [c](double) { return c; }, [](double) { return 0.0; }, 0, 0, 0, 0};
}

TestFunction gamma_potential_derivative(double alpha, double beta) {
    const double a1 = alpha - 1.0;
    return {"V'", [=](double x) { return beta - a1 / x; }, [=](double x) { return a1 / (x * x); },
            -1, 0, -2, -2};
}

TestFunction invgamma_extremal(double alpha, double beta) {
    const double a1 = alpha - 1.0;
    return {"V' at 1/y", [=](double y) { return beta - a1 * y; }, [=](double) { return -a1; }, 0,
            1, 0, 0};
}

bool integrable_gamma(double alpha, const TestFunction& u) {
    return 2.0 * u.at_zero + alpha > 0.0 && 2.0 * u.deriv_at_zero + 2.0 + alpha > 0.0;
}

bool integrable_invgamma(double alpha, const TestFunction& v) {
    return 2.0 * v.at_infinity - alpha < 0.0 && 2.0 * v.deriv_at_infinity + 2.0 - alpha < 0.0;
}

PoincareGap poincare_gap_gamma(double alpha, double beta, const TestFunction& u) {
    require_shape(alpha, beta);
    return gap_with(
        [&](const std::function<double(double)>& phi, double power) {
            return gamma_expect(alpha, beta, phi, power);
        },
        alpha, u);
}

PoincareGap poincare_gap_invgamma(double alpha, double beta, const TestFunction& v) {
    require_shape(alpha, beta);
    try {
        return gap_with(
            [&](const std::function<double(double)>& phi, double) {
                return invgamma_expect(alpha, beta, phi);
            },
            alpha, v);
    } catch (const ConvergenceError&) {
        if (v.sine_frequency == 0.0) throw;
    }
    return invgamma_sine_gap(alpha, beta, v.sine_frequency);
}

double lyapunov_U(double b_r, double b_mu, double r, double mu) {
    if (!(r > 0.0) || !(mu > 0.0)) throw DomainError("lyapunov_U needs r, mu > 0");
    return b_r * r - std::log(b_r * r) + b_mu * mu - std::log(b_mu * mu);
}

double lyapunov_LU(const ModelParams& m, double b_r, double b_mu, double r, double mu) {
    if (!(b_r > m.c() / m.k_mu()) || !(b_mu > m.c() / m.k_r())) {
        throw InvalidParameter("Lyapunov weights need b_r > c/k_mu and b_mu > c/k_r");
    }
    if (!(r > 0.0) || !(mu > 0.0)) throw DomainError("lyapunov_LU needs r, mu > 0");
    const double c = m.c();
    return (m.sigma_r() + m.sigma_mu() + b_r * m.c_r() + b_mu * m.c_mu() + m.k_r() + m.k_mu()) -
           m.c_r() / r - m.c_mu() / mu - (b_r * m.k_r() - c) * r - (b_mu * m.k_mu() - c) * mu -
           c * r * mu * (b_r + b_mu);
}

BoundCheck check_cv_bound(double delta, const std::vector<double>& gammas,
                          const std::vector<double>& ps, double tol, unsigned threads) {
    BoundCheck out;
    out.bound = c_delta_bound(delta);
    const auto base = DimensionlessParams::quadratic(delta, 0.0, 0.0);
    const std::size_t cells = gammas.size() * ps.size();
    std::vector<double> cv(cells, std::numeric_limits<double>::quiet_NaN());
    detail::parallel_for(cells, threads, [&](std::size_t k) {
        try {
            cv[k] = cv_rhofast(base.with_gamma_p(gammas[k / ps.size()], ps[k % ps.size()]), tol);
        } catch (const ConvergenceError&) {
        } catch (const NumericalInconsistency&) {
        }
    });
    out.max_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cells; ++k) {
        if (std::isnan(cv[k])) {
            ++out.failures;
            continue;
        }
        out.max_cv = std::max(out.max_cv, cv[k]);
        const double v = cv[k] - out.bound;
        if (v > out.max_violation) {
            out.max_violation = v;
            out.worst_gamma = gammas[k / ps.size()];
            out.worst_p = ps[k % ps.size()];
        }
    }
    return out;
}

std::vector<CheckOutcome> run_checks(const std::string& suite, unsigned threads) {
    const bool all = suite == "all";
    if (!all && suite != "poincare" && suite != "lyapunov" && suite != "cv-bound") {
        throw InvalidParameter("unknown check suite '" + suite + "'");
    }
    std::vector<CheckOutcome> out;

    if (all || suite == "poincare") {
        const double alphas[] = {2, 3, 5, 10};
        const double betas[] = {0.5, 1, 2, 8};
        for (const auto& u : standard_battery()) {
            const TestFunction v = reflected(u);
            for (double a : alphas) {
                for (double b : betas) {
                    const std::string tag = "(" + fmt(a) + ", " + fmt(b) + ")";
                    if (!integrable_gamma(a, u)) {
                        out.push_back({"poincare gamma " + u.name + " " + tag, true,
                                       "not integrable", true});
                    } else {
                        const auto g = poincare_gap_gamma(a, b, u);
                        const auto d = poincare_gap_invgamma(a, b, v);
                        out.push_back({"poincare gamma " + u.name + " " + tag, g.gap >= -1e-9,
                                       "lhs " + fmt(g.lhs) + " rhs " + fmt(g.rhs)});
                        out.push_back({"poincare invgamma " + v.name + " " + tag,
                                       d.gap >= -1e-9,
                                       "lhs " + fmt(d.lhs) + " rhs " + fmt(d.rhs)});
                        const double diff =
                            std::max(std::fabs(g.lhs - d.lhs), std::fabs(g.rhs - d.rhs));
                        const double scale = std::max({1.0, std::fabs(g.lhs), std::fabs(g.rhs)});
                        out.push_back({"duality " + u.name + " " + tag, diff <= 1e-8 * scale,
                                       "max difference " + fmt(diff)});
                    }
                    // The same function used directly as a function of y.
                    const std::string name = "poincare invgamma " + u.name + " " + tag;
                    if (!integrable_invgamma(a, u)) {
                        out.push_back({name, true, "not integrable", true});
                        continue;
                    }
                    try {
                        const auto d = poincare_gap_invgamma(a, b, u);
                        out.push_back({name, d.gap >= -1e-9,
                                       "lhs " + fmt(d.lhs) + " rhs " + fmt(d.rhs)});
                    } catch (const ConvergenceError& e) {
                        // Slowly decaying oscillatory tails (sin y with small alpha).
                        out.push_back({name, true, e.what(), true});
                    }
                }
            }
        }
        for (double a : {3.0, 5.0, 10.0}) {
            for (double b : betas) {
                const std::string tag = "(" + fmt(a) + ", " + fmt(b) + ")";
                const auto g = poincare_gap_gamma(a, b, gamma_potential_derivative(a, b));
                const double rg = g.lhs / g.rhs;
                out.push_back({"sharpness gamma " + tag, std::fabs(rg - 1.0) <= 1e-6,
                               "lhs/rhs " + fmt(rg)});
                const auto d = poincare_gap_invgamma(a, b, invgamma_extremal(a, b));
                const double rd = d.lhs / d.rhs;
                out.push_back({"sharpness invgamma " + tag, std::fabs(rd - 1.0) <= 1e-6,
                               "lhs/rhs " + fmt(rd)});
            }
        }
        const auto sq = standard_battery()[1];
        const auto g = poincare_gap_gamma(3, 2, sq);
        const auto bf = midpoint_gap_gamma(3, 2, sq);
        const double diff = std::max(std::fabs(g.lhs - bf.lhs) / bf.lhs,
                                     std::fabs(g.rhs - bf.rhs) / bf.rhs);
        out.push_back({"midpoint spot check gamma x^2 (3, 2)", diff <= 1e-6,
                       "relative difference " + fmt(diff)});
    }

    if (all || suite == "lyapunov") {
        const ModelParams m(1, 1, 0.5, 1, 1, 1, 1);
        const double far = lyapunov_LU(m, 1, 1, 100, 100);
        out.push_back({"lyapunov LU(100, 100) < 0", far < 0.0, "LU " + fmt(far)});
        bool decreasing = true;
        double last = lyapunov_LU(m, 1, 1, 10, 10);
        for (int k = 2; k <= 4; ++k) {
            const double x = std::pow(10.0, k);
            const double v = lyapunov_LU(m, 1, 1, x, x);
            decreasing = decreasing && v < last;
            last = v;
        }
        out.push_back({"lyapunov LU decreasing along r = mu", decreasing, "LU(1e4) " + fmt(last)});
        const double umin = lyapunov_U(2.0, 0.5, 0.5, 2.0);
        out.push_back({"lyapunov U minimum", std::fabs(umin - 2.0) <= 1e-15, "U " + fmt(umin)});
    }

    if (all || suite == "cv-bound") {
        const auto grid = logspace(1e-2, 1e2, 40);
        for (double delta : {2.5, 3.0, 8.0}) {
            const auto bc = check_cv_bound(delta, grid, grid, 1e-8, threads);
            out.push_back({"cv bound delta " + fmt(delta),
                           bc.max_violation <= 1e-6 && bc.failures == 0,
                           "max violation " + fmt(bc.max_violation) + " bound " + fmt(bc.bound) +
                               " failures " + std::to_string(bc.failures)});
        }
        const auto dp = DimensionlessParams::quadratic(3.0, 1.0, 1.0);
        const double q = cv_rhofast(dp, 1e-10);
        const double bf = midpoint_cv_rhofast(dp);
        out.push_back({"midpoint spot check cv delta 3 (1, 1)",
                       std::fabs(q - bf) <= 1e-6 * bf, "quadrature " + fmt(q) + " midpoint " + fmt(bf)});
    }
    return out;
}

std::string format_report(const std::vector<CheckOutcome>& outcomes) {
    std::ostringstream os;
    std::size_t failed = 0;
    std::size_t skipped = 0;
    for (const auto& o : outcomes) {
        const char* tag = o.skipped ? "SKIP " : o.passed ? "PASS " : "FAIL ";
        os << tag << o.name << ": " << o.detail << '\n';
        if (o.skipped) ++skipped;
        else if (!o.passed) ++failed;
    }
    os << outcomes.size() - failed - skipped << " passed, " << skipped << " skipped, " << failed
       << " failed\n";
    return os.str();
}

}  // namespace fprna
