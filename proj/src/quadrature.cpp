#include "fprna/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <string>
#include <utility>

#include "fprna/errors.hpp"

namespace fprna {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Implicit QL on a symmetric tridiagonal matrix (diagonal d, off-diagonal e
// with e[n-1] unused). Only the first row of the eigenvector matrix is
// carried along, in z, which is all the Golub-Welsch weights need.
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, std::vector<double>& z) {
    const int n = static_cast<int>(d.size());
    if (n == 1) return;
    const double eps = std::numeric_limits<double>::epsilon();
    e[n - 1] = 0.0;
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        for (;;) {
            int m = l;
            for (; m < n - 1; ++m) {
                if (std::fabs(e[m]) <= eps * (std::fabs(d[m]) + std::fabs(d[m + 1]))) break;
            }
            if (m == l) break;
            if (++iter > 60) {
                throw ConvergenceError("tridiagonal eigensolver did not converge",
                                       std::numeric_limits<double>::quiet_NaN(),
                                       std::numeric_limits<double>::quiet_NaN());
            }
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0;
            double c = 1.0;
            double p = 0.0;
            for (int i = m - 1; i >= l; --i) {
                const double f = s * e[i];
                const double b = c * e[i];
                if (std::fabs(g) <= std::fabs(f)) {
                    c = g / f;
                    r = std::hypot(c, 1.0);
                    e[i + 1] = f * r;
                    s = 1.0 / r;
                    c *= s;
                } else {
                    s = f / g;
                    r = std::hypot(s, 1.0);
                    e[i + 1] = g * r;
                    c = 1.0 / r;
                    s *= c;
                }
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                const double zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

// Integrand family shared by both noise laws after the change of variable:
//   s^{A + e_k} exp(psi(s)) e^{-s},  psi(s) = B log1p(s/G),  k = 0, 1, 2.
// B is signed; psi vanishes when the binding term is off.
struct TiltedIntegrand {
    double A = 0.0;
    std::array<double, 3> e{};
    bool tilted = false;
    double B = 0.0;
    double G = 1.0;

    double psi(double s) const { return tilted ? B * std::log1p(s / G) : 0.0; }
};

// One way of laying a rule over the integrand: s = lambda t with weight
// t^{a} e^{-t}.
struct Scaling {
    double exponent;
    double lambda;
};

std::vector<Scaling> scalings(const TiltedIntegrand& f) {
    std::vector<Scaling> out{{f.A, 1.0}};
    if (!f.tilted) return out;
    // Mode of the k = 1 integrand (e = 1 for both laws): root of
    // s^2 + (G - A1 - B) s - A1 G = 0.
    const double a1 = f.A + 1.0;
    const double b = f.G - a1 - f.B;
    const double disc = std::sqrt(b * b + 4.0 * a1 * f.G);
    const double mode = b > 0.0 ? 2.0 * a1 * f.G / (b + disc) : 0.5 * (disc - b);
    if (!(mode > 0.0) || !std::isfinite(mode)) return out;
    out.push_back({f.A, mode / a1});
    // Match the curvature of the log integrand at its mode.
    const double curvature = a1 / (mode * mode) + f.B / ((f.G + mode) * (f.G + mode));
    if (curvature > 0.0 && std::isfinite(curvature)) {
        const double a = curvature * mode * mode;
        if (a > -1.0 && a < 1e6) out.push_back({a, 1.0 / (curvature * mode)});
    }
    const double slope = 1.0 - f.B / f.G;
    if (slope > 0.0 && std::isfinite(slope)) out.push_back({f.A, 1.0 / slope});
    return out;
}

struct Estimate {
    std::array<double, 3> sums{};
    double log_scale = 0.0;

    double log_value(int k) const { return std::log(sums[k]) + log_scale; }
};

Estimate integrate(const TiltedIntegrand& f, const QuadratureRule& rule, const Scaling& sc) {
    const std::size_t n = rule.nodes.size();
    std::vector<double> base(n, kNegInf);
    std::vector<double> svals(n);
    const double log_lambda = std::log(sc.lambda);
    double mx = kNegInf;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = rule.nodes[i];
        const double s = sc.lambda * t;
        svals[i] = s;
        if (rule.log_weights[i] == kNegInf) continue;
        const double v = rule.log_weights[i] + f.A * std::log(s) + f.psi(s) - s -
                         sc.exponent * std::log(t) + t + log_lambda;
        if (!std::isfinite(v)) continue;
        base[i] = v;
        mx = std::max(mx, v);
    }
    Estimate est;
    if (mx == kNegInf) {
        est.log_scale = 0.0;
        return est;
    }
    est.log_scale = mx;
    for (std::size_t i = 0; i < n; ++i) {
        if (base[i] == kNegInf) continue;
        const double w = std::exp(base[i] - mx);
        for (int k = 0; k < 3; ++k) est.sums[k] += w * std::pow(svals[i], f.e[k]);
    }
    return est;
}

double relative_change(double log_new, double log_old) {
    if (!std::isfinite(log_new) || !std::isfinite(log_old)) {
        return std::numeric_limits<double>::infinity();
    }
    return std::fabs(std::expm1(std::clamp(log_new - log_old, -50.0, 50.0)));
}

double cv_of(const Estimate& est) {
    const double ratio = est.sums[0] * est.sums[2] / (est.sums[1] * est.sums[1]);
    return std::sqrt(std::max(ratio - 1.0, 0.0));
}

struct Converged {
    Estimate estimate;
    int order;
    int scaling;
    double change;
};

Converged run_adaptive(const TiltedIntegrand& f, double tol) {
    if (!(tol > 0.0)) throw InvalidParameter("quadrature tolerance must be > 0");
    const auto cands = scalings(f);
    std::vector<Estimate> prev(cands.size());
    std::vector<bool> have(cands.size(), false);
    double best_change = std::numeric_limits<double>::infinity();
    double best_prev = std::numeric_limits<double>::quiet_NaN();
    double best_last = std::numeric_limits<double>::quiet_NaN();
    for (int n = 8; n <= kMaxQuadratureOrder; n *= 2) {
        for (std::size_t c = 0; c < cands.size(); ++c) {
            const auto& sc = cands[c];
            std::shared_ptr<const QuadratureRule> rule;
            // Only the fixed exponent recurs across calls, so only it is cached.
            if (sc.exponent == f.A) {
                rule = cached_laguerre_rule(n, sc.exponent);
            } else {
                rule = std::make_shared<QuadratureRule>(laguerre_rule(n, sc.exponent));
            }
            const Estimate est = integrate(f, *rule, sc);
            const bool valid = est.sums[0] > 0.0 && est.sums[1] > 0.0 && est.sums[2] > 0.0 &&
                               std::isfinite(est.sums[0] * est.sums[2]);
            if (valid && have[c]) {
                double change = 0.0;
                for (int k = 0; k < 3; ++k) {
                    change = std::max(change,
                                      relative_change(est.log_value(k), prev[c].log_value(k)));
                }
                if (change < tol) return {est, n, static_cast<int>(c), change};
                if (change < best_change) {
                    best_change = change;
                    best_prev = cv_of(prev[c]);
                    best_last = cv_of(est);
                }
            }
            prev[c] = est;
            have[c] = valid;
        }
    }
    throw ConvergenceError("moment quadrature did not converge up to order " +
                               std::to_string(kMaxQuadratureOrder) + " (best change " +
                               std::to_string(best_change) + ")",
                           best_prev, best_last);
}

TiltedIntegrand fast_integrand(const DimensionlessParams& dp) {
    TiltedIntegrand f;
    const double s = dp.noise_strength();
    f.tilted = !dp.binding_off();
    if (dp.law() == NoiseLaw::Quadratic) {
        if (!(s > 1.0)) {
            throw MomentDivergence("second moment of the fast density requires delta > 1");
        }
        f.A = s - 2.0;
        f.e = {2.0, 1.0, 0.0};
        if (f.tilted) {
            f.B = dp.p() * dp.gamma() * s;
            f.G = dp.gamma() * s;
        }
    } else {
        f.A = s - 1.0;
        f.e = {0.0, 1.0, 2.0};
        if (f.tilted) {
            f.B = -dp.p() * s;
            f.G = s / dp.gamma();
        }
    }
    return f;
}

}  // namespace

QuadratureRule laguerre_rule(int order, double exponent) {
    if (order < 1) throw InvalidParameter("quadrature order must be >= 1");
    if (!(exponent > -1.0) || !std::isfinite(exponent)) {
        throw DomainError("Laguerre weight exponent must be > -1");
    }
    const auto n = static_cast<std::size_t>(order);
    std::vector<double> d(n), e(n, 0.0), z(n, 0.0);
    for (std::size_t k = 1; k <= n; ++k) {
        d[k - 1] = 2.0 * static_cast<double>(k) - 1.0 + exponent;
        if (k < n) {
            const double kd = static_cast<double>(k);
            e[k - 1] = std::sqrt(kd * (kd + exponent));
        }
    }
    z[0] = 1.0;
    tridiagonal_ql(d, e, z);

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });

    QuadratureRule rule;
    rule.order = order;
    rule.exponent = exponent;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    rule.log_weights.resize(n);
    const double log_mass = std::lgamma(exponent + 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = idx[i];
        rule.nodes[i] = d[j];
        const double az = std::fabs(z[j]);
        rule.log_weights[i] = az > 0.0 ? 2.0 * std::log(az) + log_mass : kNegInf;
        rule.weights[i] = std::exp(rule.log_weights[i]);
    }
    return rule;
}

std::shared_ptr<const QuadratureRule> cached_laguerre_rule(int order, double exponent) {
    static std::mutex mutex;
    static std::map<std::pair<int, double>, std::shared_ptr<const QuadratureRule>> cache;
    const auto key = std::make_pair(order, exponent);
    {
        std::lock_guard<std::mutex> lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto rule = std::make_shared<const QuadratureRule>(laguerre_rule(order, exponent));
    std::lock_guard<std::mutex> lock(mutex);
    return cache.emplace(key, std::move(rule)).first->second;
}

double cv_from_moments(const MomentTriple& mt) {
    if (!(mt.m1 > 0.0)) throw InvalidParameter("cv_from_moments requires m1 > 0");
    if (!(mt.m0 > 0.0)) throw InvalidParameter("cv_from_moments requires m0 > 0");
    const double ratio = mt.m2 * mt.m0 / (mt.m1 * mt.m1);
    const double excess = ratio - 1.0;
    if (excess < -1e-12) {
        throw NumericalInconsistency("moments violate m1^2 <= m0 m2 (m0 m2 / m1^2 = " +
                                     std::to_string(ratio) + ")");
    }
    return std::sqrt(std::max(excess, 0.0));
}

double default_tolerance(double p) { return p <= 1.0 ? 1e-8 : 1e-4; }

MomentReport moments_rhofast_report(const DimensionlessParams& dp, double tol) {
    const TiltedIntegrand f = fast_integrand(dp);
    const Converged res = run_adaptive(f, tol);
    const double s = dp.noise_strength();
    MomentReport rep;
    rep.order = res.order;
    rep.scaling = res.scaling;
    rep.change = res.change;
    const auto& sums = res.estimate.sums;
    auto& m = rep.moments;
    if (dp.law() == NoiseLaw::Quadratic) {
        // m_k = delta^{k-1-delta} I_k
        m.m0 = sums[0];
        m.m1 = sums[1] * s;
        m.m2 = sums[2] * s * s;
        m.log_scale = res.estimate.log_scale - (1.0 + s) * std::log(s);
    } else {
        // m_k = eta^{-k-eta} I_k
        m.m0 = sums[0];
        m.m1 = sums[1] / s;
        m.m2 = sums[2] / (s * s);
        m.log_scale = res.estimate.log_scale - s * std::log(s);
    }
    return rep;
}

MomentTriple moments_rhofast(const DimensionlessParams& dp, double tol) {
    return moments_rhofast_report(dp, tol).moments;
}

double log_normalizer_rhofast(const DimensionlessParams& dp, double tol) {
    const MomentTriple m = moments_rhofast(dp, tol);
    return -(std::log(m.m0) + m.log_scale);
}

double log_normalize(const LogShape& log_shape, const DimensionlessParams& dp, double tol) {
    if (!(tol > 0.0)) throw InvalidParameter("quadrature tolerance must be > 0");
    const double str = dp.noise_strength();
    const bool quadratic = dp.law() == NoiseLaw::Quadratic;
    // Weight of the free shape in s, so rho0 itself is integrated exactly.
    const double a = quadratic ? str : str - 1.0;
    const double log_str = std::log(str);
    // log of shape(r) dr / (s^a e^{-s} ds) at node s.
    auto log_integrand = [&](double s) {
        if (quadratic) {
            return log_shape(str / s) + log_str - (2.0 + a) * std::log(s) + s;
        }
        return log_shape(s / str) - log_str - a * std::log(s) + s;
    };
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int n = 8; n <= kMaxQuadratureOrder; n *= 2) {
        const auto rule = cached_laguerre_rule(n, a);
        std::vector<double> terms;
        terms.reserve(rule->nodes.size());
        double mx = kNegInf;
        for (std::size_t i = 0; i < rule->nodes.size(); ++i) {
            if (rule->log_weights[i] == kNegInf) continue;
            const double v = rule->log_weights[i] + log_integrand(rule->nodes[i]);
            if (!std::isfinite(v)) continue;
            terms.push_back(v);
            mx = std::max(mx, v);
        }
        if (mx == kNegInf) continue;
        double sum = 0.0;
        for (double v : terms) sum += std::exp(v - mx);
        const double log_mass = mx + std::log(sum);
        if (std::isfinite(prev) && relative_change(log_mass, prev) < tol) return -log_mass;
        prev = log_mass;
    }
    throw ConvergenceError("normalization quadrature did not converge", prev, prev);
}

double normalize(const LogShape& log_shape, const DimensionlessParams& dp, double tol) {
    return std::exp(log_normalize(log_shape, dp, tol));
}

}  // namespace fprna
