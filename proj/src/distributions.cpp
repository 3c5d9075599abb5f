#include "fprna/distributions.hpp"

#include <cmath>
#include <string>

#include "fprna/errors.hpp"

namespace fprna {

namespace {

void require_domain(double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError(std::string(what) + ": argument must be finite and > 0, got " +
                          std::to_string(x));
    }
}

}  // namespace

GammaParams::GammaParams(double a, double b) : alpha(a), beta(b) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        throw InvalidParameter("gamma parameters require alpha > 0 and beta > 0");
    }
}

double GammaParams::log_normalizer() const {
    return alpha * std::log(beta) - std::lgamma(alpha);
}

Density1D::Density1D(std::vector<double> g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
    if (grid.size() != values.size() || grid.empty()) {
        throw InvalidParameter("density grid and values must be nonempty and aligned");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw InvalidParameter("density grid must be strictly increasing");
        }
    }
    const auto w = cell_widths();
    normalization = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= 0.0)) {
            throw InvalidParameter("density values must be nonnegative");
        }
        normalization += values[i] * w[i];
    }
}

std::vector<double> Density1D::cell_widths() const {
    const std::size_t n = grid.size();
    std::vector<double> w(n, 1.0);
    if (n == 1) return w;
    for (std::size_t i = 0; i < n; ++i) {
        const double left = i == 0 ? grid[1] - grid[0] : grid[i] - grid[i - 1];
        const double right = i + 1 == n ? grid[n - 1] - grid[n - 2] : grid[i + 1] - grid[i];
        w[i] = 0.5 * (left + right);
    }
    return w;
}

double log_gamma_pdf(const GammaParams& g, double x) {
    require_domain(x, "gamma_pdf");
    return g.log_normalizer() + (g.alpha - 1.0) * std::log(x) - g.beta * x;
}

double gamma_pdf(const GammaParams& g, double x) { return std::exp(log_gamma_pdf(g, x)); }

double log_invgamma_pdf(const GammaParams& g, double y) {
    require_domain(y, "invgamma_pdf");
    return g.log_normalizer() - (1.0 + g.alpha) * std::log(y) - g.beta / y;
}

double invgamma_pdf(const GammaParams& g, double y) {
    return std::exp(log_invgamma_pdf(g, y));
}

double invgamma_moment(const GammaParams& g, int k) {
    if (k != 1 && k != 2) {
        throw InvalidParameter("invgamma_moment supports k = 1 or 2");
    }
    if (!(g.alpha > k)) {
        throw MomentDivergence("inverse gamma moment of order " + std::to_string(k) +
                               " requires alpha > " + std::to_string(k));
    }
    if (k == 1) return g.beta / (g.alpha - 1.0);
    return g.beta * g.beta / ((g.alpha - 1.0) * (g.alpha - 2.0));
}

double log_rho0_shape(const DimensionlessParams& dp, double r) {
    require_domain(r, "rho0");
    const double s = dp.noise_strength();
    if (dp.law() == NoiseLaw::Quadratic) {
        return -(2.0 + s) * std::log(r) - s / r;
    }
    return (s - 1.0) * std::log(r) - s * r;
}

double log_rho0(const DimensionlessParams& dp, double r) {
    const double s = dp.noise_strength();
    if (dp.law() == NoiseLaw::Quadratic) {
        return log_invgamma_pdf(GammaParams(1.0 + s, s), r);
    }
    return log_gamma_pdf(GammaParams(s, s), r);
}

double rho0(const DimensionlessParams& dp, double r) { return std::exp(log_rho0(dp, r)); }

double log_rhofast_unnormalized(const DimensionlessParams& dp, double r) {
    const double base = log_rho0_shape(dp, r);
    if (dp.binding_off()) return base;
    const double s = dp.noise_strength();
    const double g = dp.gamma();
    if (dp.law() == NoiseLaw::Quadratic) {
        // (1 + 1/(g r))^{g p s}; log1p keeps precision when g r is large.
        return base + g * dp.p() * s * std::log1p(1.0 / (g * r));
    }
    return base - dp.p() * s * std::log1p(g * r);
}

double rhofast_unnormalized(const DimensionlessParams& dp, double r) {
    return std::exp(log_rhofast_unnormalized(dp, r));
}

GammaParams conditional_M(const ModelParams& m, double r) {
    require_domain(r, "conditional_M");
    return {1.0 + m.k_mu() / m.sigma_mu() + m.c() / m.sigma_mu() * r,
            m.c_mu() / m.sigma_mu()};
}

GammaParams conditional_M(const DimensionlessParams& dp, double r) {
    require_domain(r, "conditional_M");
    if (dp.law() != NoiseLaw::Quadratic) {
        throw UnsupportedConfiguration("conditional_M is defined for the quadratic law");
    }
    const double scale = dp.delta() * dp.kappa() / dp.nu();
    return {1.0 + (1.0 + dp.gamma() * r) * scale, scale};
}

double j_fast(const ModelParams& m, double r) {
    if (!(r >= 0.0)) throw DomainError("j_fast: r must be >= 0");
    return m.c_mu() / (m.k_mu() + m.c() * r);
}

double j_fast(const DimensionlessParams& dp, double r) {
    if (!(r >= 0.0)) throw DomainError("j_fast: r must be >= 0");
    return 1.0 / (1.0 + dp.gamma() * r);
}

double cv_rho0(const DimensionlessParams& dp) {
    const double s = dp.noise_strength();
    if (dp.law() == NoiseLaw::Quadratic) {
        if (!(s > 1.0)) {
            throw MomentDivergence("CV of the free density requires delta > 1");
        }
        return 1.0 / std::sqrt(s - 1.0);
    }
    return 1.0 / std::sqrt(s);
}

double c_delta_bound(double delta) {
    if (!(delta > 2.0) || !std::isfinite(delta)) {
        throw DomainError("c_delta_bound requires delta > 2");
    }
    const double d1 = delta - 1.0;
    const double ratio = delta / d1;
    // (1 - 1/d1^2)^{delta-2} through log1p to stay accurate for large delta.
    const double log_term = (delta - 2.0) * std::log1p(-1.0 / (d1 * d1));
    const double inner = ratio * ratio * std::exp(log_term) - 1.0;
    return std::sqrt(inner);
}

}  // namespace fprna
