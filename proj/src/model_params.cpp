#include "fprna/model_params.hpp"

#include <cmath>
#include <string>
#include <string_view>

#include "fprna/errors.hpp"

namespace fprna {

namespace {

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw InvalidParameter(std::string(name) + " must be finite and > 0, got " +
                               std::to_string(value));
    }
}

void require_nonnegative(double value, const char* name) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw InvalidParameter(std::string(name) + " must be finite and >= 0, got " +
                               std::to_string(value));
    }
}

}  // namespace

const char* to_string(NoiseLaw law) noexcept {
    return law == NoiseLaw::Quadratic ? "quadratic" : "linear";
}

NoiseLaw parse_noise_law(const char* name) {
    const std::string_view s(name);
    if (s == "quadratic") return NoiseLaw::Quadratic;
    if (s == "linear") return NoiseLaw::Linear;
    throw InvalidParameter("unknown noise law '" + std::string(s) +
                           "' (expected quadratic or linear)");
}

ModelParams::ModelParams(double c_r, double c_mu, double c, double k_r, double k_mu,
                         double sigma_r, double sigma_mu)
    : c_r_(c_r), c_mu_(c_mu), c_(c), k_r_(k_r), k_mu_(k_mu), sigma_r_(sigma_r),
      sigma_mu_(sigma_mu) {
    require_positive(c_r, "c_r");
    require_positive(c_mu, "c_mu");
    require_nonnegative(c, "c");
    require_positive(k_r, "k_r");
    require_positive(k_mu, "k_mu");
    require_positive(sigma_r, "sigma_r");
    require_positive(sigma_mu, "sigma_mu");
}

DimensionlessParams::DimensionlessParams(NoiseLaw law, double strength, double gamma,
                                         double p, double kappa, double nu)
    : law_(law), strength_(strength), gamma_(gamma), p_(p), kappa_(kappa), nu_(nu) {
    require_positive(strength, law == NoiseLaw::Quadratic ? "delta" : "eta");
    require_nonnegative(gamma, "gamma");
    require_nonnegative(p, "p");
    require_positive(kappa, "kappa");
    require_positive(nu, "nu");
}

DimensionlessParams DimensionlessParams::quadratic(double delta, double gamma, double p,
                                                   double kappa, double nu) {
    return {NoiseLaw::Quadratic, delta, gamma, p, kappa, nu};
}

DimensionlessParams DimensionlessParams::linear(double eta, double gamma, double p,
                                                double kappa, double nu) {
    return {NoiseLaw::Linear, eta, gamma, p, kappa, nu};
}

double DimensionlessParams::delta() const {
    if (law_ != NoiseLaw::Quadratic) {
        throw InvalidParameter("delta is only defined for the quadratic noise law");
    }
    return strength_;
}

double DimensionlessParams::eta() const {
    if (law_ != NoiseLaw::Linear) {
        throw InvalidParameter("eta is only defined for the linear noise law");
    }
    return strength_;
}

DimensionlessParams DimensionlessParams::with_gamma_p(double gamma, double p) const {
    return {law_, strength_, gamma, p, kappa_, nu_};
}

DimensionlessParams nondimensionalize(const ModelParams& m, NoiseLaw law) {
    const double gamma = m.c() * m.c_r() / (m.k_mu() * m.k_r());
    const double p = m.c_mu() / m.c_r();
    const double kappa = m.k_mu() / m.k_r();
    const double nu = m.sigma_mu() / m.sigma_r();
    if (law == NoiseLaw::Quadratic) {
        return DimensionlessParams::quadratic(m.k_r() / m.sigma_r(), gamma, p, kappa, nu);
    }
    return DimensionlessParams::linear(m.c_r() / m.sigma_r(), gamma, p, kappa, nu);
}

std::pair<double, double> characteristic_values(const ModelParams& m) {
    return {m.c_r() / m.k_r(), m.c_mu() / m.k_mu()};
}

}  // namespace fprna
