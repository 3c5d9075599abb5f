#pragma once

#include <utility>

namespace fprna {

/// Growth law of the diffusion coefficient D(x) in the noise term
/// sqrt(2 sigma D(x)) dB: Quadratic is D(x) = x^2, Linear is D(x) = x.
enum class NoiseLaw { Quadratic, Linear };

const char* to_string(NoiseLaw law) noexcept;
NoiseLaw parse_noise_law(const char* name);

/// Dimensional rate constants of the coupled mRNA/microRNA system
///
///   dr  = (c_r  - c r mu - k_r  r ) dt + sqrt(2 sigma_r  D(r))  dB1
///   dmu = (c_mu - c r mu - k_mu mu) dt + sqrt(2 sigma_mu D(mu)) dB2
///
/// Validated on construction; all rates except the binding rate c must be
/// strictly positive.
class ModelParams {
public:
    ModelParams(double c_r, double c_mu, double c, double k_r, double k_mu,
                double sigma_r, double sigma_mu);

    double c_r() const noexcept { return c_r_; }
    double c_mu() const noexcept { return c_mu_; }
    double c() const noexcept { return c_; }
    double k_r() const noexcept { return k_r_; }
    double k_mu() const noexcept { return k_mu_; }
    double sigma_r() const noexcept { return sigma_r_; }
    double sigma_mu() const noexcept { return sigma_mu_; }

private:
    double c_r_;
    double c_mu_;
    double c_;
    double k_r_;
    double k_mu_;
    double sigma_r_;
    double sigma_mu_;
};

/// Dimensionless parameter set. `noise_strength` holds delta = k_r/sigma_r
/// under the quadratic law and eta = c_r/sigma_r under the linear law; use
/// the named accessors.
class DimensionlessParams {
public:
    static DimensionlessParams quadratic(double delta, double gamma, double p,
                                         double kappa = 1.0, double nu = 1.0);
    static DimensionlessParams linear(double eta, double gamma, double p,
                                      double kappa = 1.0, double nu = 1.0);

    NoiseLaw law() const noexcept { return law_; }
    /// Throws InvalidParameter unless the law is Quadratic.
    double delta() const;
    /// Throws InvalidParameter unless the law is Linear.
    double eta() const;
    double noise_strength() const noexcept { return strength_; }
    double gamma() const noexcept { return gamma_; }
    double p() const noexcept { return p_; }
    double kappa() const noexcept { return kappa_; }
    double nu() const noexcept { return nu_; }

    DimensionlessParams with_gamma_p(double gamma, double p) const;

    /// True when the binding term vanishes (gamma = 0 or p = 0), in which
    /// case the fast density coincides with the free one.
    bool binding_off() const noexcept { return gamma_ == 0.0 || p_ == 0.0; }

private:
    DimensionlessParams(NoiseLaw law, double strength, double gamma, double p,
                        double kappa, double nu);

    NoiseLaw law_;
    double strength_;
    double gamma_;
    double p_;
    double kappa_;
    double nu_;
};

DimensionlessParams nondimensionalize(const ModelParams& params, NoiseLaw law);

/// (rbar, mubar) = (c_r/k_r, c_mu/k_mu): deterministic steady states without
/// binding, also the means of the free stationary laws.
std::pair<double, double> characteristic_values(const ModelParams& params);

}  // namespace fprna
