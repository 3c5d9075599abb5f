#pragma once

#include <vector>

#include "fprna/model_params.hpp"

namespace fprna {

/// Shape/rate pair shared by the gamma density
///   gamma_{a,b}(x) = C x^{a-1} exp(-b x)
/// and the inverse gamma density
///   g_{a,b}(y) = C y^{-1-a} exp(-b/y),   C = b^a / Gamma(a).
struct GammaParams {
    double alpha;
    double beta;

    GammaParams(double alpha, double beta);

    /// log C_{alpha,beta}
    double log_normalizer() const;
};

/// Sampled 1D density on strictly increasing abscissae.
struct Density1D {
    std::vector<double> grid;
    std::vector<double> values;
    /// Midpoint-rule mass of `values`.
    double normalization = 0.0;

    Density1D() = default;
    Density1D(std::vector<double> grid, std::vector<double> values);

    /// Cell widths associated with each abscissa (half distance to the
    /// neighbours, mirrored at the ends). Equal spacing for uniform grids.
    std::vector<double> cell_widths() const;
};

double log_gamma_pdf(const GammaParams& g, double x);
double gamma_pdf(const GammaParams& g, double x);
double log_invgamma_pdf(const GammaParams& g, double y);
double invgamma_pdf(const GammaParams& g, double y);

/// k-th raw moment (k = 1 or 2) of the inverse gamma law; diverges for
/// alpha <= k.
double invgamma_moment(const GammaParams& g, int k);

/// Free stationary density in dimensionless variables: inverse gamma
/// g_{1+delta,delta} (quadratic) or gamma_{eta,eta} (linear). Unit mean.
double rho0(const DimensionlessParams& dp, double r);
double log_rho0(const DimensionlessParams& dp, double r);

/// Unnormalized free shape: r^{-2-delta} e^{-delta/r} or r^{eta-1} e^{-eta r}.
double log_rho0_shape(const DimensionlessParams& dp, double r);

/// Unnormalized fast-microRNA marginal:
///   quadratic: (1 + 1/(gamma r))^{gamma p delta} r^{-2-delta} e^{-delta/r}
///   linear:    r^{eta-1} (1 + gamma r)^{-p eta} e^{-eta r}
/// Reduces exactly to the free shape when gamma = 0 or p = 0.
double log_rhofast_unnormalized(const DimensionlessParams& dp, double r);
double rhofast_unnormalized(const DimensionlessParams& dp, double r);

/// Inverse-gamma law of microRNA conditioned on r mRNA in the fast limit
/// (quadratic law): alpha = 1 + k_mu/sigma_mu + (c/sigma_mu) r,
/// beta = c_mu/sigma_mu.
GammaParams conditional_M(const ModelParams& params, double r);

/// Dimensionless counterpart: alpha = 1 + (1 + gamma r) delta kappa/nu,
/// beta = delta kappa/nu. Its mean is 1/(1 + gamma r).
GammaParams conditional_M(const DimensionlessParams& dp, double r);

/// Conditional mean microRNA count c_mu / (k_mu + c r).
double j_fast(const ModelParams& params, double r);

/// Dimensionless conditional mean 1/(1 + gamma r).
double j_fast(const DimensionlessParams& dp, double r);

/// 1/sqrt(delta - 1) or 1/sqrt(eta).
double cv_rho0(const DimensionlessParams& dp);

/// Uniform-in-(gamma, p) upper bound on CV(rho_fast), valid for delta > 2:
///   ((delta/(delta-1))^2 (1 - 1/(delta-1)^2)^{delta-2} - 1)^{1/2}
double c_delta_bound(double delta);

}  // namespace fprna
