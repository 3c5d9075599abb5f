#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "fprna/model_params.hpp"

namespace fprna {

/// N-point generalized Gauss-Laguerre rule for the weight s^a e^{-s} on
/// (0, inf). Weights are also kept in log form since Gamma(a+1) overflows
/// for large exponents; a log weight of -inf marks an underflowed node.
struct QuadratureRule {
    int order = 0;
    double exponent = 0.0;
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<double> log_weights;
};

/// Golub-Welsch construction from the Jacobi matrix of the generalized
/// Laguerre polynomials. O(N^2) in time.
QuadratureRule laguerre_rule(int order, double exponent);

/// Memoized laguerre_rule, safe to call from several threads.
std::shared_ptr<const QuadratureRule> cached_laguerre_rule(int order, double exponent);

/// Raw moments m_k = exp(log_scale) * mk of an unnormalized density. The
/// common scale lets moments of densities with huge or tiny mass share one
/// representation without overflow; ratios never need it.
struct MomentTriple {
    double m0 = 0.0;
    double m1 = 0.0;
    double m2 = 0.0;
    double log_scale = 0.0;
};

/// (m2 m0 / m1^2 - 1)^{1/2}. Throws NumericalInconsistency when the
/// Cauchy-Schwarz defect exceeds 1e-12 relative.
double cv_from_moments(const MomentTriple& mt);

/// How a moment computation settled.
struct MomentReport {
    MomentTriple moments;
    int order = 0;
    /// Index of the accepted rule scaling (0 is the unscaled rule).
    int scaling = 0;
    /// Largest relative change of I_0, I_1, I_2 between the last two orders.
    double change = 0.0;
};

/// 1e-8 when p <= 1, 1e-4 otherwise.
double default_tolerance(double p);

inline constexpr int kMaxQuadratureOrder = 4096;

/// Moments of the unnormalized fast density in r-space. The integrals are
/// mapped to s = delta/r (quadratic) or s = eta r (linear) and evaluated
/// with generalized Gauss-Laguerre rules whose order is doubled from 8 until
/// every I_k moves by less than `tol` relative. Besides the plain rule with
/// weight exponent delta-2 (eta-1) a few rescaled rules centred on the bulk
/// of the integrand are tried at each order; the first to settle wins.
MomentTriple moments_rhofast(const DimensionlessParams& dp, double tol);
MomentReport moments_rhofast_report(const DimensionlessParams& dp, double tol);

/// log of the constant C with C * rhofast_unnormalized of unit mass.
double log_normalizer_rhofast(const DimensionlessParams& dp, double tol);

using LogShape = std::function<double(double)>;

/// Constant making exp(log_shape) a probability density on (0, inf). The
/// shape is integrated against the Laguerre weight of the free shape, so it
/// must decay like the free shape at both ends.
double normalize(const LogShape& log_shape, const DimensionlessParams& dp, double tol);
double log_normalize(const LogShape& log_shape, const DimensionlessParams& dp, double tol);

}  // namespace fprna
