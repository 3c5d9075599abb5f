#pragma once

#include <cstddef>
#include <vector>

#include "fprna/model_params.hpp"

namespace fprna {

/// CV of the fast density from quadrature moments.
double cv_rhofast(const DimensionlessParams& dp, double tol);

/// CV(rho_fast) / CV(rho0). A tolerance of 0 selects default_tolerance(p).
double relative_cv(const DimensionlessParams& dp, double tol = 0.0);

/// n log-spaced points from lo to hi inclusive.
std::vector<double> logspace(double lo, double hi, std::size_t n);

struct SweepSpec {
    NoiseLaw law = NoiseLaw::Quadratic;
    /// delta or eta depending on the law
    double strength = 2.0;
    double gamma_min = 1e-2;
    double gamma_max = 1e2;
    double p_min = 1e-2;
    double p_max = 1e2;
    std::size_t n_gamma = 40;
    std::size_t n_p = 40;
    /// 0 selects default_tolerance(p) cell by cell.
    double tol = 0.0;
    /// 0 = hardware concurrency
    unsigned threads = 0;
};

/// Relative CV on a (gamma, p) grid. Cells whose quadrature fails hold NaN.
struct SweepResult {
    NoiseLaw law = NoiseLaw::Quadratic;
    double strength = 0.0;
    double tol = 0.0;
    std::vector<double> gammas;
    std::vector<double> ps;
    /// Row-major with gamma as the slow index.
    std::vector<double> relative_cv;
    /// Absolute CV of the fast density, same layout.
    std::vector<double> cv;
    std::size_t failures = 0;

    double at(std::size_t ig, std::size_t ip) const { return relative_cv[ig * ps.size() + ip]; }
    double cv_at(std::size_t ig, std::size_t ip) const { return cv[ig * ps.size() + ip]; }
};

SweepResult sweep(const SweepSpec& spec);

}  // namespace fprna
