#include "fprna/cv_sweep.hpp"

#include <cmath>
#include <limits>

#include "fprna/distributions.hpp"
#include "fprna/errors.hpp"
#include "fprna/quadrature.hpp"
#include "parallel.hpp"

namespace fprna {

double cv_rhofast(const DimensionlessParams& dp, double tol) {
    return cv_from_moments(moments_rhofast(dp, tol));
}

double relative_cv(const DimensionlessParams& dp, double tol) {
    const double t = tol > 0.0 ? tol : default_tolerance(dp.p());
    return cv_rhofast(dp, t) / cv_rho0(dp);
}

std::vector<double> logspace(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) {
        throw InvalidParameter("logspace needs 0 < lo < hi and n >= 2");
    }
    std::vector<double> out(n);
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n - 1);
        out[i] = std::pow(10.0, a + (b - a) * t);
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

SweepResult sweep(const SweepSpec& spec) {
    if (spec.n_gamma < 2 || spec.n_p < 2) {
        throw InvalidParameter("sweep grids need at least 2 points per axis");
    }
    if (spec.tol < 0.0) throw InvalidParameter("sweep tolerance must be >= 0");
    SweepResult res;
    res.law = spec.law;
    res.strength = spec.strength;
    res.tol = spec.tol;
    res.gammas = logspace(spec.gamma_min, spec.gamma_max, spec.n_gamma);
    res.ps = logspace(spec.p_min, spec.p_max, spec.n_p);

    const auto base = spec.law == NoiseLaw::Quadratic
                          ? DimensionlessParams::quadratic(spec.strength, 0.0, 0.0)
                          : DimensionlessParams::linear(spec.strength, 0.0, 0.0);
    const double free_cv = cv_rho0(base);

    const std::size_t cells = spec.n_gamma * spec.n_p;
    res.relative_cv.assign(cells, std::numeric_limits<double>::quiet_NaN());
    res.cv.assign(cells, std::numeric_limits<double>::quiet_NaN());
    detail::parallel_for(cells, spec.threads, [&](std::size_t idx) {
        const double g = res.gammas[idx / spec.n_p];
        const double p = res.ps[idx % spec.n_p];
        const double tol = spec.tol > 0.0 ? spec.tol : default_tolerance(p);
        try {
            const double cv = cv_rhofast(base.with_gamma_p(g, p), tol);
            res.cv[idx] = cv;
            res.relative_cv[idx] = cv / free_cv;
        } catch (const ConvergenceError&) {
        } catch (const NumericalInconsistency&) {
        }
    });
    for (double v : res.relative_cv) {
        if (std::isnan(v)) ++res.failures;
    }
    return res;
}

}  // namespace fprna
