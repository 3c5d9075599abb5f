#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fprna/distributions.hpp"
#include "fprna/model_params.hpp"

namespace fprna {

struct SimConfig {
    ModelParams params;
    NoiseLaw law = NoiseLaw::Quadratic;
    double dt = 1e-3;
    double t_end = 50.0;
    /// Fraction of the horizon discarded before sampling.
    double burn_in = 0.5;
    int n_paths = 1000;
    /// Keep one state every `thin` steps.
    int thin = 10;
    std::uint64_t seed = 42;
    double r0 = 1.0;
    double mu0 = 1.0;
    /// 0 = hardware concurrency
    unsigned threads = 0;

    /// dt = 1e-3/k_r, t_end = 50/k_r, start at (c_r/k_r, c_mu/k_mu).
    static SimConfig defaults(const ModelParams& params, NoiseLaw law);

    void validate() const;
};

struct SimResult {
    /// Post burn-in states of all paths, path by path.
    std::vector<double> r;
    std::vector<double> mu;
    std::vector<double> terminal_r;
    std::vector<double> terminal_mu;
};

/// Euler-Maruyama integration of the two-species system. Quadratic noise is
/// stepped in log coordinates,
///   d log r = ((c_r - c r mu - k_r r)/r - sigma_r) dt + sqrt(2 sigma_r) dW,
/// which keeps states positive. Linear noise is stepped directly and
/// reflected at 1e-12. Every path has its own engine seeded from (seed,
/// path), so output does not depend on the thread count.
SimResult simulate(const SimConfig& config);

/// Bin masses plus the mass that fell outside [edges.front(), edges.back()).
struct Histogram1D {
    std::vector<double> edges;
    std::vector<double> masses;
    double out_of_range = 0.0;
};

Histogram1D histogram(const std::vector<double>& samples, int bins, double lo, double hi);

/// Histogram of the post burn-in r samples.
Histogram1D stationary_histogram(const SimConfig& config, int bins, double lo, double hi);

/// Exact bin masses of a density by composite midpoint rule on each bin.
Histogram1D bin_density(const std::function<double(double)>& pdf, int bins, double lo,
                        double hi, int subdivisions = 64);

/// Total-variation distance 0.5 sum |a_k - b_k|, including the outside mass.
double tv_distance(const Histogram1D& a, const Histogram1D& b);

double compare_to_density(const Histogram1D& hist, const std::function<double(double)>& pdf,
                          int subdivisions = 64);
/// Sampled density: each grid point contributes value * width to its bin.
double compare_to_density(const Histogram1D& hist, const Density1D& density);

}  // namespace fprna
