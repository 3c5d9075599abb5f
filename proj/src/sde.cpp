#include "fprna/sde.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "fprna/errors.hpp"
#include "parallel.hpp"

namespace fprna {

namespace {

constexpr double kFloor = 1e-12;

double reflect(double x) { return x < kFloor ? 2.0 * kFloor - x : x; }

struct PathOutput {
    std::vector<double> r;
    std::vector<double> mu;
    double terminal_r = 0.0;
    double terminal_mu = 0.0;
};

PathOutput run_path(const SimConfig& cfg, int path, long steps, long burn_steps) {
    const auto& m = cfg.params;
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(path)};
    std::mt19937_64 engine(seq);
    std::normal_distribution<double> normal(0.0, 1.0);

    const double dt = cfg.dt;
    const double sq = std::sqrt(dt);
    PathOutput out;
    const long kept = std::max(0L, (steps - burn_steps) / cfg.thin);
    out.r.reserve(static_cast<std::size_t>(kept));
    out.mu.reserve(static_cast<std::size_t>(kept));

    double r = cfg.r0;
    double mu = cfg.mu0;
    if (cfg.law == NoiseLaw::Quadratic) {
        double lr = std::log(r);
        double lm = std::log(mu);
        const double nr = std::sqrt(2.0 * m.sigma_r()) * sq;
        const double nm = std::sqrt(2.0 * m.sigma_mu()) * sq;
        for (long n = 1; n <= steps; ++n) {
            const double bind = m.c() * r * mu;
            const double dlr = ((m.c_r() - bind - m.k_r() * r) / r - m.sigma_r()) * dt;
            const double dlm = ((m.c_mu() - bind - m.k_mu() * mu) / mu - m.sigma_mu()) * dt;
            lr += dlr + nr * normal(engine);
            lm += dlm + nm * normal(engine);
            r = std::exp(lr);
            mu = std::exp(lm);
            if (!std::isfinite(r) || !std::isfinite(mu) || !std::isfinite(lr) ||
                !std::isfinite(lm) || r == 0.0 || mu == 0.0) {
                throw BlowUp("path " + std::to_string(path) + " left the finite range at t = " +
                             std::to_string(n * dt));
            }
            if (n > burn_steps && (n - burn_steps) % cfg.thin == 0) {
                out.r.push_back(r);
                out.mu.push_back(mu);
            }
        }
    } else {
        for (long n = 1; n <= steps; ++n) {
            const double bind = m.c() * r * mu;
            const double dr = (m.c_r() - bind - m.k_r() * r) * dt +
                              std::sqrt(2.0 * m.sigma_r() * r) * sq * normal(engine);
            const double dm = (m.c_mu() - bind - m.k_mu() * mu) * dt +
                              std::sqrt(2.0 * m.sigma_mu() * mu) * sq * normal(engine);
            r = reflect(r + dr);
            mu = reflect(mu + dm);
            if (!std::isfinite(r) || !std::isfinite(mu)) {
                throw BlowUp("path " + std::to_string(path) + " left the finite range at t = " +
                             std::to_string(n * dt));
            }
            if (n > burn_steps && (n - burn_steps) % cfg.thin == 0) {
                out.r.push_back(r);
                out.mu.push_back(mu);
            }
        }
    }
    out.terminal_r = r;
    out.terminal_mu = mu;
    return out;
}

}  // namespace

SimConfig SimConfig::defaults(const ModelParams& params, NoiseLaw law) {
    SimConfig cfg{params};
    cfg.law = law;
    cfg.dt = 1e-3 / params.k_r();
    cfg.t_end = 50.0 / params.k_r();
    const auto [rbar, mubar] = characteristic_values(params);
    cfg.r0 = rbar;
    cfg.mu0 = mubar;
    return cfg;
}

void SimConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidParameter("dt must be > 0");
    if (!(t_end > dt) || !std::isfinite(t_end)) throw InvalidParameter("t_end must exceed dt");
    if (!(burn_in >= 0.0 && burn_in < 1.0)) throw InvalidParameter("burn_in must lie in [0, 1)");
    if (n_paths < 1) throw InvalidParameter("n_paths must be >= 1");
    if (thin < 1) throw InvalidParameter("thin must be >= 1");
    if (!(r0 > 0.0) || !(mu0 > 0.0)) throw InvalidParameter("initial states must be > 0");
}

SimResult simulate(const SimConfig& config) {
    config.validate();
    const long steps = std::lround(std::ceil(config.t_end / config.dt - 1e-9));
    const long burn_steps = std::lround(std::floor(config.burn_in * static_cast<double>(steps)));
    std::vector<PathOutput> paths(static_cast<std::size_t>(config.n_paths));
    detail::parallel_for(paths.size(), config.threads, [&](std::size_t k) {
        paths[k] = run_path(config, static_cast<int>(k), steps, burn_steps);
    });
    SimResult res;
    std::size_t total = 0;
    for (const auto& p : paths) total += p.r.size();
    res.r.reserve(total);
    res.mu.reserve(total);
    for (auto& p : paths) {
        res.r.insert(res.r.end(), p.r.begin(), p.r.end());
        res.mu.insert(res.mu.end(), p.mu.begin(), p.mu.end());
        res.terminal_r.push_back(p.terminal_r);
        res.terminal_mu.push_back(p.terminal_mu);
    }
    return res;
}

Histogram1D histogram(const std::vector<double>& samples, int bins, double lo, double hi) {
    if (bins < 2) throw InvalidParameter("histogram needs at least 2 bins");
    if (!(hi > lo)) throw InvalidParameter("histogram range needs lo < hi");
    if (samples.empty()) throw EmptySample("no samples to histogram");
    Histogram1D h;
    h.edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int k = 0; k <= bins; ++k) h.edges[k] = lo + (hi - lo) * k / bins;
    h.masses.assign(static_cast<std::size_t>(bins), 0.0);
    std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
    std::size_t outside = 0;
    const double width = (hi - lo) / bins;
    for (double x : samples) {
        if (!(x >= lo) || !(x < hi)) {
            ++outside;
            continue;
        }
        auto k = static_cast<std::size_t>((x - lo) / width);
        k = std::min(k, static_cast<std::size_t>(bins - 1));
        // Guard the floating-point bin index against the stored edges.
        while (k > 0 && x < h.edges[k]) --k;
        while (k + 1 < static_cast<std::size_t>(bins) && x >= h.edges[k + 1]) ++k;
        ++counts[k];
    }
    const auto n = static_cast<double>(samples.size());
    for (std::size_t k = 0; k < counts.size(); ++k) h.masses[k] = counts[k] / n;
    h.out_of_range = outside / n;
    return h;
}

Histogram1D stationary_histogram(const SimConfig& config, int bins, double lo, double hi) {
    return histogram(simulate(config).r, bins, lo, hi);
}

Histogram1D bin_density(const std::function<double(double)>& pdf, int bins, double lo,
                        double hi, int subdivisions) {
    if (bins < 1 || subdivisions < 1) throw InvalidParameter("bin_density needs bins >= 1");
    if (!(hi > lo)) throw InvalidParameter("bin_density range needs lo < hi");
    Histogram1D h;
    h.edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int k = 0; k <= bins; ++k) h.edges[k] = lo + (hi - lo) * k / bins;
    h.masses.assign(static_cast<std::size_t>(bins), 0.0);
    double total = 0.0;
    for (int k = 0; k < bins; ++k) {
        const double a = h.edges[k];
        const double w = (h.edges[k + 1] - a) / subdivisions;
        double s = 0.0;
        for (int q = 0; q < subdivisions; ++q) {
            const double x = a + (q + 0.5) * w;
            if (x > 0.0) s += pdf(x);
        }
        h.masses[k] = s * w;
        total += h.masses[k];
    }
    h.out_of_range = std::max(0.0, 1.0 - total);
    return h;
}

double tv_distance(const Histogram1D& a, const Histogram1D& b) {
    if (a.masses.size() != b.masses.size()) {
        throw InvalidParameter("tv_distance needs matching bins");
    }
    double s = std::fabs(a.out_of_range - b.out_of_range);
    for (std::size_t k = 0; k < a.masses.size(); ++k) s += std::fabs(a.masses[k] - b.masses[k]);
    return 0.5 * s;
}

double compare_to_density(const Histogram1D& hist, const std::function<double(double)>& pdf,
                          int subdivisions) {
    const int bins = static_cast<int>(hist.masses.size());
    return tv_distance(hist, bin_density(pdf, bins, hist.edges.front(), hist.edges.back(),
                                         subdivisions));
}

double compare_to_density(const Histogram1D& hist, const Density1D& density) {
    Histogram1D ref;
    ref.edges = hist.edges;
    ref.masses.assign(hist.masses.size(), 0.0);
    const auto w = density.cell_widths();
    double total = 0.0;
    for (std::size_t i = 0; i < density.grid.size(); ++i) {
        const double x = density.grid[i];
        const double m = density.values[i] * w[i];
        total += m;
        if (x < hist.edges.front() || x >= hist.edges.back()) {
            ref.out_of_range += m;
            continue;
        }
        const auto it = std::upper_bound(hist.edges.begin(), hist.edges.end(), x);
        ref.masses[static_cast<std::size_t>(it - hist.edges.begin()) - 1] += m;
    }
    if (!(total > 0.0)) throw DomainError("compare_to_density needs a density with mass");
    for (double& m : ref.masses) m /= total;
    ref.out_of_range /= total;
    return tv_distance(hist, ref);
}

}  // namespace fprna
