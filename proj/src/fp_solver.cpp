#include "fprna/fp_solver.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fprna/errors.hpp"

namespace fprna {

namespace {

void require_quadratic(const DimensionlessParams& dp) {
    if (dp.law() != NoiseLaw::Quadratic) {
        throw UnsupportedConfiguration(
            "the finite-volume solver only handles the quadratic noise law");
    }
}

}  // namespace

Grid2D::Grid2D(double r_min, double r_max, double mu_min, double mu_max, int n_r, int n_mu)
    : r_min_(r_min), r_max_(r_max), mu_min_(mu_min), mu_max_(mu_max), n_r_(n_r),
      n_mu_(n_mu) {
    if (!(r_min > 0.0) || !(r_max > r_min) || !(mu_min > 0.0) || !(mu_max > mu_min) ||
        !std::isfinite(r_max) || !std::isfinite(mu_max)) {
        throw InvalidParameter("grid bounds need 0 < r_min < r_max and 0 < mu_min < mu_max");
    }
    if (n_r < 2 || n_mu < 2) throw InvalidParameter("grid needs at least 2 cells per axis");
    dr_ = (r_max - r_min) / n_r;
    dmu_ = (mu_max - mu_min) / n_mu;
}

Grid2D Grid2D::standard() { return {0.06, 5.0, 0.05, 5.0, 70, 200}; }

double Field2D::mass() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * grid.dr() * grid.dmu();
}

double log_h1(const DimensionlessParams& dp, double r, double mu) {
    require_quadratic(dp);
    if (!(r > 0.0) || !(mu > 0.0)) throw DomainError("log_h1 needs r, mu > 0");
    const double d = dp.delta();
    return -((1.0 + dp.p() * mu * dp.gamma()) * d + 2.0) * std::log(r) - d / r;
}

double log_h2(const DimensionlessParams& dp, double r, double mu) {
    require_quadratic(dp);
    if (!(r > 0.0) || !(mu > 0.0)) throw DomainError("log_h2 needs r, mu > 0");
    const double a = dp.delta() * dp.kappa() / dp.nu();
    return -((1.0 + r * dp.gamma()) * a + 2.0) * std::log(mu) - a / mu;
}

LinearSystem assemble(const DimensionlessParams& dp, const Grid2D& grid) {
    require_quadratic(dp);
    const int nr = grid.n_r();
    const int nm = grid.n_mu();
    const auto n = static_cast<Eigen::Index>(grid.cells());
    const double cr = grid.dmu() / grid.dr();
    const double cm = dp.nu() * grid.dr() / grid.dmu();

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) * 5 + static_cast<std::size_t>(n));

    auto check = [&](double v, int i, int j) {
        if (!std::isfinite(v)) {
            throw AssemblyError("non-finite coefficient at cell (" + std::to_string(i) + ", " +
                                std::to_string(j) + ")");
        }
        return v;
    };
    // A face flux between cells a (low side) and b (high side) reads
    //   flux = -scale * (wb f_b - wa f_a)
    // and enters row a with +1 and row b with -1.
    auto add_face = [&](std::size_t a, std::size_t b, double scale, double wa, double wb) {
        const auto ia = static_cast<Eigen::Index>(a);
        const auto ib = static_cast<Eigen::Index>(b);
        trip.emplace_back(ia, ib, -scale * wb);
        trip.emplace_back(ia, ia, scale * wa);
        trip.emplace_back(ib, ib, scale * wb);
        trip.emplace_back(ib, ia, -scale * wa);
    };

    for (int i = 0; i < nr; ++i) {
        for (int j = 0; j < nm; ++j) {
            const double r = grid.r(i);
            const double mu = grid.mu(j);
            if (i + 1 < nr) {
                const double rf = grid.r_face(i + 1);
                const double lf = log_h1(dp, rf, mu);
                const double wa = check(std::exp(lf - log_h1(dp, r, mu)), i, j);
                const double wb = check(std::exp(lf - log_h1(dp, grid.r(i + 1), mu)), i, j);
                add_face(grid.index(i, j), grid.index(i + 1, j), cr * rf * rf, wa, wb);
            }
            if (j + 1 < nm) {
                const double mf = grid.mu_face(j + 1);
                const double lf = log_h2(dp, r, mf);
                const double wa = check(std::exp(lf - log_h2(dp, r, mu)), i, j);
                const double wb = check(std::exp(lf - log_h2(dp, r, grid.mu(j + 1))), i, j);
                add_face(grid.index(i, j), grid.index(i, j + 1), cm * mf * mf, wa, wb);
            }
        }
    }
    const double area = grid.dr() * grid.dmu();
    for (Eigen::Index k = 0; k < n; ++k) trip.emplace_back(n, k, area);

    LinearSystem sys;
    sys.matrix.resize(n + 1, n);
    sys.matrix.setFromTriplets(trip.begin(), trip.end());
    sys.matrix.makeCompressed();
    sys.rhs = Eigen::VectorXd::Zero(n + 1);
    sys.rhs[n] = 1.0;
    return sys;
}

Field2D solve_steady(const DimensionlessParams& dp, const Grid2D& grid, SolveInfo* info) {
    const LinearSystem sys = assemble(dp, grid);
    const Eigen::Index n = sys.matrix.cols();

    // Flux rows sum to zero, so dropping row 0 loses nothing.
    Eigen::SparseMatrix<double> square(sys.matrix.bottomRows(n));
    square.makeCompressed();
    Eigen::VectorXd b = sys.rhs.tail(n);

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(square);
    if (lu.info() != Eigen::Success) {
        throw SolverFailure("sparse LU factorization failed: " + lu.lastErrorMessage(),
                            std::numeric_limits<double>::quiet_NaN());
    }
    Eigen::VectorXd f = lu.solve(b);
    if (lu.info() != Eigen::Success || !f.allFinite()) {
        throw SolverFailure("sparse LU solve failed", std::numeric_limits<double>::quiet_NaN());
    }

    const double residual = (sys.matrix * f - sys.rhs).norm();
    double norm1 = 0.0;
    {
        Eigen::VectorXd colsum = Eigen::VectorXd::Zero(n);
        for (Eigen::Index k = 0; k < sys.matrix.outerSize(); ++k) {
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(sys.matrix, k);
                 it; ++it) {
                colsum[it.col()] += std::fabs(it.value());
            }
        }
        norm1 = colsum.maxCoeff();
    }
    if (!(residual < 1e-10 * (1.0 + norm1))) {
        throw SolverFailure("steady solve residual " + std::to_string(residual) +
                                " exceeds tolerance",
                            residual);
    }
    const double fmin = f.minCoeff();
    if (fmin < -1e-12) {
        throw NonnegativityViolation("steady solution has entry " + std::to_string(fmin));
    }
    if (info) {
        info->residual = residual;
        info->matrix_norm = norm1;
        info->min_value = std::min(fmin, 0.0);
    }
    Field2D field{grid, std::vector<double>(static_cast<std::size_t>(n))};
    for (Eigen::Index k = 0; k < n; ++k) field.values[k] = std::max(f[k], 0.0);
    return field;
}

Density1D marginal_r(const Field2D& field) {
    const auto& g = field.grid;
    std::vector<double> r(g.n_r()), rho(g.n_r(), 0.0);
    for (int i = 0; i < g.n_r(); ++i) {
        r[i] = g.r(i);
        for (int j = 0; j < g.n_mu(); ++j) rho[i] += field.at(i, j);
        rho[i] *= g.dmu();
    }
    return {std::move(r), std::move(rho)};
}

std::vector<double> conditional_mean_mu(const Field2D& field) {
    const auto& g = field.grid;
    std::vector<double> out(g.n_r());
    for (int i = 0; i < g.n_r(); ++i) {
        double mass = 0.0;
        double first = 0.0;
        for (int j = 0; j < g.n_mu(); ++j) {
            mass += field.at(i, j);
            first += g.mu(j) * field.at(i, j);
        }
        mass *= g.dmu();
        first *= g.dmu();
        out[i] = mass < 1e-300 ? std::numeric_limits<double>::quiet_NaN() : first / mass;
    }
    return out;
}

double discrete_cv(const Density1D& density) {
    const auto w = density.cell_widths();
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < density.grid.size(); ++i) {
        const double x = density.grid[i];
        const double v = density.values[i] * w[i];
        m0 += v;
        m1 += v * x;
        m2 += v * x * x;
    }
    if (!(m0 > 0.0)) throw DomainError("discrete_cv requires positive mass");
    if (!(m1 > 0.0)) throw DomainError("discrete_cv requires a positive mean");
    const double mean = m1 / m0;
    const double var = std::max(m2 / m0 - mean * mean, 0.0);
    return std::sqrt(var) / mean;
}

Density1D window_density(const std::vector<double>& grid, const LogShape& log_shape) {
    std::vector<double> logs(grid.size());
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        logs[i] = log_shape(grid[i]);
        mx = std::max(mx, logs[i]);
    }
    if (!std::isfinite(mx)) throw DomainError("window_density: shape has no finite values");
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = std::exp(logs[i] - mx);
    Density1D d(grid, std::move(v));
    for (double& x : d.values) x /= d.normalization;
    d.normalization = 1.0;
    return d;
}

double l1_distance(const Density1D& a, const Density1D& b) {
    if (a.grid != b.grid) throw InvalidParameter("l1_distance needs identical grids");
    const auto w = a.cell_widths();
    double s = 0.0;
    for (std::size_t i = 0; i < a.grid.size(); ++i) s += std::fabs(a.values[i] - b.values[i]) * w[i];
    return s;
}

}  // namespace fprna
