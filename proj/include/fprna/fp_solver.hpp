#pragma once

#include <Eigen/SparseCore>
#include <cstddef>
#include <vector>

#include "fprna/distributions.hpp"
#include "fprna/model_params.hpp"
#include "fprna/quadrature.hpp"

namespace fprna {

/// Regular cell-centred mesh of [r_min, r_max] x [mu_min, mu_max].
class Grid2D {
public:
    Grid2D(double r_min, double r_max, double mu_min, double mu_max, int n_r, int n_mu);

    /// 70 x 200 cells on [0.06, 5] x [0.05, 5].
    static Grid2D standard();

    double r_min() const noexcept { return r_min_; }
    double r_max() const noexcept { return r_max_; }
    double mu_min() const noexcept { return mu_min_; }
    double mu_max() const noexcept { return mu_max_; }
    int n_r() const noexcept { return n_r_; }
    int n_mu() const noexcept { return n_mu_; }
    double dr() const noexcept { return dr_; }
    double dmu() const noexcept { return dmu_; }
    std::size_t cells() const noexcept { return static_cast<std::size_t>(n_r_) * n_mu_; }

    double r(int i) const noexcept { return r_min_ + (i + 0.5) * dr_; }
    double mu(int j) const noexcept { return mu_min_ + (j + 0.5) * dmu_; }
    /// Face k sits between cells k-1 and k; k = 0 and k = n are the walls.
    double r_face(int k) const noexcept { return r_min_ + k * dr_; }
    double mu_face(int k) const noexcept { return mu_min_ + k * dmu_; }

    /// Unknowns are stored row-major in i, then j.
    std::size_t index(int i, int j) const noexcept {
        return static_cast<std::size_t>(i) * n_mu_ + j;
    }

private:
    double r_min_, r_max_, mu_min_, mu_max_;
    int n_r_, n_mu_;
    double dr_, dmu_;
};

/// Cell averages of a density on a Grid2D.
struct Field2D {
    Grid2D grid;
    std::vector<double> values;

    double at(int i, int j) const { return values[grid.index(i, j)]; }
    /// sum f dr dmu
    double mass() const;
};

/// log h1 = -((1 + p mu gamma) delta + 2) log r - delta / r
double log_h1(const DimensionlessParams& dp, double r, double mu);
/// log h2 = -((1 + r gamma) delta kappa/nu + 2) log mu - delta kappa / (nu mu)
double log_h2(const DimensionlessParams& dp, double r, double mu);

/// Flux-balance rows for every cell followed by the unit-mass row.
struct LinearSystem {
    Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;
    Eigen::VectorXd rhs;
};

LinearSystem assemble(const DimensionlessParams& dp, const Grid2D& grid);

struct SolveInfo {
    /// ||A f - b||_2 over the full overdetermined system
    double residual = 0.0;
    /// ||A||_1
    double matrix_norm = 0.0;
    /// Most negative entry before clamping (0 if none)
    double min_value = 0.0;
};

/// Stationary density with unit mass. The redundant flux row of the first
/// cell is swapped for the mass row and the square system is factorized
/// with sparse LU; the residual of the full system is then checked.
Field2D solve_steady(const DimensionlessParams& dp, const Grid2D& grid,
                     SolveInfo* info = nullptr);

/// rho_i = sum_j f_ij dmu on the r cell centres.
Density1D marginal_r(const Field2D& field);

/// j_i = sum_j mu_j f_ij dmu / rho_i; NaN where rho_i < 1e-300.
std::vector<double> conditional_mean_mu(const Field2D& field);

/// CV from midpoint moments of a sampled density.
double discrete_cv(const Density1D& density);

/// exp(log_shape) sampled on `grid` and rescaled to unit midpoint mass.
Density1D window_density(const std::vector<double>& grid, const LogShape& log_shape);

/// sum |a_i - b_i| w_i over a shared grid.
double l1_distance(const Density1D& a, const Density1D& b);

}  // namespace fprna
