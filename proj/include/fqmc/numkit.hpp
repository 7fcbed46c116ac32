// SPDX-License-Identifier: MIT
//
// Numerical kernels: small dense symmetric linear algebra, special functions
// with complex arguments, and the quantile functions behind the domain maps.
#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "fqmc/errors.hpp"

namespace fqmc {

using cplx = std::complex<double>;
using Vec = std::vector<double>;
using CVec = std::vector<cplx>;

// ===========================================================================
// Dense square matrix (row-major). Symmetric matrices use the same storage.
// ===========================================================================
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), a_(n * n, fill) {}

    [[nodiscard]] static Matrix identity(std::size_t n);
    [[nodiscard]] static Matrix diagonal(const Vec& d);
    // Σ_ij = ρ_ij σ_i σ_j from a correlation matrix and volatilities.
    [[nodiscard]] static Matrix covariance(const Vec& sigma, const Matrix& corr);

    [[nodiscard]] std::size_t dim() const noexcept { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    [[nodiscard]] const double* data() const noexcept { return a_.data(); }

    [[nodiscard]] double max_abs() const noexcept;
    [[nodiscard]] bool is_symmetric(double tol = 0.0) const noexcept;
    [[nodiscard]] bool is_diagonal() const noexcept;

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

using SymMatrix = Matrix;

[[nodiscard]] Matrix operator*(const Matrix& a, const Matrix& b);
[[nodiscard]] Matrix transpose(const Matrix& a);
[[nodiscard]] Vec mat_vec(const Matrix& a, const Vec& x);
[[nodiscard]] double quad_form(const Matrix& a, const Vec& x);
// Bilinear xᵀA y without conjugation.
[[nodiscard]] cplx bilinear(const Matrix& a, const CVec& x, const CVec& y);
[[nodiscard]] double max_abs_diff(const Matrix& a, const Matrix& b);

// Lower factor L with L·Lᵀ = A. Throws NotPositiveDefinite.
[[nodiscard]] Matrix cholesky(const SymMatrix& a);

struct EigenDecomposition {
    Vec values;     // ascending
    Matrix vectors; // columns are eigenvectors
};

// Cyclic Jacobi rotations. Throws NoConvergence.
[[nodiscard]] EigenDecomposition sym_eig(const SymMatrix& a);

[[nodiscard]] Matrix inverse_spd(const SymMatrix& a);
[[nodiscard]] double log_det_spd(const SymMatrix& a);

// ===========================================================================
// Distribution functions and quantiles
// ===========================================================================

// Probabilities are clamped to [2^-53, 1 - 2^-53] before any quantile call.
inline constexpr double kUnitClamp = 1.1102230246251565e-16;
[[nodiscard]] double clamp_unit(double u) noexcept;
// True once any clamp has fired in this process (reported once on stderr).
[[nodiscard]] bool clamp_fired() noexcept;

[[nodiscard]] double norm_cdf(double x) noexcept;
[[nodiscard]] double norm_pdf(double x) noexcept;
[[nodiscard]] double norm_icdf(double u);

// Regularized incomplete gamma P(a, x) and Q(a, x).
[[nodiscard]] double gamma_p(double a, double x);
[[nodiscard]] double gamma_q(double a, double x);
[[nodiscard]] double chi2_cdf(double x, double k);
[[nodiscard]] double chi2_icdf(double u, double k);

[[nodiscard]] double exp_icdf(double u, double rate);
[[nodiscard]] double laplace_cdf(double x, double scale) noexcept;
[[nodiscard]] double laplace_icdf(double u, double scale);

// Regularized incomplete beta I_x(a, b).
[[nodiscard]] double beta_inc(double a, double b, double x);
[[nodiscard]] double student_t_cdf(double x, double nu, double scale = 1.0);
[[nodiscard]] double student_t_icdf(double u, double nu, double scale = 1.0);

// ===========================================================================
// Special functions of complex argument
// ===========================================================================

// log Γ(z) on any branch whose exponential is Γ(z). Throws PoleError.
[[nodiscard]] cplx log_gamma_complex(cplx z);

// Modified Bessel function of the second kind, Re w > 0.
[[nodiscard]] cplx bessel_k(double order, cplx w);
// e^{w} K_order(w), for log-space use at large |w|.
[[nodiscard]] cplx bessel_k_scaled(double order, cplx w);

// ===========================================================================
// Quadrature
// ===========================================================================

// Adaptive Gauss-Kronrod (7/15) on [a, b] with interval bisection.
[[nodiscard]] double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                        double abs_tol = 1e-13, double rel_tol = 1e-12,
                                        int max_intervals = 4000);

}  // namespace fqmc
