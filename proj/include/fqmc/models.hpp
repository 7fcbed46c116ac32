// SPDX-License-Identifier: MIT
//
// Extended characteristic functions of the pricing models, martingale drift
// corrections and strip-of-analyticity tests.
//
//   Φ(z) = exp(i zᵀ(X₀ + (r + μ)T)) · φ(z),  z = y + iR
//
// Quadratic forms in complex z use the bilinear product (no conjugation).
#pragma once

#include <string>
#include <vector>

#include "fqmc/numkit.hpp"

namespace fqmc {

enum class ModelKind { GBM, VG, NIG, GH };

[[nodiscard]] const char* model_name(ModelKind k) noexcept;
[[nodiscard]] ModelKind parse_model_kind(const std::string& s);

struct ModelSpec {
    ModelKind kind = ModelKind::GBM;
    Vec spot;               // S₀, length d
    double rate = 0.0;      // r
    double maturity = 1.0;  // T

    Matrix cov;  // GBM / VG: Σ with Σ_ij = ρ_ij σ_i σ_j

    Vec theta;        // VG drift of the subordinated Brownian motion
    double nu = 0.0;  // VG variance rate

    double alpha = 0.0;    // NIG / GH tail parameter
    Vec beta;              // NIG / GH skew vector
    double delta = 0.0;    // NIG / GH scale
    Matrix shape;          // NIG / GH Δ, det Δ = 1
    double lambda = -0.5;  // GH index; NIG is λ = -1/2

    [[nodiscard]] std::size_t dim() const noexcept { return spot.size(); }
};

// Convenience builders with identity correlation / shape by default.
[[nodiscard]] ModelSpec make_gbm(Vec spot, Vec sigma, double rate, double maturity,
                                 const Matrix& corr = {});
[[nodiscard]] ModelSpec make_vg(Vec spot, Vec sigma, Vec theta, double nu, double rate,
                                double maturity, const Matrix& corr = {});
[[nodiscard]] ModelSpec make_nig(Vec spot, double alpha, Vec beta, double delta, double rate,
                                 double maturity, const Matrix& shape = {});
[[nodiscard]] ModelSpec make_gh(Vec spot, double alpha, Vec beta, double delta, double lambda,
                                double rate, double maturity, const Matrix& shape = {});

// Throws InvalidSpec / DimensionMismatch / NotPositiveDefinite.
void validate(const ModelSpec& m);
// Non-fatal remarks (e.g. VG with 2T/ν <= d).
[[nodiscard]] std::vector<std::string> model_warnings(const ModelSpec& m);

struct StripCheck {
    bool inside = false;
    double margin = 0.0;  // constraint value; positive inside
};

// Validated model with cached drift correction and factors.
class Model {
public:
    explicit Model(ModelSpec spec);

    [[nodiscard]] const ModelSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] std::size_t dim() const noexcept { return spec_.dim(); }
    [[nodiscard]] const Vec& drift() const noexcept { return mu_; }
    [[nodiscard]] Vec log_spot() const;

    // log φ(z), the part of Φ without the linear drift exponent.
    [[nodiscard]] cplx log_phi(const CVec& z) const;
    // log Φ(z) with explicit initial log-coordinates x0.
    [[nodiscard]] cplx log_char(const CVec& z, const Vec& x0) const;

    [[nodiscard]] StripCheck strip(const Vec& R) const;
    // Scale of the strip constraint, used for the interior margin.
    [[nodiscard]] double strip_scale() const noexcept;

private:
    ModelSpec spec_;
    Vec mu_;
    double gh_logk_a_ = 0.0;  // log K_λ(δT√A), A = α² - βᵀΔβ
    double gh_log_a_ = 0.0;
};

// Martingale drift μ with Φ(-i e_j) = exp(X₀_j + rT).
[[nodiscard]] Vec drift_correction(const ModelSpec& m);
// Φ(z) with X₀ = log S₀. Throws StripViolation when Im z ∉ δ_X.
[[nodiscard]] cplx char_function(const ModelSpec& m, const CVec& z);
[[nodiscard]] StripCheck in_strip(const ModelSpec& m, const Vec& R);

}  // namespace fqmc
