// SPDX-License-Identifier: MIT
//
// Domain transformations from the unit hypercube to ℝ^d. Each family pairs a
// proposal density ψ with its inverse-CDF map; the integrand on the cube is
// g(y(u)) / ψ(y(u)).
//
//   product:  y_j = Ψ_j⁻¹(u_j)
//   matrix:   y = L̃·Ψ_Z⁻¹(u)                     L̃L̃ᵀ = Σ̃
//   Laplace:  y = √W · L̃·Ψ_Z⁻¹(u_{1:d})          W ~ Exp(1),  L̃L̃ᵀ = Σ̃
//   Student:  y = L̃·Ψ_Z⁻¹(u_{1:d}) / √W          W ~ χ²(ν̃),  L̃L̃ᵀ = ν̃Σ̃
#pragma once

#include <optional>
#include <string>

#include "fqmc/models.hpp"
#include "fqmc/numkit.hpp"

namespace fqmc {

enum class TransformFamily {
    GaussianProduct,
    GaussianMatrix,
    LaplaceProduct,
    LaplaceMixture,
    StudentProduct,
    StudentMixture,
};

[[nodiscard]] const char* family_name(TransformFamily f) noexcept;
[[nodiscard]] TransformFamily parse_family(const std::string& s);
[[nodiscard]] bool is_product(TransformFamily f) noexcept;
[[nodiscard]] bool is_mixture(TransformFamily f) noexcept;

enum class TransformForm { Auto, Product, Matrix };
enum class FactorMode { Cholesky, Spectral };

[[nodiscard]] const char* form_name(TransformForm f) noexcept;
[[nodiscard]] const char* factor_mode_name(FactorMode m) noexcept;
[[nodiscard]] TransformForm parse_form(const std::string& s);
[[nodiscard]] FactorMode parse_factor_mode(const std::string& s);

struct TransformSpec {
    TransformFamily family = TransformFamily::GaussianProduct;
    std::size_t d = 1;
    std::size_t udim = 1;
    Vec sigma;         // product scales σ̃_j
    Matrix cov;        // Σ̃ (matrix and mixture forms)
    double nu = 0.0;   // ν̃ (Student forms)
    Matrix factor;     // L̃
    FactorMode factor_mode = FactorMode::Cholesky;

    // Cached for density evaluation.
    Matrix cov_inv;
    double log_det_cov = 0.0;
    double log_norm = 0.0;
};

// Validates parameters and fills the factor and caches.
[[nodiscard]] TransformSpec make_transform(TransformFamily family, std::size_t d, Vec sigma,
                                           Matrix cov, double nu,
                                           FactorMode mode = FactorMode::Cholesky);

// Overrides of the critical-case rules; all optional.
struct TransformOptions {
    TransformForm form = TransformForm::Auto;
    double epsilon = 0.0;           // offset towards the compliant side
    Vec sigma;                      // explicit σ̃ (size 1 broadcasts)
    std::optional<double> nu;       // explicit ν̃
    double cov_scale = 1.0;         // multiplies the rule's Σ̃
    FactorMode factor = FactorMode::Cholesky;
};

// Critical-case parameters for the model's tail class.
// Throws RuleUnavailable for VG matrix rules with 2T/ν <= d.
[[nodiscard]] TransformSpec default_transform(const ModelSpec& m, const TransformOptions& opt = {});

// Critical Student scale for the VG product rule at given ν̃.
[[nodiscard]] double vg_student_scale(double nu_model, double sigma_j, double maturity, double nu_t);

[[nodiscard]] double proposal_log_pdf(const TransformSpec& t, const Vec& y);
[[nodiscard]] double proposal_pdf(const TransformSpec& t, const Vec& y);

struct MappedPoint {
    Vec y;
    double log_weight = 0.0;  // -log ψ(y)
};

[[nodiscard]] MappedPoint map_to_reals(const TransformSpec& t, const double* u);
[[nodiscard]] MappedPoint map_to_reals(const TransformSpec& t, const Vec& u);
// Allocation-free variant for the hot loop; z is scratch of length d.
// clamp=false skips the hypercube clamp (deep tail probes only).
void map_to_reals_into(const TransformSpec& t, const double* u, double* y, double* z,
                       double& log_weight, bool clamp = true);

// Closed-form ψ_Y against quadrature over the mixing variable at 20 probe
// points. Returns the max absolute error, or 0 for non-mixture families.
[[nodiscard]] double mixture_identity_check(const TransformSpec& t);

[[nodiscard]] std::string describe(const TransformSpec& t);

}  // namespace fqmc
