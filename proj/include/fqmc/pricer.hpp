// SPDX-License-Identifier: MIT
//
// End-to-end Fourier pricing with three integration backends: randomized QMC,
// plain Monte Carlo on the cube, and tensor-product Gauss-Laguerre.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "fqmc/damping.hpp"
#include "fqmc/integrand.hpp"
#include "fqmc/random.hpp"
#include "fqmc/transform.hpp"

namespace fqmc {

enum class Backend { RQMC, MCFourier, TPLaguerre, PhysicalMC };

[[nodiscard]] const char* backend_name(Backend b) noexcept;
[[nodiscard]] Backend parse_backend(const std::string& s);

struct PriceEstimate {
    double price = 0.0;
    double stat_error = 0.0;      // absolute, at confidence c_alpha
    double rel_stat_error = 0.0;  // stat_error / |price|
    double c_alpha = 1.96;
    Backend backend = Backend::RQMC;
    std::size_t N = 0;
    std::size_t S = 0;
    std::uint64_t seed = 0;
    double wall_ms = 0.0;
    Vec R;                  // damping used (Fourier backends)
    std::string transform;  // description of the transform used
};

struct QmcConfig {
    std::size_t N = 4096;
    std::size_t S = 30;
    std::uint64_t seed = kDefaultSeed;
    double c_alpha = 1.96;
};

[[nodiscard]] PriceEstimate price_fourier_rqmc(const ModelSpec& m, const PayoffSpec& p,
                                               std::optional<Vec> R = std::nullopt,
                                               std::optional<TransformSpec> t = std::nullopt,
                                               const QmcConfig& cfg = {});

[[nodiscard]] PriceEstimate price_fourier_mc(const ModelSpec& m, const PayoffSpec& p,
                                             std::optional<Vec> R, std::optional<TransformSpec> t,
                                             std::size_t n_total, std::uint64_t seed = kDefaultSeed);

// Throws DimensionTooLarge for d > 5.
[[nodiscard]] PriceEstimate price_tp_laguerre(const ModelSpec& m, const PayoffSpec& p,
                                              std::optional<Vec> R, std::size_t n_nodes);

struct LaguerreRule {
    Vec nodes;
    Vec weights;  // w_k e^{x_k}, ready for integrands without the e^{-x} factor
};

// n-point rule for ∫₀^∞ e^{-x} f(x) dx, cached per n.
[[nodiscard]] const LaguerreRule& gauss_laguerre(std::size_t n);

// ∫_{ℝ^d} f(y) dy by folding each axis onto the half-line. Axis scales are
// chosen from the decay of f along each axis when `scales` is empty.
[[nodiscard]] double tp_laguerre_integrate(const std::function<double(const Vec&)>& f, std::size_t d,
                                           std::size_t n, Vec scales = {});

// Axis scale c = y_cut / x_max(n), where |f(y_cut e_j)| < 1e-16 |f(0)|.
[[nodiscard]] Vec laguerre_axis_scales(const std::function<double(const Vec&)>& f, std::size_t d,
                                       std::size_t n);

}  // namespace fqmc
