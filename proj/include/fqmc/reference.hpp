// SPDX-License-Identifier: MIT
//
// Physical-space Monte Carlo: terminal log-prices by subordination and plain
// MC prices used as references.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fqmc/models.hpp"
#include "fqmc/payoffs.hpp"
#include "fqmc/pricer.hpp"
#include "fqmc/random.hpp"

namespace fqmc {

struct PathBatch {
    std::size_t M = 0;
    std::size_t d = 0;
    std::vector<double> x;  // M×d terminal log-prices, row-major
    std::uint64_t seed = 0;
};

struct SimulationOptions {
    bool enable_gig = false;  // GH with λ ≠ -1/2 needs the GIG sampler
};

// Standard gamma with unit scale.
[[nodiscard]] double sample_gamma(CounterRng& rng, double shape);
[[nodiscard]] double sample_inverse_gaussian(CounterRng& rng, double mean, double shape);
[[nodiscard]] double sample_normal(CounterRng& rng);

// GIG(λ, χ, ψ): density ∝ x^{λ-1} exp(-(χ/x + ψx)/2) on x > 0.
class GigSampler {
public:
    GigSampler(double lambda, double chi, double psi);
    double operator()(CounterRng& rng) const;
    // E[W] in closed form via Bessel ratios.
    [[nodiscard]] double mean() const;

private:
    double lambda_, chi_, psi_;
    double lam_ = 0.0, omega_ = 0.0, mode_ = 0.0;  // reduced problem, λ >= 0
    double vmin_ = 0.0, vmax_ = 0.0;
    bool invert_ = false;
    double scale_ = 1.0;
    [[nodiscard]] double log_h(double x) const;  // relative to the mode
};

// Draws terminal log-coordinates X_T given initial log-coordinates x0.
class TerminalSampler {
public:
    TerminalSampler(const ModelSpec& m, Vec x0, const SimulationOptions& opt = {});
    void draw(CounterRng& rng, double* x) const;
    [[nodiscard]] std::size_t dim() const noexcept { return x0_.size(); }

private:
    ModelSpec spec_;
    Vec x0_;
    Vec drift_;    // x0 + (r + μ)T
    Matrix chol_;  // of TΣ (GBM), Σ (VG) or Δ (GH)
    Vec skew_;     // θ (VG) or Δβ (GH)
    double ig_mean_ = 0.0, ig_shape_ = 0.0;
    std::optional<GigSampler> gig_;
};

// X₀ = log S₀. Throws SubordinatorUnavailable for GH λ ≠ -1/2 without GIG.
[[nodiscard]] PathBatch simulate_terminal(const ModelSpec& m, std::size_t M, std::uint64_t seed,
                                          const SimulationOptions& opt = {});

// e^{-rT} · unscale · mean payoff; stat_error = 1.96 sd / √M.
[[nodiscard]] PriceEstimate mc_price_physical(const ModelSpec& m, const PayoffSpec& p, std::size_t M,
                                              std::uint64_t seed = kDefaultSeed,
                                              const SimulationOptions& opt = {});

}  // namespace fqmc
