// SPDX-License-Identifier: MIT
//
// The Fourier-space integrand
//   g(y) = (2π)^{-d} e^{-rT} Re[Φ(y + iR) P̂(y + iR)]
// and its composition with a domain transformation, plus the empirical
// boundary-growth probe.
#pragma once

#include <string>
#include <vector>

#include "fqmc/models.hpp"
#include "fqmc/payoffs.hpp"
#include "fqmc/transform.hpp"

namespace fqmc {

class FourierIntegrand {
public:
    // Throws StripViolation when R is outside the model or payoff strip.
    FourierIntegrand(const ModelSpec& m, const PayoffSpec& p, Vec R, TransformSpec t);

    [[nodiscard]] const Model& model() const noexcept { return model_; }
    [[nodiscard]] const PayoffSpec& payoff() const noexcept { return payoff_; }
    [[nodiscard]] const Vec& damping() const noexcept { return R_; }
    [[nodiscard]] const TransformSpec& transform() const noexcept { return t_; }
    [[nodiscard]] const ScalingRule& scaling() const noexcept { return scaling_; }
    [[nodiscard]] std::size_t dim() const noexcept { return R_.size(); }
    [[nodiscard]] std::size_t udim() const noexcept { return t_.udim; }

    // log of the complex value whose real part is g(y).
    [[nodiscard]] cplx log_g(const Vec& y) const;
    [[nodiscard]] double g(const Vec& y) const;
    // log|φ(y + iR)| - log ψ(y): the tail ratio governed by the transform rules.
    [[nodiscard]] double log_tail_ratio(const Vec& y) const;

    // g(y(u)) / ψ(y(u)) on the open unit cube of dimension udim().
    double operator()(const double* u) const;

private:
    Model model_;
    PayoffSpec payoff_;
    Vec R_;
    TransformSpec t_;
    ScalingRule scaling_;
    double log_prefactor_ = 0.0;
};

[[nodiscard]] double transformed_integrand(const ModelSpec& m, const PayoffSpec& p, const Vec& R,
                                           const TransformSpec& t, const Vec& u);

struct ProbeRay {
    std::string label;
    std::vector<double> ratio;      // |φ|/ψ per level
    std::vector<double> integrand;  // |g̃| per level
    bool diverging = false;
};

struct BoundaryReport {
    std::vector<double> levels;  // 1e-2 … 1e-7
    double center = 0.0;         // |g̃| at the cube center
    std::vector<ProbeRay> rays;
    bool diverging = false;
    // Tail ratio far out along the all-low corner (u = 1e-100).
    double corner_limit = 0.0;

    [[nodiscard]] const char* verdict() const noexcept { return diverging ? "diverging" : "bounded"; }
};

// A ray diverges when its tail ratio rises strictly over the last three
// levels by a total factor above kProbeGrowth.
inline constexpr double kProbeGrowth = 1.5;

[[nodiscard]] BoundaryReport boundary_probe(const ModelSpec& m, const PayoffSpec& p, const Vec& R,
                                            const TransformSpec& t);

}  // namespace fqmc
