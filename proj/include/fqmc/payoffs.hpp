// SPDX-License-Identifier: MIT
//
// Scaled payoffs, their extended Fourier transforms
//   P̂(z) = ∫ e^{-i zᵀx} P(x) dx,  Im z = R in the payoff strip,
// and the spot/strike scaling conventions.
#pragma once

#include <string>

#include "fqmc/models.hpp"
#include "fqmc/numkit.hpp"

namespace fqmc {

enum class PayoffKind { BasketPut, SpreadCall, CallOnMin, CONCall };

[[nodiscard]] const char* payoff_name(PayoffKind k) noexcept;
[[nodiscard]] PayoffKind parse_payoff_kind(const std::string& s);

struct PayoffSpec {
    PayoffKind kind = PayoffKind::BasketPut;
    double strike = 100.0;
    Vec weights;        // BasketPut; empty means 1/d each
    double cash = 1.0;  // CONCall
    std::size_t dim = 1;
};

void validate(const PayoffSpec& p);

struct ScalingRule {
    Vec x0;               // initial scaled log-coordinates
    double unscale = 1.0; // multiplies the scaled price
};

[[nodiscard]] ScalingRule scaling_rule(const PayoffSpec& p, const ModelSpec& m);

[[nodiscard]] cplx log_payoff_transform(const PayoffSpec& p, const CVec& z);
// Throws StripViolation when Im z ∉ δ_P.
[[nodiscard]] cplx payoff_transform(const PayoffSpec& p, const CVec& z);

// Scaled payoff at log-coordinates x.
[[nodiscard]] double payoff_value(const PayoffSpec& p, const Vec& x);

[[nodiscard]] StripCheck payoff_strip(const PayoffSpec& p, const Vec& R);

}  // namespace fqmc
