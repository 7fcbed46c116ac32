// SPDX-License-Identifier: MIT
#include "fqmc/payoffs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fqmc {

const char* payoff_name(PayoffKind k) noexcept {
    switch (k) {
        case PayoffKind::BasketPut: return "BasketPut";
        case PayoffKind::SpreadCall: return "SpreadCall";
        case PayoffKind::CallOnMin: return "CallOnMin";
        case PayoffKind::CONCall: return "CONCall";
    }
    return "?";
}

PayoffKind parse_payoff_kind(const std::string& s) {
    if (s == "BasketPut") return PayoffKind::BasketPut;
    if (s == "SpreadCall") return PayoffKind::SpreadCall;
    if (s == "CallOnMin") return PayoffKind::CallOnMin;
    if (s == "CONCall") return PayoffKind::CONCall;
    throw Error(Errc::InvalidSpec,
                "unknown payoff kind '" + s + "' (BasketPut, SpreadCall, CallOnMin, CONCall)");
}

void validate(const PayoffSpec& p) {
    if (p.dim < 1) throw Error(Errc::InvalidSpec, "payoff dimension must be at least 1");
    if (p.kind == PayoffKind::SpreadCall && p.dim < 2)
        throw Error(Errc::InvalidSpec, "spread call needs at least two assets");
    if (!(p.strike > 0.0) || !std::isfinite(p.strike))
        throw Error(Errc::InvalidSpec, "strike must be positive");
    if (!p.weights.empty()) {
        if (p.weights.size() != p.dim) throw Error(Errc::DimensionMismatch, "weights length");
        for (double w : p.weights)
            if (!(w > 0.0)) throw Error(Errc::InvalidSpec, "basket weights must be positive");
    }
    if (!(p.cash > 0.0)) throw Error(Errc::InvalidSpec, "cash amount must be positive");
}

ScalingRule scaling_rule(const PayoffSpec& p, const ModelSpec& m) {
    validate(p);
    if (m.dim() != p.dim) throw Error(Errc::DimensionMismatch, "payoff and model dimensions differ");
    ScalingRule s;
    s.x0.resize(p.dim);
    for (std::size_t j = 0; j < p.dim; ++j) {
        double ratio = m.spot[j] / p.strike;
        if (p.kind == PayoffKind::BasketPut)
            ratio *= p.weights.empty() ? 1.0 / static_cast<double>(p.dim) : p.weights[j];
        s.x0[j] = std::log(ratio);
    }
    s.unscale = p.kind == PayoffKind::CONCall ? p.cash : p.strike;
    return s;
}

cplx log_payoff_transform(const PayoffSpec& p, const CVec& z) {
    if (z.size() != p.dim) throw Error(Errc::DimensionMismatch, "payoff transform argument");
    const cplx i(0.0, 1.0);
    cplx sum = 0.0;
    for (const cplx& zj : z) sum += zj;

    switch (p.kind) {
        case PayoffKind::BasketPut: {
            cplx acc = -log_gamma_complex(-i * sum + 2.0);
            for (const cplx& zj : z) acc += log_gamma_complex(-i * zj);
            return acc;
        }
        case PayoffKind::SpreadCall: {
            cplx acc = log_gamma_complex(i * sum - 1.0) - log_gamma_complex(i * z[0] + 1.0);
            for (std::size_t j = 1; j < z.size(); ++j) acc += log_gamma_complex(-i * z[j]);
            return acc;
        }
        case PayoffKind::CallOnMin: {
            cplx acc = -std::log(i * sum - 1.0);
            for (const cplx& zj : z) acc -= std::log(i * zj);
            return acc;
        }
        case PayoffKind::CONCall: {
            cplx acc = 0.0;
            for (const cplx& zj : z) acc -= std::log(i * zj);
            return acc;
        }
    }
    return 0.0;
}

cplx payoff_transform(const PayoffSpec& p, const CVec& z) {
    Vec R(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) R[j] = z[j].imag();
    if (!payoff_strip(p, R).inside) throw Error(Errc::StripViolation, "Im z outside the payoff strip");
    return std::exp(log_payoff_transform(p, z));
}

double payoff_value(const PayoffSpec& p, const Vec& x) {
    if (x.size() != p.dim) throw Error(Errc::DimensionMismatch, "payoff argument");
    switch (p.kind) {
        case PayoffKind::BasketPut: {
            double s = 0.0;
            for (double xj : x) s += std::exp(xj);
            return std::max(1.0 - s, 0.0);
        }
        case PayoffKind::SpreadCall: {
            double s = std::exp(x[0]) - 1.0;
            for (std::size_t j = 1; j < x.size(); ++j) s -= std::exp(x[j]);
            return std::max(s, 0.0);
        }
        case PayoffKind::CallOnMin: {
            const double m = *std::min_element(x.begin(), x.end());
            return std::max(std::exp(m) - 1.0, 0.0);
        }
        case PayoffKind::CONCall: {
            for (double xj : x)
                if (!(xj > 0.0)) return 0.0;
            return 1.0;
        }
    }
    return 0.0;
}

StripCheck payoff_strip(const PayoffSpec& p, const Vec& R) {
    if (R.size() != p.dim) throw Error(Errc::DimensionMismatch, "damping vector length");
    double margin = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (double r : R) sum += r;
    switch (p.kind) {
        case PayoffKind::BasketPut:
            for (double r : R) margin = std::min(margin, r);
            break;
        case PayoffKind::SpreadCall:
            for (std::size_t j = 1; j < R.size(); ++j) margin = std::min(margin, R[j]);
            margin = std::min(margin, -1.0 - sum);
            break;
        case PayoffKind::CallOnMin:
            for (double r : R) margin = std::min(margin, -r);
            margin = std::min(margin, -1.0 - sum);
            break;
        case PayoffKind::CONCall:
            for (double r : R) margin = std::min(margin, -r);
            break;
    }
    return {margin > 0.0, margin};
}

}  // namespace fqmc
