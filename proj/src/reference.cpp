// SPDX-License-Identifier: MIT
#include "fqmc/reference.hpp"

#include <chrono>
#include <cmath>

namespace fqmc {

double sample_normal(CounterRng& rng) { return norm_icdf(rng.uniform()); }

double sample_gamma(CounterRng& rng, double shape) {
    if (!(shape > 0.0)) throw Error(Errc::DomainError, "gamma shape must be positive");
    if (shape < 1.0) {
        const double g = sample_gamma(rng, shape + 1.0);
        return g * std::pow(rng.uniform(), 1.0 / shape);
    }
    // Marsaglia-Tsang.
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        const double x = sample_normal(rng);
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        const double u = rng.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double sample_inverse_gaussian(CounterRng& rng, double mean, double shape) {
    if (!(mean > 0.0 && shape > 0.0)) throw Error(Errc::DomainError, "inverse Gaussian parameters must be positive");
    // Michael-Schucany-Haas.
    const double nu = sample_normal(rng);
    const double y = nu * nu;
    const double my = mean * y;
    const double x = mean + mean * my / (2.0 * shape) - mean / (2.0 * shape) * std::sqrt(4.0 * shape * my + my * my);
    return rng.uniform() <= mean / (mean + x) ? x : mean * mean / x;
}

// ===========================================================================
// Generalized inverse Gaussian: ratio of uniforms with mode shift
// ===========================================================================

GigSampler::GigSampler(double lambda, double chi, double psi) : lambda_(lambda), chi_(chi), psi_(psi) {
    if (!(chi > 0.0 && psi > 0.0)) throw Error(Errc::DomainError, "GIG needs chi > 0 and psi > 0");
    invert_ = lambda < 0.0;
    lam_ = std::abs(lambda);
    omega_ = std::sqrt(chi * psi);
    scale_ = std::sqrt(chi / psi);
    mode_ = ((lam_ - 1.0) + std::sqrt((lam_ - 1.0) * (lam_ - 1.0) + omega_ * omega_)) / omega_;

    // Bounds of v·√h on each side of the mode, by scan plus golden section.
    auto maximize = [](auto&& g, double lo, double hi) {
        constexpr int kScan = 400;
        double best = lo, best_v = -INFINITY;
        for (int k = 0; k <= kScan; ++k) {
            const double s = lo + (hi - lo) * k / kScan;
            const double v = g(s);
            if (v > best_v) { best_v = v; best = s; }
        }
        double a = std::max(lo, best - (hi - lo) / kScan), b = std::min(hi, best + (hi - lo) / kScan);
        constexpr double kInvPhi = 0.6180339887498949;
        for (int it = 0; it < 200 && b - a > 1e-14 * (1.0 + std::abs(a)); ++it) {
            const double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
            if (g(c) > g(d)) b = d; else a = c;
        }
        return std::max(best_v, g(0.5 * (a + b)));
    };
    const double m = mode_;
    const double span = std::log(1e3 * (1.0 + m) + 100.0 / omega_ + 100.0 * lam_);
    const double up = maximize([&](double s) { const double y = std::exp(s); return s + 0.5 * log_h(m + y); },
                               std::log(1e-12 * (1.0 + m)), span);
    vmax_ = 1.01 * std::exp(up);
    // y = -m·t with t = logistic(s).
    const double down = maximize(
        [&](double s) {
            const double t = 1.0 / (1.0 + std::exp(-s));
            return std::log(m * t) + 0.5 * log_h(m * (1.0 - t));
        },
        -30.0, 30.0);
    vmin_ = -1.01 * std::exp(down);
}

double GigSampler::log_h(double x) const {
    if (!(x > 0.0)) return -INFINITY;
    const double m = mode_;
    return (lam_ - 1.0) * std::log(x / m) - 0.5 * omega_ * (x + 1.0 / x - m - 1.0 / m);
}

double GigSampler::operator()(CounterRng& rng) const {
    for (;;) {
        const double u = rng.uniform();
        const double v = vmin_ + (vmax_ - vmin_) * rng.uniform();
        const double y = v / u + mode_;
        if (!(y > 0.0)) continue;
        if (2.0 * std::log(u) <= log_h(y)) return scale_ * (invert_ ? 1.0 / y : y);
    }
}

double GigSampler::mean() const {
    return scale_ * std::cyl_bessel_k(std::abs(lambda_ + 1.0), omega_) / std::cyl_bessel_k(std::abs(lambda_), omega_);
}

// ===========================================================================
// Terminal distribution
// ===========================================================================

TerminalSampler::TerminalSampler(const ModelSpec& m, Vec x0, const SimulationOptions& opt)
    : spec_(m), x0_(std::move(x0)) {
    const Model model(m);
    const std::size_t d = m.dim();
    if (x0_.size() != d) throw Error(Errc::DimensionMismatch, "initial log-coordinates");
    const double T = m.maturity;
    drift_.resize(d);
    for (std::size_t j = 0; j < d; ++j) drift_[j] = x0_[j] + (m.rate + model.drift()[j]) * T;

    switch (m.kind) {
        case ModelKind::GBM: {
            Matrix c = m.cov;
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) c(i, j) *= T;
            chol_ = cholesky(c);
            break;
        }
        case ModelKind::VG:
            chol_ = cholesky(m.cov);
            skew_ = m.theta;
            break;
        case ModelKind::NIG:
        case ModelKind::GH: {
            chol_ = cholesky(m.shape);
            skew_ = mat_vec(m.shape, m.beta);
            const double a = m.alpha * m.alpha - quad_form(m.shape, m.beta);
            const double dt = m.delta * T;
            const bool nig = m.kind == ModelKind::NIG || m.lambda == -0.5;
            if (nig) {
                ig_mean_ = dt / std::sqrt(a);
                ig_shape_ = dt * dt;
            } else if (opt.enable_gig) {
                gig_.emplace(m.lambda, dt * dt, a);
            } else {
                throw Error(Errc::SubordinatorUnavailable,
                            "GH with lambda != -1/2 needs the GIG sampler (enable_gig)");
            }
            break;
        }
    }
}

void TerminalSampler::draw(CounterRng& rng, double* x) const {
    const std::size_t d = dim();
    double w = 1.0;
    switch (spec_.kind) {
        case ModelKind::GBM: break;
        case ModelKind::VG: w = spec_.nu * sample_gamma(rng, spec_.maturity / spec_.nu); break;
        case ModelKind::NIG:
        case ModelKind::GH:
            w = gig_ ? (*gig_)(rng) : sample_inverse_gaussian(rng, ig_mean_, ig_shape_);
            break;
    }
    double zbuf[64];
    std::vector<double> zheap;
    double* z = zbuf;
    if (d > 64) {
        zheap.resize(d);
        z = zheap.data();
    }
    for (std::size_t j = 0; j < d; ++j) z[j] = sample_normal(rng);
    const double sw = std::sqrt(w);
    for (std::size_t i = 0; i < d; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k <= i; ++k) s += chol_(i, k) * z[k];
        x[i] = drift_[i] + sw * s + (skew_.empty() ? 0.0 : w * skew_[i]);
    }
}

PathBatch simulate_terminal(const ModelSpec& m, std::size_t M, std::uint64_t seed, const SimulationOptions& opt) {
    const TerminalSampler sampler(m, Model(m).log_spot(), opt);
    PathBatch b;
    b.M = M;
    b.d = m.dim();
    b.seed = seed;
    b.x.resize(M * b.d);
    for (std::size_t i = 0; i < M; ++i) {
        CounterRng rng(seed, i);
        sampler.draw(rng, b.x.data() + i * b.d);
    }
    return b;
}

PriceEstimate mc_price_physical(const ModelSpec& m, const PayoffSpec& p, std::size_t M, std::uint64_t seed,
                                const SimulationOptions& opt) {
    if (M < 2) throw Error(Errc::InvalidSpec, "MC needs at least two samples");
    const auto t0 = std::chrono::steady_clock::now();
    const ScalingRule sc = scaling_rule(p, m);
    const TerminalSampler sampler(m, sc.x0, opt);
    Vec x(m.dim());
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
        CounterRng rng(seed, i);
        sampler.draw(rng, x.data());
        const double v = payoff_value(p, x);
        const double delta = v - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (v - mean);
    }
    const double disc = std::exp(-m.rate * m.maturity) * sc.unscale;
    PriceEstimate e;
    e.backend = Backend::PhysicalMC;
    e.price = disc * mean;
    e.stat_error = disc * 1.96 * std::sqrt(m2 / static_cast<double>(M - 1)) / std::sqrt(static_cast<double>(M));
    e.rel_stat_error = e.price != 0.0 ? e.stat_error / std::abs(e.price) : 0.0;
    e.N = M;
    e.S = 1;
    e.seed = seed;
    e.transform = "none";
    e.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return e;
}

}  // namespace fqmc
