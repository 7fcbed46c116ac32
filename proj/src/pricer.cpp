// SPDX-License-Identifier: MIT
#include "fqmc/pricer.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <mutex>

#include "fqmc/qmc.hpp"

namespace fqmc {

const char* backend_name(Backend b) noexcept {
    switch (b) {
        case Backend::RQMC: return "rqmc";
        case Backend::MCFourier: return "mcfourier";
        case Backend::TPLaguerre: return "tplaguerre";
        case Backend::PhysicalMC: return "physicalmc";
    }
    return "?";
}

Backend parse_backend(const std::string& s) {
    for (Backend b : {Backend::RQMC, Backend::MCFourier, Backend::TPLaguerre, Backend::PhysicalMC})
        if (s == backend_name(b)) return b;
    throw Error(Errc::InvalidSpec, "unknown backend '" + s + "' (rqmc, mcfourier, tplaguerre, physicalmc)");
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

FourierIntegrand assemble(const ModelSpec& m, const PayoffSpec& p, std::optional<Vec> R,
                          std::optional<TransformSpec> t) {
    Vec r = R ? std::move(*R) : optimize_damping(m, p).R;
    TransformSpec ts = t ? std::move(*t) : default_transform(m);
    return FourierIntegrand(m, p, std::move(r), std::move(ts));
}

void finish(PriceEstimate& e, double unscale) {
    e.price *= unscale;
    e.stat_error *= unscale;
    e.rel_stat_error = e.price != 0.0 ? e.stat_error / std::abs(e.price) : 0.0;
}

}  // namespace

PriceEstimate price_fourier_rqmc(const ModelSpec& m, const PayoffSpec& p, std::optional<Vec> R,
                                 std::optional<TransformSpec> t, const QmcConfig& cfg) {
    const auto t0 = Clock::now();
    const FourierIntegrand f = assemble(m, p, std::move(R), std::move(t));
    const RQMCEstimate q =
        rqmc_estimate([&f](const double* u) { return f(u); }, f.udim(), cfg.N, cfg.S, cfg.seed, cfg.c_alpha);
    PriceEstimate e;
    e.backend = Backend::RQMC;
    e.price = q.value;
    e.stat_error = q.std_error;
    e.c_alpha = cfg.c_alpha;
    e.N = cfg.N;
    e.S = cfg.S;
    e.seed = cfg.seed;
    e.R = f.damping();
    e.transform = describe(f.transform());
    finish(e, f.scaling().unscale);
    e.wall_ms = elapsed_ms(t0);
    return e;
}

PriceEstimate price_fourier_mc(const ModelSpec& m, const PayoffSpec& p, std::optional<Vec> R,
                               std::optional<TransformSpec> t, std::size_t n_total, std::uint64_t seed) {
    if (n_total < 2) throw Error(Errc::InvalidSpec, "MC needs at least two samples");
    const auto t0 = Clock::now();
    const FourierIntegrand f = assemble(m, p, std::move(R), std::move(t));
    const std::size_t k = f.udim();
    Vec u(k);
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < n_total; ++i) {
        CounterRng rng(seed, i);
        for (std::size_t j = 0; j < k; ++j) u[j] = rng.uniform();
        const double v = f(u.data());
        if (!std::isfinite(v)) throw Error(Errc::NonFiniteIntegrand, "non-finite MC integrand value");
        const double delta = v - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (v - mean);
    }
    const double sd = std::sqrt(m2 / static_cast<double>(n_total - 1));
    PriceEstimate e;
    e.backend = Backend::MCFourier;
    e.price = mean;
    e.stat_error = 1.96 * sd / std::sqrt(static_cast<double>(n_total));
    e.N = n_total;
    e.S = 1;
    e.seed = seed;
    e.R = f.damping();
    e.transform = describe(f.transform());
    finish(e, f.scaling().unscale);
    e.wall_ms = elapsed_ms(t0);
    return e;
}

// ===========================================================================
// Gauss-Laguerre
// ===========================================================================

const LaguerreRule& gauss_laguerre(std::size_t n) {
    static std::mutex mu;
    static std::map<std::size_t, LaguerreRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
    if (n == 0) throw Error(Errc::InvalidSpec, "Gauss-Laguerre needs at least one node");

    LaguerreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double nn = static_cast<double>(n);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0) z = 3.0 / (1.0 + 2.4 * nn);
        else if (i == 1) z += 15.0 / (1.0 + 2.5 * nn);
        else {
            const double ai = static_cast<double>(i - 1);
            z += (1.0 + 2.55 * ai) / (1.9 * ai) * (z - rule.nodes[i - 2]);
        }
        double p1 = 0.0, p2 = 0.0, pp = 0.0;
        int it = 0;
        double step = 0.0;
        for (; it < 100; ++it) {
            p1 = 1.0;
            p2 = 0.0;
            for (std::size_t j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                const double jj = static_cast<double>(j);
                p1 = ((2.0 * jj - 1.0 - z) * p2 - (jj - 1.0) * p3) / jj;
            }
            pp = nn * (p1 - p2) / z;
            const double z1 = z;
            z = z1 - p1 / pp;
            step = std::abs(z - z1);
            if (step <= 1e-15 * z) break;
        }
        if (it == 100 && step > 1e-12 * z) throw Error(Errc::NoConvergence, "Gauss-Laguerre node iteration");
        // Recompute L'_n at the converged node.
        p1 = 1.0;
        p2 = 0.0;
        for (std::size_t j = 1; j <= n; ++j) {
            const double p3 = p2;
            p2 = p1;
            const double jj = static_cast<double>(j);
            p1 = ((2.0 * jj - 1.0 - z) * p2 - (jj - 1.0) * p3) / jj;
        }
        pp = nn * (p1 - p2) / z;
        rule.nodes[i] = z;
        rule.weights[i] = std::exp(z - std::log(z) - 2.0 * std::log(std::abs(pp)));
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

Vec laguerre_axis_scales(const std::function<double(const Vec&)>& f, std::size_t d, std::size_t n) {
    const LaguerreRule& rule = gauss_laguerre(n);
    const double x_max = rule.nodes.back();
    const double f0 = std::abs(f(Vec(d, 0.0)));
    Vec scales(d, 1.0);
    for (std::size_t j = 0; j < d; ++j) {
        double cut = 0.0;
        for (double sgn : {-1.0, 1.0}) {
            double y = 0.5;
            Vec pt(d, 0.0);
            for (int k = 0; k < 200; ++k, y *= 1.25) {
                pt[j] = sgn * y;
                if (std::abs(f(pt)) < 1e-16 * f0) break;
            }
            cut = std::max(cut, y);
        }
        scales[j] = cut / x_max;
    }
    return scales;
}

double tp_laguerre_integrate(const std::function<double(const Vec&)>& f, std::size_t d, std::size_t n,
                             Vec scales) {
    if (d == 0) throw Error(Errc::InvalidSpec, "dimension must be at least 1");
    if (scales.empty()) scales = laguerre_axis_scales(f, d, n);
    if (scales.size() != d) throw Error(Errc::DimensionMismatch, "axis scale count");
    const LaguerreRule& rule = gauss_laguerre(n);

    std::vector<std::size_t> idx(d, 0);
    Vec y(d);
    double total = 0.0;
    for (;;) {
        double w = 1.0;
        for (std::size_t j = 0; j < d; ++j) w *= rule.weights[idx[j]] * scales[j];
        double folded = 0.0;
        for (unsigned mask = 0; mask < (1u << d); ++mask) {
            for (std::size_t j = 0; j < d; ++j)
                y[j] = ((mask >> j) & 1u ? -1.0 : 1.0) * scales[j] * rule.nodes[idx[j]];
            folded += f(y);
        }
        total += w * folded;
        std::size_t j = 0;
        while (j < d && ++idx[j] == n) idx[j++] = 0;
        if (j == d) break;
    }
    return total;
}

PriceEstimate price_tp_laguerre(const ModelSpec& m, const PayoffSpec& p, std::optional<Vec> R,
                                std::size_t n_nodes) {
    if (m.dim() > 5) throw Error(Errc::DimensionTooLarge, "tensor-product Gauss-Laguerre is limited to d <= 5");
    const auto t0 = Clock::now();
    const FourierIntegrand f = assemble(m, p, std::move(R), default_transform(m));
    const double v = tp_laguerre_integrate([&f](const Vec& y) { return f.g(y); }, m.dim(), n_nodes);
    PriceEstimate e;
    e.backend = Backend::TPLaguerre;
    e.price = v;
    e.N = static_cast<std::size_t>(std::pow(2.0 * static_cast<double>(n_nodes), static_cast<double>(m.dim())));
    e.S = 1;
    e.R = f.damping();
    e.transform = "none";
    finish(e, f.scaling().unscale);
    e.wall_ms = elapsed_ms(t0);
    return e;
}

}  // namespace fqmc
