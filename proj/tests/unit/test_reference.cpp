// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "fqmc/errors.hpp"
#include "fqmc/reference.hpp"

using namespace fqmc;

namespace {

struct Moments {
    double mean = 0.0, var = 0.0;
    std::size_t n = 0;
    [[nodiscard]] double se() const { return std::sqrt(var / static_cast<double>(n)); }
};

template <class F>
Moments sample(F&& draw, std::size_t n) {
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = draw();
        s += x;
        s2 += x * x;
    }
    Moments m;
    m.n = n;
    m.mean = s / n;
    m.var = s2 / n - m.mean * m.mean;
    return m;
}

}  // namespace

TEST_SUITE("reference") {
    TEST_CASE("gamma and inverse Gaussian moments") {
        for (double shape : {0.2, 1.0, 7.5}) {
            CounterRng rng(11, static_cast<std::uint64_t>(shape * 10));
            const Moments m = sample([&] { return sample_gamma(rng, shape); }, 200000);
            CHECK(std::abs(m.mean - shape) < 5.0 * m.se());
            CHECK(m.var == doctest::Approx(shape).epsilon(0.05));
        }
        CounterRng rng(3, 1);
        const double mu = 0.8, lam = 2.5;
        const Moments ig = sample([&] { return sample_inverse_gaussian(rng, mu, lam); }, 200000);
        CHECK(std::abs(ig.mean - mu) < 5.0 * ig.se());
        CHECK(ig.var == doctest::Approx(mu * mu * mu / lam).epsilon(0.05));
        const Moments z = sample([&] { return sample_normal(rng); }, 200000);
        CHECK(std::abs(z.mean) < 5.0 * z.se());
        CHECK(z.var == doctest::Approx(1.0).epsilon(0.02));
    }

    TEST_CASE("GIG mean against the integrated density") {
        struct P { double lambda, chi, psi; };
        for (const P& p : {P{1.0, 0.5, 2.0}, P{-2.5, 3.0, 0.7}, P{0.3, 0.01, 50.0}}) {
            auto dens = [&](double s) {  // over s = log x, with Jacobian x
                const double x = std::exp(s);
                return std::exp(p.lambda * s - 0.5 * (p.chi / x + p.psi * x));
            };
            const double z0 = oracle::simpson(dens, -30.0, 10.0, 1e-14, 256);
            const double z1 = oracle::simpson([&](double s) { return std::exp(s) * dens(s); }, -30.0, 10.0, 1e-14, 256);
            const GigSampler g(p.lambda, p.chi, p.psi);
            CHECK(g.mean() == doctest::Approx(z1 / z0).epsilon(1e-8));
            CounterRng rng(5, 9);
            const Moments m = sample([&] { return g(rng); }, 100000);
            CHECK(std::abs(m.mean - z1 / z0) < 5.0 * m.se());
        }
    }

    TEST_CASE("simulated terminal prices are martingales") {
        Matrix corr = Matrix::identity(2);
        corr(0, 1) = corr(1, 0) = 0.4;
        const std::vector<ModelSpec> models = {
            make_gbm({100.0, 50.0}, {0.2, 0.4}, 0.03, 1.0, corr),
            make_vg({100.0, 50.0}, {0.2, 0.4}, {-0.3, 0.1}, 0.2, 0.03, 1.0, corr),
            make_nig({100.0, 50.0}, 10.0, {-3.0, 1.0}, 0.2, 0.03, 1.0),
            make_gh({100.0, 50.0}, 12.0, {-3.0, 1.0}, 0.3, 1.0, 0.03, 1.0),
        };
        SimulationOptions opt;
        opt.enable_gig = true;
        for (const ModelSpec& m : models) {
            const std::size_t M = 200000;
            const PathBatch b = simulate_terminal(m, M, 17, opt);
            for (std::size_t j = 0; j < 2; ++j) {
                std::size_t i = 0;
                const Moments s = sample([&] { return std::exp(b.x[2 * (i++) + j]); }, M);
                const double target = m.spot[j] * std::exp(m.rate * m.maturity);
                CHECK(std::abs(s.mean - target) < 5.0 * s.se());
            }
        }
    }

    TEST_CASE("VG log-return variance") {
        const ModelSpec m = make_vg({100.0}, {0.25}, {-0.2}, 0.3, 0.0, 2.0);
        const PathBatch b = simulate_terminal(m, 400000, 4);
        std::size_t i = 0;
        const Moments s = sample([&] { return b.x[i++]; }, b.M);
        CHECK(s.var == doctest::Approx((0.25 * 0.25 + 0.2 * 0.2 * 0.3) * 2.0).epsilon(0.02));
    }

    TEST_CASE("physical MC put against Black-Scholes") {
        const ModelSpec m = make_gbm({100.0}, {0.2}, 0.01, 1.0);
        const PriceEstimate e = mc_price_physical(m, {PayoffKind::BasketPut, 95.0, {}, 1.0, 1}, 400000, 21);
        CHECK(std::abs(e.price - oracle::bs_put(100, 95, 0.2, 0.01, 1)) <= 1.5 * e.stat_error);
        CHECK(e.backend == Backend::PhysicalMC);
    }

    TEST_CASE("GH without the GIG sampler is refused") {
        const ModelSpec m = make_gh({100.0}, 12.0, {-3.0}, 0.3, 1.0, 0.0, 1.0);
        try {
            (void)simulate_terminal(m, 10, 1);
            FAIL("expected SubordinatorUnavailable");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::SubordinatorUnavailable);
        }
        CHECK_NOTHROW((void)simulate_terminal(make_nig({100.0}, 12.0, {-3.0}, 0.3, 0.0, 1.0), 10, 1));
    }
}
