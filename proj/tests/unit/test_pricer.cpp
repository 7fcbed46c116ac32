// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "fqmc/errors.hpp"
#include "fqmc/pricer.hpp"

using namespace fqmc;

namespace {

// E[(e^X - k)^+] for X ~ N(m, s²).
double lognormal_call(double m, double s, double k) {
    return std::exp(m + 0.5 * s * s) * oracle::norm_cdf((m + s * s - std::log(k)) / s) -
           k * oracle::norm_cdf((m - std::log(k)) / s);
}

// Call on the minimum of two correlated GBMs: condition on the first factor,
// then (min(a, S2) - K)^+ = (S2 - K)^+ - (S2 - a)^+ for a > K.
double call_on_min_2d(double s1, double s2, double k, double sig1, double sig2, double rho, double r, double T) {
    const double sq = std::sqrt(T);
    auto inner = [&](double z) {
        const double a = s1 * std::exp((r - 0.5 * sig1 * sig1) * T + sig1 * sq * z);
        if (a <= k) return 0.0;
        const double m = std::log(s2) + (r - 0.5 * sig2 * sig2) * T + sig2 * sq * rho * z;
        const double s = sig2 * sq * std::sqrt(1.0 - rho * rho);
        const double v = lognormal_call(m, s, k) - lognormal_call(m, s, a);
        return v * std::exp(-0.5 * z * z) / std::sqrt(2.0 * oracle::kPi);
    };
    const double z_k = (std::log(k / s1) - (r - 0.5 * sig1 * sig1) * T) / (sig1 * sq);
    return std::exp(-r * T) * oracle::simpson(inner, z_k, 12.0, 1e-13, 128);
}

void check_agree(const PriceEstimate& a, const PriceEstimate& b) {
    const double combined = std::sqrt(a.stat_error * a.stat_error + b.stat_error * b.stat_error);
    CHECK(std::abs(a.price - b.price) <= 3.0 * combined);
}

}  // namespace

TEST_SUITE("pricer") {
    TEST_CASE("1D put and digital against closed forms") {
        const ModelSpec m = make_gbm({100.0}, {0.2}, 0.0, 1.0);
        QmcConfig q;
        q.N = 1 << 12;
        q.S = 30;
        const PriceEstimate put = price_fourier_rqmc(m, {PayoffKind::BasketPut, 100.0, {}, 1.0, 1}, {}, {}, q);
        CHECK(std::abs(put.price / oracle::bs_put(100, 100, 0.2, 0, 1) - 1.0) < 1e-4);

        const ModelSpec m2 = make_gbm({100.0}, {0.25}, 0.03, 0.5);
        const PriceEstimate con = price_fourier_rqmc(m2, {PayoffKind::CONCall, 105.0, {}, 1.0, 1}, {}, {}, q);
        CHECK(std::abs(con.price / oracle::digital_call(100, 105, 0.25, 0.03, 0.5) - 1.0) < 1e-4);
        const PriceEstimate con5 = price_fourier_rqmc(m2, {PayoffKind::CONCall, 105.0, {}, 5.0, 1}, {}, {}, q);
        CHECK(con5.price == doctest::Approx(5.0 * con.price).epsilon(1e-12));
    }

    TEST_CASE("2D call on min against the conditional oracle") {
        Matrix corr = Matrix::identity(2);
        corr(0, 1) = corr(1, 0) = 0.7;
        const ModelSpec m = make_gbm({100.0, 95.0}, {0.2, 0.3}, 0.02, 1.0, corr);
        const PayoffSpec p{PayoffKind::CallOnMin, 90.0, {}, 1.0, 2};
        const double ref = call_on_min_2d(100.0, 95.0, 90.0, 0.2, 0.3, 0.7, 0.02, 1.0);
        QmcConfig q;
        q.N = 1 << 12;
        const PriceEstimate rq = price_fourier_rqmc(m, p, {}, {}, q);
        CHECK(std::abs(rq.price - ref) <= std::max(3.0 * rq.stat_error, 1e-4 * ref));
        const PriceEstimate tp = price_tp_laguerre(m, p, {}, 64);
        CHECK(std::abs(tp.price / ref - 1.0) < 1e-6);
    }

    TEST_CASE("backends and transforms agree") {
        const ModelSpec m = make_vg({100.0, 100.0}, {0.2, 0.3}, {-0.1, -0.2}, 0.1, 0.0, 1.0);
        const PayoffSpec p{PayoffKind::CallOnMin, 100.0, {}, 1.0, 2};
        QmcConfig q;
        q.N = 1 << 11;
        const PriceEstimate a = price_fourier_rqmc(m, p, {}, {}, q);
        const PriceEstimate b = price_fourier_mc(m, p, {}, {}, 1 << 18, 7);
        check_agree(a, b);
        TransformOptions o;
        o.cov_scale = 1.5;
        const PriceEstimate c = price_fourier_rqmc(m, p, {}, default_transform(m, o), q);
        check_agree(a, c);
        const PriceEstimate tp = price_tp_laguerre(m, p, {}, 48);
        CHECK(std::abs(tp.price - a.price) <= 3.0 * a.stat_error + 1e-6 * a.price);
        const PriceEstimate other_R = price_fourier_rqmc(m, p, Vec{-2.0, -2.0}, {}, q);
        check_agree(a, other_R);
    }

    TEST_CASE("seeded runs replay exactly") {
        const ModelSpec m = make_nig({100.0, 100.0}, 10.0, {-3.0, -3.0}, 0.2, 0.0, 1.0);
        const PayoffSpec p{PayoffKind::BasketPut, 100.0, {}, 1.0, 2};
        QmcConfig q;
        q.N = 256;
        q.S = 8;
        const auto a = price_fourier_rqmc(m, p, {}, {}, q), b = price_fourier_rqmc(m, p, {}, {}, q);
        CHECK(a.price == b.price);
        CHECK(a.stat_error == b.stat_error);
        q.seed += 1;
        CHECK(price_fourier_rqmc(m, p, {}, {}, q).price != a.price);
    }

    TEST_CASE("Gauss-Laguerre moments") {
        for (std::size_t n : {4u, 10u, 32u}) {
            const LaguerreRule& r = gauss_laguerre(n);
            REQUIRE(r.nodes.size() == n);
            double fact = 1.0;
            for (std::size_t j = 0; j < std::min<std::size_t>(2 * n, 20); ++j) {
                if (j > 0) fact *= static_cast<double>(j);
                double s = 0.0;
                for (std::size_t k = 0; k < n; ++k) s += r.weights[k] * std::exp(-r.nodes[k]) * std::pow(r.nodes[k], j);
                CHECK(s == doctest::Approx(fact).epsilon(1e-10));
            }
        }
    }

    TEST_CASE("3D basket put: all Fourier backends agree") {
        Matrix corr(3, 0.4);
        for (std::size_t i = 0; i < 3; ++i) corr(i, i) = 1.0;
        const ModelSpec m = make_gbm({100.0, 110.0, 90.0}, {0.2, 0.25, 0.3}, 0.01, 1.0, corr);
        const PayoffSpec p{PayoffKind::BasketPut, 100.0, {}, 1.0, 3};
        QmcConfig q;
        q.N = 1 << 12;
        const PriceEstimate a = price_fourier_rqmc(m, p, {}, {}, q);
        const PriceEstimate b = price_fourier_mc(m, p, {}, {}, 1 << 18, 3);
        const PriceEstimate c = price_tp_laguerre(m, p, {}, 24);
        check_agree(a, b);
        CHECK(std::abs(c.price - a.price) <= 3.0 * a.stat_error);
        CHECK(std::abs(c.price - b.price) <= 3.0 * b.stat_error);
    }

    TEST_CASE("tensor rule integrates a Gaussian and rejects d > 5") {
        const double g1 = tp_laguerre_integrate([](const Vec& y) { return std::exp(-y[0] * y[0]); }, 1, 32);
        CHECK(std::abs(g1 - std::sqrt(oracle::kPi)) < 1e-8);
        const double v = tp_laguerre_integrate([](const Vec& y) { return std::exp(-y[0] * y[0] - 2.0 * y[1] * y[1]); }, 2, 48);
        CHECK(v == doctest::Approx(oracle::kPi / std::sqrt(2.0)).epsilon(1e-8));
        const ModelSpec m = make_gbm(Vec(6, 100.0), Vec(6, 0.2), 0.0, 1.0);
        try {
            (void)price_tp_laguerre(m, {PayoffKind::BasketPut, 100.0, {}, 1.0, 6}, {}, 4);
            FAIL("expected DimensionTooLarge");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::DimensionTooLarge);
        }
    }

    TEST_CASE("backend names") {
        for (auto b : {Backend::RQMC, Backend::MCFourier, Backend::TPLaguerre, Backend::PhysicalMC})
            CHECK(parse_backend(backend_name(b)) == b);
        CHECK_THROWS_AS((void)parse_backend("simpson"), Error);
    }
}
