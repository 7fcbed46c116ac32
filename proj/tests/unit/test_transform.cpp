// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "fqmc/errors.hpp"
#include "fqmc/qmc.hpp"
#include "fqmc/transform.hpp"

using namespace fqmc;

namespace {

Matrix cov2(double a, double b, double c) {
    Matrix m(2);
    m(0, 0) = a;
    m(1, 1) = b;
    m(0, 1) = m(1, 0) = c;
    return m;
}

}  // namespace

TEST_SUITE("transform") {
    TEST_CASE("critical parameters for single-asset models") {
        const auto gbm = default_transform(make_gbm({100.0}, {0.2}, 0.0, 1.0));
        CHECK(gbm.family == TransformFamily::GaussianProduct);
        CHECK(gbm.sigma[0] == doctest::Approx(5.0).epsilon(1e-15));
        const auto gh = default_transform(make_gh({100.0}, 20.0, {-3.0}, 0.2, 1.0, 0.0, 1.0));
        CHECK(gh.family == TransformFamily::LaplaceProduct);
        CHECK(gh.sigma[0] == doctest::Approx(5.0).epsilon(1e-15));
        const auto vg = default_transform(make_vg({100.0}, {0.2}, {-0.3}, 0.1, 0.0, 1.0));
        CHECK(vg.family == TransformFamily::StudentProduct);
        CHECK(vg.nu == doctest::Approx(19.0).epsilon(1e-15));
        CHECK(std::abs(vg.sigma[0] - 5.87) <= 0.01);
        const auto vg2 = default_transform(make_vg({100.0}, {0.2}, {-0.3}, 0.2, 0.0, 1.0));
        CHECK(vg2.nu == doctest::Approx(9.0).epsilon(1e-15));
    }

    TEST_CASE("VG Student scale balances the characteristic function tail") {
        // |φ(y)|/ψ(y) tends to 1 as |y| grows when the scale sits on the critical value.
        const double nu_t = 19.0, nu = 0.1, s = 0.2, T = 1.0;
        const double st = vg_student_scale(nu, s, T, nu_t);
        for (double y : {1e6, 1e8}) {
            const double phi = std::abs(oracle::cf_vg({oracle::cplx(y, 0.0)}, {0.0}, 0.0, T, {{s * s}}, {0.0}, nu));
            const double ratio = phi / oracle::student_t_pdf(y, nu_t, st);
            CHECK(std::abs(std::log(ratio)) < (y < 1e7 ? 1e-4 : 1e-9));
        }
    }

    TEST_CASE("matrix and mixture rules") {
        Matrix corr = Matrix::identity(2);
        corr(0, 1) = corr(1, 0) = 0.7;
        const ModelSpec gbm = make_gbm({100.0, 100.0}, {0.2, 0.3}, 0.0, 2.0, corr);
        const auto t = default_transform(gbm);
        CHECK(t.family == TransformFamily::GaussianMatrix);
        const Matrix prod = t.cov * gbm.cov;
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t k = 0; k < 2; ++k) CHECK(std::abs(2.0 * prod(i, k) - (i == k ? 1.0 : 0.0)) < 1e-12);
        TransformOptions as_product;
        as_product.form = TransformForm::Product;
        const auto tp = default_transform(gbm, as_product);
        CHECK(tp.family == TransformFamily::GaussianProduct);
        CHECK(tp.sigma[1] == doctest::Approx(1.0 / (std::sqrt(2.0) * 0.3)));

        const ModelSpec nig = make_nig({100.0, 100.0}, 10.0, {-3.0, -3.0}, 0.2, 0.0, 1.0);
        const auto tn = default_transform(nig);
        CHECK(tn.family == TransformFamily::LaplaceMixture);
        CHECK(tn.cov(0, 0) == doctest::Approx(2.0 / 0.04));
        CHECK(tn.udim == 3);

        const ModelSpec vg = make_vg(Vec(6, 100.0), Vec(6, 0.4), Vec(6, -0.3), 0.1, 0.0, 1.0);
        const auto tv = default_transform(vg);
        CHECK(tv.family == TransformFamily::StudentMixture);
        CHECK(tv.nu == doctest::Approx(14.0));
        CHECK(tv.udim == 7);
        TransformOptions eps;
        eps.epsilon = 0.5;
        CHECK(default_transform(vg, eps).nu == doctest::Approx(13.5));
    }

    TEST_CASE("rule unavailable when 2T/nu <= d") {
        const ModelSpec vg = make_vg(Vec(5, 100.0), Vec(5, 0.2), Vec(5, -0.1), 0.5, 0.0, 1.0);
        try {
            (void)default_transform(vg);
            FAIL("expected RuleUnavailable");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::RuleUnavailable);
        }
        TransformOptions o;
        o.nu = 3.0;
        CHECK(default_transform(vg, o).nu == 3.0);
    }

    TEST_CASE("product densities match their closed forms and normalize") {
        const auto g = make_transform(TransformFamily::GaussianProduct, 1, {2.0}, {}, 0.0);
        const auto l = make_transform(TransformFamily::LaplaceProduct, 1, {1.5}, {}, 0.0);
        const auto s = make_transform(TransformFamily::StudentProduct, 1, {3.0}, {}, 4.5);
        for (double y : {-7.0, -0.3, 0.0, 2.0, 11.0}) {
            CHECK(proposal_pdf(g, {y}) == doctest::Approx(oracle::normal_pdf(y, 2.0)).epsilon(1e-14));
            CHECK(proposal_pdf(l, {y}) == doctest::Approx(oracle::laplace_pdf(y, 1.5)).epsilon(1e-14));
            CHECK(proposal_pdf(s, {y}) == doctest::Approx(oracle::student_t_pdf(y, 4.5, 3.0)).epsilon(1e-13));
        }
        auto mass = [](const TransformSpec& t) {
            return oracle::simpson([&](double x) { const double y = std::tan(x); return proposal_pdf(t, {y}) * (1 + y * y); },
                                   -oracle::kPi / 2 + 1e-9, oracle::kPi / 2 - 1e-9, 1e-12, 128);
        };
        CHECK(mass(g) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(mass(l) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(mass(s) == doctest::Approx(1.0).epsilon(1e-6));
    }

    TEST_CASE("multivariate densities") {
        const Matrix c = cov2(2.0, 1.0, 0.6);
        const Matrix ci = inverse_spd(c);
        const double det = 2.0 - 0.36;
        const auto gm = make_transform(TransformFamily::GaussianMatrix, 2, {}, c, 0.0);
        const auto st = make_transform(TransformFamily::StudentMixture, 2, {}, c, 5.0);
        const auto lm = make_transform(TransformFamily::LaplaceMixture, 2, {}, c, 0.0);
        for (const Vec& y : {Vec{0.3, -0.2}, Vec{2.0, 1.0}, Vec{-4.0, 3.0}}) {
            const double q = quad_form(ci, y);
            CHECK(proposal_pdf(gm, y) == doctest::Approx(std::exp(-0.5 * q) / (2 * oracle::kPi * std::sqrt(det))).epsilon(1e-13));
            const double nu = 5.0;
            const double t_pdf = std::exp(std::lgamma(0.5 * (nu + 2)) - std::lgamma(0.5 * nu)) / (nu * oracle::kPi * std::sqrt(det)) *
                                 std::pow(1 + q / nu, -0.5 * (nu + 2));
            CHECK(proposal_pdf(st, y) == doctest::Approx(t_pdf).epsilon(1e-12));
            // Laplace mixture: ∫ N(y; 0, wΣ̃) e^{-w} dw over s = log w.
            const double mix = oracle::simpson(
                [&](double s) {
                    const double w = std::exp(s);
                    return w * std::exp(-w - 0.5 * q / w) / (2 * oracle::kPi * w * std::sqrt(det));
                },
                -40.0, 6.0, 1e-15, 256);
            CHECK(proposal_pdf(lm, y) == doctest::Approx(mix).epsilon(1e-10));
        }
    }

    TEST_CASE("mapped points carry minus the log density") {
        const Matrix c = cov2(1.0, 3.0, -0.5);
        for (TransformFamily f : {TransformFamily::GaussianProduct, TransformFamily::LaplaceProduct,
                                  TransformFamily::StudentProduct, TransformFamily::GaussianMatrix,
                                  TransformFamily::LaplaceMixture, TransformFamily::StudentMixture}) {
            const auto t = make_transform(f, 2, {1.5, 0.5}, c, 7.0);
            for (const Vec& u : {Vec{0.2, 0.7, 0.4}, Vec{0.999, 0.01, 0.9}, Vec{0.5, 0.3, 0.05}}) {
                const MappedPoint p = map_to_reals(t, u.data());
                CHECK(p.log_weight == doctest::Approx(-proposal_log_pdf(t, p.y)).epsilon(1e-12));
            }
        }
        const auto g = make_transform(TransformFamily::GaussianProduct, 1, {4.0}, {}, 0.0);
        CHECK(oracle::norm_cdf(map_to_reals(g, Vec{0.8}).y[0] / 4.0) == doctest::Approx(0.8).epsilon(1e-14));
    }

    TEST_CASE("mixture maps reproduce the proposal covariance") {
        const Matrix c = cov2(1.0, 2.0, 0.8);
        const std::size_t n = 1 << 16;
        for (TransformFamily f : {TransformFamily::LaplaceMixture, TransformFamily::StudentMixture}) {
            const double nu = 9.0;
            const auto t = make_transform(f, 2, {}, c, nu);
            const auto pts = sobol_points(3, n);
            double s00 = 0, s11 = 0, s01 = 0;
            for (std::size_t i = 1; i < n; ++i) {
                const MappedPoint p = map_to_reals(t, &pts[3 * i]);
                s00 += p.y[0] * p.y[0];
                s11 += p.y[1] * p.y[1];
                s01 += p.y[0] * p.y[1];
            }
            const double k = f == TransformFamily::StudentMixture ? nu / (nu - 2.0) : 1.0;
            CHECK(s00 / (n - 1) == doctest::Approx(k * 1.0).epsilon(2e-2));
            CHECK(s11 / (n - 1) == doctest::Approx(k * 2.0).epsilon(2e-2));
            CHECK(s01 / (n - 1) == doctest::Approx(k * 0.8).epsilon(3e-2));
        }
    }

    TEST_CASE("closed-form mixture densities equal the mixture integrals") {
        for (std::size_t d : {1u, 2u, 3u}) {
            Matrix c = Matrix::identity(d);
            for (std::size_t i = 0; i + 1 < d; ++i) c(i, i + 1) = c(i + 1, i) = 0.3;
            CHECK(mixture_identity_check(make_transform(TransformFamily::LaplaceMixture, d, {}, c, 0.0)) <= 1e-8);
            CHECK(mixture_identity_check(make_transform(TransformFamily::StudentMixture, d, {}, c, 6.5)) <= 1e-8);
        }
    }

    TEST_CASE("spectral and Cholesky factors give the same density") {
        const Matrix c = cov2(2.0, 1.0, 0.6);
        const auto a = make_transform(TransformFamily::GaussianMatrix, 2, {}, c, 0.0, FactorMode::Cholesky);
        const auto b = make_transform(TransformFamily::GaussianMatrix, 2, {}, c, 0.0, FactorMode::Spectral);
        CHECK(max_abs_diff(a.factor * transpose(a.factor), b.factor * transpose(b.factor)) < 1e-13);
    }

    TEST_CASE("names and invalid parameters") {
        for (auto f : {TransformFamily::GaussianProduct, TransformFamily::StudentMixture})
            CHECK(parse_family(family_name(f)) == f);
        CHECK(parse_form("matrix") == TransformForm::Matrix);
        CHECK_THROWS_AS((void)parse_form("diag"), Error);
        CHECK_THROWS_AS((void)make_transform(TransformFamily::GaussianProduct, 1, {-1.0}, {}, 0.0), Error);
        CHECK_THROWS_AS((void)make_transform(TransformFamily::StudentProduct, 1, {1.0}, {}, 0.0), Error);
        CHECK_THROWS_AS((void)make_transform(TransformFamily::GaussianMatrix, 2, {}, cov2(1, 1, 2), 0.0), Error);
    }
}
