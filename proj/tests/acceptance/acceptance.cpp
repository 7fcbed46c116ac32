// SPDX-License-Identifier: MIT
//
// Acceptance checks. Prints one [PASS]/[FAIL] line per criterion and exits
// nonzero when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "fqmc/bench.hpp"
#include "fqmc/damping.hpp"
#include "fqmc/errors.hpp"
#include "fqmc/pricer.hpp"
#include "fqmc/qmc.hpp"
#include "fqmc/reference.hpp"

using namespace fqmc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

int failures = 0;

void run(const char* id, const std::function<Outcome()>& check) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %-22s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
}

ModelSpec gbm_1d() { return make_gbm({100.0}, {0.2}, 0.0, 1.0); }

PayoffSpec payoff(PayoffKind k, std::size_t d, double strike = 100.0) {
    PayoffSpec p;
    p.kind = k;
    p.dim = d;
    p.strike = strike;
    return p;
}

QmcConfig qmc(std::size_t N, std::size_t S = 30, std::uint64_t seed = kDefaultSeed) {
    QmcConfig q;
    q.N = N;
    q.S = S;
    q.seed = seed;
    return q;
}

PriceEstimate rqmc_instance(const Instance& inst, std::size_t N, std::size_t S = 30) {
    return price_fourier_rqmc(inst.model, inst.payoff, inst.damping, default_transform(inst.model, inst.transform),
                              qmc(N, S));
}

Outcome damping_anchor() {
    const auto t0 = Clock::now();
    const DampingVector r = optimize_damping(gbm_1d(), payoff(PayoffKind::BasketPut, 1));
    const double secs = seconds_since(t0);
    const bool ok = r.R[0] >= 6.48 && r.R[0] <= 6.68 && secs < 1.0;
    return {ok, fmt("R=%.5f in [6.48, 6.68], optimizer %.1f ms", r.R[0], 1e3 * secs)};
}

Outcome price_oracle() {
    const double bs = oracle::bs_put(100.0, 100.0, 0.2, 0.0, 1.0);
    const PriceEstimate put = price_fourier_rqmc(gbm_1d(), payoff(PayoffKind::BasketPut, 1), {}, {}, qmc(1 << 12));
    const double e_put = std::abs(put.price / bs - 1.0);
    const double dig = oracle::digital_call(100.0, 100.0, 0.2, 0.0, 1.0);
    const PriceEstimate con = price_fourier_rqmc(gbm_1d(), payoff(PayoffKind::CONCall, 1), {}, {}, qmc(1 << 12));
    const double e_con = std::abs(con.price / dig - 1.0);
    return {e_put <= 1e-4 && e_con <= 1e-4,
            fmt("put %.8f vs BS %.8f (rel %.1e); CON %.8f vs N(d2) %.8f (rel %.1e)", put.price, bs, e_put, con.price,
                dig, e_con)};
}

Outcome transform_rules() {
    const TransformSpec g = default_transform(find_instance("fig4_call_gbm_1d_sigma5").model);
    const TransformSpec h = default_transform(find_instance("fig5_call_gh_1d_sigma5").model);
    const TransformSpec v = default_transform(find_instance("fig6_call_vg_1d_sigma587").model);
    const bool ok = g.sigma[0] == 5.0 && std::abs(h.sigma[0] - 5.0) < 1e-12 && v.nu == 19.0 &&
                    std::abs(v.sigma[0] - 5.87) <= 0.01;
    return {ok, fmt("GBM sigma=%.12g, GH sigma=%.12g, VG nu=%.12g sigma=%.5f", g.sigma[0], h.sigma[0], v.nu,
                    v.sigma[0])};
}

Outcome boundary_growth() {
    auto rel = [](const char* id) {
        const PriceEstimate e = rqmc_instance(find_instance(id), 1 << 13);
        return e.rel_stat_error;
    };
    const double g1 = rel("fig4_call_gbm_1d_sigma1"), g5 = rel("fig4_call_gbm_1d_sigma5");
    const double h1 = rel("fig5_call_gh_1d_sigma1"), h5 = rel("fig5_call_gh_1d_sigma5");
    return {g1 >= 30.0 * g5 && h1 >= 100.0 * h5,
            fmt("GBM %.2e vs %.2e (x%.0f, need 30); GH %.2e vs %.2e (x%.0f, need 100)", g1, g5, g1 / g5, h1, h5,
                h1 / h5)};
}

Outcome convergence_slopes() {
    auto slope = [](const char* id, Backend b, int hi, std::size_t S) {
        const Instance inst = find_instance(id);
        return run_convergence(inst, b, pow2_grid(6, hi), S, kDefaultSeed, compute_reference(inst)).slope;
    };
    const double s1 = slope("fig4_call_gbm_1d_sigma5", Backend::RQMC, 13, 30);
    const double s2 = slope("fig3_com_gbm_2d_rho0", Backend::RQMC, 13, 30);
    const double mc = slope("fig1_put_gbm_1d", Backend::MCFourier, 13, 30);
    const double multi = slope("fig3b_com_gbm_2d_rho07_multivariate", Backend::RQMC, 13, 30);
    const double uni = slope("fig3b_com_gbm_2d_rho07_univariate", Backend::RQMC, 13, 30);
    const bool ok = s1 <= -0.9 && s2 <= -0.9 && std::abs(mc + 0.5) <= 0.15 && multi <= uni - 0.3;
    return {ok, fmt("1D %.3f, 2D %.3f, MC-Fourier %.3f, rho=0.7 multivariate %.3f vs univariate %.3f", s1, s2, mc,
                    multi, uni)};
}

Outcome cross_method_parity() {
    Matrix corr3(3, 0.3), corr2(2, 0.3);
    for (std::size_t i = 0; i < 3; ++i) corr3(i, i) = 1.0;
    for (std::size_t i = 0; i < 2; ++i) corr2(i, i) = 1.0;
    struct Cell {
        const char* name;
        ModelSpec m;
        PayoffSpec p;
    };
    const std::vector<Cell> cells = {
        {"gbm-put3", make_gbm(Vec(3, 100.0), Vec(3, 0.2), 0.0, 1.0, corr3), payoff(PayoffKind::BasketPut, 3)},
        {"gbm-com2", make_gbm(Vec(2, 100.0), Vec(2, 0.2), 0.0, 1.0, corr2), payoff(PayoffKind::CallOnMin, 2)},
        {"vg-put3", make_vg(Vec(3, 100.0), Vec(3, 0.4), Vec(3, -0.3), 0.2, 0.0, 1.0, corr3),
         payoff(PayoffKind::BasketPut, 3)},
        {"vg-com2", make_vg(Vec(2, 100.0), Vec(2, 0.4), Vec(2, -0.3), 0.2, 0.0, 1.0, corr2),
         payoff(PayoffKind::CallOnMin, 2)},
        {"nig-put3", make_nig(Vec(3, 100.0), 10.0, Vec(3, -3.0), 0.2, 0.0, 1.0), payoff(PayoffKind::BasketPut, 3)},
        {"nig-com2", make_nig(Vec(2, 100.0), 10.0, Vec(2, -3.0), 0.2, 0.0, 1.0), payoff(PayoffKind::CallOnMin, 2)},
    };
    bool ok = true;
    std::string detail;
    for (const Cell& c : cells) {
        const PriceEstimate f = price_fourier_rqmc(c.m, c.p, {}, {}, qmc(1 << 12));
        const PriceEstimate mc = mc_price_physical(c.m, c.p, 1'000'000);
        const double combined = std::hypot(f.stat_error, mc.stat_error);
        const double z = std::abs(f.price - mc.price) / combined;
        ok = ok && z <= 1.0;
        detail += fmt("%s %.4f/%.4f (%.2f) ", c.name, f.price, mc.price, z);
    }
    return {ok, detail + "[|diff|/combined CI]"};
}

Outcome mixture_identities() {
    double worst_l = 0.0, worst_s = 0.0;
    for (const char* id : {"fig8_put_nig_3d", "appI_put_nig_4d", "fig9_con_gh_d2"}) {
        TransformOptions o;
        o.form = TransformForm::Matrix;
        worst_l = std::max(worst_l, mixture_identity_check(default_transform(find_instance(id).model, o)));
    }
    for (const char* id : {"fig7_con_vg_6d", "appI_put_vg_4d", "fig9_con_vg_d2"})
        worst_s = std::max(worst_s, mixture_identity_check(default_transform(find_instance(id).model)));
    return {worst_l <= 1e-8 && worst_s <= 1e-8, fmt("Laplace max err %.2e, Student max err %.2e", worst_l, worst_s)};
}

Outcome martingale() {
    CounterRng rng(kDefaultSeed, 0x6d61);
    auto U = [&](double a, double b) { return a + (b - a) * rng.uniform(); };
    double worst = 0.0;
    int draws = 0;
    for (ModelKind kind : {ModelKind::GBM, ModelKind::VG, ModelKind::NIG, ModelKind::GH}) {
        for (int n = 0; n < 50;) {
            const std::size_t d = 1 + static_cast<std::size_t>(rng.uniform() * 4.0);
            Vec spot(d), sigma(d), theta(d), beta(d);
            for (std::size_t j = 0; j < d; ++j) {
                spot[j] = U(10.0, 200.0);
                sigma[j] = U(0.05, 0.8);
                theta[j] = U(-0.5, 0.3);
            }
            Matrix corr(d, U(0.0, 0.6));
            for (std::size_t j = 0; j < d; ++j) corr(j, j) = 1.0;
            const double r = U(-0.02, 0.08), T = U(0.1, 3.0);
            const double alpha = U(5.0, 40.0);
            for (std::size_t j = 0; j < d; ++j) beta[j] = U(-0.4, 0.4) * alpha / std::sqrt(double(d));
            ModelSpec m;
            try {
                switch (kind) {
                    case ModelKind::GBM: m = make_gbm(spot, sigma, r, T, corr); break;
                    case ModelKind::VG: m = make_vg(spot, sigma, theta, U(0.05, 0.5), r, T, corr); break;
                    case ModelKind::NIG: m = make_nig(spot, alpha, beta, U(0.1, 1.0), r, T); break;
                    case ModelKind::GH: m = make_gh(spot, alpha, beta, U(0.1, 1.0), U(-2.0, 2.0), r, T); break;
                }
                validate(m);
            } catch (const Error&) {
                continue;  // outside the martingale-admissible region; redraw
            }
            for (std::size_t j = 0; j < d; ++j) {
                CVec z(d, cplx(0.0, 0.0));
                z[j] = cplx(0.0, -1.0);
                const double v = std::exp(-r * T) * std::real(char_function(m, z));
                worst = std::max(worst, std::abs(v - spot[j]) / spot[j]);
            }
            ++n;
            ++draws;
        }
    }
    return {worst <= 1e-9, fmt("%d draws over 4 models, max rel error %.2e", draws, worst)};
}

Outcome backend_agreement() {
    bool ok = true;
    std::string detail;
    for (const char* id : {"fig1_put_gbm_1d", "fig5_call_gh_1d_sigma5", "fig6_call_vg_1d_sigma587",
                           "fig3_com_gbm_2d_rho07", "fig9_com_gh_d2", "fig9_con_vg_d2"}) {
        const Instance inst = find_instance(id);
        const PriceEstimate tp = price_tp_laguerre(inst.model, inst.payoff, inst.damping, 64);
        const PriceEstimate rq = rqmc_instance(inst, 1 << 12);
        const double rel = std::abs(tp.price / rq.price - 1.0);
        ok = ok && rel <= 1e-3;
        detail += fmt("%s %.1e; ", id, rel);
    }
    // Node count to tolerance for independent-asset digitals, d = 1..4.
    std::vector<double> evals;
    for (std::size_t d = 1; d <= 4; ++d) {
        Instance inst;
        inst.id = "con_gbm_d" + std::to_string(d);
        inst.model = make_gbm(Vec(d, 100.0), Vec(d, 0.2), 0.0, 1.0);
        inst.payoff = payoff(PayoffKind::CONCall, d);
        const Reference ref = *closed_form_reference(inst);
        const TpNodeCount n = tp_nodes_to_tol(inst, 1e-3, ref);
        ok = ok && n.reached;
        evals.push_back(static_cast<double>(n.evaluations));
    }
    double min_ratio = 1e300;
    for (std::size_t i = 1; i < evals.size(); ++i) min_ratio = std::min(min_ratio, evals[i] / evals[i - 1]);
    ok = ok && min_ratio >= 2.0;
    detail += fmt("TP evaluations to 1e-3 for d=1..4: %.0f %.0f %.0f %.0f (min growth x%.1f)", evals[0], evals[1],
                  evals[2], evals[3], min_ratio);
    return {ok, detail};
}

Outcome runtime_ordering() {
    const Instance inst = find_instance("fig7_con_vg_6d");
    ReferenceOptions ro;
    ro.mc_paths = 2'000'000;
    const Reference ref = compute_reference(inst, ro);
    const RuntimeToTolerance run =
        run_runtime_to_tol(inst, {Backend::RQMC, Backend::PhysicalMC}, {1e-2}, kDefaultSeed, ref);
    const RuntimePoint& q = run.points[0].backend == Backend::RQMC ? run.points[0] : run.points[1];
    const RuntimePoint& m = run.points[0].backend == Backend::RQMC ? run.points[1] : run.points[0];
    return {q.reached && m.reached && q.wall_ms < m.wall_ms,
            fmt("RQMC N=%zu %.1f ms vs physical MC M=%zu %.1f ms", q.N, q.wall_ms, m.N, m.wall_ms)};
}

Outcome calibration() {
    const std::size_t d = 4;
    const double exact = std::pow(0.5, d);
    auto f = [](const double* u) { return u[0] * u[1] * u[2] * u[3]; };
    int inside = 0;
    for (int run = 0; run < 200; ++run) {
        const RQMCEstimate e = rqmc_estimate(f, d, 256, 30, kDefaultSeed + static_cast<std::uint64_t>(run));
        if (std::abs(e.value - exact) <= e.std_error) ++inside;
    }
    return {inside >= 180, fmt("%d/200 intervals cover the exact value", inside)};
}

}  // namespace

int main() {
    run("damping_anchor", damping_anchor);
    run("price_oracle", price_oracle);
    run("transform_rules", transform_rules);
    run("boundary_growth", boundary_growth);
    run("convergence_slopes", convergence_slopes);
    run("cross_method_parity", cross_method_parity);
    run("mixture_identities", mixture_identities);
    run("martingale", martingale);
    run("backend_agreement", backend_agreement);
    run("runtime_ordering", runtime_ordering);
    run("calibration", calibration);
    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
