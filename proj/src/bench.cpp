// SPDX-License-Identifier: MIT
#include "fqmc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fqmc/reference.hpp"

namespace fqmc {

namespace {

Matrix corr_matrix(std::size_t d, double rho) {
    Matrix c(d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) c(i, j) = i == j ? 1.0 : rho;
    return c;
}

PayoffSpec payoff(PayoffKind k, std::size_t d, double strike) {
    PayoffSpec p;
    p.kind = k;
    p.dim = d;
    p.strike = strike;
    return p;
}

Instance make(std::string id, std::string note, ModelSpec m, PayoffSpec p, TransformOptions t = {}) {
    Instance inst;
    inst.id = std::move(id);
    inst.note = std::move(note);
    inst.model = std::move(m);
    inst.payoff = std::move(p);
    inst.transform = std::move(t);
    return inst;
}

TransformOptions with_sigma(double s) {
    TransformOptions t;
    t.sigma = {s};
    return t;
}

TransformOptions with_form(TransformForm f) {
    TransformOptions t;
    t.form = f;
    return t;
}

TransformOptions with_nu(double nu) {
    TransformOptions t;
    t.nu = nu;
    return t;
}

ModelSpec vg_fig7() {
    constexpr std::size_t d = 6;
    Matrix c(d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            c(i, j) = i == j ? 1.0 : 0.2 / (1.0 + 0.1 * std::abs(double(i) - double(j)));
    return make_vg(Vec(d, 100.0), Vec(d, 0.4), Vec(d, -0.3), 0.1, 0.0, 1.0, c);
}

std::vector<Instance> build_catalog() {
    std::vector<Instance> c;
    const auto gbm1 = make_gbm({100.0}, {0.2}, 0.0, 1.0);
    c.push_back(make("fig1_put_gbm_1d", "1D put, GBM sigma=0.2; R* near 6.58", gbm1,
                     payoff(PayoffKind::BasketPut, 1, 100.0)));

    const auto gbm2 = [](double rho) { return make_gbm({100.0, 100.0}, {0.2, 0.2}, 0.0, 1.0, corr_matrix(2, rho)); };
    const auto com2 = payoff(PayoffKind::CallOnMin, 2, 100.0);
    c.push_back(make("fig3_com_gbm_2d_rho0", "2D call on min, GBM, rho=0", gbm2(0.0), com2));
    c.push_back(make("fig3_com_gbm_2d_rho07", "2D call on min, GBM, rho=0.7", gbm2(0.7), com2));
    c.push_back(make("fig3b_com_gbm_2d_rho07_multivariate", "rho=0.7, Gaussian matrix transform", gbm2(0.7), com2,
                     with_form(TransformForm::Matrix)));
    c.push_back(make("fig3b_com_gbm_2d_rho07_univariate", "rho=0.7, Gaussian product transform", gbm2(0.7), com2,
                     with_form(TransformForm::Product)));

    const auto call1 = payoff(PayoffKind::CallOnMin, 1, 100.0);
    c.push_back(make("fig4_call_gbm_1d_sigma1", "1D call, GBM, sigma~=1", gbm1, call1, with_sigma(1.0)));
    c.push_back(make("fig4_call_gbm_1d_sigma5", "1D call, GBM, sigma~=5 (critical)", gbm1, call1));

    const auto gh1 = make_gh({100.0}, 20.0, {-3.0}, 0.2, 1.0, 0.0, 1.0);
    c.push_back(make("fig5_call_gh_1d_sigma1", "1D call, GH lambda=1, sigma~=1", gh1, call1, with_sigma(1.0)));
    c.push_back(make("fig5_call_gh_1d_sigma5", "1D call, GH lambda=1, sigma~=5 (critical)", gh1, call1));

    const auto vg1 = make_vg({100.0}, {0.2}, {-0.3}, 0.1, 0.0, 1.0);
    TransformOptions vg_s1 = with_sigma(1.0);
    c.push_back(make("fig6_call_vg_1d_sigma1", "1D call, VG nu=0.1, nu~=19, sigma~=1", vg1, call1, vg_s1));
    c.push_back(make("fig6_call_vg_1d_sigma587", "1D call, VG nu=0.1, nu~=19, sigma~=5.87 (critical)", vg1, call1));

    const auto vg1b = make_vg({100.0}, {0.2}, {-0.3}, 0.2, 0.0, 1.0);
    c.push_back(make("fig6b_call_vg_1d_nut3", "1D call, VG nu=0.2, nu~=3", vg1b, call1, with_nu(3.0)));
    c.push_back(make("fig6b_call_vg_1d_nut9", "1D call, VG nu=0.2, nu~=9 (critical)", vg1b, call1));

    c.push_back(make("fig7_con_vg_6d", "6D CON call, VG, banded correlation", vg_fig7(),
                     payoff(PayoffKind::CONCall, 6, 100.0)));
    c.push_back(make("fig7_com_vg_6d", "6D call on min, VG, banded correlation", vg_fig7(),
                     payoff(PayoffKind::CallOnMin, 6, 100.0)));

    const auto nig3 = [](Vec spot) { return make_nig(std::move(spot), 10.0, Vec(3, -3.0), 0.2, 0.0, 1.0); };
    c.push_back(make("fig8_put_nig_3d", "3D basket put, NIG, K=100", nig3(Vec(3, 100.0)),
                     payoff(PayoffKind::BasketPut, 3, 100.0)));
    c.push_back(make("fig8_spread_nig_3d", "3D spread call, NIG, S0=(100,100/3,100/3), K=100/3",
                     nig3({100.0, 100.0 / 3.0, 100.0 / 3.0}), payoff(PayoffKind::SpreadCall, 3, 100.0 / 3.0)));
    c.push_back(make("fig8b_put_nig_3d_k60", "3D basket put, NIG, K=60", nig3(Vec(3, 100.0)),
                     payoff(PayoffKind::BasketPut, 3, 60.0)));
    c.push_back(make("fig8b_spread_nig_3d_k50", "3D spread call, NIG, S0=(100,50,50), K=50",
                     nig3({100.0, 50.0, 50.0}), payoff(PayoffKind::SpreadCall, 3, 50.0)));

    const auto put4 = payoff(PayoffKind::BasketPut, 4, 100.0);
    c.push_back(make("appI_put_gbm_4d", "4D basket put, GBM sigma=0.2", make_gbm(Vec(4, 100.0), Vec(4, 0.2), 0.0, 1.0),
                     put4));
    c.push_back(make("appI_put_vg_4d", "4D basket put, VG sigma=0.4 theta=-0.3 nu=0.2",
                     make_vg(Vec(4, 100.0), Vec(4, 0.4), Vec(4, -0.3), 0.2, 0.0, 1.0), put4));
    c.push_back(make("appI_put_nig_4d", "4D basket put, NIG alpha=20 beta=-3 delta=0.2",
                     make_nig(Vec(4, 100.0), 20.0, Vec(4, -3.0), 0.2, 0.0, 1.0), put4));
    return c;
}

// fig9_{com,con}_{gh,vg}_d<k>
std::optional<Instance> parametric_instance(const std::string& id) {
    unsigned d = 0;
    char pay[4] = {}, mod[3] = {};
    int consumed = 0;
    if (std::sscanf(id.c_str(), "fig9_%3[a-z]_%2[a-z]_d%u%n", pay, mod, &d, &consumed) != 3) return std::nullopt;
    if (static_cast<std::size_t>(consumed) != id.size() || d < 1 || d > 20) return std::nullopt;
    const std::string ps(pay), ms(mod);
    if ((ps != "com" && ps != "con") || (ms != "gh" && ms != "vg")) return std::nullopt;
    const PayoffKind pk = ps == "com" ? PayoffKind::CallOnMin : PayoffKind::CONCall;
    ModelSpec m = ms == "gh" ? make_nig(Vec(d, 100.0), 12.0, Vec(d, -3.0), 0.2, 0.0, 1.0)
                             : make_vg(Vec(d, 100.0), Vec(d, 0.4), Vec(d, -0.3), 0.1, 0.0, 1.0);
    return make(id, "varying dimension, d=" + std::to_string(d), std::move(m), payoff(pk, d, 100.0));
}

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

double bs_call(double s, double k, double sigma, double r, double T) {
    const double sd = sigma * std::sqrt(T);
    const double d1 = (std::log(s / k) + (r + 0.5 * sigma * sigma) * T) / sd;
    return s * norm_cdf(d1) - k * std::exp(-r * T) * norm_cdf(d1 - sd);
}

double bs_put(double s, double k, double sigma, double r, double T) {
    return bs_call(s, k, sigma, r, T) - s + k * std::exp(-r * T);
}

SimulationOptions sim_options() {
    SimulationOptions o;
    o.enable_gig = true;
    return o;
}

std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

PriceEstimate price_once(const Instance& inst, Backend b, std::size_t N, std::size_t S, std::uint64_t seed,
                         const std::optional<Vec>& R, const std::optional<TransformSpec>& t) {
    switch (b) {
        case Backend::RQMC: {
            QmcConfig cfg;
            cfg.N = N;
            cfg.S = S;
            cfg.seed = seed;
            return price_fourier_rqmc(inst.model, inst.payoff, R, t, cfg);
        }
        case Backend::MCFourier: return price_fourier_mc(inst.model, inst.payoff, R, t, N * S, seed);
        case Backend::TPLaguerre: return price_tp_laguerre(inst.model, inst.payoff, R, N);
        case Backend::PhysicalMC: return mc_price_physical(inst.model, inst.payoff, N * S, seed, sim_options());
    }
    throw Error(Errc::InvalidSpec, "backend");
}

double rel_error_of(Backend b, const PriceEstimate& e, const Reference& ref) {
    const double scale = std::abs(ref.value);
    if (b == Backend::TPLaguerre) return std::abs(e.price - ref.value) / scale;
    return e.stat_error / scale;
}

}  // namespace

const std::vector<Instance>& instance_catalog() {
    static const std::vector<Instance> catalog = build_catalog();
    return catalog;
}

Instance find_instance(const std::string& id) {
    for (const Instance& inst : instance_catalog())
        if (inst.id == id) return inst;
    if (auto p = parametric_instance(id)) return *p;
    std::string known;
    for (const Instance& inst : instance_catalog()) known += " " + inst.id;
    throw Error(Errc::InvalidSpec, "unknown instance '" + id + "'; known:" + known +
                                       " fig9_{com,con}_{gh,vg}_d<k>");
}

// ===========================================================================
// References
// ===========================================================================

std::optional<Reference> closed_form_reference(const Instance& inst) {
    const ModelSpec& m = inst.model;
    const PayoffSpec& p = inst.payoff;
    if (m.kind != ModelKind::GBM) return std::nullopt;
    const double T = m.maturity, r = m.rate;
    const std::size_t d = m.dim();
    if (d == 1) {
        const double s = m.spot[0], sigma = std::sqrt(m.cov(0, 0));
        switch (p.kind) {
            case PayoffKind::BasketPut: {
                const double w = p.weights.empty() ? 1.0 : p.weights[0];
                return Reference{bs_put(w * s, p.strike, sigma, r, T), "closed_form_bs"};
            }
            case PayoffKind::SpreadCall:
            case PayoffKind::CallOnMin: return Reference{bs_call(s, p.strike, sigma, r, T), "closed_form_bs"};
            case PayoffKind::CONCall: break;
        }
    }
    if (p.kind == PayoffKind::CONCall && m.cov.is_diagonal()) {
        double prod = p.cash * std::exp(-r * T);
        for (std::size_t j = 0; j < d; ++j) {
            const double sigma = std::sqrt(m.cov(j, j));
            prod *= norm_cdf((std::log(m.spot[j] / p.strike) + (r - 0.5 * sigma * sigma) * T) / (sigma * std::sqrt(T)));
        }
        return Reference{prod, "closed_form_digital"};
    }
    return std::nullopt;
}

Reference compute_reference(const Instance& inst, const ReferenceOptions& opt) {
    if (auto cf = closed_form_reference(inst)) return *cf;
    if (inst.model.dim() <= 2) {
        const PriceEstimate e = price_tp_laguerre(inst.model, inst.payoff, inst.damping, opt.tp_nodes);
        return {e.price, "tplaguerre_n=" + std::to_string(opt.tp_nodes)};
    }
    const PriceEstimate e = mc_price_physical(inst.model, inst.payoff, opt.mc_paths, opt.seed, sim_options());
    return {e.price, "physicalmc_M=" + std::to_string(opt.mc_paths)};
}

// ===========================================================================
// Convergence
// ===========================================================================

LinearFit fit_slope(const std::vector<double>& N, const std::vector<double>& err) {
    if (N.size() != err.size()) throw Error(Errc::DimensionMismatch, "slope fit input lengths");
    if (N.size() < 2) throw Error(Errc::InvalidSpec, "slope fit needs at least two points");
    const double n = static_cast<double>(N.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < N.size(); ++i) {
        if (!(N[i] > 0.0 && err[i] > 0.0)) throw Error(Errc::DomainError, "slope fit needs positive values");
        sx += std::log2(N[i]);
        sy += std::log2(err[i]);
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < N.size(); ++i) {
        const double dx = std::log2(N[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log2(err[i]) - my);
    }
    if (!(sxx > 0.0)) throw Error(Errc::DomainError, "slope fit needs distinct N");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    return f;
}

std::vector<std::size_t> pow2_grid(int lo, int hi) {
    if (lo < 0 || hi > 40 || lo > hi) throw Error(Errc::InvalidSpec, "power-of-two grid bounds");
    std::vector<std::size_t> g;
    for (int k = lo; k <= hi; ++k) g.push_back(std::size_t{1} << k);
    return g;
}

ConvergenceRun run_convergence(const Instance& inst, Backend backend, const std::vector<std::size_t>& N_grid,
                               std::size_t S, std::uint64_t seed, const Reference& reference) {
    if (N_grid.size() < 5) throw Error(Errc::InvalidSpec, "convergence grid needs at least 5 points");
    for (std::size_t i = 0; i < N_grid.size(); ++i) {
        const std::size_t n = N_grid[i];
        if (n == 0 || (n & (n - 1)) != 0) throw Error(Errc::InvalidSpec, "grid entries must be powers of two");
        if (i > 0 && n <= N_grid[i - 1]) throw Error(Errc::InvalidSpec, "grid must be strictly increasing");
    }
    if (S == 0) throw Error(Errc::InvalidSpec, "S must be positive");
    if (reference.value == 0.0) throw Error(Errc::InvalidSpec, "reference value must be nonzero");

    ConvergenceRun run;
    run.instance_id = inst.id;
    run.backend = backend;
    run.model = model_name(inst.model.kind);
    run.payoff = payoff_name(inst.payoff.kind);
    run.d = inst.model.dim();
    run.S = backend == Backend::TPLaguerre ? 1 : S;
    run.seed = seed;
    run.reference = reference;

    std::optional<Vec> R = inst.damping;
    std::optional<TransformSpec> t;
    if (backend == Backend::RQMC || backend == Backend::MCFourier) {
        if (!R) R = optimize_damping(inst.model, inst.payoff).R;
        t = default_transform(inst.model, inst.transform);
    } else if (backend == Backend::TPLaguerre && !R) {
        R = optimize_damping(inst.model, inst.payoff).R;
    }

    std::vector<double> xs, ys;
    for (std::size_t N : N_grid) {
        const PriceEstimate e = price_once(inst, backend, N, S, seed, R, t);
        ConvergencePoint pt;
        pt.N = N;
        pt.value = e.price;
        pt.stat_error = e.stat_error;
        pt.rel_error = rel_error_of(backend, e, reference);
        pt.wall_ms = e.wall_ms;
        run.points.push_back(pt);
        xs.push_back(static_cast<double>(N));
        ys.push_back(std::max(pt.rel_error, 1e-300));
    }
    const LinearFit f = fit_slope(xs, ys);
    run.slope = f.slope;
    run.intercept = f.intercept;
    return run;
}

// ===========================================================================
// Runtime to tolerance
// ===========================================================================

bool RuntimeToTolerance::budget_exceeded() const {
    return std::any_of(points.begin(), points.end(), [](const RuntimePoint& p) { return !p.reached; });
}

RuntimeToTolerance run_runtime_to_tol(const Instance& inst, const std::vector<Backend>& backends,
                                      const std::vector<double>& tol_grid, std::uint64_t seed,
                                      const Reference& reference, const RuntimeOptions& opt) {
    if (tol_grid.empty()) throw Error(Errc::InvalidSpec, "empty TOL grid");
    for (double tol : tol_grid)
        if (!(tol > 0.0)) throw Error(Errc::InvalidSpec, "TOL must be positive");
    if (reference.value == 0.0) throw Error(Errc::InvalidSpec, "reference value must be nonzero");
    std::vector<double> tols = tol_grid;
    std::sort(tols.begin(), tols.end(), std::greater<>());

    RuntimeToTolerance out;
    out.instance_id = inst.id;
    out.model = model_name(inst.model.kind);
    out.payoff = payoff_name(inst.payoff.kind);
    out.d = inst.model.dim();
    out.seed = seed;
    out.reference = reference;

    const std::size_t d = inst.model.dim();
    for (Backend b : backends) {
        if (b == Backend::TPLaguerre && d > 5) continue;
        const std::optional<TransformSpec> t =
            b == Backend::RQMC || b == Backend::MCFourier ? std::optional(default_transform(inst.model, inst.transform))
                                                          : std::nullopt;
        std::optional<Vec> R_tp = inst.damping;
        if (b == Backend::TPLaguerre && !R_tp) R_tp = optimize_damping(inst.model, inst.payoff).R;

        // N is per shift for RQMC, total samples for the MC backends, nodes per axis for TP.
        std::size_t N = b == Backend::RQMC ? opt.rqmc_N0 : b == Backend::TPLaguerre ? opt.tp_n0 : opt.mc_M0;
        const std::size_t S = b == Backend::RQMC ? opt.S : 1;
        auto cost = [&](std::size_t n) {
            return b == Backend::TPLaguerre ? std::pow(2.0 * double(n), double(d)) : double(n) * double(S);
        };
        auto within_budget = [&](std::size_t n) {
            return b == Backend::TPLaguerre ? n <= opt.tp_max_nodes && cost(n) <= double(opt.max_samples)
                                            : cost(n) <= double(opt.max_samples);
        };
        auto achieved = [&](const PriceEstimate& e) {
            return b == Backend::TPLaguerre ? std::abs(e.price - reference.value) / std::abs(reference.value)
                                            : e.rel_stat_error;
        };
        auto run_at = [&](std::size_t n) {
            return price_once(inst, b, n, S, seed, b == Backend::TPLaguerre ? R_tp : inst.damping, t);
        };

        std::optional<RuntimePoint> last;
        for (double tol : tols) {
            RuntimePoint pt;
            pt.tol = tol;
            pt.backend = b;
            pt.S = S;
            PriceEstimate e = run_at(N);
            while (achieved(e) > tol) {
                const std::size_t next = b == Backend::TPLaguerre ? N + 1 : 2 * N;
                if (!within_budget(next)) break;
                N = next;
                e = run_at(N);
            }
            pt.N = N;
            pt.estimate = e.price;
            pt.stat_error = b == Backend::TPLaguerre ? std::abs(e.price - reference.value) : e.stat_error;
            pt.achieved = achieved(e);
            pt.reached = pt.achieved <= tol;
            if (last && last->N == N) {
                pt.wall_ms = last->wall_ms;
            } else {
                std::vector<double> times;
                for (int k = 0; k < std::max(1, opt.repetitions); ++k) {
                    const auto t0 = Clock::now();
                    (void)run_at(N);
                    times.push_back(ms_since(t0));
                }
                std::nth_element(times.begin(), times.begin() + times.size() / 2, times.end());
                pt.wall_ms = times[times.size() / 2];
                if (last) pt.wall_ms = std::max(pt.wall_ms, last->wall_ms);
            }
            out.points.push_back(pt);
            last = pt;
        }
    }
    return out;
}

TpNodeCount tp_nodes_to_tol(const Instance& inst, double tol, const Reference& reference, std::size_t max_nodes) {
    const std::optional<Vec> R = inst.damping ? inst.damping : optimize_damping(inst.model, inst.payoff).R;
    const double d = static_cast<double>(inst.model.dim());
    TpNodeCount out;
    for (std::size_t n = 1; n <= max_nodes; ++n) {
        const PriceEstimate e = price_tp_laguerre(inst.model, inst.payoff, R, n);
        out.nodes = n;
        out.evaluations = static_cast<std::size_t>(std::pow(2.0 * double(n), d));
        out.rel_error = std::abs(e.price - reference.value) / std::abs(reference.value);
        if (out.rel_error <= tol) {
            out.reached = true;
            break;
        }
    }
    return out;
}

// ===========================================================================
// CSV
// ===========================================================================

const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols = {
        "instance_id", "backend",  "model",     "payoff",           "d",       "N",    "S",    "estimate",
        "stat_error",  "rel_error", "reference", "reference_source", "wall_ms", "seed", "slope"};
    return cols;
}

std::vector<CsvRow> to_rows(const ConvergenceRun& run) {
    std::vector<CsvRow> rows;
    CsvRow base;
    base.instance_id = run.instance_id;
    base.backend = backend_name(run.backend);
    base.model = run.model;
    base.payoff = run.payoff;
    base.d = run.d;
    base.reference = run.reference.value;
    base.reference_source = run.reference.source;
    base.seed = run.seed;
    for (const ConvergencePoint& p : run.points) {
        CsvRow r = base;
        r.N = p.N;
        r.S = run.S;
        r.estimate = p.value;
        r.stat_error = p.stat_error;
        r.rel_error = p.rel_error;
        r.wall_ms = p.wall_ms;
        rows.push_back(std::move(r));
    }
    CsvRow summary = base;
    summary.slope = run.slope;
    rows.push_back(std::move(summary));
    return rows;
}

std::vector<CsvRow> to_rows(const RuntimeToTolerance& run) {
    std::vector<CsvRow> rows;
    for (const RuntimePoint& p : run.points) {
        CsvRow r;
        r.instance_id = run.instance_id;
        r.backend = backend_name(p.backend);
        r.model = run.model;
        r.payoff = run.payoff;
        r.d = run.d;
        r.N = p.N;
        r.S = p.S;
        r.estimate = p.estimate;
        r.stat_error = p.stat_error;
        r.rel_error = p.tol;
        r.reference = run.reference.value;
        r.reference_source = run.reference.source;
        r.wall_ms = p.wall_ms;
        r.seed = run.seed;
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string format_csv(const std::vector<CsvRow>& rows) {
    std::ostringstream os;
    const auto& cols = csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
    auto num = [](const std::optional<double>& v) { return v ? fmt_g17(*v) : std::string(); };
    auto uint = [](const auto& v) { return v ? std::to_string(*v) : std::string(); };
    for (const CsvRow& r : rows) {
        for (const std::string* s : {&r.instance_id, &r.backend, &r.model, &r.payoff, &r.reference_source})
            if (s->find_first_of(",\"\n") != std::string::npos)
                throw Error(Errc::SchemaError, "CSV text field contains a separator: " + *s);
        os << r.instance_id << ',' << r.backend << ',' << r.model << ',' << r.payoff << ',' << r.d << ','
           << uint(r.N) << ',' << uint(r.S) << ',' << num(r.estimate) << ',' << num(r.stat_error) << ','
           << num(r.rel_error) << ',' << num(r.reference) << ',' << r.reference_source << ',' << num(r.wall_ms)
           << ',' << uint(r.seed) << ',' << num(r.slope) << '\n';
    }
    return os.str();
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::optional<double> parse_double(const std::string& s, const char* col) {
    if (s.empty()) return std::nullopt;
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size()) throw Error(Errc::SchemaError, std::string("bad number in column ") + col + ": " + s);
    return v;
}

std::optional<std::uint64_t> parse_uint(const std::string& s, const char* col) {
    if (s.empty()) return std::nullopt;
    if (s.find_first_not_of("0123456789") != std::string::npos)
        throw Error(Errc::SchemaError, std::string("bad integer in column ") + col + ": " + s);
    return std::stoull(s);
}

}  // namespace

std::vector<CsvRow> parse_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw Error(Errc::SchemaError, "empty CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (split(line) != csv_columns()) throw Error(Errc::SchemaError, "unexpected CSV header: " + line);
    std::vector<CsvRow> rows;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto c = split(line);
        if (c.size() != csv_columns().size())
            throw Error(Errc::SchemaError, "expected 15 cells, got " + std::to_string(c.size()));
        CsvRow r;
        r.instance_id = c[0];
        r.backend = c[1];
        r.model = c[2];
        r.payoff = c[3];
        const auto d = parse_uint(c[4], "d");
        if (!d) throw Error(Errc::SchemaError, "missing d");
        r.d = *d;
        if (auto n = parse_uint(c[5], "N")) r.N = *n;
        if (auto s = parse_uint(c[6], "S")) r.S = *s;
        r.estimate = parse_double(c[7], "estimate");
        r.stat_error = parse_double(c[8], "stat_error");
        r.rel_error = parse_double(c[9], "rel_error");
        r.reference = parse_double(c[10], "reference");
        r.reference_source = c[11];
        r.wall_ms = parse_double(c[12], "wall_ms");
        r.seed = parse_uint(c[13], "seed");
        r.slope = parse_double(c[14], "slope");
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_csv(const std::string& path, const std::vector<CsvRow>& rows) {
    const std::string text = format_csv(rows);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(Errc::ConfigError, "cannot write " + path);
    f << text;
    if (!f) throw Error(Errc::ConfigError, "write failed: " + path);
}

std::vector<CsvRow> read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(Errc::SchemaError, "cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_csv(ss.str());
}

std::string csv_file_name(const std::string& instance_id, const std::string& backend) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%S", &tm);
    char full[48];
    std::snprintf(full, sizeof full, "%s%03dZ", buf, static_cast<int>(ms));
    return instance_id + "__" + backend + "__" + full + ".csv";
}

// ===========================================================================
// Suites
// ===========================================================================

namespace {

struct SuiteDef {
    const char* id;
    std::vector<std::string> (*run)(const SuiteOptions&);
};

std::string emit(const SuiteOptions& opt, const std::string& id, const std::string& backend,
                 const std::vector<CsvRow>& rows) {
    std::filesystem::create_directories(opt.out_dir);
    const std::string path = (std::filesystem::path(opt.out_dir) / csv_file_name(id, backend)).string();
    write_csv(path, rows);
    return path;
}

ReferenceOptions ref_options(const SuiteOptions& opt) {
    ReferenceOptions r;
    r.mc_paths = opt.mc_reference_paths;
    r.seed = opt.seed ^ 0x5eedULL;
    return r;
}

std::vector<std::string> convergence_suite(const SuiteOptions& opt, const std::vector<std::string>& ids,
                                           Backend backend, int lo, int hi, std::size_t S) {
    std::vector<std::string> paths;
    for (const std::string& id : ids) {
        const Instance inst = find_instance(id);
        const Reference ref = compute_reference(inst, ref_options(opt));
        const ConvergenceRun run = run_convergence(inst, backend, pow2_grid(lo, hi), S, opt.seed, ref);
        paths.push_back(emit(opt, id, backend_name(backend), to_rows(run)));
    }
    return paths;
}

std::vector<std::string> runtime_suite(const SuiteOptions& opt, const std::vector<std::string>& ids,
                                       const std::vector<Backend>& backends, const std::vector<double>& tols) {
    std::vector<std::string> paths;
    for (const std::string& id : ids) {
        const Instance inst = find_instance(id);
        const Reference ref = compute_reference(inst, ref_options(opt));
        for (Backend b : backends) {
            if (b == Backend::TPLaguerre && inst.model.dim() > 5) continue;
            const RuntimeToTolerance run = run_runtime_to_tol(inst, {b}, tols, opt.seed, ref);
            paths.push_back(emit(opt, id, backend_name(b), to_rows(run)));
        }
    }
    return paths;
}

const std::vector<SuiteDef>& suites() {
    static const std::vector<SuiteDef> s = {
        {"fig3", [](const SuiteOptions& o) {
             return convergence_suite(o, {"fig3_com_gbm_2d_rho0", "fig3_com_gbm_2d_rho07"}, Backend::RQMC, 6, 13, 30);
         }},
        {"fig3b", [](const SuiteOptions& o) {
             return convergence_suite(
                 o, {"fig3b_com_gbm_2d_rho07_multivariate", "fig3b_com_gbm_2d_rho07_univariate"}, Backend::RQMC, 6,
                 13, 30);
         }},
        {"fig4", [](const SuiteOptions& o) {
             return convergence_suite(o, {"fig4_call_gbm_1d_sigma1", "fig4_call_gbm_1d_sigma5"}, Backend::RQMC, 6, 13,
                                      32);
         }},
        {"fig5", [](const SuiteOptions& o) {
             return convergence_suite(o, {"fig5_call_gh_1d_sigma1", "fig5_call_gh_1d_sigma5"}, Backend::RQMC, 6, 13,
                                      32);
         }},
        {"fig6", [](const SuiteOptions& o) {
             return convergence_suite(o, {"fig6_call_vg_1d_sigma1", "fig6_call_vg_1d_sigma587"}, Backend::RQMC, 6, 13,
                                      32);
         }},
        {"fig6b", [](const SuiteOptions& o) {
             return convergence_suite(o, {"fig6b_call_vg_1d_nut3", "fig6b_call_vg_1d_nut9"}, Backend::RQMC, 6, 13, 32);
         }},
        {"fig7", [](const SuiteOptions& o) {
             return runtime_suite(o, {"fig7_con_vg_6d", "fig7_com_vg_6d"}, {Backend::RQMC, Backend::PhysicalMC},
                                  {1e-1, 5e-2, 1e-2});
         }},
        {"fig8", [](const SuiteOptions& o) {
             return runtime_suite(o, {"fig8_put_nig_3d", "fig8_spread_nig_3d", "fig8b_put_nig_3d_k60",
                                      "fig8b_spread_nig_3d_k50"},
                                  {Backend::RQMC, Backend::PhysicalMC}, {1e-1, 5e-2, 1e-2});
         }},
        {"fig9", [](const SuiteOptions& o) {
             std::vector<std::string> ids;
             for (const char* kind : {"com_gh", "con_gh", "com_vg", "con_vg"})
                 for (int d = 1; d <= 4; ++d) ids.push_back(std::string("fig9_") + kind + "_d" + std::to_string(d));
             return runtime_suite(o, ids, {Backend::RQMC, Backend::TPLaguerre, Backend::PhysicalMC}, {1e-2});
         }},
        {"appI", [](const SuiteOptions& o) {
             std::vector<std::string> paths;
             const std::vector<std::string> ids = {"appI_put_gbm_4d", "appI_put_vg_4d", "appI_put_nig_4d"};
             for (Backend b : {Backend::RQMC, Backend::MCFourier}) {
                 auto p = convergence_suite(o, ids, b, 6, 12, 30);
                 paths.insert(paths.end(), p.begin(), p.end());
             }
             return paths;
         }},
    };
    return s;
}

}  // namespace

std::vector<std::string> suite_ids() {
    std::vector<std::string> ids;
    for (const SuiteDef& s : suites()) ids.emplace_back(s.id);
    return ids;
}

std::vector<std::string> run_suite(const std::string& id, const SuiteOptions& opt) {
    for (const SuiteDef& s : suites())
        if (id == s.id) return s.run(opt);
    std::string known;
    for (const SuiteDef& s : suites()) known += std::string(" ") + s.id;
    throw Error(Errc::InvalidSpec, "unknown suite '" + id + "'; available:" + known);
}

}  // namespace fqmc
