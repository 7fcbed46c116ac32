// SPDX-License-Identifier: MIT
//
// fqmc price|damping|probe|bench
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fqmc/bench.hpp"
#include "fqmc/config.hpp"
#include "fqmc/damping.hpp"
#include "fqmc/integrand.hpp"

namespace {

using namespace fqmc;

int exit_code(Errc c) {
    switch (c) {
        case Errc::ConfigError:
        case Errc::InvalidSpec:
        case Errc::DimensionMismatch:
        case Errc::NotPositiveDefinite:
        case Errc::SchemaError:
        case Errc::DimensionTooLarge:
        case Errc::DimensionUnsupported:
        case Errc::SubordinatorUnavailable: return 2;
        case Errc::InfeasibleRegion:
        case Errc::RuleUnavailable:
        case Errc::StripViolation: return 3;
        default: return 4;
    }
}

std::string fmt_vec(const Vec& v) {
    std::string s;
    char buf[32];
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.6g", v[i]);
        s += (i ? "," : "") + std::string(buf);
    }
    return v.size() == 1 ? s : "(" + s + ")";
}

struct Common {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::string backend;
};

RunConfig load(const Common& o) {
    RunConfig c = load_run_config(o.config);
    if (o.seed) c.qmc.seed = *o.seed;
    if (!o.backend.empty()) {
        try {
            c.backend = parse_backend(o.backend);
        } catch (const Error& e) {
            throw Error(Errc::ConfigError, e.what());
        }
    }
    return c;
}

int cmd_price(const Common& o) {
    const RunConfig c = load(o);
    const PriceEstimate e = run_price(c);
    std::printf("instance=%s backend=%s price=%.10g stat_error=%.4g rel_stat_error=%.4g R=%s transform=%s N=%zu S=%zu "
                "seed=%llu wall_ms=%.3f\n",
                c.label.c_str(), backend_name(e.backend), e.price, e.stat_error, e.rel_stat_error,
                e.R.empty() ? "-" : fmt_vec(e.R).c_str(), e.transform.c_str(), e.N, e.S,
                static_cast<unsigned long long>(e.seed), e.wall_ms);
    std::string path = c.output;
    if (!o.out.empty()) {
        std::filesystem::create_directories(o.out);
        path = (std::filesystem::path(o.out) / csv_file_name(c.label, backend_name(e.backend))).string();
    }
    if (!path.empty()) {
        CsvRow r;
        r.instance_id = c.label;
        r.backend = backend_name(e.backend);
        r.model = model_name(c.model.kind);
        r.payoff = payoff_name(c.payoff.kind);
        r.d = c.model.dim();
        r.N = e.N;
        r.S = e.S;
        r.estimate = e.price;
        r.stat_error = e.stat_error;
        r.rel_error = e.rel_stat_error;
        r.wall_ms = e.wall_ms;
        r.seed = e.seed;
        write_csv(path, {r});
        std::printf("wrote %s\n", path.c_str());
    }
    return 0;
}

int cmd_damping(const Common& o) {
    const RunConfig c = load(o);
    DampingOptions opt;
    opt.seed = c.qmc.seed;
    const DampingVector r = optimize_damping(c.model, c.payoff, opt);
    std::printf("R=%s objective=%.10g margin=%.4g converged=%s evaluations=%d\n", fmt_vec(r.R).c_str(), r.objective,
                r.margin, r.converged ? "yes" : "no", r.evaluations);
    return 0;
}

int cmd_probe(const Common& o) {
    const RunConfig c = load(o);
    const Vec R = c.damping ? *c.damping : optimize_damping(c.model, c.payoff).R;
    const TransformSpec t = resolve_transform(c);
    const BoundaryReport rep = boundary_probe(c.model, c.payoff, R, t);
    std::printf("transform=%s R=%s center=%.6g\n", describe(t).c_str(), fmt_vec(R).c_str(), rep.center);
    std::printf("%-24s", "ray \\ u");
    for (double l : rep.levels) std::printf(" %11.0e", l);
    std::printf("  verdict\n");
    for (const ProbeRay& ray : rep.rays) {
        std::printf("%-24s", ray.label.c_str());
        for (double v : ray.ratio) std::printf(" %11.4g", v);
        std::printf("  %s\n", ray.diverging ? "diverging" : "bounded");
    }
    std::printf("verdict=%s corner_limit=%.6g\n", rep.verdict(), rep.corner_limit);
    return 0;
}

int cmd_bench(const Common& o, const std::string& suite, bool list) {
    if (list) {
        for (const std::string& s : suite_ids()) std::printf("suite %s\n", s.c_str());
        for (const Instance& i : instance_catalog()) std::printf("instance %s  %s\n", i.id.c_str(), i.note.c_str());
        return 0;
    }
    if (suite.empty()) throw Error(Errc::ConfigError, "--suite is required");
    const auto ids = suite_ids();
    if (std::find(ids.begin(), ids.end(), suite) == ids.end()) {
        std::string known;
        for (const std::string& s : ids) known += " " + s;
        throw Error(Errc::ConfigError, "unknown suite '" + suite + "'; available:" + known);
    }
    SuiteOptions opt;
    opt.out_dir = o.out.empty() ? "bench_out" : o.out;
    if (o.seed) opt.seed = *o.seed;
    for (const std::string& p : run_suite(suite, opt)) {
        const auto rows = read_csv(p);
        const CsvRow& last = rows.back();
        if (last.slope)
            std::printf("%s slope=%.3f\n", p.c_str(), *last.slope);
        else
            std::printf("%s rows=%zu\n", p.c_str(), rows.size());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fourier pricing with randomized quasi-Monte Carlo"};
    app.require_subcommand(1);
    Common o;
    std::string suite;
    bool list = false;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", o.config, "JSON run configuration");
        if (needs_config) c->required();
        sub->add_option("--out", o.out, "output directory for CSV files");
        sub->add_option("--seed", o.seed, "override the RNG seed");
        sub->add_option("--backend", o.backend, "rqmc|mcfourier|tplaguerre|physicalmc");
    };
    auto* price = app.add_subcommand("price", "price one instance");
    add_common(price, true);
    auto* damping = app.add_subcommand("damping", "optimal damping vector");
    add_common(damping, true);
    auto* probe = app.add_subcommand("probe", "boundary growth probe of the transformed integrand");
    add_common(probe, true);
    auto* bench = app.add_subcommand("bench", "run a benchmark suite");
    add_common(bench, false);
    bench->add_option("--suite", suite, "suite id");
    bench->add_flag("--list", list, "list suites and instances");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*price) return cmd_price(o);
        if (*damping) return cmd_damping(o);
        if (*probe) return cmd_probe(o);
        if (*bench) return cmd_bench(o, suite, list);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
    return 2;
}
