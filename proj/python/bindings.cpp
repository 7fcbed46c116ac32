// SPDX-License-Identifier: MIT
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fqmc/bench.hpp"
#include "fqmc/config.hpp"
#include "fqmc/damping.hpp"
#include "fqmc/integrand.hpp"
#include "fqmc/models.hpp"

namespace py = pybind11;
using namespace fqmc;

namespace {

py::dict estimate_dict(const PriceEstimate& e) {
    py::dict d;
    d["price"] = e.price;
    d["stat_error"] = e.stat_error;
    d["rel_stat_error"] = e.rel_stat_error;
    d["c_alpha"] = e.c_alpha;
    d["backend"] = backend_name(e.backend);
    d["N"] = e.N;
    d["S"] = e.S;
    d["seed"] = e.seed;
    d["wall_ms"] = e.wall_ms;
    d["R"] = std::vector<double>(e.R.begin(), e.R.end());
    d["transform"] = e.transform;
    return d;
}

py::dict transform_dict(const TransformSpec& t) {
    py::dict d;
    d["family"] = family_name(t.family);
    d["d"] = t.d;
    d["udim"] = t.udim;
    d["sigma"] = std::vector<double>(t.sigma.begin(), t.sigma.end());
    d["nu"] = t.nu;
    std::vector<std::vector<double>> cov;
    for (std::size_t i = 0; i < t.cov.dim(); ++i) {
        cov.emplace_back();
        for (std::size_t k = 0; k < t.cov.dim(); ++k) cov.back().push_back(t.cov(i, k));
    }
    d["cov"] = cov;
    d["description"] = describe(t);
    return d;
}

}  // namespace

PYBIND11_MODULE(_fqmc, m) {
    m.doc() = "Fourier pricing with randomized quasi-Monte Carlo (JSON configuration API)";

    py::register_exception<Error>(m, "FqmcError", PyExc_RuntimeError);

    m.def(
        "price",
        [](const std::string& cfg) {
            const RunConfig c = parse_run_config(cfg);
            PriceEstimate e;
            {
                py::gil_scoped_release release;
                e = run_price(c);
            }
            return estimate_dict(e);
        },
        py::arg("config"), "Price the configured instance; returns a dict.");

    m.def(
        "optimize_damping",
        [](const std::string& cfg) {
            const RunConfig c = parse_run_config(cfg);
            DampingOptions opt;
            opt.seed = c.qmc.seed;
            const DampingVector r = optimize_damping(c.model, c.payoff, opt);
            py::dict d;
            d["R"] = std::vector<double>(r.R.begin(), r.R.end());
            d["objective"] = r.objective;
            d["margin"] = r.margin;
            d["converged"] = r.converged;
            d["evaluations"] = r.evaluations;
            return d;
        },
        py::arg("config"));

    m.def(
        "default_transform", [](const std::string& cfg) { return transform_dict(resolve_transform(parse_run_config(cfg))); },
        py::arg("config"));

    m.def(
        "boundary_probe",
        [](const std::string& cfg) {
            const RunConfig c = parse_run_config(cfg);
            const Vec R = c.damping ? *c.damping : optimize_damping(c.model, c.payoff).R;
            const BoundaryReport rep = boundary_probe(c.model, c.payoff, R, resolve_transform(c));
            py::dict d;
            d["verdict"] = rep.verdict();
            d["diverging"] = rep.diverging;
            d["corner_limit"] = rep.corner_limit;
            d["levels"] = rep.levels;
            py::list rays;
            for (const ProbeRay& r : rep.rays) {
                py::dict rd;
                rd["label"] = r.label;
                rd["ratio"] = r.ratio;
                rd["diverging"] = r.diverging;
                rays.append(rd);
            }
            d["rays"] = rays;
            return d;
        },
        py::arg("config"));

    m.def(
        "martingale_error",
        [](const std::string& cfg) {
            const RunConfig c = parse_run_config(cfg);
            const std::size_t d = c.model.dim();
            double worst = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                CVec z(d, cplx(0.0, 0.0));
                z[j] = cplx(0.0, -1.0);
                const double v = std::exp(-c.model.rate * c.model.maturity) * std::real(char_function(c.model, z));
                worst = std::max(worst, std::abs(v - c.model.spot[j]) / c.model.spot[j]);
            }
            return worst;
        },
        py::arg("config"), "Largest relative error of the discounted characteristic function at -i e_j vs S0_j.");

    m.def("dump_config", [](const std::string& cfg) { return dump_run_config(parse_run_config(cfg)); },
          py::arg("config"));

    m.def("instances", [] {
        std::vector<std::string> ids;
        for (const Instance& i : instance_catalog()) ids.push_back(i.id);
        return ids;
    });
    m.def("suites", &suite_ids);
    m.def("csv_columns", &csv_columns);

    m.def(
        "run_convergence",
        [](const std::string& id, const std::string& backend, int lo, int hi, std::size_t S, std::uint64_t seed) {
            const Instance inst = find_instance(id);
            const Reference ref = compute_reference(inst);
            const ConvergenceRun run = run_convergence(inst, parse_backend(backend), pow2_grid(lo, hi), S, seed, ref);
            py::dict d;
            d["instance_id"] = run.instance_id;
            d["slope"] = run.slope;
            d["intercept"] = run.intercept;
            d["reference"] = run.reference.value;
            d["reference_source"] = run.reference.source;
            std::vector<std::size_t> N;
            std::vector<double> value, rel;
            for (const auto& p : run.points) {
                N.push_back(p.N);
                value.push_back(p.value);
                rel.push_back(p.rel_error);
            }
            d["N"] = N;
            d["value"] = value;
            d["rel_error"] = rel;
            return d;
        },
        py::arg("instance"), py::arg("backend") = "rqmc", py::arg("lo") = 6, py::arg("hi") = 12, py::arg("S") = 30,
        py::arg("seed") = kDefaultSeed);

    m.attr("DEFAULT_SEED") = kDefaultSeed;
}
