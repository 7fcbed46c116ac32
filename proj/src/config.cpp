// SPDX-License-Identifier: MIT
#include "fqmc/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fqmc/bench.hpp"
#include "fqmc/reference.hpp"

namespace fqmc {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(Errc::ConfigError, what); }

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) fail(where + " must be an object");
    for (const auto& [k, v] : j.items()) {
        (void)v;
        if (!allowed.count(k)) fail("unknown key '" + (where.empty() ? k : where + "." + k) + "'");
    }
}

double get_number(const json& j, const std::string& key) {
    if (!j.is_number()) fail(key + " must be a number");
    return j.get<double>();
}

std::size_t get_count(const json& j, const std::string& key) {
    if (!j.is_number_unsigned() || j.get<std::uint64_t>() == 0) fail(key + " must be a positive integer");
    return static_cast<std::size_t>(j.get<std::uint64_t>());
}

std::string get_string(const json& j, const std::string& key) {
    if (!j.is_string()) fail(key + " must be a string");
    return j.get<std::string>();
}

Vec get_vec(const json& j, const std::string& key) {
    if (j.is_number()) return {j.get<double>()};
    if (!j.is_array() || j.empty()) fail(key + " must be a number or a non-empty array of numbers");
    Vec v;
    for (const auto& e : j) v.push_back(get_number(e, key));
    return v;
}

Matrix get_matrix(const json& j, const std::string& key) {
    if (!j.is_array() || j.empty()) fail(key + " must be a square array of arrays");
    const std::size_t n = j.size();
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!j[i].is_array() || j[i].size() != n) fail(key + " must be square");
        for (std::size_t k = 0; k < n; ++k) m(i, k) = get_number(j[i][k], key);
    }
    return m;
}

json vec_json(const Vec& v) { return json(std::vector<double>(v.begin(), v.end())); }

json matrix_json(const Matrix& m) {
    json out = json::array();
    for (std::size_t i = 0; i < m.dim(); ++i) {
        json row = json::array();
        for (std::size_t k = 0; k < m.dim(); ++k) row.push_back(m(i, k));
        out.push_back(row);
    }
    return out;
}

// Σ from either "cov" or "sigma" (+ optional "corr").
Matrix covariance_block(const json& j, const std::string& where, std::size_t d) {
    if (j.contains("cov")) {
        if (j.contains("sigma") || j.contains("corr")) fail(where + ": give either cov or sigma/corr");
        return get_matrix(j["cov"], where + ".cov");
    }
    if (!j.contains("sigma")) fail(where + ": missing sigma (or cov)");
    Vec sigma = get_vec(j["sigma"], where + ".sigma");
    if (sigma.size() == 1 && d > 1) sigma.assign(d, sigma[0]);
    const Matrix corr = j.contains("corr") ? get_matrix(j["corr"], where + ".corr") : Matrix::identity(sigma.size());
    if (corr.dim() != sigma.size()) fail(where + ": corr size does not match sigma");
    for (double s : sigma)
        if (!(s > 0.0)) throw Error(Errc::InvalidSpec, where + ".sigma must be positive");
    return Matrix::covariance(sigma, corr);
}

ModelSpec parse_model(const json& j) {
    const std::string w = "model";
    if (!j.is_object() || !j.contains("kind")) fail("model.kind is required");
    ModelSpec m;
    try {
        m.kind = parse_model_kind(get_string(j["kind"], "model.kind"));
    } catch (const Error& e) {
        fail(e.what());
    }
    std::set<std::string> keys = {"kind", "spot", "rate", "maturity"};
    switch (m.kind) {
        case ModelKind::GBM: keys.insert({"sigma", "corr", "cov"}); break;
        case ModelKind::VG: keys.insert({"sigma", "corr", "cov", "theta", "nu"}); break;
        case ModelKind::NIG: keys.insert({"alpha", "beta", "delta", "shape"}); break;
        case ModelKind::GH: keys.insert({"alpha", "beta", "delta", "shape", "lambda"}); break;
    }
    check_keys(j, w, keys);
    auto need = [&](const char* k) -> const json& {
        if (!j.contains(k)) fail(w + "." + k + " is required");
        return j[k];
    };
    m.spot = get_vec(need("spot"), "model.spot");
    m.rate = j.contains("rate") ? get_number(j["rate"], "model.rate") : 0.0;
    m.maturity = j.contains("maturity") ? get_number(j["maturity"], "model.maturity") : 1.0;
    const std::size_t d = m.spot.size();
    switch (m.kind) {
        case ModelKind::GBM: m.cov = covariance_block(j, w, d); break;
        case ModelKind::VG:
            m.cov = covariance_block(j, w, d);
            m.theta = get_vec(need("theta"), "model.theta");
            m.nu = get_number(need("nu"), "model.nu");
            break;
        case ModelKind::GH:
            m.lambda = get_number(need("lambda"), "model.lambda");
            [[fallthrough]];
        case ModelKind::NIG:
            m.alpha = get_number(need("alpha"), "model.alpha");
            m.beta = get_vec(need("beta"), "model.beta");
            m.delta = get_number(need("delta"), "model.delta");
            m.shape = j.contains("shape") ? get_matrix(j["shape"], "model.shape") : Matrix::identity(d);
            break;
    }
    // Scalars broadcast over the dimension.
    auto broadcast = [d](Vec& v) {
        if (v.size() == 1 && d > 1) v.assign(d, v[0]);
    };
    if (m.kind == ModelKind::VG) broadcast(m.theta);
    if (m.kind == ModelKind::NIG || m.kind == ModelKind::GH) broadcast(m.beta);
    validate(m);
    return m;
}

PayoffSpec parse_payoff(const json& j, std::size_t d) {
    if (!j.is_object() || !j.contains("kind")) fail("payoff.kind is required");
    PayoffSpec p;
    try {
        p.kind = parse_payoff_kind(get_string(j["kind"], "payoff.kind"));
    } catch (const Error& e) {
        fail(e.what());
    }
    std::set<std::string> keys = {"kind", "strike", "dim"};
    if (p.kind == PayoffKind::BasketPut) keys.insert("weights");
    if (p.kind == PayoffKind::CONCall) keys.insert("cash");
    check_keys(j, "payoff", keys);
    if (!j.contains("strike")) fail("payoff.strike is required");
    p.strike = get_number(j["strike"], "payoff.strike");
    p.dim = j.contains("dim") ? get_count(j["dim"], "payoff.dim") : d;
    if (p.dim != d) fail("payoff.dim does not match the model dimension");
    if (j.contains("weights")) p.weights = get_vec(j["weights"], "payoff.weights");
    if (j.contains("cash")) p.cash = get_number(j["cash"], "payoff.cash");
    validate(p);
    return p;
}

void parse_transform(const json& j, RunConfig& c) {
    check_keys(j, "transform", {"family", "form", "sigma", "nu", "epsilon", "cov_scale", "factor"});
    try {
        if (j.contains("family")) c.family = parse_family(get_string(j["family"], "transform.family"));
        if (j.contains("form")) c.transform.form = parse_form(get_string(j["form"], "transform.form"));
        if (j.contains("factor")) c.transform.factor = parse_factor_mode(get_string(j["factor"], "transform.factor"));
    } catch (const Error& e) {
        if (e.code() == Errc::ConfigError) throw;
        fail(e.what());
    }
    if (j.contains("sigma")) c.transform.sigma = get_vec(j["sigma"], "transform.sigma");
    if (j.contains("nu")) c.transform.nu = get_number(j["nu"], "transform.nu");
    if (j.contains("epsilon")) c.transform.epsilon = get_number(j["epsilon"], "transform.epsilon");
    if (j.contains("cov_scale")) c.transform.cov_scale = get_number(j["cov_scale"], "transform.cov_scale");
    for (double s : c.transform.sigma)
        if (!(s > 0.0)) fail("transform.sigma must be positive");
    if (c.transform.nu && !(*c.transform.nu > 0.0)) fail("transform.nu must be positive");
    if (!(c.transform.cov_scale > 0.0)) fail("transform.cov_scale must be positive");
    if (!(c.transform.epsilon >= 0.0)) fail("transform.epsilon must be non-negative");
}

void parse_qmc(const json& j, QmcConfig& q) {
    check_keys(j, "qmc", {"N", "S", "seed", "c_alpha"});
    if (j.contains("N")) q.N = get_count(j["N"], "qmc.N");
    if (j.contains("S")) q.S = get_count(j["S"], "qmc.S");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) fail("qmc.seed must be a non-negative integer");
        q.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("c_alpha")) q.c_alpha = get_number(j["c_alpha"], "qmc.c_alpha");
    if (q.S < 2) fail("qmc.S must be at least 2");
    if (!(q.c_alpha > 0.0)) fail("qmc.c_alpha must be positive");
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        fail(std::string("invalid JSON: ") + e.what());
    }
    check_keys(j, "", {"instance", "label", "model", "payoff", "transform", "qmc", "damping", "backend", "tp_nodes",
                       "output"});
    RunConfig c;
    try {
        if (j.contains("instance")) {
            if (j.contains("model") || j.contains("payoff")) fail("give either instance or model/payoff, not both");
            Instance inst;
            try {
                inst = find_instance(get_string(j["instance"], "instance"));
            } catch (const Error& e) {
                if (e.code() == Errc::ConfigError) throw;
                fail(e.what());
            }
            c.label = inst.id;
            c.model = inst.model;
            c.payoff = inst.payoff;
            c.transform = inst.transform;
            c.damping = inst.damping;
        } else {
            if (!j.contains("model") || !j.contains("payoff")) fail("model and payoff blocks are required");
            c.model = parse_model(j["model"]);
            c.payoff = parse_payoff(j["payoff"], c.model.dim());
        }
        if (j.contains("label")) c.label = get_string(j["label"], "label");
        if (c.label.empty() || c.label.find_first_of(",\"\n/") != std::string::npos)
            fail("label must be non-empty without commas, quotes or slashes");
        if (j.contains("transform")) parse_transform(j["transform"], c);
        if (j.contains("qmc")) parse_qmc(j["qmc"], c.qmc);
        if (j.contains("damping")) {
            const json& dj = j["damping"];
            if (dj.is_string()) {
                if (dj.get<std::string>() != "auto") fail("damping must be \"auto\" or an array");
                c.damping.reset();
            } else {
                c.damping = get_vec(dj, "damping");
                if (c.damping->size() != c.model.dim()) fail("damping length does not match the model dimension");
            }
        }
        if (j.contains("backend")) {
            try {
                c.backend = parse_backend(get_string(j["backend"], "backend"));
            } catch (const Error& e) {
                if (e.code() == Errc::ConfigError) throw;
                fail(e.what());
            }
        }
        if (j.contains("tp_nodes")) c.tp_nodes = get_count(j["tp_nodes"], "tp_nodes");
        if (j.contains("output")) c.output = get_string(j["output"], "output");
    } catch (const json::exception& e) {
        fail(e.what());
    }
    return c;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_run_config(ss.str());
}

std::string dump_run_config(const RunConfig& c) {
    json j;
    j["label"] = c.label;
    const ModelSpec& m = c.model;
    json mj;
    mj["kind"] = model_name(m.kind);
    mj["spot"] = vec_json(m.spot);
    mj["rate"] = m.rate;
    mj["maturity"] = m.maturity;
    switch (m.kind) {
        case ModelKind::GBM: mj["cov"] = matrix_json(m.cov); break;
        case ModelKind::VG:
            mj["cov"] = matrix_json(m.cov);
            mj["theta"] = vec_json(m.theta);
            mj["nu"] = m.nu;
            break;
        case ModelKind::GH: mj["lambda"] = m.lambda; [[fallthrough]];
        case ModelKind::NIG:
            mj["alpha"] = m.alpha;
            mj["beta"] = vec_json(m.beta);
            mj["delta"] = m.delta;
            mj["shape"] = matrix_json(m.shape);
            break;
    }
    j["model"] = mj;
    json pj;
    pj["kind"] = payoff_name(c.payoff.kind);
    pj["strike"] = c.payoff.strike;
    pj["dim"] = c.payoff.dim;
    if (!c.payoff.weights.empty()) pj["weights"] = vec_json(c.payoff.weights);
    if (c.payoff.kind == PayoffKind::CONCall) pj["cash"] = c.payoff.cash;
    j["payoff"] = pj;
    json tj;
    tj["form"] = form_name(c.transform.form);
    tj["epsilon"] = c.transform.epsilon;
    tj["cov_scale"] = c.transform.cov_scale;
    tj["factor"] = factor_mode_name(c.transform.factor);
    if (!c.transform.sigma.empty()) tj["sigma"] = vec_json(c.transform.sigma);
    if (c.transform.nu) tj["nu"] = *c.transform.nu;
    if (c.family) tj["family"] = family_name(*c.family);
    j["transform"] = tj;
    j["qmc"] = {{"N", c.qmc.N}, {"S", c.qmc.S}, {"seed", c.qmc.seed}, {"c_alpha", c.qmc.c_alpha}};
    j["damping"] = c.damping ? vec_json(*c.damping) : json("auto");
    j["backend"] = backend_name(c.backend);
    j["tp_nodes"] = c.tp_nodes;
    if (!c.output.empty()) j["output"] = c.output;
    return j.dump(2) + "\n";
}

TransformSpec resolve_transform(const RunConfig& c) {
    TransformOptions opt = c.transform;
    if (c.family && opt.form == TransformForm::Auto)
        opt.form = is_product(*c.family) ? TransformForm::Product : TransformForm::Matrix;
    TransformSpec t = default_transform(c.model, opt);
    if (c.family && t.family != *c.family)
        throw Error(Errc::ConfigError, std::string("transform family ") + family_name(*c.family) +
                                           " is not available for this model (rule gives " + family_name(t.family) +
                                           ")");
    return t;
}

PriceEstimate run_price(const RunConfig& c) {
    switch (c.backend) {
        case Backend::RQMC: return price_fourier_rqmc(c.model, c.payoff, c.damping, resolve_transform(c), c.qmc);
        case Backend::MCFourier:
            return price_fourier_mc(c.model, c.payoff, c.damping, resolve_transform(c), c.qmc.N * c.qmc.S,
                                    c.qmc.seed);
        case Backend::TPLaguerre: return price_tp_laguerre(c.model, c.payoff, c.damping, c.tp_nodes);
        case Backend::PhysicalMC: {
            SimulationOptions so;
            so.enable_gig = true;
            return mc_price_physical(c.model, c.payoff, c.qmc.N * c.qmc.S, c.qmc.seed, so);
        }
    }
    throw Error(Errc::InvalidSpec, "backend");
}

}  // namespace fqmc
