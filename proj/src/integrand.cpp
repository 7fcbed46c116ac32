// SPDX-License-Identifier: MIT
#include "fqmc/integrand.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace fqmc {

FourierIntegrand::FourierIntegrand(const ModelSpec& m, const PayoffSpec& p, Vec R, TransformSpec t)
    : model_(m), payoff_(p), R_(std::move(R)), t_(std::move(t)), scaling_(scaling_rule(p, m)) {
    const std::size_t d = model_.dim();
    if (R_.size() != d || t_.d != d) throw Error(Errc::DimensionMismatch, "integrand dimensions differ");
    if (!model_.strip(R_).inside) throw Error(Errc::StripViolation, "damping vector outside the model strip");
    if (!payoff_strip(payoff_, R_).inside)
        throw Error(Errc::StripViolation, "damping vector outside the payoff strip");
    log_prefactor_ = -static_cast<double>(d) * std::log(2.0 * std::numbers::pi) -
                     model_.spec().rate * model_.spec().maturity;
}

cplx FourierIntegrand::log_g(const Vec& y) const {
    const std::size_t d = dim();
    CVec z(d);
    for (std::size_t j = 0; j < d; ++j) z[j] = cplx(y[j], R_[j]);
    return log_prefactor_ + model_.log_char(z, scaling_.x0) + log_payoff_transform(payoff_, z);
}

double FourierIntegrand::g(const Vec& y) const { return std::exp(log_g(y)).real(); }

double FourierIntegrand::log_tail_ratio(const Vec& y) const {
    CVec z(dim());
    for (std::size_t j = 0; j < dim(); ++j) z[j] = cplx(y[j], R_[j]);
    return model_.log_phi(z).real() - proposal_log_pdf(t_, y);
}

double FourierIntegrand::operator()(const double* u) const {
    const std::size_t d = dim();
    Vec y(d), z(d);
    double log_w = 0.0;
    map_to_reals_into(t_, u, y.data(), z.data(), log_w);
    if (log_w == -std::numeric_limits<double>::infinity()) return 0.0;
    return std::exp(log_g(y) + log_w).real();
}

double transformed_integrand(const ModelSpec& m, const PayoffSpec& p, const Vec& R,
                             const TransformSpec& t, const Vec& u) {
    if (u.size() != t.udim) throw Error(Errc::DimensionMismatch, "hypercube point dimension");
    return FourierIntegrand(m, p, R, t)(u.data());
}

namespace {

struct RayShape {
    std::string label;
    std::vector<int> side;  // per coordinate: -1 low, +1 high, 0 held fixed
    double fixed = 0.5;
};

std::vector<RayShape> ray_shapes(const TransformSpec& t) {
    const std::size_t n = t.udim;
    const bool mixture = is_mixture(t.family);
    std::vector<RayShape> out;
    for (std::size_t k = 0; k < n; ++k) {
        for (int s : {-1, 1}) {
            RayShape r;
            r.side.assign(n, 0);
            r.side[k] = s;
            // Moving only W with Z at the median keeps y at the origin.
            if (mixture && k == t.d) r.fixed = 0.75;
            std::ostringstream os;
            os << "axis" << k << (s < 0 ? "-" : "+");
            r.label = os.str();
            out.push_back(std::move(r));
        }
    }
    auto corner = [&](unsigned mask) {
        RayShape r;
        r.side.resize(n);
        std::string signs;
        for (std::size_t k = 0; k < n; ++k) {
            r.side[k] = (mask >> k) & 1u ? 1 : -1;
            signs += r.side[k] < 0 ? '-' : '+';
        }
        r.label = "corner" + signs;
        out.push_back(std::move(r));
    };
    if (n <= 4) {
        for (unsigned mask = 0; mask < (1u << n); ++mask) corner(mask);
    } else {
        corner(0);
        corner((1u << n) - 1u);
    }
    return out;
}

Vec ray_point(const RayShape& r, double level) {
    Vec u(r.side.size());
    for (std::size_t k = 0; k < u.size(); ++k)
        u[k] = r.side[k] < 0 ? level : r.side[k] > 0 ? 1.0 - level : r.fixed;
    return u;
}

}  // namespace

BoundaryReport boundary_probe(const ModelSpec& m, const PayoffSpec& p, const Vec& R,
                              const TransformSpec& t) {
    const FourierIntegrand f(m, p, R, t);
    BoundaryReport rep;
    rep.levels = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7};

    auto measure = [&](const Vec& u, double& ratio, double& integrand, bool clamp = true) {
        Vec y(t.d), z(t.d);
        double log_w = 0.0;
        map_to_reals_into(t, u.data(), y.data(), z.data(), log_w, clamp);
        if (log_w == -std::numeric_limits<double>::infinity()) {
            ratio = integrand = 0.0;
            return;
        }
        ratio = std::exp(f.log_tail_ratio(y));
        integrand = std::exp(f.log_g(y).real() + log_w);
    };

    {
        double r = 0.0;
        measure(Vec(t.udim, 0.5), r, rep.center);
    }
    for (const RayShape& shape : ray_shapes(t)) {
        ProbeRay ray;
        ray.label = shape.label;
        for (double level : rep.levels) {
            double r = 0.0, g = 0.0;
            measure(ray_point(shape, level), r, g);
            ray.ratio.push_back(r);
            ray.integrand.push_back(g);
        }
        const std::size_t n = ray.ratio.size();
        const double a = ray.ratio[n - 3], b = ray.ratio[n - 2], c = ray.ratio[n - 1];
        ray.diverging = a < b && b < c && c > kProbeGrowth * a;
        rep.diverging = rep.diverging || ray.diverging;
        if (shape.label.rfind("corner", 0) == 0 && shape.label.find('+') == std::string::npos) {
            double g = 0.0;
            measure(ray_point(shape, 1e-100), rep.corner_limit, g, false);
        }
        rep.rays.push_back(std::move(ray));
    }
    return rep;
}

}  // namespace fqmc
