// SPDX-License-Identifier: MIT
#include "fqmc/transform.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "fqmc/qmc.hpp"

namespace fqmc {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kLogPi = 1.1447298858494001741;

Matrix make_factor(const Matrix& a, FactorMode mode) {
    if (mode == FactorMode::Cholesky) return cholesky(a);
    const EigenDecomposition e = sym_eig(a);
    const std::size_t n = a.dim();
    Matrix f(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (!(e.values[k] > 0.0))
            throw Error(Errc::NotPositiveDefinite, "spectral factor: nonpositive eigenvalue");
        const double s = std::sqrt(e.values[k]);
        for (std::size_t i = 0; i < n; ++i) f(i, k) = e.vectors(i, k) * s;
    }
    return f;
}

// log K_v(x) for real x > 0.
double log_bessel_k_real(double v, double x) {
    v = std::abs(v);
    if (x < 500.0) return std::log(std::cyl_bessel_k(v, x));
    const double m = 4.0 * v * v;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 6; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (m - odd * odd) / (k * 8.0 * x);
        sum += term;
    }
    return 0.5 * std::log(std::numbers::pi / (2.0 * x)) - x + std::log(sum);
}

// Density in terms of the quadratic form q = yᵀΣ̃⁻¹y.
double log_pdf_from_q(const TransformSpec& t, double q) {
    const double dd = static_cast<double>(t.d);
    switch (t.family) {
        case TransformFamily::GaussianMatrix: return t.log_norm - 0.5 * q;
        case TransformFamily::LaplaceMixture: {
            const double v = (2.0 - dd) / 2.0;
            if (q <= 0.0) {
                if (t.d == 1) return t.log_norm + std::log(std::sqrt(std::numbers::pi) / 2.0);
                throw Error(Errc::DomainError, "Laplace density is singular at the origin for d >= 2");
            }
            return t.log_norm + 0.5 * v * std::log(0.5 * q) + log_bessel_k_real(v, std::sqrt(2.0 * q));
        }
        case TransformFamily::StudentMixture:
            return t.log_norm - 0.5 * (t.nu + dd) * std::log1p(q / t.nu);
        default: break;
    }
    throw Error(Errc::InvalidSpec, "quadratic-form density requested for a product family");
}

double quantile(const TransformSpec& t, std::size_t j, double u) {
    switch (t.family) {
        case TransformFamily::GaussianProduct: return t.sigma[j] * norm_icdf(u);
        case TransformFamily::LaplaceProduct: return laplace_icdf(u, t.sigma[j]);
        case TransformFamily::StudentProduct: return student_t_icdf(u, t.nu, t.sigma[j]);
        default: break;
    }
    return 0.0;
}

double product_log_pdf_1d(const TransformSpec& t, std::size_t j, double y) {
    const double s = t.sigma[j];
    switch (t.family) {
        case TransformFamily::GaussianProduct: {
            const double x = y / s;
            return -0.5 * x * x - std::log(s) - 0.5 * kLog2Pi;
        }
        case TransformFamily::LaplaceProduct: return -std::abs(y) / s - std::log(2.0 * s);
        case TransformFamily::StudentProduct: {
            const double x = y / s;
            return t.log_norm - std::log(s) - 0.5 * (t.nu + 1.0) * std::log1p(x * x / t.nu);
        }
        default: break;
    }
    return 0.0;
}

}  // namespace

const char* family_name(TransformFamily f) noexcept {
    switch (f) {
        case TransformFamily::GaussianProduct: return "GaussianProduct";
        case TransformFamily::GaussianMatrix: return "GaussianMatrix";
        case TransformFamily::LaplaceProduct: return "LaplaceProduct";
        case TransformFamily::LaplaceMixture: return "LaplaceMixture";
        case TransformFamily::StudentProduct: return "StudentProduct";
        case TransformFamily::StudentMixture: return "StudentMixture";
    }
    return "?";
}

TransformFamily parse_family(const std::string& s) {
    for (auto f : {TransformFamily::GaussianProduct, TransformFamily::GaussianMatrix,
                   TransformFamily::LaplaceProduct, TransformFamily::LaplaceMixture,
                   TransformFamily::StudentProduct, TransformFamily::StudentMixture})
        if (s == family_name(f)) return f;
    throw Error(Errc::InvalidSpec, "unknown transform family '" + s + "'");
}

bool is_product(TransformFamily f) noexcept {
    return f == TransformFamily::GaussianProduct || f == TransformFamily::LaplaceProduct ||
           f == TransformFamily::StudentProduct;
}

bool is_mixture(TransformFamily f) noexcept {
    return f == TransformFamily::LaplaceMixture || f == TransformFamily::StudentMixture;
}

const char* form_name(TransformForm f) noexcept {
    switch (f) {
        case TransformForm::Auto: return "auto";
        case TransformForm::Product: return "product";
        case TransformForm::Matrix: return "matrix";
    }
    return "?";
}

const char* factor_mode_name(FactorMode m) noexcept {
    return m == FactorMode::Spectral ? "spectral" : "cholesky";
}

TransformForm parse_form(const std::string& s) {
    if (s == "auto") return TransformForm::Auto;
    if (s == "product") return TransformForm::Product;
    if (s == "matrix") return TransformForm::Matrix;
    throw Error(Errc::InvalidSpec, "unknown transform form '" + s + "' (auto, product, matrix)");
}

FactorMode parse_factor_mode(const std::string& s) {
    if (s == "cholesky") return FactorMode::Cholesky;
    if (s == "spectral") return FactorMode::Spectral;
    throw Error(Errc::InvalidSpec, "unknown factor mode '" + s + "' (cholesky, spectral)");
}

TransformSpec make_transform(TransformFamily family, std::size_t d, Vec sigma, Matrix cov, double nu,
                             FactorMode mode) {
    if (d == 0) throw Error(Errc::InvalidSpec, "transform dimension must be at least 1");
    TransformSpec t;
    t.family = family;
    t.d = d;
    t.udim = is_mixture(family) ? d + 1 : d;
    t.factor_mode = mode;
    const double dd = static_cast<double>(d);

    const bool student = family == TransformFamily::StudentProduct || family == TransformFamily::StudentMixture;
    if (student) {
        if (!(nu > 0.0) || !std::isfinite(nu))
            throw Error(Errc::InvalidSpec, "Student transform needs nu > 0");
        t.nu = nu;
    }

    if (is_product(family)) {
        if (sigma.size() == 1 && d > 1) sigma.assign(d, sigma[0]);
        if (sigma.size() != d) throw Error(Errc::DimensionMismatch, "transform scale vector length");
        for (double s : sigma)
            if (!(s > 0.0) || !std::isfinite(s))
                throw Error(Errc::InvalidSpec, "transform scales must be positive");
        t.sigma = std::move(sigma);
        if (student)
            t.log_norm = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * (std::log(nu) + kLogPi);
        return t;
    }

    if (cov.dim() != d) throw Error(Errc::DimensionMismatch, "transform matrix dimension");
    if (!cov.is_symmetric(1e-12 * std::max(1.0, cov.max_abs())))
        throw Error(Errc::InvalidSpec, "transform matrix must be symmetric");
    t.cov = std::move(cov);
    t.cov_inv = inverse_spd(t.cov);
    t.log_det_cov = log_det_spd(t.cov);
    if (family == TransformFamily::StudentMixture) {
        Matrix scaled = t.cov;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) scaled(i, j) *= nu;
        t.factor = make_factor(scaled, mode);
        t.log_norm = std::lgamma(0.5 * (nu + dd)) - std::lgamma(0.5 * nu) -
                     0.5 * dd * (std::log(nu) + kLogPi) - 0.5 * t.log_det_cov;
    } else {
        t.factor = make_factor(t.cov, mode);
        if (family == TransformFamily::GaussianMatrix)
            t.log_norm = -0.5 * dd * kLog2Pi - 0.5 * t.log_det_cov;
        else
            t.log_norm = std::log(2.0) - 0.5 * dd * kLog2Pi - 0.5 * t.log_det_cov;
    }
    return t;
}

double vg_student_scale(double nu_model, double sigma_j, double maturity, double nu_t) {
    const double log_c = 0.5 * (std::log(nu_t) + kLogPi) + std::lgamma(0.5 * nu_t) - std::lgamma(0.5 * (nu_t + 1.0));
    const double den = nu_model - 2.0 * maturity;
    return std::exp(maturity / den * std::log(0.5 * nu_model * sigma_j * sigma_j * nu_t) -
                    nu_model / den * log_c);
}

TransformSpec default_transform(const ModelSpec& m, const TransformOptions& opt) {
    validate(m);
    const std::size_t d = m.dim();
    const double T = m.maturity;
    const double eps = opt.epsilon;
    if (!(eps >= 0.0)) throw Error(Errc::InvalidSpec, "transform epsilon must be nonnegative");

    bool product = false;
    switch (opt.form) {
        case TransformForm::Product: product = true; break;
        case TransformForm::Matrix: product = false; break;
        case TransformForm::Auto:
            product = d == 1 || (m.kind == ModelKind::GBM && m.cov.is_diagonal());
            break;
    }

    auto broadcast = [&](Vec s) {
        if (!opt.sigma.empty()) s = opt.sigma.size() == 1 ? Vec(d, opt.sigma[0]) : opt.sigma;
        return s;
    };
    auto matrix_rule = [&](Matrix base, double factor, double shift) {
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) base(i, j) *= factor * opt.cov_scale;
            base(i, i) += shift;
        }
        return base;
    };

    switch (m.kind) {
        case ModelKind::GBM: {
            if (product) {
                Vec s(d);
                for (std::size_t j = 0; j < d; ++j) s[j] = 1.0 / (std::sqrt(T * m.cov(j, j))) + eps;
                return make_transform(TransformFamily::GaussianProduct, d, broadcast(s), {}, 0.0, opt.factor);
            }
            return make_transform(TransformFamily::GaussianMatrix, d, {},
                                  matrix_rule(inverse_spd(m.cov), 1.0 / T, eps), 0.0, opt.factor);
        }
        case ModelKind::NIG:
        case ModelKind::GH: {
            const double dt = m.delta * T;
            if (product) {
                Vec s(d);
                for (std::size_t j = 0; j < d; ++j) s[j] = 1.0 / (dt * std::sqrt(m.shape(j, j))) + eps;
                return make_transform(TransformFamily::LaplaceProduct, d, broadcast(s), {}, 0.0, opt.factor);
            }
            return make_transform(TransformFamily::LaplaceMixture, d, {},
                                  matrix_rule(inverse_spd(m.shape), 2.0 / (dt * dt), eps), 0.0, opt.factor);
        }
        case ModelKind::VG: {
            const double k = product ? 1.0 : static_cast<double>(d);
            const double critical = 2.0 * T / m.nu - k;
            const double nu_t = opt.nu ? *opt.nu : critical - eps;
            if (!(critical > 0.0) && !opt.nu) {
                std::ostringstream os;
                os << "VG Student-t rule needs 2T/nu > " << k << " (2T/nu = " << 2.0 * T / m.nu << ")";
                throw Error(Errc::RuleUnavailable, os.str());
            }
            if (!(nu_t > 0.0)) throw Error(Errc::RuleUnavailable, "VG Student-t rule gives nu <= 0");
            if (product) {
                Vec s(d);
                for (std::size_t j = 0; j < d; ++j) s[j] = vg_student_scale(m.nu, std::sqrt(m.cov(j, j)), T, nu_t);
                return make_transform(TransformFamily::StudentProduct, d, broadcast(s), {}, nu_t, opt.factor);
            }
            return make_transform(TransformFamily::StudentMixture, d, {},
                                  matrix_rule(inverse_spd(m.cov), 1.0, 0.0), nu_t, opt.factor);
        }
    }
    throw Error(Errc::InvalidSpec, "unknown model kind");
}

double proposal_log_pdf(const TransformSpec& t, const Vec& y) {
    if (y.size() != t.d) throw Error(Errc::DimensionMismatch, "proposal density argument");
    if (is_product(t.family)) {
        double s = 0.0;
        for (std::size_t j = 0; j < t.d; ++j) s += product_log_pdf_1d(t, j, y[j]);
        return s;
    }
    return log_pdf_from_q(t, quad_form(t.cov_inv, y));
}

double proposal_pdf(const TransformSpec& t, const Vec& y) { return std::exp(proposal_log_pdf(t, y)); }

void map_to_reals_into(const TransformSpec& t, const double* u, double* y, double* z, double& log_weight,
                       bool clamp) {
    const std::size_t d = t.d;
    auto clamp_unit = [clamp](double v) { return clamp ? fqmc::clamp_unit(v) : v; };
    if (is_product(t.family)) {
        double lp = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            y[j] = quantile(t, j, clamp_unit(u[j]));
            lp += product_log_pdf_1d(t, j, y[j]);
        }
        log_weight = -lp;
        return;
    }
    double zz = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        z[j] = norm_icdf(clamp_unit(u[j]));
        zz += z[j] * z[j];
    }
    double scale = 1.0, q = zz;
    if (t.family == TransformFamily::LaplaceMixture) {
        const double w = exp_icdf(clamp_unit(u[d]), 1.0);
        scale = std::sqrt(w);
        q = w * zz;
    } else if (t.family == TransformFamily::StudentMixture) {
        const double w = chi2_icdf(clamp_unit(u[d]), t.nu);
        scale = 1.0 / std::sqrt(w);
        q = t.nu * zz / w;
    }
    for (std::size_t i = 0; i < d; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) s += t.factor(i, k) * z[k];
        y[i] = scale * s;
    }
    if (t.family == TransformFamily::LaplaceMixture && q <= 0.0 && d >= 2) {
        // Density is infinite at the origin: the point carries zero weight.
        log_weight = -std::numeric_limits<double>::infinity();
        return;
    }
    log_weight = -log_pdf_from_q(t, q);
}

MappedPoint map_to_reals(const TransformSpec& t, const double* u) {
    MappedPoint p;
    p.y.assign(t.d, 0.0);
    Vec z(t.d);
    map_to_reals_into(t, u, p.y.data(), z.data(), p.log_weight);
    return p;
}

MappedPoint map_to_reals(const TransformSpec& t, const Vec& u) {
    if (u.size() != t.udim) throw Error(Errc::DimensionMismatch, "hypercube point dimension");
    return map_to_reals(t, u.data());
}

double mixture_identity_check(const TransformSpec& t) {
    if (!is_mixture(t.family)) return 0.0;
    const std::size_t d = t.d;
    const double dd = static_cast<double>(d);
    const Matrix lc = cholesky(t.cov);
    const std::vector<double> pts = sobol_points(d, 22);

    double worst = 0.0;
    for (std::size_t k = 2; k < 22; ++k) {
        Vec z(d);
        for (std::size_t j = 0; j < d; ++j) z[j] = 1.5 * norm_icdf(pts[k * d + j]);
        const Vec y = mat_vec(lc, z);
        const double q = quad_form(t.cov_inv, y);
        const double closed = proposal_pdf(t, y);

        // Conditional normal density given the mixing value w, in s = log w.
        std::function<double(double)> f;
        double hi;
        if (t.family == TransformFamily::LaplaceMixture) {
            f = [&](double s) {
                const double w = std::exp(s);
                return w * std::exp(-w - 0.5 * dd * (kLog2Pi + s) - 0.5 * t.log_det_cov - 0.5 * q / w);
            };
            hi = std::log(800.0);
        } else {
            const double nu = t.nu;
            f = [&, nu](double s) {
                const double w = std::exp(s);
                const double log_chi2 = (0.5 * nu - 1.0) * s - 0.5 * w - 0.5 * nu * std::log(2.0) - std::lgamma(0.5 * nu);
                const double log_norm = -0.5 * dd * (kLog2Pi + std::log(nu) - s) - 0.5 * t.log_det_cov - 0.5 * q * w / nu;
                return w * std::exp(log_chi2 + log_norm);
            };
            hi = std::log(nu + 60.0 * std::sqrt(2.0 * nu) + 200.0);
        }
        const double quad = integrate_adaptive(f, -60.0, hi, 1e-16, 1e-13, 20000);
        worst = std::max(worst, std::abs(closed - quad));
    }
    return worst;
}

std::string describe(const TransformSpec& t) {
    std::ostringstream os;
    os.precision(6);
    os << family_name(t.family);
    if (is_product(t.family)) {
        os << " sigma=[";
        for (std::size_t j = 0; j < t.d; ++j) os << (j ? "," : "") << t.sigma[j];
        os << "]";
    } else {
        os << " cov_diag=[";
        for (std::size_t j = 0; j < t.d; ++j) os << (j ? "," : "") << t.cov(j, j);
        os << "]";
    }
    if (t.family == TransformFamily::StudentProduct || t.family == TransformFamily::StudentMixture)
        os << " nu=" << t.nu;
    return os.str();
}

}  // namespace fqmc
