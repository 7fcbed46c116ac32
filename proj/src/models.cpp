// SPDX-License-Identifier: MIT
#include "fqmc/models.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace fqmc {

const char* model_name(ModelKind k) noexcept {
    switch (k) {
        case ModelKind::GBM: return "GBM";
        case ModelKind::VG: return "VG";
        case ModelKind::NIG: return "NIG";
        case ModelKind::GH: return "GH";
    }
    return "?";
}

ModelKind parse_model_kind(const std::string& s) {
    if (s == "GBM") return ModelKind::GBM;
    if (s == "VG") return ModelKind::VG;
    if (s == "NIG") return ModelKind::NIG;
    if (s == "GH") return ModelKind::GH;
    throw Error(Errc::InvalidSpec, "unknown model kind '" + s + "' (GBM, VG, NIG, GH)");
}

namespace {

Matrix corr_or_identity(const Matrix& corr, std::size_t d) {
    return corr.dim() == 0 ? Matrix::identity(d) : corr;
}

void invalid(const std::string& msg) { throw Error(Errc::InvalidSpec, msg); }

Matrix vol_covariance(const Vec& sigma, const Matrix& corr) {
    for (double s : sigma)
        if (!(s > 0.0) || !std::isfinite(s)) invalid("volatilities must be positive and finite");
    return Matrix::covariance(sigma, corr_or_identity(corr, sigma.size()));
}

}  // namespace

ModelSpec make_gbm(Vec spot, Vec sigma, double rate, double maturity, const Matrix& corr) {
    ModelSpec m;
    m.kind = ModelKind::GBM;
    m.cov = vol_covariance(sigma, corr);
    m.spot = std::move(spot);
    m.rate = rate;
    m.maturity = maturity;
    return m;
}

ModelSpec make_vg(Vec spot, Vec sigma, Vec theta, double nu, double rate, double maturity,
                  const Matrix& corr) {
    ModelSpec m;
    m.kind = ModelKind::VG;
    m.cov = vol_covariance(sigma, corr);
    m.spot = std::move(spot);
    m.theta = std::move(theta);
    m.nu = nu;
    m.rate = rate;
    m.maturity = maturity;
    return m;
}

ModelSpec make_nig(Vec spot, double alpha, Vec beta, double delta, double rate, double maturity,
                   const Matrix& shape) {
    ModelSpec m = make_gh(std::move(spot), alpha, std::move(beta), delta, -0.5, rate, maturity, shape);
    m.kind = ModelKind::NIG;
    return m;
}

ModelSpec make_gh(Vec spot, double alpha, Vec beta, double delta, double lambda, double rate,
                  double maturity, const Matrix& shape) {
    ModelSpec m;
    m.kind = ModelKind::GH;
    m.shape = shape.dim() == 0 ? Matrix::identity(spot.size()) : shape;
    m.spot = std::move(spot);
    m.alpha = alpha;
    m.beta = std::move(beta);
    m.delta = delta;
    m.lambda = lambda;
    m.rate = rate;
    m.maturity = maturity;
    return m;
}

void validate(const ModelSpec& m) {
    const std::size_t d = m.dim();
    if (d == 0) invalid("model dimension must be at least 1");
    for (double s : m.spot)
        if (!(s > 0.0) || !std::isfinite(s)) invalid("spot prices must be positive and finite");
    if (!(m.maturity > 0.0) || !std::isfinite(m.maturity)) invalid("maturity must be positive");
    if (!std::isfinite(m.rate)) invalid("rate must be finite");

    auto check_spd = [&](const Matrix& a, const char* name) {
        if (a.dim() != d)
            throw Error(Errc::DimensionMismatch, std::string(name) + " has the wrong dimension");
        if (!a.is_symmetric(1e-14 * std::max(1.0, a.max_abs())))
            invalid(std::string(name) + " must be symmetric");
        (void)cholesky(a);
    };

    switch (m.kind) {
        case ModelKind::GBM: check_spd(m.cov, "covariance"); break;
        case ModelKind::VG: {
            check_spd(m.cov, "covariance");
            if (m.theta.size() != d) throw Error(Errc::DimensionMismatch, "theta has the wrong length");
            if (!(m.nu > 0.0)) invalid("VG nu must be positive");
            for (std::size_t j = 0; j < d; ++j) {
                const double c = 1.0 - m.nu * m.theta[j] - 0.5 * m.nu * m.cov(j, j);
                if (!(c > 0.0)) invalid("VG parameters admit no martingale correction");
            }
            break;
        }
        case ModelKind::NIG:
        case ModelKind::GH: {
            check_spd(m.shape, "shape matrix");
            if (m.beta.size() != d) throw Error(Errc::DimensionMismatch, "beta has the wrong length");
            if (!(m.alpha > 0.0)) invalid("alpha must be positive");
            if (!(m.delta > 0.0)) invalid("delta must be positive");
            if (!std::isfinite(m.lambda)) invalid("lambda must be finite");
            const double det = std::exp(log_det_spd(m.shape));
            if (std::abs(det - 1.0) > 1e-8) invalid("shape matrix must have unit determinant");
            const double a2 = m.alpha * m.alpha;
            if (!(a2 > quad_form(m.shape, m.beta))) invalid("need alpha^2 > beta' Delta beta");
            for (std::size_t j = 0; j < d; ++j) {
                Vec b = m.beta;
                b[j] += 1.0;
                if (!(a2 > quad_form(m.shape, b)))
                    invalid("alpha too small for a martingale correction (need alpha^2 > (beta+e_j)' Delta (beta+e_j))");
            }
            break;
        }
    }
}

std::vector<std::string> model_warnings(const ModelSpec& m) {
    std::vector<std::string> w;
    if (m.kind == ModelKind::VG && !(2.0 * m.maturity / m.nu > static_cast<double>(m.dim()))) {
        std::ostringstream os;
        os << "VG with 2T/nu = " << 2.0 * m.maturity / m.nu << " <= d = " << m.dim()
           << ": the matrix Student-t transform is unavailable";
        w.push_back(os.str());
    }
    return w;
}

// ===========================================================================
// Model
// ===========================================================================

Model::Model(ModelSpec spec) : spec_(std::move(spec)) {
    validate(spec_);
    const std::size_t d = dim();
    const double T = spec_.maturity;
    if (spec_.kind == ModelKind::GH) {
        const double a = spec_.alpha * spec_.alpha - quad_form(spec_.shape, spec_.beta);
        const double w = spec_.delta * T * std::sqrt(a);
        gh_logk_a_ = std::log(bessel_k_scaled(spec_.lambda, cplx(w, 0.0)).real()) - w;
        gh_log_a_ = std::log(a);
    }
    // μ_j = -(1/T) log φ(-i e_j), valid for every model.
    mu_.assign(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        CVec z(d, 0.0);
        z[j] = cplx(0.0, -1.0);
        mu_[j] = -log_phi(z).real() / T;
    }
}

Vec Model::log_spot() const {
    Vec x(dim());
    for (std::size_t j = 0; j < dim(); ++j) x[j] = std::log(spec_.spot[j]);
    return x;
}

cplx Model::log_phi(const CVec& z) const {
    const ModelSpec& m = spec_;
    const std::size_t d = dim();
    if (z.size() != d) throw Error(Errc::DimensionMismatch, "characteristic function argument");
    const double T = m.maturity;
    const cplx i(0.0, 1.0);

    switch (m.kind) {
        case ModelKind::GBM: return -0.5 * T * bilinear(m.cov, z, z);
        case ModelKind::VG: {
            cplx zt = 0.0;
            for (std::size_t j = 0; j < d; ++j) zt += z[j] * m.theta[j];
            const cplx base = 1.0 - i * m.nu * zt + 0.5 * m.nu * bilinear(m.cov, z, z);
            return -(T / m.nu) * std::log(base);
        }
        case ModelKind::NIG:
        case ModelKind::GH: {
            CVec bz(d);
            for (std::size_t j = 0; j < d; ++j) bz[j] = m.beta[j] + i * z[j];
            const double a = m.alpha * m.alpha - quad_form(m.shape, m.beta);
            const cplx b = m.alpha * m.alpha - bilinear(m.shape, bz, bz);
            if (!(b.real() > 0.0))
                throw Error(Errc::StripViolation, "radicand left the right half-plane");
            const double dt = m.delta * T;
            if (m.kind == ModelKind::NIG) return dt * (std::sqrt(a) - std::sqrt(b));
            const cplx wb = dt * std::sqrt(b);
            const cplx logk_b = std::log(bessel_k_scaled(m.lambda, wb)) - wb;
            return 0.5 * m.lambda * (gh_log_a_ - std::log(b)) + logk_b - gh_logk_a_;
        }
    }
    return 0.0;
}

cplx Model::log_char(const CVec& z, const Vec& x0) const {
    const std::size_t d = dim();
    if (x0.size() != d) throw Error(Errc::DimensionMismatch, "initial log-coordinates");
    const double T = spec_.maturity;
    cplx lin = 0.0;
    for (std::size_t j = 0; j < d; ++j) lin += z[j] * (x0[j] + (spec_.rate + mu_[j]) * T);
    return cplx(0.0, 1.0) * lin + log_phi(z);
}

StripCheck Model::strip(const Vec& R) const {
    const ModelSpec& m = spec_;
    if (R.size() != dim()) throw Error(Errc::DimensionMismatch, "damping vector length");
    switch (m.kind) {
        case ModelKind::GBM: return {true, std::numeric_limits<double>::infinity()};
        case ModelKind::VG: {
            double rt = 0.0;
            for (std::size_t j = 0; j < dim(); ++j) rt += R[j] * m.theta[j];
            const double c = 1.0 + m.nu * rt - 0.5 * m.nu * quad_form(m.cov, R);
            return {c > 0.0, c};
        }
        case ModelKind::NIG:
        case ModelKind::GH: {
            Vec br(dim());
            for (std::size_t j = 0; j < dim(); ++j) br[j] = m.beta[j] - R[j];
            const double c = m.alpha * m.alpha - quad_form(m.shape, br);
            return {c > 0.0, c};
        }
    }
    return {};
}

double Model::strip_scale() const noexcept {
    if (spec_.kind == ModelKind::NIG || spec_.kind == ModelKind::GH) return spec_.alpha * spec_.alpha;
    return 1.0;
}

Vec drift_correction(const ModelSpec& m) { return Model(m).drift(); }

cplx char_function(const ModelSpec& m, const CVec& z) {
    const Model model(m);
    Vec R(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) R[j] = z[j].imag();
    if (!model.strip(R).inside) throw Error(Errc::StripViolation, "Im z outside the model strip");
    return std::exp(model.log_char(z, model.log_spot()));
}

StripCheck in_strip(const ModelSpec& m, const Vec& R) { return Model(m).strip(R); }

}  // namespace fqmc
