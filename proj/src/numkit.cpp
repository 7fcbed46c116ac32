// SPDX-License-Identifier: MIT
#include "fqmc/numkit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

namespace fqmc {

const char* errc_name(Errc c) noexcept {
    switch (c) {
        case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
        case Errc::NoConvergence: return "NoConvergence";
        case Errc::DomainError: return "DomainError";
        case Errc::PoleError: return "PoleError";
        case Errc::StripViolation: return "StripViolation";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::InvalidSpec: return "InvalidSpec";
        case Errc::InfeasibleRegion: return "InfeasibleRegion";
        case Errc::NonConvergence: return "NonConvergence";
        case Errc::RuleUnavailable: return "RuleUnavailable";
        case Errc::NonFiniteIntegrand: return "NonFiniteIntegrand";
        case Errc::DimensionUnsupported: return "DimensionUnsupported";
        case Errc::DimensionTooLarge: return "DimensionTooLarge";
        case Errc::SubordinatorUnavailable: return "SubordinatorUnavailable";
        case Errc::BudgetExceeded: return "BudgetExceeded";
        case Errc::ConfigError: return "ConfigError";
        case Errc::SchemaError: return "SchemaError";
    }
    return "Error";
}

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min();

void require_unit(double u, const char* who) {
    if (!(u > 0.0 && u < 1.0)) {
        std::ostringstream os;
        os << who << ": probability " << u << " outside (0,1)";
        throw Error(Errc::DomainError, os.str());
    }
}
}  // namespace

// ===========================================================================
// Matrix
// ===========================================================================

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(const Vec& d) {
    Matrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

Matrix Matrix::covariance(const Vec& sigma, const Matrix& corr) {
    if (corr.dim() != sigma.size())
        throw Error(Errc::DimensionMismatch, "covariance: correlation and volatility sizes differ");
    Matrix m(sigma.size());
    for (std::size_t i = 0; i < sigma.size(); ++i)
        for (std::size_t j = 0; j < sigma.size(); ++j) m(i, j) = corr(i, j) * sigma[i] * sigma[j];
    return m;
}

double Matrix::max_abs() const noexcept {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
}

bool Matrix::is_symmetric(double tol) const noexcept {
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i + 1; j < n_; ++j)
            if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
    return true;
}

bool Matrix::is_diagonal() const noexcept {
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
            if (i != j && (*this)(i, j) != 0.0) return false;
    return true;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.dim() != b.dim()) throw Error(Errc::DimensionMismatch, "matrix product");
    const std::size_t n = a.dim();
    Matrix c(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) t(j, i) = a(i, j);
    return t;
}

Vec mat_vec(const Matrix& a, const Vec& x) {
    if (a.dim() != x.size()) throw Error(Errc::DimensionMismatch, "matrix-vector product");
    Vec y(x.size(), 0.0);
    for (std::size_t i = 0; i < a.dim(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.dim(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

double quad_form(const Matrix& a, const Vec& x) {
    if (a.dim() != x.size()) throw Error(Errc::DimensionMismatch, "quadratic form");
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        double r = 0.0;
        for (std::size_t j = 0; j < a.dim(); ++j) r += a(i, j) * x[j];
        s += x[i] * r;
    }
    return s;
}

cplx bilinear(const Matrix& a, const CVec& x, const CVec& y) {
    if (a.dim() != x.size() || a.dim() != y.size())
        throw Error(Errc::DimensionMismatch, "bilinear form");
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        cplx r = 0.0;
        for (std::size_t j = 0; j < a.dim(); ++j) r += a(i, j) * y[j];
        s += x[i] * r;
    }
    return s;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.dim() != b.dim()) throw Error(Errc::DimensionMismatch, "matrix difference");
    double m = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

Matrix cholesky(const SymMatrix& a) {
    const std::size_t n = a.dim();
    if (n == 0) throw Error(Errc::DimensionMismatch, "cholesky: empty matrix");
    Matrix l(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = a(j, j);
        for (std::size_t k = 0; k < j; ++k) s -= l(j, k) * l(j, k);
        if (!(s > 0.0)) {
            std::ostringstream os;
            os << "cholesky: pivot " << j << " is " << s;
            throw Error(Errc::NotPositiveDefinite, os.str());
        }
        const double d = std::sqrt(s);
        l(j, j) = d;
        for (std::size_t i = j + 1; i < n; ++i) {
            double t = a(i, j);
            for (std::size_t k = 0; k < j; ++k) t -= l(i, k) * l(j, k);
            l(i, j) = t / d;
        }
    }
    return l;
}

EigenDecomposition sym_eig(const SymMatrix& input) {
    const std::size_t n = input.dim();
    Matrix a = input;
    Matrix v = Matrix::identity(n);
    const double scale = std::max(a.max_abs(), kTiny);

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    constexpr int kMaxSweeps = 100;
    int sweep = 0;
    for (; sweep < kMaxSweeps && off_norm() > 1e-15 * scale; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    if (off_norm() > 1e-15 * scale && off_norm() > 1e-13 * scale)
        throw Error(Errc::NoConvergence, "sym_eig: Jacobi sweeps exhausted");

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

    EigenDecomposition out{Vec(n), Matrix(n)};
    for (std::size_t c = 0; c < n; ++c) {
        out.values[c] = a(order[c], order[c]);
        for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
    }
    return out;
}

Matrix inverse_spd(const SymMatrix& a) {
    const Matrix l = cholesky(a);
    const std::size_t n = a.dim();
    // Invert L by forward substitution, then A⁻¹ = L⁻ᵀ L⁻¹.
    Matrix li(n);
    for (std::size_t j = 0; j < n; ++j) {
        li(j, j) = 1.0 / l(j, j);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = 0.0;
            for (std::size_t k = j; k < i; ++k) s += l(i, k) * li(k, j);
            li(i, j) = -s / l(i, i);
        }
    }
    Matrix inv(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double s = 0.0;
            for (std::size_t k = i; k < n; ++k) s += li(k, i) * li(k, j);
            inv(i, j) = s;
            inv(j, i) = s;
        }
    return inv;
}

double log_det_spd(const SymMatrix& a) {
    const Matrix l = cholesky(a);
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::log(l(i, i));
    return 2.0 * s;
}

// ===========================================================================
// Clamp
// ===========================================================================

namespace {
std::atomic<bool> g_clamp_fired{false};
}

double clamp_unit(double u) noexcept {
    if (u >= kUnitClamp && u <= 1.0 - kUnitClamp) return u;
    if (!g_clamp_fired.exchange(true))
        std::fprintf(stderr, "fqmc: note: probability clamped into [2^-53, 1-2^-53]\n");
    return std::clamp(u, kUnitClamp, 1.0 - kUnitClamp);
}

bool clamp_fired() noexcept { return g_clamp_fired.load(); }

// ===========================================================================
// Normal
// ===========================================================================

double norm_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double norm_pdf(double x) noexcept { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

namespace {

// Wichura's AS241 (PPND16) for the lower half, u <= 0.5.
double ppnd16_lower(double p) {
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                   1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                   5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }
    double r = std::sqrt(-std::log(p));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
              4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
              2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
              5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
    }
    return -x;
}

}  // namespace

double norm_icdf(double u) {
    require_unit(u, "norm_icdf");
    if (u > 0.5) return -norm_icdf(1.0 - u);
    double x = ppnd16_lower(u);
    // One Halley step against the erfc-based CDF.
    const double e = norm_cdf(x) - u;
    const double t = e * std::sqrt(2.0 * kPi) * std::exp(0.5 * x * x);
    if (std::isfinite(t)) x -= t / (1.0 + 0.5 * x * t);
    return x;
}

// ===========================================================================
// Incomplete gamma, chi-squared
// ===========================================================================

namespace {

double gamma_series(double a, double x) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 10000; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_cfrac(double a, double x) {
    double b = x + 1.0 - a, c = 1.0 / 1e-300, d = 1.0 / b, h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw Error(Errc::DomainError, "gamma_p: need a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_series(a, x);
    return 1.0 - gamma_cfrac(a, x);
}

double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw Error(Errc::DomainError, "gamma_q: need a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_series(a, x);
    return gamma_cfrac(a, x);
}

double chi2_cdf(double x, double k) {
    if (x <= 0.0) return 0.0;
    return gamma_p(0.5 * k, 0.5 * x);
}

double chi2_icdf(double u, double k) {
    require_unit(u, "chi2_icdf");
    if (!(k > 0.0)) throw Error(Errc::DomainError, "chi2_icdf: degrees of freedom must be positive");
    const double a = 0.5 * k;
    const double lga = std::lgamma(a);
    const bool lower = u < 0.5;
    const double target = lower ? u : 1.0 - u;

    // Wilson-Hilferty start in the gamma variable g = x/2.
    const double z = norm_icdf(u);
    const double c = 1.0 / (9.0 * a);
    double g = a * std::pow(1.0 - c + z * std::sqrt(c), 3);
    const double g_small = std::exp((std::log(u) + std::lgamma(a + 1.0)) / a);
    if (!(g > 0.0) || (lower && g_small < 0.5 * a)) g = std::max(g_small, kTiny);

    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 100; ++it) {
        // f increasing in g either way.
        const double f = lower ? gamma_p(a, g) - target : target - gamma_q(a, g);
        if (f == 0.0) return 2.0 * g;
        if (f < 0.0) lo = g; else hi = g;
        const double pdf = std::exp((a - 1.0) * std::log(g) - g - lga);
        double gn;
        if (pdf > 0.0 && std::isfinite(pdf)) {
            double step = f / pdf;
            const double curv = 0.5 * step * ((a - 1.0) / g - 1.0);
            if (std::abs(curv) < 1.0) step /= (1.0 - curv);
            gn = g - step;
        } else {
            gn = std::numeric_limits<double>::quiet_NaN();
        }
        if (!(gn > lo && gn < hi)) gn = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * g + 1.0;
        if (std::abs(gn - g) <= 4.0 * kEps * g) return 2.0 * gn;
        g = gn;
    }
    throw Error(Errc::NoConvergence, "chi2_icdf: inverse incomplete gamma did not converge");
}

// ===========================================================================
// Exponential, Laplace
// ===========================================================================

double exp_icdf(double u, double rate) {
    require_unit(u, "exp_icdf");
    if (!(rate > 0.0)) throw Error(Errc::DomainError, "exp_icdf: rate must be positive");
    return -std::log1p(-u) / rate;
}

double laplace_cdf(double x, double scale) noexcept {
    return x < 0.0 ? 0.5 * std::exp(x / scale) : 1.0 - 0.5 * std::exp(-x / scale);
}

double laplace_icdf(double u, double scale) {
    require_unit(u, "laplace_icdf");
    if (!(scale > 0.0)) throw Error(Errc::DomainError, "laplace_icdf: scale must be positive");
    if (u < 0.5) return scale * std::log(2.0 * u);
    if (u > 0.5) return -scale * std::log(2.0 * (1.0 - u));
    return 0.0;
}

// ===========================================================================
// Incomplete beta, Student t
// ===========================================================================

namespace {

double beta_cfrac(double a, double b, double x) {
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::abs(d) < 1e-300) d = 1e-300;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m < 10000; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = 1.0 + aa / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = 1.0 + aa / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    throw Error(Errc::NoConvergence, "beta_inc: continued fraction did not converge");
}

// I_x(a,b) given both x and y = 1 - x, so neither side cancels.
double beta_inc_pair(double a, double b, double x, double y) {
    if (x <= 0.0) return 0.0;
    if (y <= 0.0) return 1.0;
    const double lbt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                       b * std::log(y);
    if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(lbt) * beta_cfrac(a, b, x) / a;
    return 1.0 - std::exp(lbt) * beta_cfrac(b, a, y) / b;
}

// Upper tail of the unit-scale t distribution at t >= 0.
double t_upper(double t, double nu) {
    const double t2 = t * t;
    const double x = nu / (nu + t2), y = t2 / (nu + t2);
    if (y < 0.5) return 0.5 - 0.5 * beta_inc_pair(0.5, 0.5 * nu, y, x);
    return 0.5 * beta_inc_pair(0.5 * nu, 0.5, x, y);
}

double t_pdf(double t, double nu) {
    return std::exp(std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu * kPi) -
                    0.5 * (nu + 1.0) * std::log1p(t * t / nu));
}

}  // namespace

double beta_inc(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0) || x < 0.0 || x > 1.0)
        throw Error(Errc::DomainError, "beta_inc: need a,b > 0 and x in [0,1]");
    return beta_inc_pair(a, b, x, 1.0 - x);
}

double student_t_cdf(double x, double nu, double scale) {
    if (!(nu > 0.0 && scale > 0.0)) throw Error(Errc::DomainError, "student_t_cdf: bad parameters");
    const double t = x / scale;
    return t >= 0.0 ? 1.0 - t_upper(t, nu) : t_upper(-t, nu);
}

double student_t_icdf(double u, double nu, double scale) {
    require_unit(u, "student_t_icdf");
    if (!(nu > 0.0 && scale > 0.0)) throw Error(Errc::DomainError, "student_t_icdf: bad parameters");
    if (u == 0.5) return 0.0;
    const double p = std::min(u, 1.0 - u);
    const double sign = u < 0.5 ? -1.0 : 1.0;

    // Solve t_upper(t) = p for t > 0: Newton on log tail, bisection safeguard.
    double lo = 0.0, hi = std::max(1.0, -norm_icdf(p));
    while (t_upper(hi, nu) > p) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw Error(Errc::NoConvergence, "student_t_icdf: bracket overflow");
    }
    double t = std::max(-norm_icdf(p), 0.5 * (lo + hi));
    if (!(t > lo && t < hi)) t = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double g = t_upper(t, nu);
        if (g > p) lo = t; else hi = t;
        if (std::abs(g - p) <= 1e-15 * p) return sign * scale * t;
        const double pdf = t_pdf(t, nu);
        double tn = t + (std::log(g) - std::log(p)) * g / pdf;
        if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
        if (std::abs(tn - t) <= 4.0 * kEps * t) return sign * scale * tn;
        t = tn;
    }
    throw Error(Errc::NoConvergence, "student_t_icdf: inverse incomplete beta did not converge");
}

// ===========================================================================
// Complex log-gamma
// ===========================================================================

namespace {

// log sin(w) without overflow for large |Im w|.
cplx log_sin(cplx w) {
    const cplx i(0.0, 1.0);
    if (w.imag() > 0.0) return -i * w + std::log((std::exp(2.0 * i * w) - 1.0) / (2.0 * i));
    if (w.imag() < 0.0) return i * w + std::log((1.0 - std::exp(-2.0 * i * w)) / (2.0 * i));
    return std::log(cplx(std::sin(w.real()), 0.0));
}

constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

}  // namespace

cplx log_gamma_complex(cplx z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw Error(Errc::DomainError, "log_gamma_complex: non-finite argument");
    if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real()))
        throw Error(Errc::PoleError, "log_gamma_complex: pole at nonpositive integer");
    if (z.real() < 0.5) return std::log(kPi) - log_sin(kPi * z) - log_gamma_complex(1.0 - z);
    const cplx zm = z - 1.0;
    cplx x = kLanczos[0];
    for (int k = 1; k < 9; ++k) x += kLanczos[k] / (zm + static_cast<double>(k));
    const cplx t = zm + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * kPi) + (zm + 0.5) * std::log(t) - t + std::log(x);
}

// ===========================================================================
// Bessel K of complex argument
// ===========================================================================

cplx bessel_k_scaled(double order, cplx w) {
    if (!(w.real() > 0.0) || !std::isfinite(w.imag()))
        throw Error(Errc::DomainError, "bessel_k: requires Re w > 0");
    // ∫₀^∞ exp(-w (cosh t - 1)) cosh(order t) dt; trapezoidal sums on the
    // doubly-exponentially decaying integrand, refined by step halving.
    auto f = [&](double t) {
        const double sh = std::sinh(0.5 * t);
        return std::exp(-w * (2.0 * sh * sh)) * std::cosh(order * t);
    };
    double h = std::min(0.5, 2.0 / std::sqrt(std::abs(w)));

    // Level 0 fixes the truncation point.
    cplx sum = 0.5 * f(0.0);
    double peak = std::abs(sum);
    double t_end = 0.0;
    double prev_mod = peak;
    for (int k = 1;; ++k) {
        const double t = k * h;
        const cplx v = f(t);
        const double m = std::abs(v);
        sum += v;
        peak = std::max(peak, m);
        if ((m < 1e-18 * peak && m <= prev_mod) || m == 0.0) {
            t_end = t;
            break;
        }
        prev_mod = m;
        if (t > 50.0) throw Error(Errc::NoConvergence, "bessel_k: integrand does not decay");
    }
    cplx est = h * sum;
    for (int level = 1; level <= 24; ++level) {
        h *= 0.5;
        cplx mid = 0.0;
        for (double t = h; t < t_end; t += 2.0 * h) mid += f(t);
        sum += mid;
        const cplx next = h * sum;
        if (level >= 2 && std::abs(next - est) <= 1e-14 * std::abs(next)) return next;
        est = next;
    }
    throw Error(Errc::NoConvergence, "bessel_k: step halving exhausted");
}

cplx bessel_k(double order, cplx w) { return std::exp(-w) * bessel_k_scaled(order, w); }

}  // namespace fqmc

namespace fqmc {

// ===========================================================================
// Adaptive Gauss-Kronrod
// ===========================================================================

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(c);
    double rk = fc * kWgk[7];
    double rg = fc * kWg[3];
    for (int k = 0; k < 7; ++k) {
        const double dx = h * kXgk[k];
        const double s = f(c - dx) + f(c + dx);
        rk += kWgk[k] * s;
        if (k % 2 == 1) rg += kWg[k / 2] * s;
    }
    return {a, b, rk * h, std::abs((rk - rg) * h)};
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol,
                          double rel_tol, int max_intervals) {
    std::vector<Segment> segs{gk15(f, a, b)};
    for (int it = 0; it < max_intervals; ++it) {
        double total = 0.0, err = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            total += segs[i].value;
            err += segs[i].error;
            if (segs[i].error > segs[worst].error) worst = i;
        }
        if (err <= std::max(abs_tol, rel_tol * std::abs(total))) return total;
        const Segment w = segs[worst];
        const double mid = 0.5 * (w.a + w.b);
        segs[worst] = gk15(f, w.a, mid);
        segs.push_back(gk15(f, mid, w.b));
    }
    throw Error(Errc::NoConvergence, "integrate_adaptive: interval budget exhausted");
}

}  // namespace fqmc
