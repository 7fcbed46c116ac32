// SPDX-License-Identifier: MIT
#include "fqmc/damping.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace fqmc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Objective {
public:
    Objective(const ModelSpec& m, const PayoffSpec& p) : model_(m), payoff_(p), scaling_(scaling_rule(p, m)) {
        validate(p);
        log_pref_ = -static_cast<double>(m.dim()) * std::log(2.0 * std::numbers::pi) - m.rate * m.maturity;
    }

    // Constraint slacks divided by their scales; all positive inside.
    [[nodiscard]] Vec slacks(const Vec& R) const {
        Vec c;
        const std::size_t d = R.size();
        double sum = 0.0;
        for (double r : R) sum += r;
        switch (payoff_.kind) {
            case PayoffKind::BasketPut:
                for (double r : R) c.push_back(r);
                break;
            case PayoffKind::SpreadCall:
                for (std::size_t j = 1; j < d; ++j) c.push_back(R[j]);
                c.push_back(-1.0 - sum);
                break;
            case PayoffKind::CallOnMin:
                for (double r : R) c.push_back(-r);
                c.push_back(-1.0 - sum);
                break;
            case PayoffKind::CONCall:
                for (double r : R) c.push_back(-r);
                break;
        }
        if (model_.spec().kind != ModelKind::GBM) c.push_back(model_.strip(R).margin / model_.strip_scale());
        return c;
    }

    [[nodiscard]] double margin(const Vec& R) const {
        const Vec c = slacks(R);
        return c.empty() ? kInf : *std::min_element(c.begin(), c.end());
    }

    [[nodiscard]] double value(const Vec& R) const {
        if (!(margin(R) > 0.0)) return kInf;
        CVec z(R.size());
        for (std::size_t j = 0; j < R.size(); ++j) z[j] = cplx(0.0, R[j]);
        try {
            const double v =
                (log_pref_ + model_.log_char(z, scaling_.x0) + log_payoff_transform(payoff_, z)).real();
            return std::isfinite(v) ? v : kInf;
        } catch (const Error&) {
            return kInf;
        }
    }

    [[nodiscard]] double barrier(const Vec& R, double mu) const {
        const Vec c = slacks(R);
        double b = 0.0;
        for (double ci : c) {
            if (!(ci > 0.0)) return kInf;
            b -= std::log(ci);
        }
        const double v = value(R);
        return std::isfinite(v) ? v + mu * b : kInf;
    }

    [[nodiscard]] PayoffKind kind() const noexcept { return payoff_.kind; }

private:
    Model model_;
    PayoffSpec payoff_;
    ScalingRule scaling_;
    double log_pref_ = 0.0;
};

double norm2(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double norm_inf(const Vec& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

// Minimizer of gᵀs + ½sᵀHs subject to ‖s‖ ≤ radius.
Vec trust_region_step(const Vec& g, const Matrix& H, double radius) {
    const std::size_t n = g.size();
    const EigenDecomposition e = sym_eig(H);
    Vec gp(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) gp[k] += e.vectors(i, k) * g[i];

    auto step = [&](double lambda) {
        Vec s(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const double c = -gp[k] / (e.values[k] + lambda);
            for (std::size_t i = 0; i < n; ++i) s[i] += c * e.vectors(i, k);
        }
        return s;
    };

    const double lmin = e.values.front();
    if (lmin > 0.0) {
        Vec s = step(0.0);
        if (norm2(s) <= radius) return s;
    }
    const double gn = norm2(g);
    double lo = std::max(0.0, -lmin) * (1.0 + 1e-12) + 1e-14 * std::max(1.0, std::abs(lmin));
    Vec s = step(lo);
    if (norm2(s) < radius) {
        // Hard case: pad along the lowest eigenvector.
        const double pad = std::sqrt(radius * radius - norm2(s) * norm2(s));
        for (std::size_t i = 0; i < n; ++i) s[i] += pad * e.vectors(i, 0);
        return s;
    }
    double hi = std::max(lo, gn / radius - lmin) + 1e-12;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (norm2(step(mid)) > radius) lo = mid; else hi = mid;
    }
    return step(hi);
}

struct LocalResult {
    Vec x;
    bool converged = false;
};

class TrustRegion {
public:
    TrustRegion(std::function<double(const Vec&)> f, int budget) : f_(std::move(f)), budget_(budget) {}

    int evaluations() const noexcept { return evals_; }
    bool exhausted() const noexcept { return evals_ >= budget_; }

    LocalResult minimize(Vec x) {
        const std::size_t n = x.size();
        double fx = eval(x);
        if (!std::isfinite(fx)) return {x, false};
        Vec g = gradient(x, fx);
        Matrix H = initial_hessian(x, fx);
        double radius = 0.25 * std::max(1.0, norm_inf(x));

        while (!exhausted()) {
            const Vec s = trust_region_step(g, H, radius);
            const double sn = norm2(s);
            double gs = 0.0;
            for (std::size_t i = 0; i < n; ++i) gs += g[i] * s[i];
            const double pred = -(gs + 0.5 * quad_form(H, s));
            if (!(pred > 0.0) || sn == 0.0) return {x, true};

            Vec xn = x;
            for (std::size_t i = 0; i < n; ++i) xn[i] += s[i];
            const double fn = eval(xn);
            const double rho = std::isfinite(fn) ? (fx - fn) / pred : -kInf;

            if (rho > 1e-4) {
                const Vec gn = gradient(xn, fn);
                Vec yv(n);
                for (std::size_t i = 0; i < n; ++i) yv[i] = gn[i] - g[i];
                bfgs_update(H, s, yv);
                const double decrease = fx - fn;
                x = std::move(xn);
                fx = fn;
                g = gn;
                if (sn < 1e-8 * (1.0 + norm2(x)) && decrease < 1e-10) return {x, true};
                if (norm_inf(g) < 1e-12) return {x, true};
            }
            if (rho < 0.25) radius = 0.25 * sn;
            else if (rho > 0.75 && sn > 0.99 * radius) radius *= 2.0;
            if (radius < 1e-12 * (1.0 + norm2(x))) return {x, true};
        }
        return {x, false};
    }

private:
    double eval(const Vec& x) {
        ++evals_;
        return f_(x);
    }

    Vec gradient(const Vec& x, double fx) {
        const std::size_t n = x.size();
        Vec g(n, 0.0);
        Vec xp = x;
        for (std::size_t i = 0; i < n; ++i) {
            const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
            xp[i] = x[i] + h;
            const double fp = eval(xp);
            xp[i] = x[i] - h;
            const double fm = eval(xp);
            xp[i] = x[i];
            if (std::isfinite(fp) && std::isfinite(fm)) g[i] = (fp - fm) / (2.0 * h);
            else if (std::isfinite(fp)) g[i] = (fp - fx) / h;
            else if (std::isfinite(fm)) g[i] = (fx - fm) / h;
        }
        return g;
    }

    Matrix initial_hessian(const Vec& x, double fx) {
        const std::size_t n = x.size();
        Matrix H = Matrix::identity(n);
        Vec h(n);
        for (std::size_t i = 0; i < n; ++i) h[i] = 1e-3 * std::max(1.0, std::abs(x[i]));
        auto at = [&](std::size_t i, double si, std::size_t j, double sj) {
            Vec y = x;
            y[i] += si * h[i];
            y[j] += sj * h[j];
            return eval(y);
        };
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            const double fp = at(i, 1.0, i, 0.0), fm = at(i, -1.0, i, 0.0);
            ok = std::isfinite(fp) && std::isfinite(fm);
            if (ok) H(i, i) = (fp - 2.0 * fx + fm) / (h[i] * h[i]);
        }
        if (ok && n <= 6) {
            for (std::size_t i = 0; i < n && ok; ++i)
                for (std::size_t j = i + 1; j < n && ok; ++j) {
                    const double a = at(i, 1, j, 1), b = at(i, 1, j, -1), c = at(i, -1, j, 1), e = at(i, -1, j, -1);
                    ok = std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(e);
                    if (ok) H(i, j) = H(j, i) = (a - b - c + e) / (4.0 * h[i] * h[j]);
                }
        }
        if (!ok) return Matrix::identity(n);
        // Lift to positive definite.
        const EigenDecomposition ed = sym_eig(H);
        const double top = std::max(std::abs(ed.values.back()), 1e-8);
        Matrix out(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double lam = std::max(ed.values[k], 1e-6 * top);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) out(i, j) += lam * ed.vectors(i, k) * ed.vectors(j, k);
        }
        return out;
    }

    static void bfgs_update(Matrix& H, const Vec& s, const Vec& y) {
        const std::size_t n = s.size();
        double ys = 0.0;
        for (std::size_t i = 0; i < n; ++i) ys += y[i] * s[i];
        if (!(ys > 1e-12 * norm2(y) * norm2(s))) return;
        const Vec hs = mat_vec(H, s);
        double shs = 0.0;
        for (std::size_t i = 0; i < n; ++i) shs += s[i] * hs[i];
        if (!(shs > 0.0)) return;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) H(i, j) += y[i] * y[j] / ys - hs[i] * hs[j] / shs;
    }

    std::function<double(const Vec&)> f_;
    int budget_;
    int evals_ = 0;
};

Vec ray_point(PayoffKind kind, std::size_t d, double t) {
    const double dd = static_cast<double>(d);
    switch (kind) {
        case PayoffKind::BasketPut: return Vec(d, t);
        case PayoffKind::CONCall: return Vec(d, -t);
        case PayoffKind::CallOnMin: return Vec(d, -(1.0 / dd + t));
        case PayoffKind::SpreadCall: {
            Vec R(d, t);
            R[0] = -1.0 - (dd - 1.0) * t - t;
            return R;
        }
    }
    return Vec(d, 0.0);
}

}  // namespace

double damping_objective(const ModelSpec& m, const PayoffSpec& p, const Vec& R) {
    if (R.size() != m.dim()) throw Error(Errc::DimensionMismatch, "damping vector length");
    return Objective(m, p).value(R);
}

double damping_margin(const ModelSpec& m, const PayoffSpec& p, const Vec& R) {
    if (R.size() != m.dim()) throw Error(Errc::DimensionMismatch, "damping vector length");
    return Objective(m, p).margin(R);
}

DampingVector optimize_damping(const ModelSpec& m, const PayoffSpec& p, const DampingOptions& opt) {
    const Objective obj(m, p);
    const std::size_t d = m.dim();
    if (p.dim != d) throw Error(Errc::DimensionMismatch, "payoff and model dimensions differ");

    // Centroid seed: best feasible point on a payoff-shaped ray.
    Vec centroid;
    double best_seed = kInf;
    for (int k = 0; k <= 48; ++k) {
        const double t = 0.01 * std::pow(1.2, k);
        const Vec R = ray_point(obj.kind(), d, t);
        if (!(obj.margin(R) > 1e-3)) continue;
        const double v = obj.value(R);
        if (v < best_seed) {
            best_seed = v;
            centroid = R;
        }
    }
    if (centroid.empty())
        throw Error(Errc::InfeasibleRegion, "no strictly feasible damping vector found among the seeds");

    std::vector<Vec> seeds{centroid};
    CounterRng rng(opt.seed, 0xda3b);
    for (int s = 1; s < opt.seeds; ++s) {
        double scale = 0.25;
        for (int attempt = 0; attempt < 40; ++attempt) {
            Vec R = centroid;
            for (std::size_t j = 0; j < d; ++j)
                R[j] += scale * (std::abs(centroid[j]) + 0.1) * norm_icdf(rng.uniform());
            if (obj.margin(R) > 1e-3 && std::isfinite(obj.value(R))) {
                seeds.push_back(std::move(R));
                break;
            }
            if (attempt % 5 == 4) scale *= 0.5;
        }
    }

    const double tau = opt.tau;
    DampingVector best;
    best.objective = kInf;
    auto consider = [&](const Vec& R, bool converged, int evals) {
        const double margin = obj.margin(R);
        if (!(margin >= tau)) return;
        const double v = obj.value(R);
        if (v < best.objective) {
            best.R = R;
            best.objective = v;
            best.margin = margin;
            best.feasible = true;
            best.converged = converged;
        }
        best.evaluations += evals;
    };

    for (const Vec& seed : seeds) {
        consider(seed, false, 0);
        Vec x = seed;
        int used = 0;
        bool converged = false;
        for (double mu : {1e-2, 1e-5, 1e-8}) {
            const int left = opt.max_evals - used;
            if (left <= 0) break;
            TrustRegion tr([&, mu](const Vec& R) { return obj.barrier(R, mu); }, left);
            const LocalResult r = tr.minimize(x);
            used += tr.evaluations();
            x = r.x;
            converged = r.converged;
        }
        consider(x, converged, used);
    }
    if (!best.feasible) throw Error(Errc::InfeasibleRegion, "no damping vector with the required interior margin");
    return best;
}

}  // namespace fqmc
