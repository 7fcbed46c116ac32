// SPDX-License-Identifier: MIT
#include "fqmc/qmc.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <string>

#include "fqmc/errors.hpp"
#include "fqmc/numkit.hpp"

namespace fqmc {

namespace {

#include "sobol_table.inc"

struct DirectionRow {
    unsigned degree = 0;
    std::uint64_t poly = 0;
    std::vector<std::uint64_t> m;
};

const std::vector<DirectionRow>& direction_table() {
    static const std::vector<DirectionRow> table = [] {
        std::vector<DirectionRow> rows;
        std::istringstream in(kSobolTableText);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ls(line);
            DirectionRow r;
            ls >> r.degree >> r.poly;
            for (unsigned k = 0; k < r.degree; ++k) {
                std::uint64_t mk = 0;
                ls >> mk;
                r.m.push_back(mk);
            }
            if (!ls) throw Error(Errc::SchemaError, "malformed Sobol direction-number row: " + line);
            rows.push_back(std::move(r));
        }
        return rows;
    }();
    return table;
}

constexpr double kCoordScale = 0x1.0p-52;

}  // namespace

std::size_t SobolSequence::max_dim() { return direction_table().size(); }

SobolSequence::SobolSequence(std::size_t dim) : dim_(dim), v_(dim * kSobolBits) {
    if (dim < 1 || dim > max_dim()) {
        std::ostringstream os;
        os << "Sobol dimension " << dim << " outside [1, " << max_dim() << "]";
        throw Error(Errc::DimensionUnsupported, os.str());
    }
    const auto& table = direction_table();
    for (std::size_t j = 0; j < dim; ++j) {
        const DirectionRow& row = table[j];
        std::vector<std::uint64_t> m(kSobolBits + 1, 1);  // 1-based m_k
        if (row.degree > 0) {
            const unsigned s = row.degree;
            for (unsigned k = 1; k <= s; ++k) m[k] = row.m[k - 1];
            for (unsigned k = s + 1; k <= static_cast<unsigned>(kSobolBits); ++k) {
                std::uint64_t mk = m[k - s] ^ (m[k - s] << s);
                for (unsigned i = 1; i < s; ++i)
                    if ((row.poly >> (s - 1 - i)) & 1U) mk ^= m[k - i] << i;
                m[k] = mk;
            }
        }
        for (int k = 1; k <= kSobolBits; ++k) v_[j * kSobolBits + (k - 1)] = m[k] << (kSobolBits - k);
    }
}

std::vector<std::uint64_t> SobolSequence::integer_points(std::size_t n) const {
    std::vector<std::uint64_t> out(n * dim_, 0);
    std::vector<std::uint64_t> x(dim_, 0);
    for (std::size_t i = 1; i < n; ++i) {
        const int c = std::countr_zero(static_cast<std::uint64_t>(i));
        for (std::size_t j = 0; j < dim_; ++j) {
            x[j] ^= v_[j * kSobolBits + c];
            out[i * dim_ + j] = x[j];
        }
    }
    return out;
}

std::vector<double> sobol_points(std::size_t d, std::size_t n) {
    const SobolSequence seq(d);
    const auto ints = seq.integer_points(n);
    std::vector<double> out(ints.size());
    for (std::size_t i = 0; i < ints.size(); ++i) out[i] = static_cast<double>(ints[i]) * kCoordScale;
    return out;
}

std::vector<std::uint64_t> shift_masks(std::size_t d, std::uint64_t seed, std::uint64_t s) {
    std::vector<std::uint64_t> masks(d);
    for (std::size_t j = 0; j < d; ++j)
        masks[j] = counter_hash(seed, s, j, 0x2545f4914f6cdd1dULL) >> (64 - kSobolBits);
    return masks;
}

std::vector<double> digital_shift(const std::vector<double>& points, std::size_t d,
                                  const std::vector<std::uint64_t>& masks) {
    if (d == 0 || points.size() % d != 0 || masks.size() != d)
        throw Error(Errc::DimensionMismatch, "digital_shift: point layout");
    std::vector<double> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto xi = static_cast<std::uint64_t>(std::ldexp(points[i], kSobolBits));
        out[i] = static_cast<double>(xi ^ masks[i % d]) * kCoordScale;
    }
    return out;
}

std::vector<double> digital_shift(const std::vector<double>& points, std::size_t d, std::uint64_t seed,
                                  std::uint64_t s) {
    return digital_shift(points, d, shift_masks(d, seed, s));
}

RQMCEstimate rqmc_estimate(const HypercubeIntegrand& f, std::size_t d, std::size_t N, std::size_t S,
                           std::uint64_t seed, double c_alpha) {
    if (N < 1 || S < 2) throw Error(Errc::InvalidSpec, "rqmc_estimate: need N >= 1 and S >= 2");
    const SobolSequence seq(d);
    const auto ints = seq.integer_points(N);

    RQMCEstimate est;
    est.N = N;
    est.S = S;
    est.seed = seed;
    est.c_alpha = c_alpha;
    est.shift_means.resize(S);
    std::vector<double> u(d);
    for (std::size_t s = 0; s < S; ++s) {
        const auto masks = shift_masks(d, seed, s);
        double sum = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            for (std::size_t j = 0; j < d; ++j)
                u[j] = clamp_unit(static_cast<double>(ints[n * d + j] ^ masks[j]) * kCoordScale);
            const double v = f(u.data());
            if (!std::isfinite(v)) {
                std::ostringstream os;
                os.precision(17);
                os << "integrand returned " << v << " at u = (";
                for (std::size_t j = 0; j < d; ++j) os << (j ? ", " : "") << u[j];
                os << ")";
                throw Error(Errc::NonFiniteIntegrand, os.str());
            }
            sum += v;
        }
        est.shift_means[s] = sum / static_cast<double>(N);
    }
    double mean = 0.0;
    for (double m : est.shift_means) mean += m;
    mean /= static_cast<double>(S);
    double ss = 0.0;
    for (double m : est.shift_means) ss += (m - mean) * (m - mean);
    const double sd = std::sqrt(ss / static_cast<double>(S - 1));
    est.value = mean;
    est.std_error = c_alpha * sd / std::sqrt(static_cast<double>(S));
    return est;
}

}  // namespace fqmc
