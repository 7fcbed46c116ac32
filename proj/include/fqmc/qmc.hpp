// SPDX-License-Identifier: MIT
//
// Sobol points (Gray-code order, 52-bit coordinates), digital shifts and the
// randomized QMC estimator.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fqmc/random.hpp"

namespace fqmc {

inline constexpr int kSobolBits = 52;

class SobolSequence {
public:
    explicit SobolSequence(std::size_t dim);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] static std::size_t max_dim();

    // First n points as 52-bit integers, row-major n×dim.
    [[nodiscard]] std::vector<std::uint64_t> integer_points(std::size_t n) const;

private:
    std::size_t dim_;
    std::vector<std::uint64_t> v_;  // dim × kSobolBits direction numbers
};

// N×d row-major points in [0,1). Throws DimensionUnsupported.
[[nodiscard]] std::vector<double> sobol_points(std::size_t d, std::size_t n);

// One 52-bit mask per dimension for shift s.
[[nodiscard]] std::vector<std::uint64_t> shift_masks(std::size_t d, std::uint64_t seed, std::uint64_t s);

// XOR the masks into every coordinate of row-major points.
[[nodiscard]] std::vector<double> digital_shift(const std::vector<double>& points, std::size_t d,
                                                const std::vector<std::uint64_t>& masks);
[[nodiscard]] std::vector<double> digital_shift(const std::vector<double>& points, std::size_t d,
                                                std::uint64_t seed, std::uint64_t s);

using HypercubeIntegrand = std::function<double(const double* u)>;

struct RQMCEstimate {
    double value = 0.0;
    double std_error = 0.0;  // C_α/√S · sample std of the shift means
    double c_alpha = 1.96;
    std::size_t N = 0;
    std::size_t S = 0;
    std::uint64_t seed = 0;
    std::vector<double> shift_means;
};

// Throws NonFiniteIntegrand with the offending point.
[[nodiscard]] RQMCEstimate rqmc_estimate(const HypercubeIntegrand& f, std::size_t d, std::size_t N,
                                         std::size_t S, std::uint64_t seed, double c_alpha = 1.96);

}  // namespace fqmc
