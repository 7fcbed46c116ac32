// SPDX-License-Identifier: MIT
//
// Damping vector selection: minimize log|g(0; R)| over the interior of the
// joint strip of the model and the payoff.
#pragma once

#include <cstdint>

#include "fqmc/models.hpp"
#include "fqmc/payoffs.hpp"
#include "fqmc/random.hpp"

namespace fqmc {

struct DampingOptions {
    int seeds = 8;
    int max_evals = 2000;   // per seed
    double tau = 1e-6;      // relative interior margin
    std::uint64_t seed = kDefaultSeed;
};

struct DampingVector {
    Vec R;
    double objective = 0.0;  // log|g(0; R)|
    bool feasible = false;
    double margin = 0.0;     // min relative constraint slack
    bool converged = false;
    int evaluations = 0;
};

// log|g(0; R)|, or +inf outside the strip.
[[nodiscard]] double damping_objective(const ModelSpec& m, const PayoffSpec& p, const Vec& R);
// Smallest constraint slack, each constraint divided by its scale.
[[nodiscard]] double damping_margin(const ModelSpec& m, const PayoffSpec& p, const Vec& R);

// Throws InfeasibleRegion when no strictly feasible seed exists.
[[nodiscard]] DampingVector optimize_damping(const ModelSpec& m, const PayoffSpec& p,
                                             const DampingOptions& opt = {});

}  // namespace fqmc
