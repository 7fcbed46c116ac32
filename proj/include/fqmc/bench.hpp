// SPDX-License-Identifier: MIT
//
// Experiment harness: a catalog of named instances, convergence runs with
// slope fits, runtime-to-tolerance runs, and the CSV result format.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fqmc/pricer.hpp"
#include "fqmc/transform.hpp"

namespace fqmc {

struct Instance {
    std::string id;
    std::string note;
    ModelSpec model;
    PayoffSpec payoff;
    TransformOptions transform;
    std::optional<Vec> damping;  // explicit R, else optimized
};

[[nodiscard]] const std::vector<Instance>& instance_catalog();
// Catalog ids plus the parametric families fig9_{com,con}_{gh,vg}_d<k>.
// Throws InvalidSpec for unknown ids.
[[nodiscard]] Instance find_instance(const std::string& id);

struct Reference {
    double value = 0.0;
    std::string source;
};

struct ReferenceOptions {
    std::size_t mc_paths = 10'000'000;
    std::size_t tp_nodes = 64;
    std::uint64_t seed = kDefaultSeed;
};

// Closed form when known (GBM vanilla / independent digital).
[[nodiscard]] std::optional<Reference> closed_form_reference(const Instance& inst);
// Closed form, else TP Gauss-Laguerre for d <= 2, else physical MC.
[[nodiscard]] Reference compute_reference(const Instance& inst, const ReferenceOptions& opt = {});

struct ConvergencePoint {
    std::size_t N = 0;
    double value = 0.0;
    double stat_error = 0.0;
    double rel_error = 0.0;
    double wall_ms = 0.0;
};

struct ConvergenceRun {
    std::string instance_id;
    Backend backend = Backend::RQMC;
    std::string model;
    std::string payoff;
    std::size_t d = 0;
    std::size_t S = 0;
    std::uint64_t seed = 0;
    std::vector<ConvergencePoint> points;
    double slope = 0.0;
    double intercept = 0.0;
    Reference reference;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

// Least squares of log₂ err on log₂ N.
[[nodiscard]] LinearFit fit_slope(const std::vector<double>& N, const std::vector<double>& err);

// Relative error per N: stat_error / |reference| for the sampling backends,
// |value - reference| / |reference| for TPLaguerre (N = nodes per axis).
// MCFourier and PhysicalMC draw N·S samples. Needs at least 5 grid points.
[[nodiscard]] ConvergenceRun run_convergence(const Instance& inst, Backend backend,
                                             const std::vector<std::size_t>& N_grid, std::size_t S,
                                             std::uint64_t seed, const Reference& reference);

[[nodiscard]] std::vector<std::size_t> pow2_grid(int lo, int hi);

struct RuntimePoint {
    double tol = 0.0;
    Backend backend = Backend::RQMC;
    std::size_t N = 0;      // final N (RQMC), samples (MC) or nodes per axis (TP)
    std::size_t S = 1;
    double estimate = 0.0;
    double stat_error = 0.0;
    double achieved = 0.0;  // relative error at the final N
    double wall_ms = 0.0;   // median of the repetitions at the final N
    bool reached = false;
};

struct RuntimeOptions {
    std::size_t S = 30;
    std::size_t rqmc_N0 = 16;
    std::size_t mc_M0 = 1024;
    std::size_t tp_n0 = 2;
    std::size_t max_samples = 1ull << 26;  // per backend, N·S or M
    std::size_t tp_max_nodes = 64;
    int repetitions = 3;
};

struct RuntimeToTolerance {
    std::string instance_id;
    std::string model;
    std::string payoff;
    std::size_t d = 0;
    std::uint64_t seed = 0;
    Reference reference;
    std::string stopping_rule = "double_until_rel_error_le_tol";
    std::vector<RuntimePoint> points;
    [[nodiscard]] bool budget_exceeded() const;
};

[[nodiscard]] RuntimeToTolerance run_runtime_to_tol(const Instance& inst, const std::vector<Backend>& backends,
                                                    const std::vector<double>& tol_grid, std::uint64_t seed,
                                                    const Reference& reference, const RuntimeOptions& opt = {});

// Smallest node count per axis (from opt.tp_n0, step 1) reaching TOL.
struct TpNodeCount {
    std::size_t nodes = 0;
    std::size_t evaluations = 0;  // (2n)^d
    double rel_error = 0.0;
    bool reached = false;
};
[[nodiscard]] TpNodeCount tp_nodes_to_tol(const Instance& inst, double tol, const Reference& reference,
                                          std::size_t max_nodes = 64);

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

[[nodiscard]] const std::vector<std::string>& csv_columns();

// One result row; empty optionals serialize as empty cells.
struct CsvRow {
    std::string instance_id, backend, model, payoff;
    std::size_t d = 0;
    std::optional<std::size_t> N, S;
    std::optional<double> estimate, stat_error, rel_error, reference;
    std::string reference_source;
    std::optional<double> wall_ms;
    std::optional<std::uint64_t> seed;
    std::optional<double> slope;

    bool operator==(const CsvRow&) const = default;
};

[[nodiscard]] std::vector<CsvRow> to_rows(const ConvergenceRun& run);
// Runtime rows store the target TOL in rel_error; the achieved relative
// error is stat_error / |reference|.
[[nodiscard]] std::vector<CsvRow> to_rows(const RuntimeToTolerance& run);

[[nodiscard]] std::string format_csv(const std::vector<CsvRow>& rows);
// Throws SchemaError on a bad header or malformed cell.
[[nodiscard]] std::vector<CsvRow> parse_csv(const std::string& text);

void write_csv(const std::string& path, const std::vector<CsvRow>& rows);
[[nodiscard]] std::vector<CsvRow> read_csv(const std::string& path);

// <instance_id>__<backend>__<UTC timestamp>.csv
[[nodiscard]] std::string csv_file_name(const std::string& instance_id, const std::string& backend);

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

struct SuiteOptions {
    std::string out_dir = ".";
    std::uint64_t seed = kDefaultSeed;
    std::size_t mc_reference_paths = 10'000'000;
};

[[nodiscard]] std::vector<std::string> suite_ids();
// Runs a suite and returns the CSV paths written. Throws InvalidSpec for
// unknown suites.
std::vector<std::string> run_suite(const std::string& id, const SuiteOptions& opt);

}  // namespace fqmc
