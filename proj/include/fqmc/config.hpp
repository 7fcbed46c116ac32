// SPDX-License-Identifier: MIT
//
// Run configuration: a JSON document with model, payoff, transform, qmc and
// damping blocks. Unknown keys are rejected.
#pragma once

#include <optional>
#include <string>

#include "fqmc/pricer.hpp"
#include "fqmc/transform.hpp"

namespace fqmc {

struct RunConfig {
    std::string label = "config";  // instance id when taken from the catalog
    ModelSpec model;
    PayoffSpec payoff;
    TransformOptions transform;
    std::optional<TransformFamily> family;  // must match the resolved family when set
    QmcConfig qmc;
    std::optional<Vec> damping;  // nullopt means "auto"
    Backend backend = Backend::RQMC;
    std::size_t tp_nodes = 64;
    std::string output;  // optional CSV path for the price row
};

// Throws Error(ConfigError) for malformed input and the model / payoff
// validation errors for inconsistent parameters.
[[nodiscard]] RunConfig parse_run_config(const std::string& json_text);
[[nodiscard]] RunConfig load_run_config(const std::string& path);

// Canonical JSON with explicit model and payoff blocks; parse(dump(c))
// reproduces c exactly.
[[nodiscard]] std::string dump_run_config(const RunConfig& c);

// Transform from the overrides and the default rules.
[[nodiscard]] TransformSpec resolve_transform(const RunConfig& c);

// Prices with the configured backend.
[[nodiscard]] PriceEstimate run_price(const RunConfig& c);

}  // namespace fqmc
