// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>

namespace fqmc {

enum class Errc {
    NotPositiveDefinite,
    NoConvergence,
    DomainError,
    PoleError,
    StripViolation,
    DimensionMismatch,
    InvalidSpec,
    InfeasibleRegion,
    NonConvergence,
    RuleUnavailable,
    NonFiniteIntegrand,
    DimensionUnsupported,
    DimensionTooLarge,
    SubordinatorUnavailable,
    BudgetExceeded,
    ConfigError,
    SchemaError,
};

[[nodiscard]] const char* errc_name(Errc c) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace fqmc
