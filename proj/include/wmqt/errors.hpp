#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wmqt {

/// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Invalid or inconsistent experiment configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Integration failure: singular system, NaN/Inf amplitudes (exit code 3).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Post-processing could not produce the requested quantity (exit code 4).
struct AnalysisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace wmqt
