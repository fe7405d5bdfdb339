#pragma once

#include <stdexcept>
#include <string>

namespace hybridq {

/// Bad input: config schema, parameter domain, CLI flags.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Utilization >= 1: the requested queue has no steady state.
class UnstableError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A simulation run whose operator queue exceeded its cap.
class OverloadError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hybridq
