#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ivpq {

/// A caller broke a documented precondition (order too high, bad index, k = 0, ...).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// An argument lies outside the domain where the quantity is defined (non-finite state, t outside [a, b]).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Unknown catalog name or parameter.
class LookupError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Invalid experiment configuration; the message names the offending field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The stepping loop produced a non-finite or runaway state.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::size_t step, const std::string& what)
        : std::runtime_error(what), step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

} // namespace ivpq
