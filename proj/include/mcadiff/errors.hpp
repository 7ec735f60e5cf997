#pragma once

#include <stdexcept>
#include <string>

namespace mcadiff {

/// An argument violated an operation's precondition (bad probability, odd grid size, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical evaluation left its domain: imaginary square root, hypergeometric pole,
/// floating evaluation refused because of cancellation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class PoleError : public DomainError {
public:
    using DomainError::DomainError;
};

}  // namespace mcadiff
