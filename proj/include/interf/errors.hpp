#pragma once

#include <stdexcept>
#include <string>

namespace interf {

/// Input outside the mathematical domain of an operation (negative power,
/// non-finite values, projector order above the cutoff, ...).
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Two states whose grids cannot be combined.
class shape_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Observed parity fraction cannot be mapped back onto the fringe.
class inversion_range_error : public domain_error {
public:
    using domain_error::domain_error;
};

} // namespace interf
