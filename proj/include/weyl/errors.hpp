// Copyright 2026 The weylsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace weyl {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A matrix that must be unitary failed the unitarity check.
struct NonUnitaryInput : Error {
  using Error::Error;
};

/// A circuit violates its structural invariants (layer count, unitarity).
struct MalformedCircuit : Error {
  using Error::Error;
};

/// A synthesis target lies outside the reachable region of the base gate.
/// The message names the violated inequality.
struct OutOfRegion : Error {
  using Error::Error;
};

/// A trigonometric solve has no solution (arccos argument out of range
/// beyond tolerance, or an empty parameter interval).
struct Infeasible : Error {
  using Error::Error;
};

/// An argument lies outside the domain of the operation.
struct DomainError : Error {
  using Error::Error;
};

/// The base gate kind is not supported by the requested operation.
struct UnsupportedBase : Error {
  using Error::Error;
};

/// A circuit application index is out of range.
struct IndexOutOfRange : Error {
  using Error::Error;
};

/// A document could not be parsed.
struct ParseError : Error {
  using Error::Error;
};

/// An iterative numerical routine failed to converge.
struct NumericalFailure : Error {
  using Error::Error;
};

}  // namespace weyl
