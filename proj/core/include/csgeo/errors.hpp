#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace csgeo {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

/// Syntax error while parsing an expression. Carries the byte offset into the
/// source text and the set of tokens that would have been accepted there.
class ParseError : public Error {
public:
  ParseError(const std::string& message, std::size_t offset,
             std::vector<std::string> expected = {});
  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
  std::size_t offset_ = 0;
  std::vector<std::string> expected_;
};

/// An identifier that is neither a variable, a builtin, nor a declared parameter.
class UnknownIdentifier : public Error {
public:
  UnknownIdentifier(const std::string& name, std::size_t offset);
  const std::string& name() const noexcept { return name_; }
  std::size_t offset() const noexcept { return offset_; }

private:
  std::string name_;
  std::size_t offset_ = 0;
};

/// Evaluation left the domain of a builtin (division by zero at the point,
/// sqrt/log on the branch cut, non-integer power of a negative real base).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Point expected on the unit sphere is not (|z| differs from 1 beyond tolerance).
class NotOnSphere : public Error {
public:
  using Error::Error;
};

/// Vector expected tangent to the sphere at the given point is not.
class NotTangent : public Error {
public:
  using Error::Error;
};

/// First fundamental form is singular at the evaluation point.
class DegenerateMetric : public Error {
public:
  using Error::Error;
};

/// Two grids that must share shape/spacing do not.
class GridMismatch : public Error {
public:
  using Error::Error;
};

/// The Reeb field has unit tangential projection: the tangent plane contains
/// the Reeb direction and no characteristic direction exists.
class ContactAngleZero : public Error {
public:
  using Error::Error;
};

/// sin(alpha) vanishes: the frame legs spanning the contact normal directions
/// are undefined.
class HolomorphicAngleDegenerate : public Error {
public:
  using Error::Error;
};

/// Neighbouring frames could not be aligned by sign flips; the frame field is
/// discontinuous across the stencil.
class GaugeFlip : public Error {
public:
  using Error::Error;
};

/// Operation requires a minimal surface but the mean curvature is not zero.
class NotMinimal : public Error {
public:
  using Error::Error;
};

/// Operation requires constant contact angle but the measured gradient is not zero.
class NonConstantBeta : public Error {
public:
  using Error::Error;
};

/// Operation requires the diagonal gauge (b = 0) but the measured b is not zero.
class GaugeNotDiagonal : public Error {
public:
  using Error::Error;
};

/// Constant-invariant solve found no admissible branch at the requested angle.
class NoBranch : public Error {
public:
  using Error::Error;
};

/// Maurer-Cartan data fails its compatibility condition; integration would be
/// path dependent.
class IncompatibleConnection : public Error {
public:
  using Error::Error;
};

/// Holomorphic angle left the open interval required by the identity.
class AlphaOutOfRange : public Error {
public:
  using Error::Error;
};

/// Operation requires a flat metric but the intrinsic curvature is not zero.
class NotFlat : public Error {
public:
  using Error::Error;
};

/// Operation requires constant second-fundamental coefficient a.
class NonConstantA : public Error {
public:
  using Error::Error;
};

/// Malformed CLI input, config file, or surface spec container.
class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace csgeo
