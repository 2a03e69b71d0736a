#pragma once

#include <stdexcept>
#include <string>

namespace gkforge {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// |p| reached the degeneracy locus p = +-1.
class DegenerateAngleError : public Error {
 public:
  using Error::Error;
};

// A point lies outside the region where a chart or model is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Parameters or weights violate an admissibility rule.
class InvalidParamsError : public Error {
 public:
  using Error::Error;
};

// Superposition without the constant term when a_- != 0.
class CompletenessError : public InvalidParamsError {
 public:
  using InvalidParamsError::InvalidParamsError;
};

// Evaluation point coincides with (or a sphere/chart touches) a pole.
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Quadrature, series or linear solver did not reach the requested tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// A finite-difference stencil would leave the admissible region.
class StencilError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Malformed or inconsistent configuration document.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace gkforge
