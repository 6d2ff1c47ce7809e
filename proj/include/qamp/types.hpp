#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qamp {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Numerical tolerances shared by every module.
namespace tol {
inline constexpr double projector = 1e-12;
inline constexpr double commutation = 1e-10;
inline constexpr double dense_eig = 1e-11;
inline constexpr double iterative_eig = 1e-8;
inline constexpr double bound_slack = 1e-7;
inline constexpr double imag_energy = 1e-12;
inline constexpr double split_edge = 1e-12;
inline constexpr double split_warn = 1e-9;
inline constexpr double prune = 1e-14;
inline constexpr double quadratic_form = 1e-9;
}  // namespace tol

/// Largest register size handled by dense routines.
inline constexpr int kDenseQubitLimit = 12;
inline constexpr int kCircuitDenseLimit = 14;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: wrong dimensions, bad supports, non-projectors.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Two terms of one layer fail to commute.
class LayeringError : public Error {
 public:
  using Error::Error;
};

class InfeasibleColoring : public Error {
 public:
  using Error::Error;
};

class EnumerationError : public Error {
 public:
  using Error::Error;
};

/// Request exceeds a dense or qubit budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Out-of-range numeric parameter (t, r, alpha, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace qamp
