#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qtrap {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the supported envelope of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A computation could not reach its accuracy target.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Hypergeometric partial sums lost too many digits to cancellation.
class CancellationError : public NumericError {
 public:
  CancellationError(const std::string& what, double ratio)
      : NumericError(what), ratio_(ratio) {}
  double ratio() const { return ratio_; }

 private:
  double ratio_;
};

class NonConvergence : public NumericError {
 public:
  using NumericError::NumericError;
};

// Adaptive quadrature ran out of panels. Carries the best values found.
class BudgetExceeded : public NumericError {
 public:
  BudgetExceeded(const std::string& what, std::vector<std::complex<double>> best,
                 double err_estimate)
      : NumericError(what), best_(std::move(best)), err_(err_estimate) {}
  const std::vector<std::complex<double>>& best_values() const { return best_; }
  double err_estimate() const { return err_; }

 private:
  std::vector<std::complex<double>> best_;
  double err_;
};

// Spectral truncation left too much norm outside the retained modes.
class TruncationError : public NumericError {
 public:
  TruncationError(const std::string& what, double deficit)
      : NumericError(what), deficit_(deficit) {}
  double deficit() const { return deficit_; }

 private:
  double deficit_;
};

}  // namespace qtrap
