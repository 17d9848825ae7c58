#pragma once

// Real special functions used by the trap model: integer-order Bessel J,
// its zeros, Gamma and a guarded generalized hypergeometric series.
// Everything here is pure and reentrant.

#include <span>
#include <vector>

namespace qtrap::special {

inline constexpr int kMaxBesselOrder = 50;
inline constexpr double kMaxBesselArgument = 1.0e4;

/// J_m(x) for 0 <= m <= 50 and 0 <= x <= 1e4. Throws DomainError outside.
double bessel_j(int m, double x);

/// dJ_m/dx via (J_{m-1} - J_{m+1}) / 2, with J_{-1} = -J_1.
double bessel_j_prime(int m, double x);

/// Positive zeros x_{m,1} < x_{m,2} < ... of J_m.
class BesselZeroTable {
 public:
  BesselZeroTable(int order, std::vector<double> zeros);

  int order() const { return order_; }
  int size() const { return static_cast<int>(zeros_.size()); }
  /// 1-based radial quantum number, as in x_{mn}.
  double zero(int n) const { return zeros_.at(static_cast<std::size_t>(n - 1)); }
  const std::vector<double>& zeros() const { return zeros_; }

 private:
  int order_;
  std::vector<double> zeros_;
};

/// First `count` positive zeros of J_m. Sign-change scan with step pi/4
/// starting at m + 1.8, bisection, then Newton polish.
BesselZeroTable bessel_zeros(int m, int count);

/// Gamma(z) for 0 < z <= 170 (Lanczos, g = 7).
double gamma_fn(double z);

/// log Gamma(z) for z > 0; no upper limit.
double log_gamma_fn(double z);

struct PfqOptions {
  // Largest term magnitude over |result| that is still trusted.
  double cancellation_guard = 1.0e8;
  int max_terms = 5000;
};

/// pFq(a; b; z) by partial sums, p <= 3 and q <= 4.
/// Throws CancellationError when the guard trips and NonConvergence when the
/// term budget runs out.
double pfq(std::span<const double> a, std::span<const double> b, double z,
           const PfqOptions& options = {});

/// Regularized pFq: pFq / (Gamma(b_1) ... Gamma(b_q)).
double pfq_regularized(std::span<const double> a, std::span<const double> b,
                       double z, const PfqOptions& options = {});

}  // namespace qtrap::special
