#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature of complex integrands on [0, 1].
// Nodes are interior to every panel, so s = 0 is never evaluated.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace qtrap::quad {

using cplx = std::complex<double>;

struct QuadOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int initial_panels = 8;
  int max_panels = 20000;
};

struct QuadResult {
  cplx value;
  double err_estimate = 0.0;
  int panels_used = 0;
};

struct QuadVectorResult {
  std::vector<cplx> values;
  // Largest per-component error estimate.
  double err_estimate = 0.0;
  int panels_used = 0;
};

/// Integrates f over [0, 1]. Throws BudgetExceeded (carrying the best value)
/// when the panel cap is hit before the tolerance is met.
QuadResult integrate(const std::function<cplx(double)>& f, const QuadOptions& options = {});

/// Integrates a vector-valued integrand on one shared panel subdivision.
/// `f(s, out)` writes all `dim` components at node s. Every component must
/// meet max(abs_tol, rel_tol * |value_i|).
QuadVectorResult integrate_vector(std::size_t dim,
                                  const std::function<void(double, std::span<cplx>)>& f,
                                  const QuadOptions& options = {});

/// Starting panel count for integrands with a quadratic phase exp(-i*beta*s^2)
/// and Bessel products whose summed zero frequency is `bessel_frequency`:
/// max(8, ceil(|beta|/pi), ceil(bessel_frequency/pi)).
int oscillation_panels(double beta, double bessel_frequency = 0.0);

}  // namespace qtrap::quad
