#pragma once

// Independent references for the tests: boost's Gauss-Kronrod quadrature
// and boost Bessel functions, never the library's own routines.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>
#include <complex>

namespace testref {

template <class F>
double integrate01(F f) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-14);
}

inline double jm(int m, double x) { return boost::math::cyl_bessel_j(m, x); }
inline double zero(int m, int n) { return boost::math::cyl_bessel_j_zero(double(m), n); }

/// int_0^1 s exp(-i beta s^2) J_m(x1 s) J_m(x2 s) ds
inline std::complex<double> overlap(int m, int n1, int n2, double beta) {
  const double x1 = zero(m, n1);
  const double x2 = zero(m, n2);
  const double re = integrate01([&](double s) { return s * std::cos(beta * s * s) * jm(m, x1 * s) * jm(m, x2 * s); });
  const double im = integrate01([&](double s) { return -s * std::sin(beta * s * s) * jm(m, x1 * s) * jm(m, x2 * s); });
  return {re, im};
}

/// int_0^1 s^k J_m(x_n s)^2 ds
inline double moment(int m, int n, int k) {
  const double x = zero(m, n);
  return integrate01([&](double s) {
    const double j = jm(m, x * s);
    return std::pow(s, k) * j * j;
  });
}

}  // namespace testref
