#include "qtrap/oracle.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <span>

#include "qtrap/errors.hpp"
#include "qtrap/quad.hpp"
#include "qtrap/special.hpp"

namespace qtrap::oracle {

namespace {

using special::bessel_j;
using special::log_gamma_fn;

double zero_of(int m, int n) {
  if (m < 0 || n < 1) throw DomainError("oracle: need m >= 0 and n >= 1");
  return special::bessel_zeros(m, n).zero(n);
}

// J of any integer order, with J_{-k} = (-1)^k J_k.
double bessel_any(int order, double x) {
  if (order >= 0) return bessel_j(order, x);
  const double v = bessel_j(-order, x);
  return (-order) % 2 == 0 ? v : -v;
}

// exp(log_prefactor) * pFq(a; b; z) / prod Gamma(b_i), evaluated in log space.
double scaled_pfq(double log_prefactor, std::span<const double> a, std::span<const double> b, double z,
                  bool regularized) {
  const double series = special::pfq(a, b, z);
  double log_scale = log_prefactor;
  if (regularized) {
    for (double bi : b) log_scale -= log_gamma_fn(bi);
  }
  return std::exp(log_scale) * series;
}

double real_quadrature(int panels, const std::function<double(double)>& f) {
  quad::QuadOptions opts;
  opts.abs_tol = 1e-14;
  opts.rel_tol = 1e-13;
  opts.initial_panels = panels;
  return quad::integrate([&](double s) { return quad::cplx{f(s)}; }, opts).value.real();
}

double a_neg1_series(int m, double x) {
  const std::array<double, 2> a{static_cast<double>(m), m + 0.5};
  const std::array<double, 3> b{m + 1.0, m + 1.0, 2.0 * m + 1.0};
  const double log_pref = -m * std::log(4.0) + log_gamma_fn(2.0 * m) + 2.0 * m * std::log(x);
  return scaled_pfq(log_pref, a, b, -x * x, true);
}

double a3_series(int m, double x) {
  if (m == 0) {
    const std::array<double, 2> a{0.5, 2.0};
    const std::array<double, 3> b{1.0, 1.0, 3.0};
    return 0.25 * special::pfq(a, b, -x * x);
  }
  const std::array<double, 2> a{m + 0.5, m + 2.0};
  const std::array<double, 3> b{m + 1.0, m + 3.0, 2.0 * m + 1.0};
  const double log_pref = -m * std::log(4.0) + std::log(static_cast<double>(m) * (m + 1)) +
                          log_gamma_fn(2.0 * m) + 2.0 * m * std::log(x);
  return scaled_pfq(log_pref, a, b, -x * x, true);
}

}  // namespace

const char* to_string(ClosedFormPath path) {
  switch (path) {
    case ClosedFormPath::hypergeometric:
      return "hypergeometric";
    case ClosedFormPath::special_case_m0:
      return "special_case_m0";
    case ClosedFormPath::quadrature_fallback:
      return "quadrature_fallback";
  }
  return "unknown";
}

double a_neg1_quadrature(int m, int n) {
  if (m == 0) throw DomainError("A^(-1) diverges for m = 0");
  const double x = zero_of(m, n);
  return x / (2.0 * m) *
         real_quadrature(quad::oscillation_panels(0.0, 2.0 * x), [&](double s) {
           return bessel_j(m, x * s) * (bessel_j(m - 1, x * s) + bessel_j(m + 1, x * s));
         });
}

double a3_quadrature(int m, int n) {
  const double x = zero_of(m, n);
  return real_quadrature(quad::oscillation_panels(0.0, 2.0 * x), [&](double s) {
    const double j = bessel_j(m, x * s);
    return s * s * s * j * j;
  });
}

double c1_quadrature(int m, int n) {
  const double x = zero_of(m, n);
  return -real_quadrature(quad::oscillation_panels(0.0, 2.0 * x), [&](double s) {
    const double d = x * special::bessel_j_prime(m, x * s);
    return s * d * d;
  });
}

ClosedFormResult a_neg1_closed(int m, int n) {
  if (m == 0) throw DomainError("A^(-1) diverges for m = 0");
  const double x = zero_of(m, n);
  try {
    return {a_neg1_series(m, x), ClosedFormPath::hypergeometric};
  } catch (const NumericError&) {
    return {a_neg1_quadrature(m, n), ClosedFormPath::quadrature_fallback};
  }
}

ClosedFormResult a3_closed(int m, int n) {
  const double x = zero_of(m, n);
  try {
    return {a3_series(m, x), ClosedFormPath::hypergeometric};
  } catch (const NumericError&) {
    return {a3_quadrature(m, n), ClosedFormPath::quadrature_fallback};
  }
}

ClosedFormResult c1_closed(int m, int n) {
  const double x = zero_of(m, n);
  const double jp = bessel_j(m + 1, x);
  const double boundary = -0.5 * x * x * jp * jp;
  if (m == 0) return {boundary, ClosedFormPath::special_case_m0};
  try {
    return {static_cast<double>(m) * m * a_neg1_series(m, x) + boundary, ClosedFormPath::hypergeometric};
  } catch (const NumericError&) {
    return {c1_quadrature(m, n), ClosedFormPath::quadrature_fallback};
  }
}

namespace printed {

double a_neg1(int m, int n) {
  if (m == 0) throw DomainError("A^(-1) diverges for m = 0");
  const double x = zero_of(m, n);
  const std::array<double, 2> a{static_cast<double>(m), m + 0.5};
  const std::array<double, 3> b{m + 1.0, m + 1.0, 2.0 * m + 1.0};
  return scaled_pfq(-m * std::log(4.0) + log_gamma_fn(2.0 * m), a, b, -x * x, true);
}

double a3(int m, int n) {
  const double x = zero_of(m, n);
  if (m == 0) return a3_series(0, x);
  const std::array<double, 2> a{m + 0.5, m + 2.0};
  const std::array<double, 3> b{m + 1.0, m + 3.0, 2.0 * m + 1.0};
  const double log_pref = -m * std::log(4.0) + std::log(static_cast<double>(m) * (m + 1)) + 2.0 * std::log(x) +
                          log_gamma_fn(2.0 * m);
  return scaled_pfq(log_pref, a, b, -x * x, true);
}

double c1(int m, int n) {
  const double x = zero_of(m, n);
  if (m == 0) {
    const double j1 = bessel_j(1, x);
    return -0.5 * x * j1 * j1;
  }
  const std::array<double, 3> a{m + 0.5, m + 1.0, m + 1.0};
  const std::array<double, 4> b{static_cast<double>(m), m + 2.0, m + 2.0, 2.0 * m + 1.0};
  const double log_pref = 2.0 * m * std::log(x) - m * std::log(4.0) - log_gamma_fn(m) - log_gamma_fn(m + 1.0);
  const double f34 = scaled_pfq(log_pref, a, b, -x * x, false);
  const double jm2 = bessel_any(m - 2, x);
  const double jm1 = bessel_any(m - 1, x);
  const double jp1 = bessel_j(m + 1, x);
  const double x2 = x * x;
  const double md = m;
  const double bracket = -f34 + 2.0 * jm2 * jm1 * (4.0 * md * (md * md - 1.0) + x2 * (1.0 - 2.0 * md)) / (x2 * x) +
                         jm2 * jm2 * (x2 - 2.0 * md * (md + 1.0)) / x2 +
                         jm1 * jm1 * (0.5 - 4.0 * md * (md - 1.0) * (2.0 * md * md - 2.0 - x2) / (x2 * x2)) +
                         0.5 * jp1 * jp1;
  return -0.25 * x2 * bracket;
}

}  // namespace printed

}  // namespace qtrap::oracle
