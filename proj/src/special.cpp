#include "qtrap/special.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "qtrap/errors.hpp"

namespace qtrap::special {

namespace {

constexpr double kPi = std::numbers::pi;

void check_envelope(int m, double x) {
  if (m < 0 || m > kMaxBesselOrder) {
    throw DomainError("bessel_j: order " + std::to_string(m) + " outside [0, 50]");
  }
  if (!(x >= 0.0) || x > kMaxBesselArgument) {
    std::ostringstream os;
    os << "bessel_j: argument " << x << " outside [0, 1e4]";
    throw DomainError(os.str());
  }
}

// Ascending series; only used where the terms decrease from the start.
double bessel_series(int m, double x) {
  const double half = 0.5 * x;
  double lead = 1.0;
  for (int k = 1; k <= m; ++k) lead *= half / k;
  const double q = -half * half;
  double term = lead;
  double sum = lead;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * (m + k));
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// Miller's backward recurrence normalised by J_0 + 2 sum J_{2k} = 1.
double bessel_miller(int m, double x) {
  const double top = std::max(static_cast<double>(m), x);
  int start = static_cast<int>(top + 20.0 + std::sqrt(60.0 * top));
  start += start % 2;
  const double two_over_x = 2.0 / x;
  double above = 0.0;  // J_{j+1}
  double here = 1e-300;  // J_j
  double norm = 0.0;
  double result = 0.0;
  for (int j = start; j > 0; --j) {
    const double below = j * two_over_x * here - above;
    above = here;
    here = below;
    if (std::abs(here) > 1e250) {
      here *= 1e-250;
      above *= 1e-250;
      norm *= 1e-250;
      result *= 1e-250;
    }
    // `here` now holds J_{j-1}.
    if (j - 1 == m) result = here;
    if ((j - 1) % 2 == 0 && j - 1 > 0) norm += 2.0 * here;
  }
  norm += here;
  return result / norm;
}

// Hankel expansion; caller guarantees x >= max(25, m^2/2).
double bessel_hankel(int m, double x) {
  const double mu = 4.0 * m * m;
  const double eight_x = 8.0 * x;
  double p = 1.0;
  double q = 0.0;
  double term = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * eight_x);
    switch (k % 4) {
      case 1: q += term; break;
      case 2: p -= term; break;
      case 3: q -= term; break;
      default: p += term; break;
    }
    if (std::abs(term) < 1e-17) break;
  }
  // chi = x - (2m + 1) pi / 4; the shift is an odd multiple of pi/4.
  constexpr double r = std::numbers::sqrt2 / 2.0;
  double cs = r;
  double sn = r;
  switch ((2 * m + 1) % 8) {
    case 3: cs = -r; break;
    case 5: cs = -r; sn = -r; break;
    case 7: sn = -r; break;
    default: break;
  }
  const double cx = std::cos(x);
  const double sx = std::sin(x);
  const double cos_chi = cx * cs + sx * sn;
  const double sin_chi = sx * cs - cx * sn;
  return std::sqrt(2.0 / (kPi * x)) * (p * cos_chi - q * sin_chi);
}

double bessel_unchecked(int m, double x) {
  if (m < 0) return (m % 2 == 0) ? bessel_unchecked(-m, x) : -bessel_unchecked(-m, x);
  if (x == 0.0) return m == 0 ? 1.0 : 0.0;
  if (x <= 2.0 * std::sqrt(m + 1.0)) return bessel_series(m, x);
  if (x >= std::max(25.0, 0.5 * m * m)) return bessel_hankel(m, x);
  return bessel_miller(m, x);
}

}  // namespace

double bessel_j(int m, double x) {
  check_envelope(m, x);
  return bessel_unchecked(m, x);
}

double bessel_j_prime(int m, double x) {
  check_envelope(m, x);
  return 0.5 * (bessel_unchecked(m - 1, x) - bessel_unchecked(m + 1, x));
}

BesselZeroTable::BesselZeroTable(int order, std::vector<double> zeros)
    : order_(order), zeros_(std::move(zeros)) {}

BesselZeroTable bessel_zeros(int m, int count) {
  if (count < 1) throw DomainError("bessel_zeros: count must be >= 1");
  if (m < 0 || m > kMaxBesselOrder) throw DomainError("bessel_zeros: order outside [0, 50]");

  std::vector<double> zeros;
  zeros.reserve(static_cast<std::size_t>(count));
  const double step = kPi / 4.0;
  const int budget = 8 * (count + m) + 200;
  double lo = m + 1.8;
  double f_lo = bessel_j(m, lo);
  for (int i = 0; i < budget && static_cast<int>(zeros.size()) < count; ++i) {
    const double hi = lo + step;
    if (hi > kMaxBesselArgument) break;
    const double f_hi = bessel_j(m, hi);
    if (f_lo == 0.0 || (f_lo < 0.0) != (f_hi < 0.0)) {
      double a = lo;
      double b = hi;
      double fa = f_lo;
      for (int k = 0; k < 12; ++k) {
        const double mid = 0.5 * (a + b);
        const double fm = bessel_j(m, mid);
        if ((fa < 0.0) == (fm < 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      double x = 0.5 * (a + b);
      for (int k = 0; k < 50; ++k) {
        const double dx = bessel_j(m, x) / bessel_j_prime(m, x);
        x -= dx;
        if (std::abs(dx) < 1e-13 * std::max(1.0, x / 10.0)) break;
      }
      if (!(x > lo - 1e-9 && x < hi + 1e-9)) {
        throw NumericError("bessel_zeros: Newton polish left the bracket");
      }
      zeros.push_back(x);
    }
    lo = hi;
    f_lo = f_hi;
  }
  if (static_cast<int>(zeros.size()) < count) {
    throw NumericError("bessel_zeros: scan budget exhausted for order " + std::to_string(m));
  }
  return BesselZeroTable(m, std::move(zeros));
}

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// log Gamma(z) for z >= 0.5.
double lanczos_log(double z) {
  z -= 1.0;
  double sum = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) sum += kLanczos[i] / (z + static_cast<double>(i));
  const double t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(sum);
}

}  // namespace

double gamma_fn(double z) {
  if (!(z > 0.0) || z > 170.0) {
    std::ostringstream os;
    os << "gamma_fn: argument " << z << " outside (0, 170]";
    throw DomainError(os.str());
  }
  if (z < 0.5) return kPi / (std::sin(kPi * z) * gamma_fn(1.0 - z));
  if (z == std::floor(z) && z <= 23.0) {
    double f = 1.0;
    for (int k = 2; k < static_cast<int>(z); ++k) f *= k;
    return f;
  }
  return std::exp(lanczos_log(z));
}

double log_gamma_fn(double z) {
  if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("log_gamma_fn: argument must be positive");
  if (z < 0.5) return std::log(kPi / std::sin(kPi * z)) - lanczos_log(1.0 - z);
  return lanczos_log(z);
}

double pfq(std::span<const double> a, std::span<const double> b, double z,
           const PfqOptions& options) {
  if (a.size() > 3 || b.size() > 4) throw DomainError("pfq: supports p <= 3, q <= 4");
  for (double bi : b) {
    if (bi <= 0.0 && bi == std::floor(bi)) throw DomainError("pfq: lower parameter is a nonpositive integer");
  }
  if (z == 0.0) return 1.0;

  long double sum = 1.0L;
  long double term = 1.0L;
  long double largest = 1.0L;
  int small_run = 0;
  bool converged = false;
  for (int k = 0; k < options.max_terms; ++k) {
    long double ratio = static_cast<long double>(z) / (k + 1);
    for (double ai : a) ratio *= (ai + k);
    for (double bi : b) ratio /= (bi + k);
    term *= ratio;
    if (term == 0.0L) {
      converged = true;  // a nonpositive-integer upper parameter terminates the series
      break;
    }
    sum += term;
    largest = std::max(largest, std::abs(term));
    if (std::abs(term) <= 1e-18L * std::abs(sum) && std::abs(ratio) < 0.5L) {
      if (++small_run >= 2) {
        converged = true;
        break;
      }
    } else {
      small_run = 0;
    }
  }
  if (!converged) throw NonConvergence("pfq: term budget exhausted");
  const double cancellation = static_cast<double>(largest / std::abs(sum));
  if (!(cancellation <= options.cancellation_guard)) {
    std::ostringstream os;
    os << "pfq: cancellation ratio " << cancellation << " exceeds guard " << options.cancellation_guard;
    throw CancellationError(os.str(), cancellation);
  }
  return static_cast<double>(sum);
}

double pfq_regularized(std::span<const double> a, std::span<const double> b, double z,
                       const PfqOptions& options) {
  double scale = 0.0;
  for (double bi : b) scale += log_gamma_fn(bi);
  return pfq(a, b, z, options) * std::exp(-scale);
}

}  // namespace qtrap::special
