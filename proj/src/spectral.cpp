#include "qtrap/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>

#include "qtrap/errors.hpp"
#include "qtrap/parallel.hpp"
#include "qtrap/quad.hpp"

namespace qtrap {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

// Upper bound on components per vector quadrature; keeps panel storage small.
constexpr std::size_t kMaxBlockComponents = 2400;

void check_mode(const ModeBasis& basis, int n, const char* where) {
  if (n < 1 || n > basis.size()) {
    std::ostringstream os;
    os << where << ": radial number " << n << " outside [1, " << basis.size() << "]";
    throw DomainError(os.str());
  }
}

// J_m(x_{m,k} s) for k = 1..N into out[0..N).
void fill_bessel(const ModeBasis& basis, double s, std::span<double> out) {
  for (int k = 0; k < basis.size(); ++k) {
    out[static_cast<std::size_t>(k)] = special::bessel_j(basis.m(), basis.zero(k + 1) * s);
  }
}

void fill_bessel_derivative(const ModeBasis& basis, double s, std::span<double> out) {
  for (int k = 0; k < basis.size(); ++k) {
    const double x = basis.zero(k + 1);
    out[static_cast<std::size_t>(k)] = x * special::bessel_j_prime(basis.m(), x * s);
  }
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Geometry

TrapGeometry::TrapGeometry(double a, double u, double hbar, double mu)
    : a_(a), u_(u), hbar_(hbar), mu_(mu) {
  if (!(a > 0.0) || !(hbar > 0.0) || !(mu > 0.0) || !std::isfinite(u)) {
    throw DomainError("TrapGeometry: a, hbar and mu must be positive and u finite");
  }
}

TrapGeometry TrapGeometry::with_velocity(double u, double a, double hbar, double mu) {
  return TrapGeometry(a, u, hbar, mu);
}

TrapGeometry TrapGeometry::with_alpha(double alpha, double a, double hbar, double mu) {
  return TrapGeometry(a, 2.0 * hbar * alpha / (mu * a), hbar, mu);
}

double TrapGeometry::xi(double t) const {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw DomainError("xi: time must be finite and non-negative");
  }
  const double value = 1.0 + u_ * t / a_;
  if (u_ < 0.0 && value < kMinXi) {
    throw DomainError("xi: contracting wall below xi = 0.02 at t = " + format_double(t));
  }
  return value;
}

double TrapGeometry::time_at_xi(double target) const {
  if (target == 1.0) return 0.0;
  if (u_ == 0.0) throw DomainError("time_at_xi: static wall never leaves xi = 1");
  const double t = (target - 1.0) * a_ / u_;
  if (!(t > 0.0)) {
    throw DomainError("time_at_xi: xi = " + format_double(target) +
                      " is not reached by this wall motion");
  }
  if (target < kMinXi) throw DomainError("time_at_xi: target below xi = 0.02");
  return t;
}

double TrapGeometry::dynamical_phase(double t) const {
  return hbar_ * t / (2.0 * mu_ * a_ * a_ * xi(t));
}

double xi_dimensionless(double alpha, double alpha_mn, double T) {
  if (!(alpha_mn > 0.0)) throw DomainError("xi_dimensionless: alpha_mn must be positive");
  if (!(T >= 0.0)) throw DomainError("xi_dimensionless: T must be non-negative");
  const double value = 1.0 + 2.0 * kPi * (alpha / (alpha_mn * alpha_mn)) * T;
  if (value < TrapGeometry::kMinXi) throw DomainError("xi_dimensionless: past wall collapse");
  return value;
}

Mode make_mode(int m, int n, const TrapGeometry& geom) {
  if (m < 0 || n < 1) throw DomainError("make_mode: need m >= 0 and n >= 1");
  Mode mode;
  mode.m = m;
  mode.n = n;
  mode.x = special::bessel_zeros(m, n).zero(n);
  mode.lambda = 2.0 * kPi * geom.a() / mode.x;
  mode.energy0 = geom.hbar() * geom.hbar() * mode.x * mode.x / (2.0 * geom.mu() * geom.a() * geom.a());
  mode.nu = mode.energy0 / (2.0 * kPi * geom.hbar());
  mode.alpha_mn = 0.5 * mode.x;
  return mode;
}

ModeBasis::ModeBasis(int m, int n_max) : m_(m) {
  if (n_max < 1) throw DomainError("ModeBasis: n_max must be >= 1");
  zeros_ = special::bessel_zeros(m, n_max).zeros();
  norms_.reserve(zeros_.size());
  for (double x : zeros_) norms_.push_back(std::abs(special::bessel_j(m + 1, x)));
}

std::shared_ptr<const ModeBasis> shared_basis(int m, int n_max) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const ModeBasis>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{m, n_max}];
  if (!slot) slot = std::make_shared<const ModeBasis>(m, n_max);
  return slot;
}

// ---------------------------------------------------------------------------
// Overlaps

cplx overlap_at(const ModeBasis& basis, int n1, int n2, double alpha, double xi) {
  check_mode(basis, n1, "overlap_at");
  check_mode(basis, n2, "overlap_at");
  const double beta = alpha * xi;
  const double x1 = basis.zero(n1);
  const double x2 = basis.zero(n2);
  const int m = basis.m();
  quad::QuadOptions opts;
  opts.initial_panels = quad::oscillation_panels(beta, x1 + x2);
  return quad::integrate(
             [&](double s) {
               return s * std::exp(-kI * (beta * s * s)) * special::bessel_j(m, x1 * s) *
                      special::bessel_j(m, x2 * s);
             },
             opts)
      .value;
}

cplx overlap_I(const ModeBasis& basis, int n1, int n2, double t, const TrapGeometry& geom) {
  return overlap_at(basis, n1, n2, geom.alpha(), geom.xi(t));
}

std::vector<cplx> overlap_row(const ModeBasis& basis, int n, double beta) {
  check_mode(basis, n, "overlap_row");
  const int size = basis.size();
  const double xn = basis.zero(n);
  const int m = basis.m();
  quad::QuadOptions opts;
  opts.initial_panels = quad::oscillation_panels(beta, xn + basis.zero(size));
  std::vector<double> jv(static_cast<std::size_t>(size));
  return quad::integrate_vector(
             static_cast<std::size_t>(size),
             [&](double s, std::span<cplx> out) {
               fill_bessel(basis, s, jv);
               const cplx w = s * std::exp(-kI * (beta * s * s)) * special::bessel_j(m, xn * s);
               for (int k = 0; k < size; ++k) out[static_cast<std::size_t>(k)] = w * jv[static_cast<std::size_t>(k)];
             },
             opts)
      .values;
}

OverlapMatrix overlap_matrix(const ModeBasis& basis, double beta) {
  const int size = basis.size();
  OverlapMatrix result{size, std::vector<cplx>(static_cast<std::size_t>(size) * size)};
  const int block = std::max<int>(1, static_cast<int>(kMaxBlockComponents / static_cast<std::size_t>(size)));
  const int blocks = (size + block - 1) / block;
  parallel_for(static_cast<std::size_t>(blocks), [&](std::size_t b) {
    const int r0 = static_cast<int>(b) * block;
    const int r1 = std::min(size, r0 + block);
    const int rows = r1 - r0;
    quad::QuadOptions opts;
    opts.initial_panels = quad::oscillation_panels(beta, basis.zero(r1) + basis.zero(size));
    std::vector<double> jv(static_cast<std::size_t>(size));
    const auto values =
        quad::integrate_vector(
            static_cast<std::size_t>(rows) * size,
            [&](double s, std::span<cplx> out) {
              fill_bessel(basis, s, jv);
              const cplx phase = s * std::exp(-kI * (beta * s * s));
              std::size_t c = 0;
              for (int r = r0; r < r1; ++r) {
                const cplx w = phase * jv[static_cast<std::size_t>(r)];
                for (int k = 0; k < size; ++k) out[c++] = w * jv[static_cast<std::size_t>(k)];
              }
            },
            opts)
            .values;
    std::copy(values.begin(), values.end(),
              result.data.begin() + static_cast<std::ptrdiff_t>(r0) * size);
  });
  return result;
}

// ---------------------------------------------------------------------------
// States

namespace {

double norm_deficit(const std::vector<cplx>& coeffs) {
  double sum = 0.0;
  for (const cplx& c : coeffs) sum += std::norm(c);
  return 1.0 - sum;
}

void enforce_truncation(double deficit, const TruncationPolicy& policy, int n_max) {
  if (std::abs(deficit) > policy.max_deficit) {
    std::ostringstream os;
    os << "norm deficit " << deficit << " exceeds " << policy.max_deficit << " with N_max = " << n_max
       << "; increase N_max";
    throw TruncationError(os.str(), deficit);
  }
}

}  // namespace

SpectralState coeffs_from_initial(const std::function<cplx(double)>& radial0, const ModeBasis& basis,
                                  const TrapGeometry& geom, const TruncationPolicy& policy) {
  const int size = basis.size();
  const double a = geom.a();
  const double alpha = geom.alpha();
  quad::QuadOptions opts;
  opts.initial_panels = quad::oscillation_panels(alpha, 2.0 * basis.zero(size));
  std::vector<double> jv(static_cast<std::size_t>(size));
  // c_k = a^2 int s ds conj(Psi_k(a s, 0)) R0(a s), Psi_k = sqrt2 / (a |J|) J(x_k s) e^{i alpha s^2}.
  auto values =
      quad::integrate_vector(
          static_cast<std::size_t>(size),
          [&](double s, std::span<cplx> out) {
            fill_bessel(basis, s, jv);
            const cplx w = std::sqrt(2.0) * a * s * std::exp(-kI * (alpha * s * s)) * radial0(a * s);
            for (int k = 0; k < size; ++k) {
              out[static_cast<std::size_t>(k)] = w * jv[static_cast<std::size_t>(k)] / basis.norm_bessel(k + 1);
            }
          },
          opts)
          .values;
  SpectralState state;
  state.m = basis.m();
  state.coeffs = std::move(values);
  state.norm_deficit = norm_deficit(state.coeffs);
  enforce_truncation(state.norm_deficit, policy, size);
  return state;
}

SpectralState eigenstate_start(const ModeBasis& basis, int n, const TrapGeometry& geom,
                               const TruncationPolicy& policy) {
  check_mode(basis, n, "eigenstate_start");
  const auto row = overlap_row(basis, n, geom.alpha());
  SpectralState state;
  state.m = basis.m();
  state.coeffs.resize(row.size());
  for (int k = 1; k <= basis.size(); ++k) {
    state.coeffs[static_cast<std::size_t>(k - 1)] =
        2.0 * row[static_cast<std::size_t>(k - 1)] / (basis.norm_bessel(n) * basis.norm_bessel(k));
  }
  state.norm_deficit = norm_deficit(state.coeffs);
  enforce_truncation(state.norm_deficit, policy, basis.size());
  return state;
}

SpectralState exact_start(const ModeBasis& basis, int n) {
  check_mode(basis, n, "exact_start");
  SpectralState state;
  state.m = basis.m();
  state.coeffs.assign(static_cast<std::size_t>(basis.size()), cplx{});
  state.coeffs[static_cast<std::size_t>(n - 1)] = 1.0;
  return state;
}

std::vector<cplx> b_coeffs(const SpectralState& state, const ModeBasis& basis, double t,
                           const TrapGeometry& geom) {
  if (state.m != basis.m() || static_cast<int>(state.coeffs.size()) != basis.size()) {
    throw DomainError("b_coeffs: state does not match the mode basis");
  }
  const int size = basis.size();
  const double theta = geom.dynamical_phase(t);
  const double beta = geom.alpha() * geom.xi(t);
  // Weighted coefficients w_k = c_k e^{-i x_k^2 theta} / |J_k|.
  std::vector<cplx> weighted(static_cast<std::size_t>(size));
  std::vector<int> active;
  for (int k = 1; k <= size; ++k) {
    const cplx c = state.coeffs[static_cast<std::size_t>(k - 1)];
    if (c == cplx{}) continue;
    const double x = basis.zero(k);
    weighted[static_cast<std::size_t>(k - 1)] = c * std::exp(-kI * (x * x * theta)) / basis.norm_bessel(k);
    active.push_back(k);
  }
  std::vector<cplx> b(static_cast<std::size_t>(size));
  auto accumulate = [&](int k, const std::vector<cplx>& row) {
    const cplx w = weighted[static_cast<std::size_t>(k - 1)];
    for (int j = 1; j <= size; ++j) {
      b[static_cast<std::size_t>(j - 1)] += 2.0 / basis.norm_bessel(j) * w * std::conj(row[static_cast<std::size_t>(j - 1)]);
    }
  };
  if (active.size() * 4 < static_cast<std::size_t>(size)) {
    for (int k : active) accumulate(k, overlap_row(basis, k, beta));
  } else {
    const auto matrix = overlap_matrix(basis, beta);
    for (int k : active) {
      const auto first = matrix.data.begin() + static_cast<std::ptrdiff_t>(k - 1) * size;
      accumulate(k, std::vector<cplx>(first, first + size));
    }
  }
  return b;
}

double instantaneous_energy(const ModeBasis& basis, int n, double t, const TrapGeometry& geom) {
  check_mode(basis, n, "instantaneous_energy");
  const double x = basis.zero(n);
  const double L = geom.wall_radius(t);
  return geom.hbar() * geom.hbar() * x * x / (2.0 * geom.mu() * L * L);
}

// ---------------------------------------------------------------------------
// Moment tables

double MomentTable::kinetic(int n1, int n2) const {
  const double angular = m == 0 ? 0.0 : static_cast<double>(m) * m * a_neg1(n1, n2);
  return angular - b0(n1, n2) - c1(n1, n2);
}

MomentTable build_moment_table(const ModeBasis& basis) {
  constexpr int kKinds = 6;  // A3, A-1, A1, B0, B2, C1
  const int size = basis.size();
  const int m = basis.m();
  const double m2 = static_cast<double>(m) * m;
  MomentTable table;
  table.m = m;
  table.n_max = size;
  table.a3 = RealMatrix(size);
  table.a1 = RealMatrix(size);
  table.b0 = RealMatrix(size);
  table.b2 = RealMatrix(size);
  table.c1 = RealMatrix(size);
  if (m > 0) table.a_neg1 = RealMatrix(size);

  const int block = std::max<int>(
      1, static_cast<int>(kMaxBlockComponents / (static_cast<std::size_t>(size) * kKinds)));
  const int blocks = (size + block - 1) / block;
  parallel_for(static_cast<std::size_t>(blocks), [&](std::size_t b) {
    const int r0 = static_cast<int>(b) * block;
    const int r1 = std::min(size, r0 + block);
    quad::QuadOptions opts;
    opts.initial_panels = quad::oscillation_panels(0.0, basis.zero(r1) + basis.zero(size));
    std::vector<double> jv(static_cast<std::size_t>(size));
    std::vector<double> dj(static_cast<std::size_t>(size));
    const auto values =
        quad::integrate_vector(
            static_cast<std::size_t>(r1 - r0) * size * kKinds,
            [&](double s, std::span<cplx> out) {
              fill_bessel(basis, s, jv);
              fill_bessel_derivative(basis, s, dj);
              std::size_t c = 0;
              for (int r = r0; r < r1; ++r) {
                const double j1 = jv[static_cast<std::size_t>(r)];
                for (int k = 0; k < size; ++k) {
                  const double x2 = basis.zero(k + 1);
                  const double j2 = jv[static_cast<std::size_t>(k)];
                  const double d2 = dj[static_cast<std::size_t>(k)];
                  // Bessel ODE: J'' = -J'/s - (x^2 - m^2/s^2) J.
                  const double s_dd = -d2 - (x2 * x2 * s - m2 / s) * j2;
                  out[c++] = s * s * s * j1 * j2;
                  out[c++] = m > 0 ? j1 * j2 / s : 0.0;
                  out[c++] = s * j1 * j2;
                  out[c++] = j1 * d2;
                  out[c++] = s * s * j1 * d2;
                  out[c++] = j1 * s_dd;
                }
              }
            },
            opts)
            .values;
    std::size_t c = 0;
    for (int r = r0; r < r1; ++r) {
      for (int k = 0; k < size; ++k) {
        table.a3(r + 1, k + 1) = values[c++].real();
        const double am1 = values[c++].real();
        if (m > 0) table.a_neg1(r + 1, k + 1) = am1;
        table.a1(r + 1, k + 1) = values[c++].real();
        table.b0(r + 1, k + 1) = values[c++].real();
        table.b2(r + 1, k + 1) = values[c++].real();
        table.c1(r + 1, k + 1) = values[c++].real();
      }
    }
  });
  return table;
}

std::shared_ptr<const MomentTable> moment_tables(int m, int n_max) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const MomentTable>> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find({m, n_max}); it != cache.end()) return it->second;
  }
  auto table = std::make_shared<const MomentTable>(build_moment_table(*shared_basis(m, n_max)));
  std::lock_guard lock(mutex);
  return cache.try_emplace({m, n_max}, std::move(table)).first->second;
}

// ---------------------------------------------------------------------------
// Matrix elements

namespace {

void check_table(const ModeBasis& basis, const MomentTable& table, int n1, int n2) {
  if (table.m != basis.m()) throw DomainError("moment table and basis disagree on m");
  check_mode(basis, n1, "matrix_element");
  check_mode(basis, n2, "matrix_element");
  if (n1 > table.n_max || n2 > table.n_max) throw DomainError("matrix_element: mode outside moment table");
}

}  // namespace

cplx matrix_element(Operator op, const ModeBasis& basis, const MomentTable& table, int n1, int n2,
                    double t, const TrapGeometry& geom) {
  check_table(basis, table, n1, n2);
  if (op == Operator::q0 || op == Operator::p0) return 0.0;
  const double xi = geom.xi(t);
  const double theta = geom.dynamical_phase(t);
  const double x1 = basis.zero(n1);
  const double x2 = basis.zero(n2);
  const cplx phase = n1 == n2 ? cplx{1.0} : std::exp(kI * ((x1 * x1 - x2 * x2) * theta));
  const double jj = basis.norm_bessel(n1) * basis.norm_bessel(n2);
  if (op == Operator::q0sq) {
    const double a = geom.a();
    return phase * (a * a * xi * xi * table.a3(n1, n2) / jj);
  }
  const double alpha = geom.alpha();
  // A1 + B2 is antisymmetric, so its diagonal is exactly zero; skipping it
  // keeps diagonal elements real instead of carrying quadrature round-off.
  const double antisym = n1 == n2 ? 0.0 : table.a1(n1, n2) + table.b2(n1, n2);
  const cplx bracket = 4.0 * alpha * alpha * table.a3(n1, n2) + table.kinetic(n1, n2) / (xi * xi) -
                       kI * (4.0 * alpha / xi) * antisym;
  const double hbar_a = geom.hbar() / geom.a();
  if (op == Operator::p0sq) return phase * (hbar_a * hbar_a / jj) * bracket;
  // H = (p_x^2 + p_y^2) / 2 mu; each Cartesian square carries the same isotropic weight.
  return phase * (hbar_a * hbar_a / (geom.mu() * jj)) * bracket;
}

double expectation(Operator op, const SpectralState& state, const ModeBasis& basis,
                   const MomentTable& table, double t, const TrapGeometry& geom) {
  if (state.m != basis.m() || static_cast<int>(state.coeffs.size()) > basis.size()) {
    throw DomainError("expectation: state does not match the mode basis");
  }
  const int size = static_cast<int>(state.coeffs.size());
  cplx sum = 0.0;
  for (int n1 = 1; n1 <= size; ++n1) {
    const cplx c1 = state.coeffs[static_cast<std::size_t>(n1 - 1)];
    if (c1 == cplx{}) continue;
    for (int n2 = 1; n2 <= size; ++n2) {
      const cplx c2 = state.coeffs[static_cast<std::size_t>(n2 - 1)];
      if (c2 == cplx{}) continue;
      sum += std::conj(c1) * c2 * matrix_element(op, basis, table, n1, n2, t, geom);
    }
  }
  if (std::abs(sum.imag()) > 1e-10 * std::max(1.0, std::abs(sum.real()))) {
    throw NumericError("expectation: imaginary residual " + format_double(sum.imag()) +
                       " in a Hermitian expectation value");
  }
  return sum.real();
}

Uncertainties uncertainties(const ModeBasis& basis, const MomentTable& table, int n, double t,
                            const TrapGeometry& geom) {
  check_table(basis, table, n, n);
  const double xi = geom.xi(t);
  const double j = basis.norm_bessel(n);
  const double alpha = geom.alpha();
  const double a3 = table.a3(n, n);
  Uncertainties u;
  u.dq = geom.a() * xi * std::sqrt(a3) / j;
  u.dp = (geom.hbar() / geom.a()) * std::sqrt(4.0 * alpha * alpha * a3 + table.kinetic(n, n) / (xi * xi)) / j;
  u.product = u.dq * u.dp;
  return u;
}

double stationary_product_factor(const MomentTable& table, const ModeBasis& basis, int n) {
  check_table(basis, table, n, n);
  const double j = basis.norm_bessel(n);
  return 2.0 * std::sqrt(table.kinetic(n, n) * table.a3(n, n)) / (j * j);
}

EnergyRatio energy_ratio(const ModeBasis& sum_basis, const MomentTable& table, int n, double t,
                         const TrapGeometry& geom) {
  check_mode(sum_basis, n, "energy_ratio");
  if (table.m != sum_basis.m() || n > table.n_max) throw DomainError("energy_ratio: mode outside moment table");
  const double xi = geom.xi(t);
  const double alpha = geom.alpha();

  auto weighted_sum = [&](double beta) {
    const auto row = overlap_row(sum_basis, n, beta);
    double total = 0.0;
    for (int k = 1; k <= sum_basis.size(); ++k) {
      const double x = sum_basis.zero(k);
      const double jk = sum_basis.norm_bessel(k);
      total += std::norm(row[static_cast<std::size_t>(k - 1)]) * x * x / (jk * jk);
    }
    return total;
  };

  EnergyRatio ratio;
  ratio.isum = weighted_sum(alpha * xi) / (xi * xi * weighted_sum(alpha));
  const double a3 = table.a3(n, n);
  const double k = table.kinetic(n, n);
  ratio.closed = (4.0 * alpha * alpha * a3 + k / (xi * xi)) / (4.0 * alpha * alpha * a3 + k);
  if (std::abs(ratio.isum - ratio.closed) > 1e-4 * std::abs(ratio.closed)) {
    throw NumericError("energy_ratio: overlap sum " + format_double(ratio.isum) +
                       " disagrees with closed form " + format_double(ratio.closed));
  }
  return ratio;
}

}  // namespace qtrap
