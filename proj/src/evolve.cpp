#include "qtrap/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "qtrap/errors.hpp"
#include "qtrap/parallel.hpp"

namespace qtrap {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

void check_radius(double rho, double L, const char* where) {
  if (!(rho >= 0.0) || rho > L * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << where << ": rho = " << rho << " outside the disk of radius " << L;
    throw DomainError(os.str());
  }
}

void check_state(const SpectralState& state, const ModeBasis& basis, const char* where) {
  if (state.m != basis.m() || static_cast<int>(state.coeffs.size()) != basis.size()) {
    throw DomainError(std::string(where) + ": state does not match the mode basis");
  }
}

// Radial part of Psi_mn at s = rho / L without range checks.
cplx radial_at(const ModeBasis& basis, int n, double s, double L, double beta, double theta,
               BoundaryPhase phase) {
  const double x = basis.zero(n);
  const double amp = std::sqrt(2.0) / (L * basis.norm_bessel(n)) * special::bessel_j(basis.m(), x * s);
  const double arg = (phase == BoundaryPhase::keep ? beta * s * s : 0.0) - x * x * theta;
  return amp * std::exp(kI * arg);
}

// sum_k c_k R_k at s; `jv` receives J_m(x_k s).
cplx series_at(const SpectralState& state, const ModeBasis& basis, double s, double L, double beta, double theta,
               BoundaryPhase phase, std::vector<double>& jv) {
  cplx sum = 0.0;
  for (int k = 1; k <= basis.size(); ++k) {
    const double x = basis.zero(k);
    const double j = special::bessel_j(basis.m(), x * s);
    jv[static_cast<std::size_t>(k - 1)] = j;
    const cplx c = state.coeffs[static_cast<std::size_t>(k - 1)];
    if (c == cplx{}) continue;
    sum += c * (j / basis.norm_bessel(k)) * std::exp(-kI * (x * x * theta));
  }
  const double boundary = phase == BoundaryPhase::keep ? beta * s * s : 0.0;
  return std::sqrt(2.0) / L * std::exp(kI * boundary) * sum;
}

}  // namespace

cplx radial_exact(const ModeBasis& basis, int n, double rho, double t, const TrapGeometry& geom,
                  BoundaryPhase phase) {
  if (n < 1 || n > basis.size()) throw DomainError("radial_exact: radial number outside the basis");
  const double xi = geom.xi(t);
  const double L = geom.a() * xi;
  check_radius(rho, L, "radial_exact");
  return radial_at(basis, n, rho / L, L, geom.alpha() * xi, geom.dynamical_phase(t), phase);
}

cplx psi_exact(const ModeBasis& basis, int n, double rho, double phi, double t, const TrapGeometry& geom) {
  return radial_exact(basis, n, rho, t, geom) * std::exp(kI * (basis.m() * phi)) * kInvSqrt2Pi;
}

cplx radial_general(const SpectralState& state, const ModeBasis& basis, double rho, double t,
                    const TrapGeometry& geom, BoundaryPhase phase) {
  check_state(state, basis, "radial_general");
  const double xi = geom.xi(t);
  const double L = geom.a() * xi;
  check_radius(rho, L, "radial_general");
  std::vector<double> jv(static_cast<std::size_t>(basis.size()));
  return series_at(state, basis, rho / L, L, geom.alpha() * xi, geom.dynamical_phase(t), phase, jv);
}

cplx psi_general(const SpectralState& state, const ModeBasis& basis, double rho, double phi, double t,
                 const TrapGeometry& geom) {
  return radial_general(state, basis, rho, t, geom) * std::exp(kI * (state.phi_sign * state.m * phi)) *
         kInvSqrt2Pi;
}

double radial_instantaneous(const ModeBasis& basis, int n, double rho, double t, const TrapGeometry& geom) {
  if (n < 1 || n > basis.size()) throw DomainError("radial_instantaneous: radial number outside the basis");
  const double L = geom.wall_radius(t);
  check_radius(rho, L, "radial_instantaneous");
  return std::sqrt(2.0) / (L * basis.norm_bessel(n)) * special::bessel_j(basis.m(), basis.zero(n) * rho / L);
}

double disk_norm(const SpectralState& state, const ModeBasis& basis, double t, const TrapGeometry& geom) {
  check_state(state, basis, "disk_norm");
  const double xi = geom.xi(t);
  const double L = geom.a() * xi;
  const double beta = geom.alpha() * xi;
  const double theta = geom.dynamical_phase(t);
  std::vector<double> jv(static_cast<std::size_t>(basis.size()));
  quad::QuadOptions opts;
  opts.initial_panels = quad::oscillation_panels(0.0, 2.0 * basis.zero(basis.size()));
  const auto r = quad::integrate(
      [&](double s) {
        const cplx R = series_at(state, basis, s, L, beta, theta, BoundaryPhase::keep, jv);
        return cplx{L * L * s * std::norm(R)};
      },
      opts);
  return r.value.real();
}

cplx exact_inner_product(const ModeBasis& basis, int n1, int n2, double t, const TrapGeometry& geom) {
  if (n1 < 1 || n2 < 1 || n1 > basis.size() || n2 > basis.size()) {
    throw DomainError("exact_inner_product: radial number outside the basis");
  }
  const double xi = geom.xi(t);
  const double L = geom.a() * xi;
  const double beta = geom.alpha() * xi;
  const double theta = geom.dynamical_phase(t);
  quad::QuadOptions opts;
  opts.initial_panels = quad::oscillation_panels(beta, basis.zero(n1) + basis.zero(n2));
  return quad::integrate(
             [&](double s) {
               return L * L * s * std::conj(radial_at(basis, n1, s, L, beta, theta, BoundaryPhase::keep)) *
                      radial_at(basis, n2, s, L, beta, theta, BoundaryPhase::keep);
             },
             opts)
      .value;
}

std::vector<cplx> b_coeffs_projection(const SpectralState& state, const ModeBasis& basis, double t,
                                      const TrapGeometry& geom, BoundaryPhase phase) {
  check_state(state, basis, "b_coeffs_projection");
  const int size = basis.size();
  const double xi = geom.xi(t);
  const double L = geom.a() * xi;
  const double beta = geom.alpha() * xi;
  const double theta = geom.dynamical_phase(t);
  std::vector<double> jv(static_cast<std::size_t>(size));
  quad::QuadOptions opts;
  opts.initial_panels = quad::oscillation_panels(beta, 2.0 * basis.zero(size));
  // b_j = L^2 int s u_j(L s) R(L s) ds with u_j = sqrt2 / (L |J_j|) J(x_j s).
  return quad::integrate_vector(
             static_cast<std::size_t>(size),
             [&](double s, std::span<cplx> out) {
               const cplx R = series_at(state, basis, s, L, beta, theta, phase, jv);
               const cplx w = std::sqrt(2.0) * L * s * R;
               for (int j = 1; j <= size; ++j) {
                 out[static_cast<std::size_t>(j - 1)] = w * jv[static_cast<std::size_t>(j - 1)] / basis.norm_bessel(j);
               }
             },
             opts)
      .values;
}

// ---------------------------------------------------------------------------
// Densities

Scenario::Scenario(int m, int n, double alpha_ratio, int n_max, const TruncationPolicy& policy)
    : mode_(make_mode(m, n)),
      alpha_ratio_(alpha_ratio),
      geom_(TrapGeometry::with_alpha(alpha_ratio * 0.5 * special::bessel_zeros(m, n).zero(n))),
      basis_(shared_basis(m, n_max)) {
  if (n > n_max) throw DomainError("Scenario: n exceeds n_max");
  state_ = eigenstate_start(*basis_, n, geom_, policy);
}

double Scenario::density(double eta, double t) const {
  const double rho = eta * mode_.lambda;
  const double xi = geom_.xi(t);
  const double L = geom_.a() * xi;
  if (rho >= L) return 0.0;
  std::vector<double> jv(static_cast<std::size_t>(basis_->size()));
  const cplx R = series_at(state_, *basis_, rho / L, L, geom_.alpha() * xi, geom_.dynamical_phase(t),
                           BoundaryPhase::keep, jv);
  return mode_.lambda * mode_.lambda * eta * std::norm(R);
}

namespace {

std::vector<RadialDensitySample> profile_at(const Scenario& sc, double t, int grid_size) {
  if (grid_size < 2) throw DomainError("density profile: grid_size must be >= 2");
  const double eta_wall = sc.geometry().wall_radius(t) / sc.mode().lambda;
  const double T = sc.T_of(t);
  std::vector<RadialDensitySample> out(static_cast<std::size_t>(grid_size) + 1);
  parallel_for(out.size(), [&](std::size_t i) {
    const double eta = eta_wall * static_cast<double>(i) / grid_size;
    out[i] = {eta, T, i == out.size() - 1 ? 0.0 : sc.density(eta, t)};
  });
  return out;
}

}  // namespace

std::vector<RadialDensitySample> density_profile(int m, int n, double alpha_ratio, double xi_target,
                                                 const DensityOptions& options) {
  if (!(xi_target >= TrapGeometry::kMinXi)) throw DomainError("density_profile: xi_target below 0.02");
  if (xi_target != 1.0 && (alpha_ratio == 0.0 || (xi_target > 1.0) != (alpha_ratio > 0.0))) {
    throw DomainError("density_profile: xi_target is not reached with this alpha_ratio");
  }
  const Scenario sc(m, n, alpha_ratio, options.n_max, options.policy);
  return profile_at(sc, sc.geometry().time_at_xi(xi_target), options.grid_size);
}

std::vector<RadialDensitySample> density_profile_at_time(int m, int n, double alpha_ratio, double T,
                                                         const DensityOptions& options) {
  if (!(T >= 0.0)) throw DomainError("density_profile_at_time: T must be non-negative");
  const Scenario sc(m, n, alpha_ratio, options.n_max, options.policy);
  return profile_at(sc, sc.time_of(T), options.grid_size);
}

double instantaneous_density(const Mode& mode, double eta, double xi) {
  const double rho = eta * mode.lambda;
  const double L = xi;  // a = 1 in the scenario geometry
  if (rho < 0.0 || rho >= L) return 0.0;
  const double jn = special::bessel_j(mode.m + 1, mode.x);
  const double u = std::sqrt(2.0) / (L * std::abs(jn)) * special::bessel_j(mode.m, mode.x * rho / L);
  return mode.lambda * mode.lambda * eta * u * u;
}

double frozen_initial_density(const Mode& mode, double eta) { return instantaneous_density(mode, eta, 1.0); }

FlightTimes flight_times(const Mode& mode, double eta_obs) {
  const double rho0 = eta_obs * mode.lambda;
  if (!(rho0 > 1.0)) throw DomainError("flight_times: observation point must lie outside the initial disk");
  const double v = mode.x;  // hbar x / (mu a)
  return {mode.nu * (rho0 - 1.0) / v, mode.nu * (rho0 + 1.0) / v};
}

std::pair<double, int> visibility(std::span<const RadialDensitySample> samples, const FlightTimes& flight) {
  const std::size_t count = samples.size();
  if (count < 3) return {0.0, 0};
  std::vector<double> smooth(count);
  smooth.front() = samples.front().rho_density;
  smooth.back() = samples.back().rho_density;
  for (std::size_t i = 1; i + 1 < count; ++i) {
    smooth[i] = (samples[i - 1].rho_density + samples[i].rho_density + samples[i + 1].rho_density) / 3.0;
  }
  std::vector<double> extrema;
  for (std::size_t i = 1; i + 1 < count; ++i) {
    const double T = samples[i].T;
    if (!(T > flight.T1 && T < flight.T2)) continue;
    const bool peak = smooth[i] > smooth[i - 1] && smooth[i] > smooth[i + 1];
    const bool trough = smooth[i] < smooth[i - 1] && smooth[i] < smooth[i + 1];
    if (peak || trough) extrema.push_back(smooth[i]);
  }
  if (extrema.size() < 2) return {0.0, static_cast<int>(extrema.size())};
  double total = 0.0;
  for (std::size_t i = 1; i < extrema.size(); ++i) total += std::abs(extrema[i] - extrema[i - 1]);
  return {total / static_cast<double>(extrema.size() - 1), static_cast<int>(extrema.size())};
}

DensityTrace density_timeseries(int m, int n, double alpha_ratio, double eta_obs, double T_max, int steps,
                                int n_max, const TruncationPolicy& policy) {
  if (!(alpha_ratio > 0.0)) throw DomainError("density_timeseries: requires an expanding wall");
  if (steps < 2 || !(T_max > 0.0)) throw DomainError("density_timeseries: need steps >= 2 and T_max > 0");
  const Scenario sc(m, n, alpha_ratio, n_max, policy);
  DensityTrace trace;
  trace.flight = flight_times(sc.mode(), eta_obs);
  const double rho0 = eta_obs * sc.mode().lambda;
  trace.wall_arrival_T = sc.T_of(sc.geometry().time_at_xi(rho0));
  trace.samples.resize(static_cast<std::size_t>(steps) + 1);
  parallel_for(trace.samples.size(), [&](std::size_t i) {
    const double T = T_max * static_cast<double>(i) / steps;
    trace.samples[i] = {eta_obs, T, sc.density(eta_obs, sc.time_of(T))};
  });
  const auto [vis, extrema] = visibility(trace.samples, trace.flight);
  trace.visibility = vis;
  trace.extrema_in_window = extrema;
  return trace;
}

// ---------------------------------------------------------------------------
// Propagator

PropagatorKernel::PropagatorKernel(std::span<const int> m_list, int n_max, double rho, double phi, double t,
                                   double t_prime, const TrapGeometry& geom)
    : phi_(phi), t_prime_(t_prime), geom_(geom) {
  if (m_list.empty()) throw DomainError("PropagatorKernel: empty m list");
  const double L = geom.wall_radius(t);
  check_radius(rho, L, "PropagatorKernel");
  geom.xi(t_prime);
  for (int m : m_list) {
    if (m < 0) throw DomainError("PropagatorKernel: m must be >= 0; both branches are included");
    Branch br{shared_basis(m, n_max), {}};
    br.left.reserve(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) br.left.push_back(radial_exact(*br.basis, n, rho, t, geom));
    branches_.push_back(std::move(br));
  }
}

double PropagatorKernel::max_zero() const {
  double top = 0.0;
  for (const Branch& br : branches_) top = std::max(top, br.basis->zero(br.basis->size()));
  return top;
}

cplx PropagatorKernel::operator()(double rho_prime, double phi_prime) const {
  const double xi = geom_.xi(t_prime_);
  const double L = geom_.a() * xi;
  check_radius(rho_prime, L, "PropagatorKernel");
  const double s = rho_prime / L;
  const double beta = geom_.alpha() * xi;
  const double theta = geom_.dynamical_phase(t_prime_);
  cplx total = 0.0;
  for (const Branch& br : branches_) {
    cplx radial = 0.0;
    for (int n = 1; n <= br.basis->size(); ++n) {
      radial += br.left[static_cast<std::size_t>(n - 1)] *
                std::conj(radial_at(*br.basis, n, s, L, beta, theta, BoundaryPhase::keep));
    }
    const int m = br.basis->m();
    // sum over e^{+-i m (phi - phi')} / (2 pi)
    const double angular = m == 0 ? 1.0 / (2.0 * kPi) : std::cos(m * (phi_ - phi_prime)) / kPi;
    total += angular * radial;
  }
  return total;
}

cplx propagator(std::span<const int> m_list, int n_max, double rho, double phi, double t, double rho_prime,
                double phi_prime, double t_prime, const TrapGeometry& geom) {
  return PropagatorKernel(m_list, n_max, rho, phi, t, t_prime, geom)(rho_prime, phi_prime);
}

cplx propagate(const PropagatorKernel& kernel, const std::function<cplx(double, double)>& f,
               const PropagateOptions& options) {
  if (options.angular_points < 1) throw DomainError("propagate: need at least one angular node");
  const TrapGeometry& geom = kernel.geometry();
  const double xi = geom.xi(kernel.t_prime());
  const double L = geom.a() * xi;
  const int M = options.angular_points;
  const double dphi = 2.0 * kPi / M;
  quad::QuadOptions opts = options.radial;
  opts.initial_panels = std::max(opts.initial_panels,
                                 quad::oscillation_panels(geom.alpha() * xi, 2.0 * kernel.max_zero()));
  return quad::integrate(
             [&](double s) {
               const double rho = L * s;
               cplx ring = 0.0;
               for (int k = 0; k < M; ++k) {
                 const double phi = k * dphi;
                 ring += kernel(rho, phi) * f(rho, phi);
               }
               return L * L * s * dphi * ring;
             },
             opts)
      .value;
}

// ---------------------------------------------------------------------------
// Checks

double pde_residual(const ModeBasis& basis, int n, const TrapGeometry& geom, const PdeGrid& grid) {
  if (n < 1 || n > basis.size()) throw DomainError("pde_residual: radial number outside the basis");
  if (!(grid.h > 0.0) || grid.radial_points < 1) throw DomainError("pde_residual: invalid grid");
  const double h = grid.h;
  const double hbar = geom.hbar();
  const double mu = geom.mu();
  const int m = basis.m();
  // Psi at an arbitrary (rho, phi, t); the moving solution extends smoothly past the wall.
  auto psi = [&](double rho, double phi, double t) {
    const double xi = geom.xi(t);
    const double L = geom.a() * xi;
    return radial_at(basis, n, rho / L, L, geom.alpha() * xi, geom.dynamical_phase(t), BoundaryPhase::keep) *
           std::exp(kI * (m * phi)) * kInvSqrt2Pi;
  };
  double worst = 0.0;
  for (double t : grid.times) {
    if (t - h < 0.0) throw DomainError("pde_residual: sample times must exceed the step h");
    const double L = geom.wall_radius(t);
    for (int i = 0; i < grid.radial_points; ++i) {
      const double rho = (i + 0.5) * L / grid.radial_points;
      if (rho <= h) throw DomainError("pde_residual: radial step reaches the origin; reduce h");
      const double phi = grid.phi;
      const cplx c = psi(rho, phi, t);
      const cplx rp = psi(rho + h, phi, t);
      const cplx rm = psi(rho - h, phi, t);
      const cplx ap = psi(rho, phi + h, t);
      const cplx am = psi(rho, phi - h, t);
      const cplx lap = (rp - 2.0 * c + rm) / (h * h) + (rp - rm) / (2.0 * h * rho) +
                       (ap - 2.0 * c + am) / (rho * rho * h * h);
      const cplx dt = (psi(rho, phi, t + h) - psi(rho, phi, t - h)) / (2.0 * h);
      const cplx residual = kI * hbar * dt + hbar * hbar / (2.0 * mu) * lap;
      worst = std::max(worst, std::abs(residual));
    }
  }
  return worst;
}

double long_time_radial(const SpectralState& state, const ModeBasis& basis, double rho_obs, double t,
                        const TrapGeometry& geom) {
  check_state(state, basis, "long_time_radial");
  if (!(geom.u() > 0.0)) throw DomainError("long_time_radial: requires an expanding wall");
  const double ut = geom.u() * t;
  if (!(rho_obs >= 0.0) || rho_obs > ut) throw DomainError("long_time_radial: rho_obs must lie inside u t");
  // Limit of hbar t / (2 mu a^2 xi) as t grows.
  const double theta = geom.hbar() / (2.0 * geom.mu() * geom.a() * geom.u());
  cplx sum = 0.0;
  for (int k = 1; k <= basis.size(); ++k) {
    const double x = basis.zero(k);
    sum += state.coeffs[static_cast<std::size_t>(k - 1)] / basis.norm_bessel(k) *
           special::bessel_j(basis.m(), x * rho_obs / ut) * std::exp(-kI * (x * x * theta));
  }
  return std::sqrt(2.0) / ut * std::abs(sum);
}

}  // namespace qtrap
