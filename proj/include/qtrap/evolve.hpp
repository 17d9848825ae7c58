#pragma once

// Wavefunctions, densities, propagator and consistency checks for the
// moving-wall trap. Radial parts R(rho, t) are normalised so that
// int_0^L rho |R|^2 drho = 1; the full wavefunction is R exp(i m phi)/sqrt(2 pi).

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "qtrap/quad.hpp"
#include "qtrap/spectral.hpp"

namespace qtrap {

/// Whether the exp(i alpha xi (rho/L)^2) factor of the moving solutions is
/// kept. Dropping it produces a wrong wavefunction and exists only as a
/// negative control.
enum class BoundaryPhase { keep, drop };

/// Radial part of the moving solution Psi_mn. DomainError for rho outside [0, L(t)].
cplx radial_exact(const ModeBasis& basis, int n, double rho, double t, const TrapGeometry& geom,
                  BoundaryPhase phase = BoundaryPhase::keep);
cplx psi_exact(const ModeBasis& basis, int n, double rho, double phi, double t, const TrapGeometry& geom);

/// Radial part of sum_n c_n Psi_mn.
cplx radial_general(const SpectralState& state, const ModeBasis& basis, double rho, double t,
                    const TrapGeometry& geom, BoundaryPhase phase = BoundaryPhase::keep);
cplx psi_general(const SpectralState& state, const ModeBasis& basis, double rho, double phi, double t,
                 const TrapGeometry& geom);

/// Radial part of the instantaneous eigenfunction u_mn(r, t); real.
double radial_instantaneous(const ModeBasis& basis, int n, double rho, double t, const TrapGeometry& geom);

/// int rho |R|^2 drho over the disk at time t.
double disk_norm(const SpectralState& state, const ModeBasis& basis, double t, const TrapGeometry& geom);

/// <Psi_{m n1}(t) | Psi_{m n2}(t)> by quadrature of the radial parts.
cplx exact_inner_product(const ModeBasis& basis, int n1, int n2, double t, const TrapGeometry& geom);

/// b_{n'}(t) = <u_{mn'}(t) | Psi(t)> by direct quadrature of the projection.
/// Independent of the overlap series used by b_coeffs.
std::vector<cplx> b_coeffs_projection(const SpectralState& state, const ModeBasis& basis, double t,
                                      const TrapGeometry& geom, BoundaryPhase phase = BoundaryPhase::keep);

// ---------------------------------------------------------------------------
// Dimensionless densities

struct RadialDensitySample {
  double eta = 0.0;          // rho / lambda_mn
  double T = 0.0;            // nu_mn t
  double rho_density = 0.0;  // lambda_mn^2 eta |R|^2
};

struct FlightTimes {
  double T1 = 0.0;  // front edge to observation point
  double T2 = 0.0;  // back edge to observation point
};

struct DensityOptions {
  int n_max = 100;
  int grid_size = 400;
  TruncationPolicy policy{};
};

/// Density scenario: the particle starts in u_mn(r, 0)
/// and the wall moves with alpha = alpha_ratio * alpha_mn.
class Scenario {
 public:
  Scenario(int m, int n, double alpha_ratio, int n_max, const TruncationPolicy& policy = {});

  const Mode& mode() const { return mode_; }
  const TrapGeometry& geometry() const { return geom_; }
  const ModeBasis& basis() const { return *basis_; }
  const SpectralState& state() const { return state_; }
  double alpha_ratio() const { return alpha_ratio_; }

  double time_of(double T) const { return T / mode_.nu; }
  double T_of(double t) const { return t * mode_.nu; }
  /// Dimensionless density at (eta, t); zero outside the wall.
  double density(double eta, double t) const;

 private:
  Mode mode_;
  double alpha_ratio_;
  TrapGeometry geom_;
  std::shared_ptr<const ModeBasis> basis_;
  SpectralState state_;
};

/// Samples on a uniform eta grid from 0 to the wall at the instant the wall
/// reaches xi_target. DomainError when the motion never reaches xi_target.
std::vector<RadialDensitySample> density_profile(int m, int n, double alpha_ratio, double xi_target,
                                                 const DensityOptions& options = {});
std::vector<RadialDensitySample> density_profile_at_time(int m, int n, double alpha_ratio, double T,
                                                         const DensityOptions& options = {});

/// lambda^2 eta |u_mn|^2 for the eigenfunction of a wall frozen at xi.
double instantaneous_density(const Mode& mode, double eta, double xi);
/// Initial density lambda^2 eta |u_mn(r, 0)|^2; zero outside the initial disk.
double frozen_initial_density(const Mode& mode, double eta);

struct DensityTrace {
  std::vector<RadialDensitySample> samples;
  FlightTimes flight;
  double wall_arrival_T = 0.0;  // first T with L(t) = rho_obs
  double visibility = 0.0;
  int extrema_in_window = 0;
};

/// Classical flight times for eta_obs (DomainError unless rho_obs > a).
FlightTimes flight_times(const Mode& mode, double eta_obs);

/// Mean |height difference| of adjacent local extrema strictly inside (T1, T2)
/// after a 3-point moving average. Returns {visibility, extremum count}.
std::pair<double, int> visibility(std::span<const RadialDensitySample> samples, const FlightTimes& flight);

/// Density at eta_obs for T in [0, T_max] on steps + 1 uniform points.
/// Requires an expanding wall.
DensityTrace density_timeseries(int m, int n, double alpha_ratio, double eta_obs, double T_max, int steps,
                                int n_max = 100, const TruncationPolicy& policy = {});

// ---------------------------------------------------------------------------
// Propagator

/// Truncated kernel K(r, t; r', t') summed over the listed m >= 0 (both
/// e^{+-i m phi} branches for m > 0) and n <= n_max. The (r, t) side is
/// evaluated once at construction.
class PropagatorKernel {
 public:
  PropagatorKernel(std::span<const int> m_list, int n_max, double rho, double phi, double t, double t_prime,
                   const TrapGeometry& geom);

  cplx operator()(double rho_prime, double phi_prime) const;
  double t_prime() const { return t_prime_; }
  const TrapGeometry& geometry() const { return geom_; }
  /// Largest Bessel zero in the kernel; sets the radial oscillation scale.
  double max_zero() const;

 private:
  struct Branch {
    std::shared_ptr<const ModeBasis> basis;
    std::vector<cplx> left;  // R_mn(rho, t)
  };
  std::vector<Branch> branches_;
  double phi_;
  double t_prime_;
  TrapGeometry geom_;
};

cplx propagator(std::span<const int> m_list, int n_max, double rho, double phi, double t, double rho_prime,
                double phi_prime, double t_prime, const TrapGeometry& geom);

struct PropagateOptions {
  int angular_points = 32;  // trapezoid nodes in phi'; exact for |m| < angular_points / 2
  quad::QuadOptions radial{};
};

/// int_0^{L(t')} drho' rho' int dphi' K(r, t; r', t') f(rho', phi').
cplx propagate(const PropagatorKernel& kernel, const std::function<cplx(double, double)>& f,
               const PropagateOptions& options = {});

// ---------------------------------------------------------------------------
// Checks

struct PdeGrid {
  double h = 1e-2;  // step in rho, phi and t
  int radial_points = 12;
  std::vector<double> times{0.1, 0.4, 0.8};
  double phi = 0.3;
};

/// max |i hbar dPsi/dt - H Psi| for Psi_mn on the grid, with centred
/// differences in t and the 5-point polar Laplacian. Radial samples sit at
/// half-cell offsets, rho_i = (i + 1/2) L(t) / radial_points.
double pde_residual(const ModeBasis& basis, int n, const TrapGeometry& geom, const PdeGrid& grid = {});

/// Long-time form of |R(rho_obs, t)|: the exact series with L(t) -> u t and
/// the dynamical phase at its t -> infinity limit x^2 / (4 alpha).
/// Requires u > 0.
double long_time_radial(const SpectralState& state, const ModeBasis& basis, double rho_obs, double t,
                        const TrapGeometry& geom);

}  // namespace qtrap
