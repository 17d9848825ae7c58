#pragma once

// Algebra of the moving-wall trap: geometry, radial modes, overlap
// integrals, expansion coefficients, moment tables, matrix elements and
// expectation values.
//
// Conventions:
//  * Radial quantum numbers n are 1-based in every public signature.
//  * The angular number m is conserved, so a state carries a single m and the
//    angular factor exp(i m phi)/sqrt(2 pi) integrates out of every quantity.
//  * Radial overlaps use s = rho / L(t) in [0, 1].

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include "qtrap/special.hpp"

namespace qtrap {

using cplx = std::complex<double>;

/// Circular wall of radius L(t) = a + u t.
class TrapGeometry {
 public:
  /// Smallest wall position accepted for contracting traps.
  static constexpr double kMinXi = 0.02;

  static TrapGeometry with_velocity(double u, double a = 1.0, double hbar = 1.0, double mu = 1.0);
  /// Velocity from the dimensionless parameter alpha = mu a u / (2 hbar).
  static TrapGeometry with_alpha(double alpha, double a = 1.0, double hbar = 1.0, double mu = 1.0);

  double a() const { return a_; }
  double u() const { return u_; }
  double hbar() const { return hbar_; }
  double mu() const { return mu_; }
  double alpha() const { return mu_ * a_ * u_ / (2.0 * hbar_); }

  /// Wall position L(t)/a. Throws DomainError for t < 0, past wall collapse,
  /// or once a contracting wall drops below kMinXi.
  double xi(double t) const;
  double wall_radius(double t) const { return a_ * xi(t); }
  /// Time at which the wall reaches xi; DomainError when unreachable.
  double time_at_xi(double xi) const;
  /// Coefficient theta(t) = hbar t / (2 mu a^2 xi(t)) of -x_mn^2 in the
  /// dynamical phase. Equal to (1 - 1/xi)/(4 alpha) and regular at alpha = 0.
  double dynamical_phase(double t) const;

 private:
  TrapGeometry(double a, double u, double hbar, double mu);

  double a_;
  double u_;
  double hbar_;
  double mu_;
};

/// xi(T) = 1 + 2 pi (alpha / alpha_mn^2) T in the dimensionless time T = nu_mn t.
double xi_dimensionless(double alpha, double alpha_mn, double T);

/// Radial mode (m, n) with its derived scales.
struct Mode {
  int m = 0;
  int n = 1;
  double x = 0.0;          // n-th positive zero of J_m
  double lambda = 0.0;     // 2 pi a / x
  double nu = 0.0;         // E_mn(0) / (2 pi hbar)
  double alpha_mn = 0.0;   // x / 2
  double energy0 = 0.0;    // hbar^2 x^2 / (2 mu a^2)
};

Mode make_mode(int m, int n, const TrapGeometry& geom = TrapGeometry::with_velocity(0.0));

/// Zeros x_{m,1..N} and the normalisation factors |J_{m+1}(x_{mn})|.
class ModeBasis {
 public:
  ModeBasis(int m, int n_max);

  int m() const { return m_; }
  int size() const { return static_cast<int>(zeros_.size()); }
  double zero(int n) const { return zeros_.at(static_cast<std::size_t>(n - 1)); }
  double norm_bessel(int n) const { return norms_.at(static_cast<std::size_t>(n - 1)); }
  const std::vector<double>& zeros() const { return zeros_; }

 private:
  int m_;
  std::vector<double> zeros_;
  std::vector<double> norms_;
};

/// Process-wide immutable cache keyed by (m, n_max).
std::shared_ptr<const ModeBasis> shared_basis(int m, int n_max);

// ---------------------------------------------------------------------------
// Overlap integrals I_{m n1 n2}(beta) = int_0^1 s exp(-i beta s^2) J_m(x1 s) J_m(x2 s) ds
// with beta = alpha xi(t).

cplx overlap_at(const ModeBasis& basis, int n1, int n2, double alpha, double xi);
cplx overlap_I(const ModeBasis& basis, int n1, int n2, double t, const TrapGeometry& geom);

/// I_{n, n'} for n' = 1..N at one beta.
std::vector<cplx> overlap_row(const ModeBasis& basis, int n, double beta);

/// Symmetric N x N matrix of I_{n1 n2}, row-major, 0-based storage.
struct OverlapMatrix {
  int size = 0;
  std::vector<cplx> data;
  cplx operator()(int n1, int n2) const {
    return data[static_cast<std::size_t>((n1 - 1) * size + (n2 - 1))];
  }
};
OverlapMatrix overlap_matrix(const ModeBasis& basis, double beta);

// ---------------------------------------------------------------------------
// States

struct TruncationPolicy {
  // Largest accepted 1 - sum |c|^2.
  double max_deficit = 1e-6;
};

/// Psi(r, t) = sum_n c_n Psi_mn(r, t) with fixed m.
struct SpectralState {
  int m = 0;
  int phi_sign = +1;  // exp(+i m phi) or exp(-i m phi); observables ignore it
  std::vector<cplx> coeffs;
  double norm_deficit = 0.0;
};

/// Projects an initial radial profile R0(rho) (angular factor
/// exp(i m phi)/sqrt(2 pi) implied) onto Psi_{mn'}(r, 0).
/// Throws TruncationError when the norm deficit exceeds the policy.
SpectralState coeffs_from_initial(const std::function<cplx(double)>& radial0, const ModeBasis& basis,
                                  const TrapGeometry& geom, const TruncationPolicy& policy = {});

/// Start in the instantaneous eigenstate u_mn(r, 0):
/// c_{n'} = 2 I_{n n'}(0, alpha) / |J_{m+1}(x_n) J_{m+1}(x_n')|.
SpectralState eigenstate_start(const ModeBasis& basis, int n, const TrapGeometry& geom,
                               const TruncationPolicy& policy = {});

/// Start in the moving solution Psi_mn(r, 0): c_{n'} = delta_{n n'}.
SpectralState exact_start(const ModeBasis& basis, int n);

/// Coefficients b_{n'}(t) on the instantaneous eigenbasis u_{mn'}(r, t),
/// from the overlap series.
std::vector<cplx> b_coeffs(const SpectralState& state, const ModeBasis& basis, double t,
                           const TrapGeometry& geom);

/// E_{mn}(t) = hbar^2 x^2 / (2 mu L(t)^2).
double instantaneous_energy(const ModeBasis& basis, int n, double t, const TrapGeometry& geom);

// ---------------------------------------------------------------------------
// Moment integrals over [0, 1] (J_n short for J_m(x_{mn} s), d/ds acting on s):
//   A^(k)[n1][n2] = int s^k J_n1 J_n2
//   B^(k)[n1][n2] = int s^k J_n1 dJ_n2/ds
//   C^(k)[n1][n2] = int s^k J_n1 d^2J_n2/ds^2

class RealMatrix {
 public:
  RealMatrix() = default;
  explicit RealMatrix(int n) : n_(n), data_(static_cast<std::size_t>(n) * n, 0.0) {}
  int size() const { return n_; }
  bool empty() const { return n_ == 0; }
  /// 1-based quantum numbers.
  double operator()(int n1, int n2) const { return data_[index(n1, n2)]; }
  double& operator()(int n1, int n2) { return data_[index(n1, n2)]; }

 private:
  std::size_t index(int n1, int n2) const {
    return static_cast<std::size_t>((n1 - 1) * n_ + (n2 - 1));
  }
  int n_ = 0;
  std::vector<double> data_;
};

struct MomentTable {
  int m = 0;
  int n_max = 0;
  RealMatrix a3;
  RealMatrix a_neg1;  // empty for m = 0
  RealMatrix a1;
  RealMatrix b0;
  RealMatrix b2;
  RealMatrix c1;

  /// m^2 A^(-1) - B^(0) - C^(1), i.e. int s dJ_n1/ds dJ_n2/ds + m^2 A^(-1).
  /// The m^2 A^(-1) term is skipped for m = 0.
  double kinetic(int n1, int n2) const;
};

MomentTable build_moment_table(const ModeBasis& basis);
std::shared_ptr<const MomentTable> moment_tables(int m, int n_max);

// ---------------------------------------------------------------------------
// Matrix elements <Psi_{m n1}(t)| O |Psi_{m n2}(t)> for q0 = rho cos(phi - phi0)
// and the conjugate momentum p0. All are independent of phi0.

enum class Operator { q0, p0, q0sq, p0sq, H };

cplx matrix_element(Operator op, const ModeBasis& basis, const MomentTable& table, int n1, int n2,
                    double t, const TrapGeometry& geom);

/// sum c*_{n1} c_{n2} <n1|O|n2>; throws NumericError when the imaginary
/// residual exceeds 1e-10 (relative to max(1, |value|)).
double expectation(Operator op, const SpectralState& state, const ModeBasis& basis,
                   const MomentTable& table, double t, const TrapGeometry& geom);

struct Uncertainties {
  double dq = 0.0;
  double dp = 0.0;
  double product = 0.0;
};

/// Position and momentum spreads along an arbitrary radial direction for the
/// moving solution Psi_mn.
Uncertainties uncertainties(const ModeBasis& basis, const MomentTable& table, int n, double t,
                            const TrapGeometry& geom);

/// 2 sqrt((m^2 A^(-1) - B^(0) - C^(1)) A^(3)) / J_{m+1}^2: the uncertainty
/// product of the static trap in units of hbar/2.
double stationary_product_factor(const MomentTable& table, const ModeBasis& basis, int n);

struct EnergyRatio {
  double isum = 0.0;    // overlap-series route
  double closed = 0.0;  // diagonal closed form
};

/// <H>_mn(t) / <H>_mn(0) for the moving solution Psi_mn. The overlap sum runs
/// over every mode of `sum_basis`. Throws NumericError when the two routes
/// differ by more than 1e-4.
EnergyRatio energy_ratio(const ModeBasis& sum_basis, const MomentTable& table, int n, double t,
                         const TrapGeometry& geom);

}  // namespace qtrap
