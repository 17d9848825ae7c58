#include "qtrap/verify.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <utility>

#include "qtrap/errors.hpp"
#include "qtrap/evolve.hpp"
#include "qtrap/oracle.hpp"
#include "qtrap/spectral.hpp"

namespace qtrap::verify {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Either "lower is better" (measured <= threshold) or the reverse.
enum class Sense { at_most, at_least };

CheckResult run_check(const std::string& name, double threshold, Sense sense, const std::function<double()>& body) {
  CheckResult r{name, false, std::numeric_limits<double>::quiet_NaN(), threshold, {}};
  const auto start = std::chrono::steady_clock::now();
  try {
    r.measured = body();
    r.pass = sense == Sense::at_most ? r.measured <= threshold : r.measured >= threshold;
  } catch (const std::exception& e) {
    r.note = e.what();
  }
  r.seconds = seconds_since(start);
  return r;
}

struct SweepCase {
  int m;
  int n;
  double ratio;
};

constexpr std::array<SweepCase, 15> kSweep{{{0, 1, 0.01}, {0, 1, -0.01}, {0, 1, 1.0}, {0, 1, -1.0}, {0, 1, 5.0},
                                            {0, 2, 0.01}, {0, 2, -0.01}, {0, 2, 1.0}, {0, 2, -1.0}, {0, 2, 5.0},
                                            {1, 1, 0.01}, {1, 1, -0.01}, {1, 1, 1.0}, {1, 1, -1.0}, {1, 1, 5.0}}};

std::array<double, 5> sweep_xis(double ratio) {
  if (ratio > 0.0) return {1.0, 1.5, 2.0, 3.0, 4.0};
  return {1.0, 0.8, 0.5, 0.3, 0.1};
}

// Worst |sum |b|^2 - 1| and worst elementwise series/projection gap.
std::pair<double, double> b_sweep(int n_max, BoundaryPhase phase) {
  double unitarity = 0.0;
  double two_path = 0.0;
  for (const SweepCase& c : kSweep) {
    const auto basis = shared_basis(c.m, n_max);
    const auto geom = TrapGeometry::with_alpha(c.ratio * 0.5 * basis->zero(c.n));
    const auto state = eigenstate_start(*basis, c.n, geom);
    for (double xi : sweep_xis(c.ratio)) {
      const double t = geom.time_at_xi(xi);
      const auto series = b_coeffs(state, *basis, t, geom);
      const auto projection = b_coeffs_projection(state, *basis, t, geom, phase);
      double norm = 0.0;
      for (std::size_t i = 0; i < series.size(); ++i) {
        norm += std::norm(series[i]);
        two_path = std::max(two_path, std::abs(series[i] - projection[i]));
      }
      unitarity = std::max(unitarity, std::abs(norm - 1.0));
    }
  }
  return {unitarity, two_path};
}

}  // namespace

std::vector<CheckResult> run_all(const VerifyOptions& options) {
  std::vector<CheckResult> results;
  const int n_max = options.n_max;

  results.push_back(run_check("bessel_zeros", 1e-9, Sense::at_most, [] {
    const std::array<std::array<double, 3>, 3> refs{{{0, 1, 2.404825558}, {1, 1, 3.831705970}, {0, 2, 5.520078110}}};
    double worst = 0.0;
    for (const auto& r : refs) {
      const int m = static_cast<int>(r[0]);
      const int n = static_cast<int>(r[1]);
      worst = std::max(worst, std::abs(special::bessel_zeros(m, n).zero(n) - r[2]));
    }
    return worst;
  }));

  results.push_back(run_check("bessel_orthogonality", 1e-10, Sense::at_most, [] {
    double worst = 0.0;
    for (int m = 0; m <= 5; ++m) {
      const auto basis = shared_basis(m, 10);
      const auto I = overlap_matrix(*basis, 0.0);
      for (int p = 1; p <= 10; ++p) {
        for (int q = 1; q <= 10; ++q) {
          const double j = basis->norm_bessel(p);
          const double expected = p == q ? 0.5 * j * j : 0.0;
          worst = std::max(worst, std::abs(I(p, q) - expected));
        }
      }
    }
    return worst;
  }));

  results.push_back(run_check("moving_basis_orthonormality", 1e-9, Sense::at_most, [] {
    const auto basis = shared_basis(0, 6);
    const auto geom = TrapGeometry::with_alpha(0.5 * basis->zero(1));
    const double t = geom.time_at_xi(2.0);
    double worst = 0.0;
    for (int p = 1; p <= 6; ++p) {
      for (int q = 1; q <= 6; ++q) {
        worst = std::max(worst, std::abs(exact_inner_product(*basis, p, q, t, geom) - (p == q ? 1.0 : 0.0)));
      }
    }
    return worst;
  }));

  const BoundaryPhase phase = options.negative_control ? BoundaryPhase::drop : BoundaryPhase::keep;
  std::pair<double, double> sweep{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  std::string sweep_error;
  const auto sweep_start = std::chrono::steady_clock::now();
  try {
    sweep = b_sweep(n_max, phase);
  } catch (const std::exception& e) {
    sweep_error = e.what();
  }
  const double sweep_seconds = seconds_since(sweep_start);
  results.push_back(run_check("unitarity", 1e-6, Sense::at_most, [&] {
    if (!sweep_error.empty()) throw NumericError(sweep_error);
    return sweep.first;
  }));
  results.push_back(run_check("b_two_path", 1e-8, Sense::at_most, [&] {
    if (!sweep_error.empty()) throw NumericError(sweep_error);
    return sweep.second;
  }));
  results[results.size() - 2].seconds += sweep_seconds;
  results.back().seconds += sweep_seconds;

  results.push_back(run_check("truncation_alpha10_n02", 1e-6, Sense::at_most, [&] {
    const auto basis = shared_basis(0, n_max);
    const auto geom = TrapGeometry::with_alpha(10.0 * 0.5 * basis->zero(2));
    return std::abs(eigenstate_start(*basis, 2, geom).norm_deficit);
  }));

  results.push_back(run_check("disk_norm", 1e-6, Sense::at_most, [&] {
    double worst = 0.0;
    for (double ratio : {1.0, -1.0}) {
      const auto basis = shared_basis(0, n_max);
      const auto geom = TrapGeometry::with_alpha(ratio * 0.5 * basis->zero(1));
      const auto state = eigenstate_start(*basis, 1, geom);
      for (double xi : sweep_xis(ratio)) {
        worst = std::max(worst, std::abs(disk_norm(state, *basis, geom.time_at_xi(xi), geom) - 1.0));
      }
    }
    return worst;
  }));

  results.push_back(run_check("pde_residual_h1e-4", 1e-5, Sense::at_most, [] {
    const auto basis = shared_basis(0, 2);
    PdeGrid grid;
    grid.h = 1e-4;
    return pde_residual(*basis, 1, TrapGeometry::with_alpha(0.5 * basis->zero(1)), grid);
  }));

  results.push_back(run_check("pde_residual_order_deviation", 0.2, Sense::at_most, [] {
    const auto basis = shared_basis(0, 2);
    const auto geom = TrapGeometry::with_alpha(0.5 * basis->zero(1));
    PdeGrid coarse;
    coarse.h = 1e-2;
    PdeGrid fine = coarse;
    fine.h = 5e-3;
    const double ratio = pde_residual(*basis, 1, geom, coarse) / pde_residual(*basis, 1, geom, fine);
    return std::abs(ratio / 4.0 - 1.0);
  }));

  results.push_back(run_check("heisenberg_min_product_over_half_hbar", 1.0 - 1e-12, Sense::at_least, [] {
    double lowest = std::numeric_limits<double>::infinity();
    for (int m = 0; m <= 5; ++m) {
      const auto basis = shared_basis(m, 20);
      const auto table = moment_tables(m, 20);
      for (double ratio : {-1.0, 0.0, 1.0, 5.0}) {
        const auto geom = TrapGeometry::with_alpha(ratio);
        for (int n = 1; n <= 20; ++n) {
          for (double xi : {0.1, 0.5, 1.0, 2.0, 5.0}) {
            if ((xi > 1.0 && !(ratio > 0.0)) || (xi < 1.0 && !(ratio < 0.0))) continue;
            const auto u = uncertainties(*basis, *table, n, geom.time_at_xi(xi), geom);
            lowest = std::min(lowest, u.product / (0.5 * geom.hbar()));
          }
        }
      }
    }
    return lowest;
  }));

  results.push_back(run_check("stationary_product_factor_min", 1.0, Sense::at_least, [] {
    double lowest = std::numeric_limits<double>::infinity();
    for (int m = 0; m <= 5; ++m) {
      const auto basis = shared_basis(m, 20);
      const auto table = moment_tables(m, 20);
      for (int n = 1; n <= 20; ++n) lowest = std::min(lowest, stationary_product_factor(*table, *basis, n));
    }
    return lowest;
  }));

  results.push_back(run_check("energy_ratio_two_route", 1e-6, Sense::at_most, [] {
    const auto sum_basis = shared_basis(0, 200);
    const auto table = moment_tables(0, 1);
    double worst = 0.0;
    for (double ratio : {0.1, -0.1, 1.0, -1.0}) {
      const auto geom = TrapGeometry::with_alpha(ratio * 0.5 * sum_basis->zero(1));
      for (double xi : ratio > 0 ? std::array<double, 3>{1.5, 2.0, 3.0} : std::array<double, 3>{0.8, 0.5, 0.2}) {
        const auto r = energy_ratio(*sum_basis, *table, 1, geom.time_at_xi(xi), geom);
        worst = std::max(worst, std::abs(r.isum - r.closed));
      }
    }
    return worst;
  }));

  results.push_back(run_check("oracle_c_m0_identity", 1e-9, Sense::at_most, [] {
    const auto table = moment_tables(0, 15);
    double worst = 0.0;
    for (int n = 1; n <= 15; ++n) {
      const double closed = oracle::c1_closed(0, n).value;
      worst = std::max(worst, std::abs(closed - oracle::c1_quadrature(0, n)));
      worst = std::max(worst, std::abs(closed - (table->b0(n, n) + table->c1(n, n))));
    }
    return worst;
  }));

  results.push_back(run_check("oracle_hypergeometric_rel", 1e-6, Sense::at_most, [] {
    double worst = 0.0;
    auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
    for (int m = 0; m <= 3; ++m) {
      for (int n = 1; n <= 5; ++n) {
        if (const auto r = oracle::a3_closed(m, n); r.path == oracle::ClosedFormPath::hypergeometric) {
          worst = std::max(worst, rel(r.value, oracle::a3_quadrature(m, n)));
        }
        if (m == 0) continue;
        if (const auto r = oracle::a_neg1_closed(m, n); r.path == oracle::ClosedFormPath::hypergeometric) {
          worst = std::max(worst, rel(r.value, oracle::a_neg1_quadrature(m, n)));
        }
        if (const auto r = oracle::c1_closed(m, n); r.path == oracle::ClosedFormPath::hypergeometric) {
          worst = std::max(worst, rel(r.value, oracle::c1_quadrature(m, n)));
        }
      }
    }
    return worst;
  }));

  results.push_back(run_check("propagator_consistency", 1e-6, Sense::at_most, [] {
    const int kernel_modes = 30;
    const auto basis = shared_basis(0, kernel_modes);
    const auto geom = TrapGeometry::with_alpha(0.5 * basis->zero(1));
    const double t = geom.time_at_xi(2.0);
    const std::array<int, 2> m_list{0, 1};
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      // Deterministic interior points spread over the disk of radius 2.
      const double rho = 0.05 + 1.9 * std::fmod(0.618033988749895 * (k + 1), 1.0);
      const double phi = 2.0 * std::numbers::pi * std::fmod(0.754877666246693 * (k + 1), 1.0);
      const PropagatorKernel kernel(m_list, kernel_modes, rho, phi, t, 0.0, geom);
      const cplx propagated =
          propagate(kernel, [&](double r, double p) { return psi_exact(*basis, 1, r, p, 0.0, geom); });
      worst = std::max(worst, std::abs(propagated - psi_exact(*basis, 1, rho, phi, t, geom)));
    }
    return worst;
  }));

  results.push_back(run_check("uncertainty_dq_scaling", 1e-10, Sense::at_most, [] {
    double worst = 0.0;
    for (int m = 0; m <= 2; ++m) {
      const auto basis = shared_basis(m, 5);
      const auto table = moment_tables(m, 5);
      for (double ratio : {-1.0, 1.0}) {
        const auto geom = TrapGeometry::with_alpha(ratio * 0.5 * basis->zero(1));
        for (int n = 1; n <= 5; ++n) {
          const double dq0 = uncertainties(*basis, *table, n, 0.0, geom).dq;
          for (double xi : sweep_xis(ratio)) {
            const double dq = uncertainties(*basis, *table, n, geom.time_at_xi(xi), geom).dq;
            worst = std::max(worst, std::abs(dq / dq0 - xi));
          }
        }
      }
    }
    return worst;
  }));

  // Largest step against the expected direction; <= 0 when monotone.
  results.push_back(run_check("energy_ratio_monotone", 0.0, Sense::at_most, [] {
    const auto sum_basis = shared_basis(0, 200);
    const auto table = moment_tables(0, 1);
    double worst = -std::numeric_limits<double>::infinity();
    for (double ratio : {0.1, -0.1, 1.0, -1.0}) {
      const auto geom = TrapGeometry::with_alpha(ratio * 0.5 * sum_basis->zero(1));
      const double xi_end = ratio > 0.0 ? 5.0 : 0.1;
      double previous = 1.0;
      for (int i = 1; i <= 40; ++i) {
        const double xi = 1.0 + (xi_end - 1.0) * i / 40.0;
        const double r = energy_ratio(*sum_basis, *table, 1, geom.time_at_xi(xi), geom).closed;
        // Expansion must decrease the ratio, contraction must increase it.
        worst = std::max(worst, ratio > 0.0 ? r - previous : previous - r);
        previous = r;
      }
    }
    return worst;
  }));

  results.push_back(run_check("energy_ratio_adiabatic_limit", 1e-4, Sense::at_most, [] {
    const auto sum_basis = shared_basis(0, 200);
    const auto table = moment_tables(0, 1);
    double worst = 0.0;
    for (double ratio : {1e-3, -1e-3}) {
      const auto geom = TrapGeometry::with_alpha(ratio * 0.5 * sum_basis->zero(1));
      for (double xi : ratio > 0 ? std::array<double, 3>{1.5, 2.0, 5.0} : std::array<double, 3>{0.8, 0.5, 0.1}) {
        const auto r = energy_ratio(*sum_basis, *table, 1, geom.time_at_xi(xi), geom);
        worst = std::max({worst, std::abs(r.isum - 1.0 / (xi * xi)), std::abs(r.closed - 1.0 / (xi * xi))});
      }
    }
    return worst;
  }));

  // Density deviations are measured relative to the peak of the reference
  // density, which grows like 1/xi under contraction.
  auto density_deviation = [n_max](int m, int n, double ratio, double xi, bool frozen) {
    DensityOptions opts;
    opts.n_max = n_max;
    const Mode mode = make_mode(m, n);
    double worst = 0.0;
    double peak = 0.0;
    for (const auto& s : density_profile(m, n, ratio, xi, opts)) {
      if (frozen && s.eta > 1.0 / mode.lambda) continue;
      const double ref = frozen ? frozen_initial_density(mode, s.eta) : instantaneous_density(mode, s.eta, xi);
      worst = std::max(worst, std::abs(s.rho_density - ref));
      peak = std::max(peak, ref);
    }
    return worst / peak;
  };

  results.push_back(run_check("density_contraction_adiabatic", 1e-2, Sense::at_most,
                              [&] { return density_deviation(0, 1, -0.01, 0.1, false); }));
  results.push_back(run_check("density_contraction_sudden_deviation", 0.1, Sense::at_least,
                              [&] { return density_deviation(0, 1, -20.0, 0.1, false); }));
  results.push_back(run_check("density_expansion_sudden_frozen", 5e-2, Sense::at_most,
                              [&] { return density_deviation(0, 2, 10.0, 2.0, true); }));

  // Diffraction in time for (0,6) observed at eta = x/pi.
  const Mode dit_mode = make_mode(0, 6);
  const double dit_eta = dit_mode.x / std::numbers::pi;
  std::vector<DensityTrace> traces;
  std::string dit_error;
  const auto dit_start = std::chrono::steady_clock::now();
  try {
    const FlightTimes flight = flight_times(dit_mode, dit_eta);
    for (double ratio : {0.9, 1.0, 2.0}) {
      traces.push_back(density_timeseries(0, 6, ratio, dit_eta, 2.0 * flight.T2, 800, n_max));
    }
  } catch (const std::exception& e) {
    dit_error = e.what();
  }
  const double dit_seconds = seconds_since(dit_start);
  auto need_traces = [&] {
    if (!dit_error.empty()) throw NumericError(dit_error);
  };

  // Smallest gap in the ordering V(0.9) > V(1.0) > V(2.0); positive when ordered.
  results.push_back(run_check("dit_visibility_order", 0.0, Sense::at_least, [&] {
    need_traces();
    // Strict ordering is required; a zero gap fails below.
    const double gap = std::min(traces[0].visibility - traces[1].visibility,
                                traces[1].visibility - traces[2].visibility);
    if (gap <= 0.0) return gap - std::numeric_limits<double>::min();
    return gap;
  }));
  results.back().seconds += dit_seconds;

  results.push_back(run_check("dit_density_before_wall_arrival", 1e-12, Sense::at_most, [&] {
    need_traces();
    double worst = 0.0;
    for (const auto& trace : traces) {
      for (const auto& s : trace.samples) {
        if (s.T < trace.wall_arrival_T) worst = std::max(worst, std::abs(s.rho_density));
      }
    }
    return worst;
  }));

  results.push_back(run_check("dit_flight_times", 1e-12, Sense::at_most, [&] {
    need_traces();
    const double x = dit_mode.x;
    const auto& f = traces.front().flight;
    return std::max(std::abs(f.T1 - x / (4.0 * std::numbers::pi)), std::abs(f.T2 - 3.0 * x / (4.0 * std::numbers::pi)));
  }));

  return results;
}

}  // namespace qtrap::verify
