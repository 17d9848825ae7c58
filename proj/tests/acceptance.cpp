// Acceptance suite: one PASS/FAIL line per criterion. Thresholds live in
// qtrap::verify; this binary groups the checks, adds an independent
// zero-finder cross-check and enforces the runtime limits.

#include <boost/math/special_functions/bessel.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "qtrap/special.hpp"
#include "qtrap/verify.hpp"

namespace {

struct Criterion {
  int id;
  std::string title;
  std::vector<std::string> checks;
  double runtime_limit = 0.0;  // seconds; 0 means no limit
};

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  const auto results = qtrap::verify::run_all();
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::map<std::string, qtrap::verify::CheckResult> by_name;
  for (const auto& r : results) by_name[r.name] = r;

  // Independent root finder for the three reference zeros.
  {
    qtrap::verify::CheckResult r{"zeros_vs_boost", false, 0.0, 1e-9, {}};
    const auto begin = std::chrono::steady_clock::now();
    for (auto [m, n] : {std::pair{0, 1}, {1, 1}, {0, 2}}) {
      const double ours = qtrap::special::bessel_zeros(m, n).zero(n);
      r.measured = std::max(r.measured, std::abs(ours - boost::math::cyl_bessel_j_zero(double(m), n)));
    }
    r.pass = r.measured <= r.threshold;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
    by_name[r.name] = r;
  }

  const std::vector<Criterion> criteria{
      {1, "Bessel zeros and orthogonality", {"bessel_zeros", "zeros_vs_boost", "bessel_orthogonality"}, 10.0},
      {2,
       "unitarity of eigenstate starts",
       {"unitarity", "truncation_alpha10_n02", "disk_norm", "moving_basis_orthonormality"},
       60.0},
      {3, "series and projection agree", {"b_two_path"}},
      {4, "PDE residual is second order", {"pde_residual_order_deviation", "pde_residual_h1e-4"}},
      {5,
       "uncertainty relations",
       {"uncertainty_dq_scaling", "heisenberg_min_product_over_half_hbar", "stationary_product_factor_min"}},
      {6, "energy ratio", {"energy_ratio_monotone", "energy_ratio_adiabatic_limit", "energy_ratio_two_route"}},
      {7, "closed-form moment oracle", {"oracle_c_m0_identity", "oracle_hypergeometric_rel"}},
      {8, "propagator consistency", {"propagator_consistency"}},
      {9,
       "contraction and expansion regimes",
       {"density_contraction_adiabatic", "density_contraction_sudden_deviation", "density_expansion_sudden_frozen"}},
      {10, "diffraction in time", {"dit_visibility_order", "dit_density_before_wall_arrival", "dit_flight_times"}},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    bool pass = true;
    double seconds = 0.0;
    std::string detail;
    for (const auto& name : c.checks) {
      const auto it = by_name.find(name);
      if (it == by_name.end()) {
        pass = false;
        detail += " " + name + "=missing";
        continue;
      }
      const auto& r = it->second;
      pass = pass && r.pass;
      seconds += r.seconds;
      char buf[256];
      std::snprintf(buf, sizeof buf, " %s=%.3g(%s %.3g)%s", name.c_str(), r.measured, r.pass ? "ok" : "FAIL",
                    r.threshold, r.note.empty() ? "" : (" error: " + r.note).c_str());
      detail += buf;
    }
    double limit = c.runtime_limit;
    if (c.id == 10) {
      seconds = total;
      limit = 300.0;
    }
    if (limit > 0.0 && seconds > limit) {
      pass = false;
      detail += " runtime exceeded";
    }
    std::printf("[%s] criterion %d: %s (%.1f s);%s\n", pass ? "PASS" : "FAIL", c.id, c.title.c_str(), seconds,
                detail.c_str());
    failed += pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed; verify suite %.1f s\n", static_cast<int>(criteria.size()) - failed,
              criteria.size(), total);
  return failed == 0 ? 0 : 1;
}
