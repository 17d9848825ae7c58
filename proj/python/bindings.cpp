#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qtrap/errors.hpp"
#include "qtrap/evolve.hpp"
#include "qtrap/oracle.hpp"
#include "qtrap/special.hpp"
#include "qtrap/spectral.hpp"
#include "qtrap/verify.hpp"

namespace py = pybind11;
using namespace qtrap;

namespace {

py::dict density_columns(const std::vector<RadialDensitySample>& samples) {
  std::vector<double> eta, T, rho;
  for (const auto& s : samples) {
    eta.push_back(s.eta);
    T.push_back(s.T);
    rho.push_back(s.rho_density);
  }
  py::dict d;
  d["eta"] = eta;
  d["T"] = T;
  d["rho_density"] = rho;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Quantum dynamics in a cylindrical trap with a uniformly moving wall";

  static py::exception<Error> base(m, "QtrapError");
  static py::exception<DomainError> domain(m, "DomainError", base.ptr());
  static py::exception<NumericError> numeric(m, "NumericError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DomainError& e) {
      PyErr_SetString(domain.ptr(), e.what());
    } catch (const NumericError& e) {
      PyErr_SetString(numeric.ptr(), e.what());
    } catch (const Error& e) {
      PyErr_SetString(base.ptr(), e.what());
    }
  });

  m.def("bessel_j", &special::bessel_j, py::arg("m"), py::arg("x"));
  m.def(
      "bessel_zeros", [](int order, int count) { return special::bessel_zeros(order, count).zeros(); },
      py::arg("m"), py::arg("count"));

  m.def(
      "energy_ratio",
      [](int mm, int n, double alpha_ratio, double xi, int sum_modes) {
        const auto basis = shared_basis(mm, std::max(sum_modes, n));
        const auto table = moment_tables(mm, n);
        const auto geom = TrapGeometry::with_alpha(alpha_ratio * 0.5 * basis->zero(n));
        const auto r = energy_ratio(*basis, *table, n, geom.time_at_xi(xi), geom);
        return py::make_tuple(r.isum, r.closed);
      },
      py::arg("m"), py::arg("n"), py::arg("alpha_ratio"), py::arg("xi"), py::arg("sum_modes") = 200,
      "Energy ratio <H>(t)/<H>(0) of the moving solution at wall position xi: (overlap sum, closed form).");

  m.def(
      "b_coeffs",
      [](int mm, int n, double alpha_ratio, double xi, int n_max) {
        const auto basis = shared_basis(mm, n_max);
        const auto geom = TrapGeometry::with_alpha(alpha_ratio * 0.5 * basis->zero(n));
        const auto state = eigenstate_start(*basis, n, geom);
        return b_coeffs(state, *basis, geom.time_at_xi(xi), geom);
      },
      py::arg("m"), py::arg("n"), py::arg("alpha_ratio"), py::arg("xi"), py::arg("n_max") = 100,
      "Instantaneous-basis coefficients b(t) for a particle started in u_mn(r, 0).");

  m.def(
      "density_profile",
      [](int mm, int n, double alpha_ratio, double xi, int n_max, int grid) {
        DensityOptions opts;
        opts.n_max = n_max;
        opts.grid_size = grid;
        return density_columns(density_profile(mm, n, alpha_ratio, xi, opts));
      },
      py::arg("m"), py::arg("n"), py::arg("alpha_ratio"), py::arg("xi"), py::arg("n_max") = 100,
      py::arg("grid") = 400);

  m.def(
      "density_timeseries",
      [](int mm, int n, double alpha_ratio, double eta_obs, double T_max, int steps, int n_max) {
        const auto trace = density_timeseries(mm, n, alpha_ratio, eta_obs, T_max, steps, n_max);
        py::dict d = density_columns(trace.samples);
        d["T1"] = trace.flight.T1;
        d["T2"] = trace.flight.T2;
        d["wall_arrival_T"] = trace.wall_arrival_T;
        d["visibility"] = trace.visibility;
        return d;
      },
      py::arg("m"), py::arg("n"), py::arg("alpha_ratio"), py::arg("eta_obs"), py::arg("T_max"),
      py::arg("steps") = 800, py::arg("n_max") = 100);

  m.def(
      "moments",
      [](int mm, int n) {
        const auto basis = shared_basis(mm, n);
        const auto table = moment_tables(mm, n);
        py::dict d;
        d["A3"] = table->a3(n, n);
        d["C_grad"] = table->b0(n, n) + table->c1(n, n);
        d["C1"] = table->c1(n, n);
        if (mm > 0) d["A_neg1"] = table->a_neg1(n, n);
        d["J2"] = basis->norm_bessel(n) * basis->norm_bessel(n);
        return d;
      },
      py::arg("m"), py::arg("n"), "Diagonal moment integrals of mode (m, n) by quadrature.");

  m.def(
      "verify",
      [](int n_max, bool negative_control) {
        verify::VerifyOptions opts;
        opts.n_max = n_max;
        opts.negative_control = negative_control;
        py::dict out;
        for (const auto& r : verify::run_all(opts)) {
          py::dict e;
          e["pass"] = r.pass;
          e["measured"] = r.measured;
          e["threshold"] = r.threshold;
          out[py::str(r.name)] = e;
        }
        return out;
      },
      py::arg("n_max") = 100, py::arg("negative_control") = false,
      "Runs the invariant suite; returns {check: {pass, measured, threshold}}.");
}
