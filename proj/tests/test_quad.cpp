#include <doctest.h>

#include <cmath>
#include <complex>

#include <random>

#include "oracle_quad.hpp"
#include "qtrap/errors.hpp"
#include "qtrap/quad.hpp"

using namespace qtrap;
using cplx = std::complex<double>;

TEST_CASE("chirped integrand matches its antiderivative") {
  // int_0^1 s exp(-i b s^2) ds = (1 - exp(-i b)) / (2 i b)
  for (double beta : {0.5, 10.0, 200.0, -75.0}) {
    quad::QuadOptions opts;
    opts.initial_panels = quad::oscillation_panels(beta);
    const auto r = quad::integrate([&](double s) { return s * std::exp(cplx(0.0, -beta * s * s)); }, opts);
    const cplx expected = (1.0 - std::exp(cplx(0.0, -beta))) / cplx(0.0, 2.0 * beta);
    CHECK(std::abs(r.value - expected) < 1e-12);
    CHECK(r.err_estimate < 1e-10);
  }
}

TEST_CASE("integrable endpoint singularity is handled without evaluating s = 0") {
  const auto r = quad::integrate([](double s) { return cplx(1.0 / std::sqrt(s)); });
  CHECK(r.value.real() == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("vector integration shares panels and meets every component tolerance") {
  const auto r = quad::integrate_vector(3, [](double s, std::span<cplx> out) {
    out[0] = s;
    out[1] = std::cos(40.0 * s);
    out[2] = cplx(0.0, s * s);
  });
  REQUIRE(r.values.size() == 3);
  CHECK(r.values[0].real() == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(r.values[1].real() == doctest::Approx(std::sin(40.0) / 40.0).epsilon(1e-11));
  CHECK(r.values[2].imag() == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("panel budget exhaustion carries the best estimate") {
  quad::QuadOptions opts;
  opts.initial_panels = 1;
  opts.max_panels = 2;
  try {
    quad::integrate([](double s) { return cplx(std::sin(1.0e4 * s)); }, opts);
    FAIL("expected BudgetExceeded");
  } catch (const BudgetExceeded& e) {
    CHECK(e.best_values().size() == 1);
    CHECK(e.err_estimate() > 0.0);
  }
}

TEST_CASE("oscillation panel heuristic") {
  CHECK(quad::oscillation_panels(0.0) == 8);
  CHECK(quad::oscillation_panels(100.0) == 32);
  CHECK(quad::oscillation_panels(-100.0) == 32);
  CHECK(quad::oscillation_panels(1.0, 400.0) == 128);
}

TEST_CASE("reference integrals") {
  CHECK(std::abs(quad::integrate([](double s) { return cplx(s); }).value - 0.5) < 1e-15);
  const cplx chirp = quad::integrate([](double s) { return s * std::exp(cplx(0.0, -3.0 * s * s)); }).value;
  CHECK(std::abs(chirp - (1.0 - std::exp(cplx(0.0, -3.0))) / cplx(0.0, 6.0)) < 1e-14);
  const double x1 = testref::zero(0, 1);
  const double x2 = testref::zero(0, 2);
  const cplx ortho = quad::integrate([&](double s) { return cplx(s * testref::jm(0, x1 * s) * testref::jm(0, x2 * s)); }).value;
  CHECK(std::abs(ortho) < 1e-12);
}

TEST_CASE("polynomials integrate to machine precision") {
  quad::QuadOptions one_panel;
  one_panel.initial_panels = 1;
  for (int k = 0; k <= 20; ++k) {
    const auto r = quad::integrate([&](double s) { return cplx(std::pow(s, k)); }, one_panel);
    CHECK(r.value.real() == doctest::Approx(1.0 / (k + 1)).epsilon(1e-14));
  }
}

TEST_CASE("strongly chirped phases up to 1e4") {
  for (double beta : {1e3, 5e3, 1e4}) {
    quad::QuadOptions opts;
    opts.initial_panels = quad::oscillation_panels(beta);
    const auto r = quad::integrate([&](double s) { return s * std::exp(cplx(0.0, -beta * s * s)); }, opts);
    CHECK(std::abs(r.value - (1.0 - std::exp(cplx(0.0, -beta))) / cplx(0.0, 2.0 * beta)) < 1e-10);
  }
}

TEST_CASE("property: integration is linear") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double w = 10.0 * std::abs(u(rng));
    const double p = u(rng);
    const cplx a(u(rng), u(rng));
    const cplx b(u(rng), u(rng));
    auto f = [&](double s) { return std::exp(cplx(0.0, w * s * s)); };
    auto g = [&](double s) { return cplx(std::cos(p * s), s * s); };
    const cplx lhs = quad::integrate([&](double s) { return a * f(s) + b * g(s); }).value;
    const cplx rhs = a * quad::integrate(f).value + b * quad::integrate(g).value;
    CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(lhs)));
  }
}
