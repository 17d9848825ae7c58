#include "qtrap/quad.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "qtrap/errors.hpp"

namespace qtrap::quad {

namespace {

// Kronrod 15-point abscissae (positive half) and weights; the Gauss 7-point
// rule uses the odd-indexed abscissae.
constexpr std::array<double, 8> kXk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr std::size_t kNodes = 15;

struct Panel {
  double lo;
  double hi;
  std::vector<cplx> kronrod;
  std::vector<double> error;  // per component
  double badness = 0.0;
};

class PanelEvaluator {
 public:
  PanelEvaluator(std::size_t dim, const std::function<void(double, std::span<cplx>)>& f)
      : dim_(dim), f_(f), scratch_(dim * kNodes) {}

  Panel evaluate(double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    // Node order: center, then +/- pairs for kXk[0..6].
    f_(center, row(0));
    for (std::size_t j = 0; j < 7; ++j) {
      f_(center - half * kXk[j], row(1 + 2 * j));
      f_(center + half * kXk[j], row(2 + 2 * j));
    }
    Panel p{lo, hi, std::vector<cplx>(dim_), std::vector<double>(dim_), 0.0};
    for (std::size_t c = 0; c < dim_; ++c) {
      const cplx mid = scratch_[c];
      cplx k = kWk[7] * mid;
      cplx g = kWg[3] * mid;
      for (std::size_t j = 0; j < 7; ++j) {
        const cplx pair = scratch_[(1 + 2 * j) * dim_ + c] + scratch_[(2 + 2 * j) * dim_ + c];
        k += kWk[j] * pair;
        if (j % 2 == 1) g += kWg[j / 2] * pair;
      }
      p.kronrod[c] = half * k;
      p.error[c] = std::abs(half * (k - g));
    }
    return p;
  }

 private:
  std::span<cplx> row(std::size_t i) { return {scratch_.data() + i * dim_, dim_}; }

  std::size_t dim_;
  const std::function<void(double, std::span<cplx>)>& f_;
  std::vector<cplx> scratch_;
};

}  // namespace

QuadVectorResult integrate_vector(std::size_t dim,
                                  const std::function<void(double, std::span<cplx>)>& f,
                                  const QuadOptions& options) {
  PanelEvaluator eval(dim, f);
  const int initial = std::max(1, options.initial_panels);
  std::vector<Panel> panels;
  panels.reserve(static_cast<std::size_t>(initial) * 2);
  for (int i = 0; i < initial; ++i) {
    panels.push_back(eval.evaluate(static_cast<double>(i) / initial,
                                   static_cast<double>(i + 1) / initial));
  }

  std::vector<cplx> total(dim);
  std::vector<double> total_err(dim);
  std::vector<double> tol(dim);
  while (true) {
    std::fill(total.begin(), total.end(), cplx{});
    std::fill(total_err.begin(), total_err.end(), 0.0);
    for (const Panel& p : panels) {
      for (std::size_t c = 0; c < dim; ++c) {
        total[c] += p.kronrod[c];
        total_err[c] += p.error[c];
      }
    }
    bool done = true;
    for (std::size_t c = 0; c < dim; ++c) {
      tol[c] = std::max(options.abs_tol, options.rel_tol * std::abs(total[c]));
      if (total_err[c] > tol[c]) done = false;
    }
    const int count = static_cast<int>(panels.size());
    if (done) {
      QuadVectorResult result{total, 0.0, count};
      for (double e : total_err) result.err_estimate = std::max(result.err_estimate, e);
      return result;
    }
    if (count >= options.max_panels) {
      double worst = 0.0;
      for (double e : total_err) worst = std::max(worst, e);
      throw BudgetExceeded("quad: panel budget exhausted", total, worst);
    }

    // Split every panel whose share of some component's error is above its
    // share of that component's tolerance.
    const double share = 1.0 / count;
    std::vector<Panel> next;
    next.reserve(panels.size() * 2);
    int splits = 0;
    for (Panel& p : panels) {
      bool split = false;
      for (std::size_t c = 0; c < dim && !split; ++c) {
        split = p.error[c] > tol[c] * share && total_err[c] > tol[c];
      }
      if (split && count + splits < options.max_panels) {
        const double mid = 0.5 * (p.lo + p.hi);
        next.push_back(eval.evaluate(p.lo, mid));
        next.push_back(eval.evaluate(mid, p.hi));
        ++splits;
      } else {
        next.push_back(std::move(p));
      }
    }
    if (splits == 0) {
      double worst = 0.0;
      for (double e : total_err) worst = std::max(worst, e);
      throw BudgetExceeded("quad: no panel left to refine", total, worst);
    }
    std::sort(next.begin(), next.end(), [](const Panel& a, const Panel& b) { return a.lo < b.lo; });
    panels = std::move(next);
  }
}

QuadResult integrate(const std::function<cplx(double)>& f, const QuadOptions& options) {
  const auto result = integrate_vector(
      1, [&f](double s, std::span<cplx> out) { out[0] = f(s); }, options);
  return {result.values[0], result.err_estimate, result.panels_used};
}

int oscillation_panels(double beta, double bessel_frequency) {
  const double pi = std::numbers::pi;
  const double by_phase = std::ceil(std::abs(beta) / pi);
  const double by_bessel = std::ceil(std::abs(bessel_frequency) / pi);
  return static_cast<int>(std::max({8.0, by_phase, by_bessel}));
}

}  // namespace qtrap::quad
