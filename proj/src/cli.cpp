#include "qtrap/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "qtrap/errors.hpp"
#include "qtrap/evolve.hpp"
#include "qtrap/oracle.hpp"
#include "qtrap/spectral.hpp"
#include "qtrap/verify.hpp"

namespace qtrap::cli {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHbarSI = 1.054571817e-34;
constexpr double kLightSpeed = 299792458.0;
constexpr int kEnergySumModes = 200;

class CsvWriter {
 public:
  explicit CsvWriter(const RunConfig& config) {
    os_ << "# qtrap " << kVersion << '\n';
    os_ << "# command=" << config.command << '\n';
    os_ << "# units: hbar = mu = a = 1; eta = rho/lambda_mn, T = nu_mn t, xi = L(t)/a\n";
  }
  void meta(const std::string& key, const std::string& value) { os_ << "# " << key << '=' << value << '\n'; }
  void meta(const std::string& key, double value) { meta(key, format_number(value)); }
  void header(std::initializer_list<const char*> columns) {
    bool first = true;
    for (const char* c : columns) {
      os_ << (first ? "" : ",") << c;
      first = false;
    }
    os_ << '\n';
  }
  CsvWriter& field(double v) { return raw(format_number(v)); }
  CsvWriter& field(int v) { return raw(std::to_string(v)); }
  CsvWriter& raw(const std::string& s) {
    os_ << (row_started_ ? "," : "") << s;
    row_started_ = true;
    return *this;
  }
  void end_row() {
    os_ << '\n';
    row_started_ = false;
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
  bool row_started_ = false;
};

std::string join(const std::vector<double>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) s += (i ? ";" : "") + format_number(values[i]);
  return s;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw DomainError(message);
}

void validate(const RunConfig& c) {
  require(c.m >= 0 && c.m <= special::kMaxBesselOrder, "--m must lie in [0, 50]");
  require(c.n >= 1, "--n must be >= 1");
  require(c.n_max >= 1, "--nmax must be >= 1");
  require(c.grid >= 0, "--grid must be non-negative");
  if (c.command == "zeros") return;
  if (c.command == "moments") {
    require(c.n <= 200, "--n must be <= 200 for moments");
    return;
  }
  if (c.command == "verify") return;
  require(c.n <= c.n_max, "--n must not exceed --nmax");
  require(!c.alpha_ratio.empty(), "--alpha-ratio is required");
  for (double r : c.alpha_ratio) require(std::isfinite(r), "--alpha-ratio must be finite");
  if (c.command == "energy") {
    require(c.alpha_ratio.size() == 1, "energy takes a single --alpha-ratio");
    require(c.xi.size() <= 1, "energy takes a single final --xi");
    const double r = c.alpha_ratio.front();
    const double xi = c.xi.empty() ? (r < 0.0 ? 0.1 : 3.0) : c.xi.front();
    require(xi >= TrapGeometry::kMinXi, "--xi must be >= 0.02");
    require(xi == 1.0 || (r != 0.0 && (xi > 1.0) == (r > 0.0)),
            "--xi is not reached with this --alpha-ratio (contraction needs a negative ratio)");
  } else if (c.command == "density-r") {
    require(c.alpha_ratio.size() == 1, "density-r takes a single --alpha-ratio");
    const double r = c.alpha_ratio.front();
    for (double xi : c.xi) {
      require(xi >= TrapGeometry::kMinXi, "--xi must be >= 0.02");
      require(xi == 1.0 || (r != 0.0 && (xi > 1.0) == (r > 0.0)),
              "--xi " + format_number(xi) + " is not reached with this --alpha-ratio");
    }
  } else if (c.command == "density-t") {
    for (double r : c.alpha_ratio) require(r > 0.0, "density-t needs positive --alpha-ratio values");
    require(c.t_max >= 0.0, "--t-max must be non-negative");
    require(c.eta_obs >= 0.0, "--eta-obs must be non-negative");
    if (c.eta_obs > 0.0) {
      const double x = special::bessel_zeros(c.m, c.n).zero(c.n);
      require(c.eta_obs > x / (2.0 * kPi), "--eta-obs must lie outside the initial disk (eta > x_mn / 2 pi)");
    }
  } else {
    throw DomainError("unknown command '" + c.command + "'");
  }
}

void warn_relativistic(const RunConfig& c, std::ostream& err) {
  if (!(c.phys_radius > 0.0) || !(c.phys_mass > 0.0) || c.alpha_ratio.empty()) return;
  const double x = special::bessel_zeros(c.m, c.n).zero(c.n);
  for (double r : c.alpha_ratio) {
    const double u = 2.0 * kHbarSI * std::abs(r * 0.5 * x) / (c.phys_mass * c.phys_radius);
    if (u > 0.01 * kLightSpeed) {
      err << "warning: wall speed " << format_number(u) << " m/s exceeds 0.01 c for alpha-ratio "
          << format_number(r) << "; the non-relativistic model is not reliable\n";
    }
  }
}

std::string cmd_zeros(const RunConfig& c) {
  const auto table = special::bessel_zeros(c.m, c.n);
  CsvWriter csv(c);
  csv.meta("m", c.m);
  csv.meta("count", c.n);
  csv.header({"m", "n", "x_mn"});
  for (int n = 1; n <= table.size(); ++n) {
    csv.field(c.m).field(n).field(table.zero(n)).end_row();
  }
  return csv.str();
}

std::string cmd_energy(const RunConfig& c) {
  const double ratio = c.alpha_ratio.front();
  const double xi_end = c.xi.empty() ? (ratio < 0.0 ? 0.1 : 3.0) : c.xi.front();
  const int rows = c.grid > 0 ? c.grid : 41;
  const auto sum_basis = shared_basis(c.m, std::max(kEnergySumModes, c.n_max));
  const auto table = moment_tables(c.m, c.n);
  const auto geom = TrapGeometry::with_alpha(ratio * 0.5 * sum_basis->zero(c.n));
  CsvWriter csv(c);
  csv.meta("m", c.m);
  csv.meta("n", c.n);
  csv.meta("alpha_ratio", ratio);
  csv.meta("alpha", geom.alpha());
  csv.meta("sum_modes", sum_basis->size());
  csv.header({"xi", "ratio_Isum", "ratio_closed"});
  const int steps = xi_end == 1.0 ? 0 : std::max(1, rows - 1);
  for (int i = 0; i <= steps; ++i) {
    const double xi = steps == 0 ? 1.0 : 1.0 + (xi_end - 1.0) * i / steps;
    const auto r = energy_ratio(*sum_basis, *table, c.n, geom.time_at_xi(xi), geom);
    csv.field(xi).field(r.isum).field(r.closed).end_row();
  }
  return csv.str();
}

std::string cmd_moments(const RunConfig& c) {
  const auto basis = shared_basis(c.m, c.n);
  const auto table = moment_tables(c.m, c.n);
  CsvWriter csv(c);
  csv.meta("m", c.m);
  csv.meta("n_max", c.n);
  csv.meta("c_grad", "-int s (dJ/ds)^2 = B0 + C1");
  csv.header({"m", "n", "Aneg1_over_J2", "A3_over_J2", "abs_C1_over_J2", "C_grad", "delta_Aneg1", "delta_A3",
              "delta_C_grad", "path_Aneg1", "path_A3", "path_C_grad"});
  for (int n = 1; n <= c.n; ++n) {
    const double j2 = basis->norm_bessel(n) * basis->norm_bessel(n);
    const double c_grad = table->b0(n, n) + table->c1(n, n);
    const auto a3 = oracle::a3_closed(c.m, n);
    const auto cc = oracle::c1_closed(c.m, n);
    csv.field(c.m).field(n);
    if (c.m > 0) {
      csv.field(table->a_neg1(n, n) / j2);
    } else {
      csv.raw("");
    }
    csv.field(table->a3(n, n) / j2).field(std::abs(table->c1(n, n)) / j2).field(c_grad);
    if (c.m > 0) {
      const auto an = oracle::a_neg1_closed(c.m, n);
      csv.field(an.value - table->a_neg1(n, n));
      csv.field(a3.value - table->a3(n, n)).field(cc.value - c_grad);
      csv.raw(oracle::to_string(an.path));
    } else {
      csv.raw("").field(a3.value - table->a3(n, n)).field(cc.value - c_grad).raw("");
    }
    csv.raw(oracle::to_string(a3.path)).raw(oracle::to_string(cc.path));
    csv.end_row();
  }
  return csv.str();
}

std::string cmd_density_r(const RunConfig& c) {
  const double ratio = c.alpha_ratio.front();
  const std::vector<double> xis = c.xi.empty() ? std::vector<double>{1.0} : c.xi;
  DensityOptions opts;
  opts.n_max = c.n_max;
  opts.grid_size = c.grid > 0 ? c.grid : 400;
  const Mode mode = make_mode(c.m, c.n);
  CsvWriter csv(c);
  csv.meta("m", c.m);
  csv.meta("n", c.n);
  csv.meta("alpha_ratio", ratio);
  csv.meta("xi_targets", join(xis));
  csv.meta("n_max", c.n_max);
  csv.meta("lambda_mn", mode.lambda);
  csv.header({"xi", "eta", "T", "rho_density", "instantaneous", "frozen_initial"});
  for (double xi : xis) {
    for (const auto& s : density_profile(c.m, c.n, ratio, xi, opts)) {
      csv.field(xi).field(s.eta).field(s.T).field(s.rho_density);
      csv.field(instantaneous_density(mode, s.eta, xi)).field(frozen_initial_density(mode, s.eta)).end_row();
    }
  }
  return csv.str();
}

std::string cmd_density_t(const RunConfig& c) {
  const Mode mode = make_mode(c.m, c.n);
  const double eta_obs = c.eta_obs > 0.0 ? c.eta_obs : mode.x / kPi;
  const FlightTimes flight = flight_times(mode, eta_obs);
  const double t_max = c.t_max > 0.0 ? c.t_max : 2.0 * flight.T2;
  const int steps = c.grid > 0 ? c.grid : 800;
  std::vector<DensityTrace> traces;
  for (double r : c.alpha_ratio) traces.push_back(density_timeseries(c.m, c.n, r, eta_obs, t_max, steps, c.n_max));
  CsvWriter csv(c);
  csv.meta("m", c.m);
  csv.meta("n", c.n);
  csv.meta("eta_obs", eta_obs);
  csv.meta("T_max", t_max);
  csv.meta("n_max", c.n_max);
  csv.meta("T1", flight.T1);
  csv.meta("T2", flight.T2);
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const std::string key = "alpha_ratio=" + format_number(c.alpha_ratio[i]);
    csv.meta("visibility[" + key + "]", traces[i].visibility);
    csv.meta("extrema_in_window[" + key + "]", format_number(traces[i].extrema_in_window));
    csv.meta("wall_arrival_T[" + key + "]", traces[i].wall_arrival_T);
  }
  csv.header({"alpha_ratio", "T", "rho_density", "T1", "T2"});
  for (std::size_t i = 0; i < traces.size(); ++i) {
    for (const auto& s : traces[i].samples) {
      csv.field(c.alpha_ratio[i]).field(s.T).field(s.rho_density).field(flight.T1).field(flight.T2).end_row();
    }
  }
  return csv.str();
}

CommandOutput cmd_verify(const RunConfig& c) {
  verify::VerifyOptions opts;
  opts.n_max = c.n_max;
  opts.negative_control = c.negative_control;
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  bool failed = false;
  for (const auto& r : verify::run_all(opts)) {
    nlohmann::ordered_json entry;
    entry["pass"] = r.pass;
    entry["measured"] = std::isfinite(r.measured) ? nlohmann::ordered_json(r.measured) : nlohmann::ordered_json();
    entry["threshold"] = r.threshold;
    if (!r.note.empty()) entry["error"] = r.note;
    doc[r.name] = entry;
    failed = failed || !r.pass;
  }
  return {doc.dump(2) + "\n", failed};
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CommandOutput execute(const RunConfig& config, std::ostream& err) {
  validate(config);
  warn_relativistic(config, err);
  if (config.command == "zeros") return {cmd_zeros(config)};
  if (config.command == "energy") return {cmd_energy(config)};
  if (config.command == "moments") return {cmd_moments(config)};
  if (config.command == "density-r") return {cmd_density_r(config)};
  if (config.command == "density-t") return {cmd_density_t(config)};
  return cmd_verify(config);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum dynamics in a cylindrical trap with a uniformly moving wall"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  app.require_subcommand(1, 1);
  app.fallthrough();

  RunConfig config;
  app.add_option("--m", config.m, "angular quantum number m >= 0");
  app.add_option("--n", config.n, "radial quantum number (zeros/moments: count)");
  app.add_option("--alpha-ratio", config.alpha_ratio, "alpha / alpha_mn (density-t accepts a list)")->delimiter(',');
  app.add_option("--xi", config.xi, "final xi (energy) or xi targets (density-r)")->delimiter(',');
  app.add_option("--t-max", config.t_max, "trace length in T (default 2 T2)");
  app.add_option("--eta-obs", config.eta_obs, "observation point eta (default x_mn / pi)");
  app.add_option("--nmax", config.n_max, "radial modes kept in the expansion");
  app.add_option("--grid", config.grid, "rows (energy), radial points (density-r) or time steps (density-t)");
  app.add_option("--out", config.out, "output path (default stdout)");
  app.add_flag("--negative-control", config.negative_control, "verify: drop the boundary phase in the projection");
  app.add_option("--phys-radius", config.phys_radius, "initial radius in metres, for the u << c check");
  app.add_option("--phys-mass", config.phys_mass, "particle mass in kilograms, for the u << c check");

  for (const char* name : {"zeros", "energy", "moments", "density-r", "density-t", "verify"}) {
    app.add_subcommand(name)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream sink_out;
    std::ostringstream sink_err;
    const int code = app.exit(e, sink_out, sink_err);
    out << sink_out.str();
    err << sink_err.str();
    return code == 0 ? kOk : kConfigError;
  }
  config.command = app.get_subcommands().front()->get_name();

  CommandOutput result;
  try {
    result = execute(config, err);
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const TruncationError& e) {
    err << "truncation: " << e.what() << '\n';
    return kNumericError;
  } catch (const Error& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumericError;
  }

  if (config.out.empty()) {
    out << result.text;
    out.flush();
    if (!out) return kIoError;
  } else {
    std::ofstream file(config.out, std::ios::binary | std::ios::trunc);
    if (!file) {
      err << "io error: cannot open " << config.out << '\n';
      return kIoError;
    }
    file << result.text;
    file.close();
    if (!file) {
      err << "io error: failed writing " << config.out << '\n';
      return kIoError;
    }
  }
  if (result.checks_failed) {
    err << "verify: at least one check failed\n";
    return kNumericError;
  }
  return kOk;
}

}  // namespace qtrap::cli
