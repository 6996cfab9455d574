#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lowmach/analysis.hpp"
#include "lowmach/harness.hpp"
#include "lowmach/oracle1d.hpp"
#include "lowmach/snapshot.hpp"

using namespace lowmach;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0, kConfigError = 2, kNumericalError = 3, kCheckFailed = 4;

struct Common {
  std::string config_path;
  std::vector<std::string> settings;
  std::string output;
  bool check = false;
};

Config load(const Common& o) {
  Config c = o.config_path.empty() ? Config{} : load_config(o.config_path);
  for (const auto& s : o.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    apply_setting(c, s.substr(0, eq), s.substr(eq + 1));
  }
  if (!o.output.empty()) c.output_dir = o.output;
  try {
    c.domain.validate();
    c.eos.validate();
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  fs::create_directories(c.output_dir);
  return c;
}

std::string out(const Config& c, const std::string& name) { return (fs::path(c.output_dir) / name).string(); }

void write_field(const Config& c, const std::string& name, const ScalarField& f, double t) {
  write_snapshot(out(c, name + ".snap"), f, name, t);
  write_field_csv(out(c, name + ".csv"), f);
}

// Prints one check line and returns whether it passed.
bool check_line(const std::string& what, bool pass, const std::string& detail) {
  std::cout << (pass ? "PASS " : "FAIL ") << what << ": " << detail << '\n';
  return pass;
}

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(4) << x;
  return os.str();
}

int cmd_project_ic(const Common& o) {
  const Config c = load(o);
  if (!c.domain.is_channel()) throw ConfigError("project-ic needs domain.geometry = channel");
  const CompressibleState data = wall_violating_data(c, c.eos.k);
  CompatOptions opt;
  opt.max_iter = c.compat_max_iter;
  opt.tol = c.compat_tol;
  const CompatProjection p = compat_project(data.u, data.f, c.eos, opt);
  write_compat_json(out(c, "compat.json"), p);
  write_field(c, "u_x", p.u.x, 0.0);
  write_field(c, "u_y", p.u.y, 0.0);
  write_field(c, "f", p.f, 0.0);
  const CompatReport before = compat_residuals(data.u, data.f, c.eos);
  std::cout << "scaled residual " << num(before.scaled()) << " -> " << num(p.report.scaled()) << " in "
            << p.iterations << " iterations, contraction " << num(p.contraction) << '\n';
  if (o.check && !check_line("compat", p.report.scaled() <= c.compat_tol, "scaled residual " + num(p.report.scaled())))
    return kCheckFailed;
  return kOk;
}

int cmd_run_incompressible(const Common& o) {
  const Config c = load(o);
  const InitialData d = initial_data(c);
  const EulerRun run = run_incompressible(EulerState{d.v0, 0.0}, c.run_options());
  write_time_series_csv(out(c, "series.csv"), run.series);
  write_field(c, "v_x", run.final.v.x, run.final.t);
  write_field(c, "v_y", run.final.v.y, run.final.t);
  const double e0 = run.series.front().kinetic, e1 = run.series.back().kinetic;
  const double drift = std::abs(e1 - e0) / e0;
  std::cout << "t = " << run.final.t << ", kinetic energy drift " << num(drift) << '\n';
  if (o.check && !check_line("energy", drift <= 1e-6, "relative drift " + num(drift))) return kCheckFailed;
  return kOk;
}

int cmd_run_compressible(const Common& o) {
  const Config c = load(o);
  const InitialData d = initial_data(c);
  const CompressibleState init{velocity_for(d, c, c.eos.k), log_density_for(d, c, c.eos.k), 0.0};
  const CompressibleRun run = run_compressible(init, c.eos, c.run_options());
  write_time_series_csv(out(c, "series.csv"), run.series);
  write_field(c, "u_x", run.final.u.x, run.final.t);
  write_field(c, "u_y", run.final.u.y, run.final.t);
  write_field(c, "f", run.final.f, run.final.t);
  const double m0 = run.series.front().mass, m1 = run.series.back().mass;
  const double drift = std::abs(m1 - m0) / m0;
  std::cout << "t = " << run.final.t << ", mass drift " << num(drift) << '\n';
  if (o.check && !check_line("mass", drift <= 1e-10, "relative drift " + num(drift))) return kCheckFailed;
  return kOk;
}

int cmd_sweep(const Common& o) {
  const Config c = load(o);
  const SweepResult r = run_sweep(c);
  write_sweep_csv(out(c, "sweep.csv"), r);
  write_sweep_json(out(c, "sweep.json"), r);
  write_sweep_dat(out(c, "sweep.dat"), r);
  std::vector<CascadeReport> rows;
  for (const auto& cell : r.cells) rows.insert(rows.end(), cell.cascade_rows.begin(), cell.cascade_rows.end());
  write_cascade_csv(out(c, "cascade.csv"), rows);
  for (const auto& [name, f] : r.slopes)
    std::cout << name << ": slope " << num(f.slope) << " +- " << num(f.stderr_) << '\n';
  for (const auto& s : r.incomplete) std::cout << "incomplete " << s << '\n';
  if (!o.check) return kOk;
  bool ok = r.incomplete.empty();
  auto slope_check = [&](const std::string& name, double target, double tol) {
    const auto it = r.slopes.find(name);
    if (it == r.slopes.end()) {
      ok = check_line(name, false, "no fit");
      return;
    }
    ok = check_line(name, std::abs(it->second.slope - target) <= tol,
                    "slope " + num(it->second.slope) + ", expected " + num(target) + " +- " + num(tol)) && ok;
  };
  slope_check("u_err_h1", -0.5, 0.15);
  slope_check("rho_err_l2", -1.0, 0.15);
  return ok ? kOk : kCheckFailed;
}

int cmd_approx(const Common& o) {
  const Config c = load(o);
  const InitialData d = initial_data(c);
  const double k = c.eos.k;
  ApproxOptions ao;
  ao.n_max = c.n_max;
  ao.T = c.t_final;
  ao.dt_safety = c.dt_safety;
  ao.snapshots = c.samples;
  ao.interpolation = c.interpolation;
  const ApproxSequence s =
      approx_sequence(velocity_for(d, c, k), map(log_density_for(d, c, k), [](double x) { return std::exp(x); }),
                      c.eos, ao);
  write_sequence_json(out(c, "sequence.json"), s);
  for (int n = 0; n <= s.n_max; ++n)
    std::cout << "n = " << n << ": ||u - u_n||_1 = " << num(s.error_h1[n])
              << (n > 0 ? ", ||u_n - u_{n-1}||_1 = " + num(s.increment_h1[n]) : std::string()) << '\n';
  if (!o.check) return kOk;
  bool ok = true;
  for (int n = 1; n <= s.n_max; ++n)
    ok = check_line("error decreases at n = " + std::to_string(n), s.error_h1[n] < s.error_h1[n - 1],
                    num(s.error_h1[n - 1]) + " -> " + num(s.error_h1[n])) && ok;
  return ok ? kOk : kCheckFailed;
}

int cmd_sensitivity(const Common& o) {
  const Config c = load(o);
  const InitialData d = initial_data(c);
  const double k = c.eos.k;
  const Direction dir = probe_direction(c, k);
  ProbeOptions po;
  po.t = c.probe_t;
  po.lambdas = c.probe_lambdas;
  po.interpolation = Interpolation::Exact;
  const ProbeReport r =
      derivative_probe(velocity_for(d, c, k), log_density_for(d, c, k), dir.z0, dir.h0, c.eos, po);
  write_probe_json(out(c, "probe.json"), r);
  for (std::size_t i = 0; i < r.lagrangian_ratios.size(); ++i)
    std::cout << "ratio " << i + 1 << ": Lagrangian " << num(r.lagrangian_ratios[i]) << ", Eulerian "
              << num(r.eulerian_ratios[i]) << '\n';
  if (!o.check) return kOk;
  bool ok = !r.lagrangian_ratios.empty();
  for (std::size_t i = 0; i < r.lagrangian_ratios.size(); ++i)
    ok = check_line("Lagrangian ratio " + std::to_string(i + 1), r.lagrangian_ratios[i] >= 3.0,
                    num(r.lagrangian_ratios[i])) && ok;
  return ok ? kOk : kCheckFailed;
}

int cmd_burgers(const Common& o) {
  const Config c = load(o);
  const double a = c.burgers_amplitude;
  const int n = c.burgers_n;
  const auto u0 = Profile1D::sample(n, [a](double x) { return a * std::sin(2 * std::numbers::pi * x); });
  const auto z0 = Profile1D::sample(n, [](double x) { return std::cos(2 * std::numbers::pi * x); });
  const BurgersComparison cmp = burgers_compare(u0, z0, c.burgers_t, n, c.burgers_lambdas.back());
  write_burgers_csv(out(c, "burgers.csv"), cmp);
  const SensitivityConvergence conv = burgers_sensitivity_convergence(u0, z0, c.burgers_t, c.burgers_lambdas);
  nlohmann::json j;
  j["n"] = n;
  j["t"] = c.burgers_t;
  j["horizon"] = burgers_horizon(u0);
  j["u_error"] = cmp.u_error;
  j["z_error"] = cmp.z_error;
  j["lambdas"] = conv.lambdas;
  j["z_errors"] = conv.errors;
  j["orders"] = conv.orders;
  std::ofstream(out(c, "burgers.json")) << j.dump(2) << '\n';
  std::cout << "max |u_numeric - u_exact| = " << num(cmp.u_error) << '\n';
  for (double ord : conv.orders) std::cout << "central difference order " << num(ord) << '\n';
  if (!o.check) return kOk;
  bool ok = check_line("burgers solver", cmp.u_error <= 1e-6, "max error " + num(cmp.u_error));
  for (double ord : conv.orders) ok = check_line("sensitivity order", ord >= 1.9, num(ord)) && ok;
  return ok ? kOk : kCheckFailed;
}

int cmd_diagnostics(const Common& o) {
  const Config c = load(o);
  const InitialData d = initial_data(c);
  const double k = c.eos.k;
  const CompressibleState init{velocity_for(d, c, k), log_density_for(d, c, k), 0.0};
  RunOptions ro = c.run_options();
  const int steps = step_count(c.t_final, c.dt ? *c.dt : cfl_dt(init, c.eos, c.dt_safety));
  const int n = ((steps + c.samples - 1) / c.samples) * c.samples;
  ro.dt = c.t_final / n;
  ro.snapshot_every = n / c.samples;
  std::vector<CascadeReport> rows;
  const CompressibleRun run =
      run_compressible(init, c.eos, ro, [&](const CompressibleState& s, int) { rows.push_back(cascade(s, c.eos)); });
  write_cascade_csv(out(c, "cascade.csv"), rows);
  write_time_series_csv(out(c, "series.csv"), run.series);
  nlohmann::json j;
  const CompatReport rep = compat_residuals(init.u, init.f, c.eos);
  j["compat"] = {{"phi1", rep.phi1}, {"phi2", rep.phi2}, {"phi3", rep.phi3}, {"scaled", rep.scaled()}};
  const EosAudit audit = audit_assumption(c.eos, run.final.f, std::numeric_limits<double>::infinity());
  j["eos_audit"] = {{"a0", audit.a0}, {"a1", audit.a1}, {"worst_order", audit.worst_order}};
  std::ofstream(out(c, "diagnostics.json")) << j.dump(2) << '\n';
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, r.E / r.E1);
  std::cout << rows.size() << " cascade rows, max E/E1 = " << num(worst) << '\n';
  if (o.check && !check_line("cascade finite", std::isfinite(worst), num(worst))) return kCheckFailed;
  return kOk;
}

int cmd_fit(const Common& o, const std::string& input, const std::string& xcol, const std::string& ycol,
            std::optional<double> expect, double tol) {
  const Config c = load(o);
  const auto cols = read_csv_columns(input);
  if (!cols.count(xcol)) throw ConfigError("column '" + xcol + "' not in " + input);
  if (!cols.count(ycol)) throw ConfigError("column '" + ycol + "' not in " + input);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < cols.at(xcol).size(); ++i) {
    const double a = cols.at(xcol)[i], b = cols.at(ycol)[i];
    if (std::isfinite(a) && std::isfinite(b)) {
      x.push_back(a);
      y.push_back(b);
    }
  }
  const SlopeFit f = fit_slope(x, y);
  nlohmann::json j{{"x", xcol}, {"y", ycol}, {"slope", f.slope}, {"stderr", f.stderr_},
                   {"intercept", f.intercept}, {"constant", f.constant()}, {"points", f.points}};
  std::ofstream(out(c, "fit.json")) << j.dump(2) << '\n';
  std::cout << ycol << " vs " << xcol << ": slope " << num(f.slope) << " +- " << num(f.stderr_) << ", constant "
            << num(f.constant()) << '\n';
  if (o.check && expect &&
      !check_line("slope", std::abs(f.slope - *expect) <= tol, num(f.slope) + " vs " + num(*expect) + " +- " + num(tol)))
    return kCheckFailed;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slightly compressible flow simulator and verification harness"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* s) {
    s->add_option("-c,--config", common.config_path, "Configuration file (key = value lines)");
    s->add_option("-s,--set", common.settings, "Override a configuration key (key=value)");
    s->add_option("-o,--output", common.output, "Output directory (overrides output.dir)");
    s->add_flag("--check", common.check, "Exit with status 4 when an acceptance threshold fails");
    return s;
  };
  std::function<int()> action;
  auto bind = [&](CLI::App* s, std::function<int()> f) { s->callback([&action, f] { action = f; }); };

  bind(add_common(app.add_subcommand("project-ic", "Project wall-violating channel data onto compatible data")),
       [&] { return cmd_project_ic(common); });
  bind(add_common(app.add_subcommand("run-incompressible", "Run the incompressible solver")),
       [&] { return cmd_run_incompressible(common); });
  bind(add_common(app.add_subcommand("run-compressible", "Run the compressible solver at eos.k")),
       [&] { return cmd_run_compressible(common); });
  bind(add_common(app.add_subcommand("sweep-k", "Sweep over sweep.k_list and fit rates")),
       [&] { return cmd_sweep(common); });
  bind(add_common(app.add_subcommand("approx-seq", "Successive approximations at eos.k")),
       [&] { return cmd_approx(common); });
  bind(add_common(app.add_subcommand("sensitivity", "Central-difference probe of the Lagrangian solution map")),
       [&] { return cmd_sensitivity(common); });
  bind(add_common(app.add_subcommand("burgers-oracle", "Compare the 1D solver and sensitivity with closed forms")),
       [&] { return cmd_burgers(common); });
  bind(add_common(app.add_subcommand("diagnostics", "Cascade norms and compatibility residuals along a run")),
       [&] { return cmd_diagnostics(common); });

  std::string input, xcol = "k", ycol;
  std::optional<double> expect;
  double tol = 0.15;
  auto* fit = add_common(app.add_subcommand("fit", "Fit a log-log slope to two CSV columns"));
  fit->add_option("-i,--input", input, "CSV file")->required();
  fit->add_option("-x,--x", xcol, "Abscissa column")->capture_default_str();
  fit->add_option("-y,--y", ycol, "Ordinate column")->required();
  fit->add_option("--expect", expect, "Expected slope for --check");
  fit->add_option("--tol", tol, "Tolerance on the slope for --check")->capture_default_str();
  bind(fit, [&] { return cmd_fit(common, input, xcol, ycol, expect, tol); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }
  try {
    return action();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
}
