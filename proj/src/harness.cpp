#include "lowmach/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace lowmach {

// ---- configuration ----------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double to_double(const std::string& key, const std::string& v) {
  const std::string s = lower(trim(v));
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  try {
    std::size_t pos = 0;
    const double x = std::stod(s, &pos);
    if (pos == s.size()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": not a number: '" + v + "'");
}

double positive(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (!(x > 0.0)) throw ConfigError(key + ": must be positive, got '" + v + "'");
  return x;
}

int to_int(const std::string& key, const std::string& v, int lo) {
  const double x = to_double(key, v);
  if (x != std::floor(x) || x < lo || x > 1e9) throw ConfigError(key + ": expected an integer >= " + std::to_string(lo));
  return static_cast<int>(x);
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> r;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    r.push_back(positive(key, item));
  }
  if (r.empty()) throw ConfigError(key + ": empty list");
  return r;
}

std::string fmt(double x) {
  if (std::isinf(x)) return "inf";
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, v] : Config{}.entries()) keys.push_back(k);
  return keys;
}

std::map<std::string, std::string> Config::entries() const {
  return {
      {"domain.geometry", to_string(domain.geometry) == "Channel2D" ? "channel" : "torus"},
      {"domain.nx", std::to_string(domain.nx)},
      {"domain.ny", std::to_string(domain.ny)},
      {"domain.lx", fmt(domain.lx)},
      {"domain.ly", fmt(domain.ly)},
      {"eos.family", eos.family == EosFamily::Linear ? "linear" : "gamma"},
      {"eos.k", fmt(eos.k)},
      {"eos.gamma", fmt(eos.gamma)},
      {"solver.t_final", fmt(t_final)},
      {"solver.dt_safety", fmt(dt_safety)},
      {"solver.dt", dt ? fmt(*dt) : "auto"},
      {"solver.series_every", std::to_string(series_every)},
      {"solver.interpolation", interpolation == Interpolation::Exact ? "exact" : "fast"},
      {"sweep.k_list", fmt_list(k_list)},
      {"sweep.n_max", std::to_string(n_max)},
      {"sweep.samples", std::to_string(samples)},
      {"data.velocity_amplitude", fmt(velocity_amplitude)},
      {"data.gradient_amplitude", fmt(gradient_amplitude)},
      {"data.density_amplitude", fmt(density_amplitude)},
      {"data.band", std::to_string(band)},
      {"compat.max_iter", std::to_string(compat_max_iter)},
      {"compat.tol", fmt(compat_tol)},
      {"probe.t", fmt(probe_t)},
      {"probe.lambdas", fmt_list(probe_lambdas)},
      {"burgers.n", std::to_string(burgers_n)},
      {"burgers.t", fmt(burgers_t)},
      {"burgers.amplitude", fmt(burgers_amplitude)},
      {"burgers.lambdas", fmt_list(burgers_lambdas)},
      {"operators.samples", std::to_string(operator_samples)},
      {"seed", std::to_string(seed)},
      {"output.dir", output_dir},
  };
}

void apply_setting(Config& c, const std::string& key_in, const std::string& value_in) {
  const std::string key = trim(key_in), v = trim(value_in);
  if (key == "domain.geometry") {
    const std::string g = lower(v);
    const DomainSpec old = c.domain;
    if (g == "torus") c.domain = DomainSpec::torus(old.nx, old.ny, old.lx);
    else if (g == "channel") c.domain = DomainSpec::channel(old.nx, old.ny, old.lx);
    else throw ConfigError("domain.geometry: expected torus or channel, got '" + v + "'");
  } else if (key == "domain.nx") c.domain.nx = to_int(key, v, 4);
  else if (key == "domain.ny") c.domain.ny = to_int(key, v, 4);
  else if (key == "domain.lx") c.domain.lx = positive(key, v);
  else if (key == "domain.ly") {
    if (c.domain.is_channel() && to_double(key, v) != 1.0) throw ConfigError("domain.ly: the channel has unit width");
    c.domain.ly = positive(key, v);
  } else if (key == "eos.family") {
    const std::string f = lower(v);
    if (f == "linear") c.eos.family = EosFamily::Linear;
    else if (f == "gamma" || f == "gamma_law" || f == "gammalaw") c.eos.family = EosFamily::GammaLaw;
    else throw ConfigError("eos.family: expected linear or gamma, got '" + v + "'");
  } else if (key == "eos.k") c.eos.k = positive(key, v);
  else if (key == "eos.gamma") c.eos.gamma = positive(key, v);
  else if (key == "solver.t_final") c.t_final = positive(key, v);
  else if (key == "solver.dt_safety") c.dt_safety = positive(key, v);
  else if (key == "solver.dt") {
    if (lower(v) == "auto") c.dt.reset();
    else c.dt = positive(key, v);
  } else if (key == "solver.series_every") c.series_every = to_int(key, v, 0);
  else if (key == "solver.interpolation") {
    const std::string m = lower(v);
    if (m == "exact") c.interpolation = Interpolation::Exact;
    else if (m == "fast") c.interpolation = Interpolation::Fast;
    else throw ConfigError("solver.interpolation: expected exact or fast, got '" + v + "'");
  } else if (key == "sweep.k_list") c.k_list = to_list(key, v);
  else if (key == "sweep.n_max") c.n_max = to_int(key, v, 0);
  else if (key == "sweep.samples") c.samples = to_int(key, v, 1);
  else if (key == "data.velocity_amplitude") c.velocity_amplitude = to_double(key, v);
  else if (key == "data.gradient_amplitude") c.gradient_amplitude = to_double(key, v);
  else if (key == "data.density_amplitude") c.density_amplitude = to_double(key, v);
  else if (key == "data.band") c.band = to_int(key, v, 1);
  else if (key == "compat.max_iter") c.compat_max_iter = to_int(key, v, 1);
  else if (key == "compat.tol") c.compat_tol = positive(key, v);
  else if (key == "probe.t") c.probe_t = to_double(key, v);
  else if (key == "probe.lambdas") c.probe_lambdas = to_list(key, v);
  else if (key == "burgers.n") c.burgers_n = to_int(key, v, 4);
  else if (key == "burgers.t") c.burgers_t = to_double(key, v);
  else if (key == "burgers.amplitude") c.burgers_amplitude = to_double(key, v);
  else if (key == "burgers.lambdas") c.burgers_lambdas = to_list(key, v);
  else if (key == "operators.samples") c.operator_samples = to_int(key, v, 1);
  else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_int(key, v, 0));
  else if (key == "output.dir") {
    if (v.empty()) throw ConfigError("output.dir: empty");
    c.output_dir = v;
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

Config parse_config(const std::string& text) {
  Config c;
  std::istringstream is(text);
  std::string line;
  int no = 0;
  while (std::getline(is, line)) {
    ++no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(no) + ": expected key = value");
    try {
      apply_setting(c, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(no) + ": " + e.what());
    }
  }
  try {
    c.domain.validate();
    c.eos.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

RunOptions Config::run_options() const {
  RunOptions o;
  o.t_final = t_final;
  o.dt_safety = dt_safety;
  o.dt = dt;
  o.series_every = series_every;
  return o;
}

// ---- initial data -----------------------------------------------------------

namespace {

template <class F>
F normalized(F f, double target) {
  const double m = f.max_abs();
  if (m > 0.0) f *= target / m;
  return f;
}

}  // namespace

InitialData initial_data(const Config& c) {
  const DomainSpec& d = c.domain;
  InitialData r;
  r.v0 = normalized(dealias(project_p(random_vector_field(d, c.band, c.seed))), c.velocity_amplitude);
  ScalarField chi = random_field(d, d.scalar_parity(), c.band, c.seed + 1);
  chi = normalized(dealias(chi + (-mean(chi))), 1.0);
  r.grad = dealias(grad(chi));
  ScalarField chi2 = random_field(d, d.scalar_parity(), c.band, c.seed + 2);
  r.chi2 = normalized(dealias(chi2 + (-mean(chi2))), 1.0);
  return r;
}

VectorField velocity_for(const InitialData& d, const Config& c, double k) {
  if (std::isinf(k)) return d.v0;
  return d.v0 + (c.gradient_amplitude / std::sqrt(k)) * d.grad;
}

ScalarField log_density_for(const InitialData& d, const Config& c, double k) {
  if (std::isinf(k)) return 0.0 * d.chi2;
  return (c.density_amplitude / k) * d.chi2;
}

Direction probe_direction(const Config& c, double k) {
  const DomainSpec& d = c.domain;
  Direction r;
  const VectorField w = normalized(dealias(project_p(random_vector_field(d, c.band, c.seed + 10))), 0.1);
  ScalarField chi = random_field(d, d.scalar_parity(), c.band, c.seed + 11);
  chi = normalized(dealias(chi + (-mean(chi))), 1.0);
  r.z0 = w + (1.0 / std::sqrt(k)) * dealias(grad(chi));
  ScalarField chi4 = random_field(d, d.scalar_parity(), c.band, c.seed + 12);
  r.h0 = (1.0 / k) * normalized(dealias(chi4 + (-mean(chi4))), 1.0);
  return r;
}

CompressibleState wall_violating_data(const Config& c, double k) {
  const DomainSpec& d = c.domain;
  if (!d.is_channel()) throw InputError("wall-violating data needs a channel domain");
  const InitialData data = initial_data(c);
  ScalarField r = random_field(d, Parity::General, c.band, c.seed + 20);
  r = r + (-mean(r));
  const ScalarField g = laplace_solve(r);
  const VectorField u = to_general(velocity_for(data, c, k)) + (1.0 / std::sqrt(k)) * grad(g);
  ScalarField f = random_field(d, Parity::General, c.band, c.seed + 21);
  f = to_general(log_density_for(data, c, k)) + (1.0 / k) * normalized(f + (-mean(f)), 1.0);
  return {u, f, 0.0};
}

// ---- slope fits -------------------------------------------------------------

double SlopeFit::constant() const { return std::exp(intercept); }

SlopeFit fit_slope(const std::vector<double>& k, const std::vector<double>& value) {
  if (k.size() != value.size()) throw InputError("fit_slope: k and value sizes differ");
  if (k.size() < 3) throw InputError("fit_slope: needs at least 3 points, got " + std::to_string(k.size()));
  const std::size_t n = k.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(value[i] > 0.0) || !std::isfinite(value[i]))
      throw InputError("fit_slope: value at index " + std::to_string(i) + " is not positive");
    if (!(k[i] > 0.0) || !std::isfinite(k[i]))
      throw InputError("fit_slope: k at index " + std::to_string(i) + " is not positive and finite");
    x[i] = std::log(k[i]);
    y[i] = std::log(value[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InputError("fit_slope: all k values coincide");
  SlopeFit f;
  f.points = static_cast<int>(n);
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    ssr += r * r;
  }
  f.stderr_ = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  return f;
}

// ---- k sweep ------------------------------------------------------------------

namespace {

// Step count that is a multiple of the number of output times.
int matched_steps(double t_final, double dt0, int samples) {
  const int n = step_count(t_final, dt0);
  return ((n + samples - 1) / samples) * samples;
}

double rho_error(const ScalarField& f) {
  return sobolev_norm(map(f, [](double x) { return std::expm1(x); }), {0});
}

void sup(double& into, double v) { into = std::isnan(into) ? v : std::max(into, v); }

void fit_into(SweepResult& r, const std::string& name, const std::vector<double>& k, const std::vector<double>& v) {
  std::vector<double> kk, vv;
  for (std::size_t i = 0; i < k.size(); ++i)
    if (std::isfinite(k[i]) && std::isfinite(v[i]) && v[i] > 0.0) {
      kk.push_back(k[i]);
      vv.push_back(v[i]);
    }
  if (kk.size() >= 3) r.slopes[name] = fit_slope(kk, vv);
}

}  // namespace

SweepResult run_sweep(const Config& c, const SweepOptions& opt) {
  SweepResult r;
  r.config = c;
  const InitialData data = initial_data(c);
  const int S = c.samples;
  for (int i = 1; i <= S; ++i) r.times.push_back(c.t_final * i / S);

  // incompressible reference at the matched times
  std::vector<VectorField> ref;
  {
    const EulerState init{data.v0, 0.0};
    RunOptions o = c.run_options();
    const int n = matched_steps(c.t_final, c.dt ? *c.dt : cfl_dt(init, c.dt_safety), S);
    o.dt = c.t_final / n;
    o.snapshot_every = n / S;
    run_incompressible(init, o, [&](const EulerState& s, int step) {
      if (step > 0) ref.push_back(s.v);
    });
  }

  for (double k : c.k_list) {
    SweepCell cell;
    cell.k = k;
    if (std::isinf(k)) {
      cell.horizon = c.t_final;
      r.cells.push_back(cell);
      continue;
    }
    Eos eos = c.eos;
    eos.k = k;
    const VectorField u0 = velocity_for(data, c, k);
    const ScalarField f0 = log_density_for(data, c, k);
    double reached = 0.0;
    try {
      const CompressibleState init{u0, f0, 0.0};
      RunOptions o = c.run_options();
      const int n = matched_steps(c.t_final, c.dt ? *c.dt : cfl_dt(init, eos, c.dt_safety), S);
      o.dt = c.t_final / n;
      o.snapshot_every = n / S;
      std::size_t idx = 0;
      run_compressible(init, eos, o, [&](const CompressibleState& s, int step) {
        reached = s.t;
        if (step == 0) return;
        const VectorField& v = ref.at(idx++);
        sup(cell.u_err_h1, sobolev_norm(s.u - v, {1}, NormConvention::IntegerSum));
        sup(cell.u_err_h3, sobolev_norm(s.u - v, {3}, NormConvention::IntegerSum));
        sup(cell.rho_err_l2, rho_error(s.f));
        const CascadeReport cr = cascade(s, eos);
        cell.cascade_rows.push_back(cr);
        sup(cell.f4, cr.f4);
        sup(cell.fdot3, cr.fdot3);
        sup(cell.fddot2, cr.fddot2);
        sup(cell.fdddot1, cr.fdddot1);
        sup(cell.E, cr.E);
        sup(cell.E1, cr.E1);
      });
      cell.horizon = c.t_final;
      if (opt.approx && c.n_max > 0) {
        ApproxOptions ao;
        ao.n_max = c.n_max;
        ao.T = c.t_final;
        ao.dt_safety = c.dt_safety;
        ao.snapshots = S;
        ao.interpolation = c.interpolation;
        const ApproxSequence seq = approx_sequence(u0, map(f0, [](double x) { return std::exp(x); }), eos, ao);
        cell.increment_h1 = seq.increment_h1;
        cell.error_h1 = seq.error_h1;
        cell.grad_g_h3 = seq.grad_g_h3;
      }
      if (opt.operators) {
        const LOperator op(sound_speed_sq(eos, f0), k);
        cell.linv_norm = measure_inverse_norm(op, c.operator_samples, c.seed + 7).value;
        if (c.domain.is_channel()) cell.gl_norm = measure_gl_norm(op, c.operator_samples, c.seed + 8).value;
      }
    } catch (const Error& e) {
      cell.ok = false;
      cell.error = e.what();
      if (const auto* cfl = dynamic_cast<const CflError*>(&e)) reached = cfl->time();
      cell.horizon = reached;
      r.incomplete.push_back("k=" + fmt(k) + ": " + e.what());
    }
    r.cells.push_back(std::move(cell));
  }

  std::vector<double> ks;
  for (const auto& cell : r.cells) ks.push_back(cell.ok ? cell.k : kNaN);
  auto column = [&](auto get) {
    std::vector<double> v;
    for (const auto& cell : r.cells) v.push_back(get(cell));
    return v;
  };
  fit_into(r, "u_err_h1", ks, column([](const SweepCell& x) { return x.u_err_h1; }));
  fit_into(r, "u_err_h3", ks, column([](const SweepCell& x) { return x.u_err_h3; }));
  fit_into(r, "rho_err_l2", ks, column([](const SweepCell& x) { return x.rho_err_l2; }));
  fit_into(r, "f_H4", ks, column([](const SweepCell& x) { return x.f4; }));
  fit_into(r, "fdot_H3", ks, column([](const SweepCell& x) { return x.fdot3; }));
  fit_into(r, "fddot_H2", ks, column([](const SweepCell& x) { return x.fddot2; }));
  fit_into(r, "fdddot_H1", ks, column([](const SweepCell& x) { return x.fdddot1; }));
  fit_into(r, "linv_norm", ks, column([](const SweepCell& x) { return x.linv_norm; }));
  fit_into(r, "gl_norm", ks, column([](const SweepCell& x) { return x.gl_norm; }));
  for (int n = 1; n <= c.n_max; ++n) {
    auto at = [n](const std::vector<double>& v) { return static_cast<int>(v.size()) > n ? v[n] : kNaN; };
    fit_into(r, "increment_h1_" + std::to_string(n), ks, column([&](const SweepCell& x) { return at(x.increment_h1); }));
  }
  return r;
}

// ---- writers ------------------------------------------------------------------

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw InputError("cannot open " + path + " for writing");
  os << std::setprecision(17);
  return os;
}

std::string cell_text(double v) {
  if (std::isnan(v)) return "";
  return fmt(v);
}

struct Column {
  std::string name;
  std::function<double(const SweepCell&)> get;
};

std::vector<Column> sweep_columns(int n_max) {
  std::vector<Column> cols{
      {"k", [](const SweepCell& c) { return c.k; }},
      {"horizon", [](const SweepCell& c) { return c.horizon; }},
      {"u_err_h1", [](const SweepCell& c) { return c.u_err_h1; }},
      {"u_err_h3", [](const SweepCell& c) { return c.u_err_h3; }},
      {"rho_err_l2", [](const SweepCell& c) { return c.rho_err_l2; }},
      {"f_H4", [](const SweepCell& c) { return c.f4; }},
      {"fdot_H3", [](const SweepCell& c) { return c.fdot3; }},
      {"fddot_H2", [](const SweepCell& c) { return c.fddot2; }},
      {"fdddot_H1", [](const SweepCell& c) { return c.fdddot1; }},
      {"E", [](const SweepCell& c) { return c.E; }},
      {"E1", [](const SweepCell& c) { return c.E1; }},
      {"linv_norm", [](const SweepCell& c) { return c.linv_norm; }},
      {"gl_norm", [](const SweepCell& c) { return c.gl_norm; }},
  };
  auto at = [](const std::vector<double>& v, int n) { return static_cast<int>(v.size()) > n ? v[n] : kNaN; };
  for (int n = 1; n <= n_max; ++n)
    cols.push_back({"increment_h1_" + std::to_string(n), [=](const SweepCell& c) { return at(c.increment_h1, n); }});
  for (int n = 0; n <= n_max; ++n)
    cols.push_back({"error_h1_" + std::to_string(n), [=](const SweepCell& c) { return at(c.error_h1, n); }});
  return cols;
}

nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json nums(const std::vector<double>& v) {
  auto a = nlohmann::json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

void dump(const std::string& path, const nlohmann::json& j) {
  auto os = open_out(path);
  os << j.dump(2) << '\n';
}

}  // namespace

void write_sweep_csv(const std::string& path, const SweepResult& r) {
  auto os = open_out(path);
  const auto cols = sweep_columns(r.config.n_max);
  os << "ok";
  for (const auto& c : cols) os << ',' << c.name;
  os << '\n';
  for (const auto& cell : r.cells) {
    os << (cell.ok ? 1 : 0);
    const bool compressible = std::isfinite(cell.k);
    for (const auto& c : cols) {
      const double v = c.get(cell);
      os << ',' << (c.name == "k" || c.name == "horizon" || compressible ? cell_text(v) : "");
    }
    os << '\n';
  }
}

void write_sweep_json(const std::string& path, const SweepResult& r) {
  nlohmann::json j;
  nlohmann::json cfg;
  for (const auto& [k, v] : r.config.entries()) cfg[k] = v;
  j["config"] = cfg;
  j["times"] = nums(r.times);
  auto slopes = nlohmann::json::object();
  auto ledger = nlohmann::json::object();
  for (const auto& [name, f] : r.slopes) {
    slopes[name] = {{"slope", f.slope}, {"stderr", f.stderr_}, {"intercept", f.intercept}, {"points", f.points}};
    ledger[name] = {{"constant", f.constant()}, {"exponent", f.slope}};
  }
  j["slopes"] = slopes;
  j["constants"] = ledger;
  auto cells = nlohmann::json::array();
  for (const auto& c : r.cells) {
    nlohmann::json e;
    e["k"] = std::isinf(c.k) ? nlohmann::json("inf") : nlohmann::json(c.k);
    e["ok"] = c.ok;
    if (!c.ok) e["error"] = c.error;
    e["horizon"] = num(c.horizon);
    e["u_err_h1"] = num(c.u_err_h1);
    e["u_err_h3"] = num(c.u_err_h3);
    e["rho_err_l2"] = num(c.rho_err_l2);
    e["cascade"] = {{"f_H4", num(c.f4)}, {"fdot_H3", num(c.fdot3)}, {"fddot_H2", num(c.fddot2)},
                    {"fdddot_H1", num(c.fdddot1)}, {"E", num(c.E)}, {"E1", num(c.E1)}};
    e["increment_h1"] = nums(c.increment_h1);
    e["error_h1"] = nums(c.error_h1);
    e["grad_g_h3"] = nums(c.grad_g_h3);
    e["linv_norm"] = num(c.linv_norm);
    e["gl_norm"] = num(c.gl_norm);
    cells.push_back(e);
  }
  j["cells"] = cells;
  j["incomplete"] = r.incomplete;
  dump(path, j);
}

void write_sweep_dat(const std::string& path, const SweepResult& r) {
  auto os = open_out(path);
  const auto cols = sweep_columns(r.config.n_max);
  os << '#';
  for (const auto& c : cols) os << ' ' << c.name;
  os << '\n';
  for (const auto& cell : r.cells) {
    if (!std::isfinite(cell.k)) continue;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const double v = cols[i].get(cell);
      os << (i ? " " : "") << (std::isnan(v) ? std::string("NaN") : fmt(v));
    }
    os << '\n';
  }
}

void write_compat_json(const std::string& path, const CompatProjection& p) {
  nlohmann::json j;
  j["iterations"] = p.iterations;
  j["contraction"] = p.contraction;
  j["residuals"] = {{"phi1", p.report.phi1}, {"phi2", p.report.phi2}, {"phi3", p.report.phi3}};
  j["scales"] = {{"phi1", p.report.scale1}, {"phi2", p.report.scale2}, {"phi3", p.report.scale3}};
  j["scaled"] = p.report.scaled();
  auto h = nlohmann::json::array();
  for (const auto& it : p.report.history)
    h.push_back({{"iteration", it.iteration}, {"phi1", it.phi1}, {"phi2", it.phi2}, {"phi3", it.phi3},
                 {"scaled", it.scaled}, {"ratio", it.ratio}});
  j["history"] = h;
  dump(path, j);
}

void write_probe_json(const std::string& path, const ProbeReport& r) {
  nlohmann::json j;
  j["t"] = r.t;
  j["k"] = r.k;
  j["dt"] = r.dt;
  auto rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"lambda", row.lambda}, {"lagrangian_h3", row.lagrangian_h3}, {"lagrangian_h2", row.lagrangian_h2},
                    {"eulerian_h3", row.eulerian_h3}, {"eulerian_h2", row.eulerian_h2},
                    {"d_norm_h3", row.d_norm_h3}});
  j["rows"] = rows;
  j["lagrangian_ratios"] = nums(r.lagrangian_ratios);
  j["eulerian_ratios"] = nums(r.eulerian_ratios);
  dump(path, j);
}

void write_sequence_json(const std::string& path, const ApproxSequence& s) {
  nlohmann::json j;
  j["k"] = s.k;
  j["n_max"] = s.n_max;
  j["increment_h1"] = nums(s.increment_h1);
  j["increment_h3"] = nums(s.increment_h3);
  j["error_h1"] = nums(s.error_h1);
  j["error_h3"] = nums(s.error_h3);
  j["grad_g_h3"] = nums(s.grad_g_h3);
  j["lagrangian_increment_h3"] = nums(s.lagrangian_increment_h3);
  auto times = nlohmann::json::array();
  for (const auto& snap : s.snapshots) times.push_back(snap.t);
  j["times"] = times;
  dump(path, j);
}

std::map<std::string, std::vector<double>> read_csv_columns(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot read " + path);
  std::string line;
  if (!std::getline(is, line)) throw InputError(path + ": empty file");
  std::vector<std::string> names;
  {
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) names.push_back(trim(item));
  }
  std::map<std::string, std::vector<double>> cols;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (trim(line).empty()) continue;
    std::stringstream ss(line);
    std::string item;
    std::size_t i = 0;
    while (i < names.size()) {
      if (!std::getline(ss, item, ',')) item.clear();
      item = trim(item);
      double v = kNaN;
      if (!item.empty()) {
        try {
          std::size_t pos = 0;
          v = std::stod(item, &pos);
          if (pos != item.size()) v = kNaN;
        } catch (const std::exception&) {
          v = kNaN;
        }
      }
      cols[names[i]].push_back(v);
      ++i;
    }
  }
  return cols;
}

}  // namespace lowmach
