#include "lowmach/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "lowmach/elliptic.hpp"

namespace lowmach {

namespace {

void require_finite(const ScalarField& f, const char* name, double t) {
  if (!f.all_finite()) {
    std::ostringstream os;
    os << "non-finite values in " << name << " at t=" << t;
    throw NonFiniteError(os.str(), name);
  }
}

void require_step(double dt, double limit, double t) {
  if (!(dt > 0.0)) throw InputError("time step must be positive");
  // hard limit: twice the default-safety CFL step (Courant number 0.8)
  if (dt > 2.0 * limit) {
    std::ostringstream os;
    os << "time step " << dt << " exceeds the stability limit " << 2.0 * limit << " at t=" << t;
    throw CflError(os.str(), t);
  }
}

double max_c2(const Eos& eos, const ScalarField& f) {
  if (eos.family == EosFamily::Linear) return eos.k;
  return std::max(eos.c2_of_f(f.max()), eos.c2_of_f(f.min()));
}

}  // namespace

VectorField incompressible_rhs(const EulerState& s) {
  return -project_p(covariant(s.v, s.v));
}

CompressibleRhs compressible_rhs(const CompressibleState& s, const Eos& eos) {
  const auto& u = s.u;
  const ScalarField c2 = sound_speed_sq(eos, s.f);
  const VectorField gf = grad(s.f);
  const ScalarField uxx = dx(u.x), uxy = dy(u.x), uyx = dx(u.y), uyy = dy(u.y);
  ScalarField ax = u.x * uxx + u.y * uxy + c2 * gf.x;
  ScalarField ay = u.x * uyx + u.y * uyy + c2 * gf.y;
  ScalarField af = u.x * gf.x + u.y * gf.y;
  CompressibleRhs r;
  r.du = VectorField(-dealias(ax), -dealias(ay));
  r.df = -dealias(af) - (uxx + uyy);
  return r;
}

WaveRhs convected_wave_rhs(const WaveState& s, const Eos& eos) {
  if (!s.background) throw InputError("convected wave state has no background velocity");
  const VectorField u = s.background(s.t);
  const ScalarField c2 = sound_speed_sq(eos, s.f);
  const VectorField gf = grad(s.f);
  WaveRhs r;
  r.df = s.phi - directional(u, s.f);
  r.dphi = -directional(u, s.phi) + div(dealias(c2 * gf)) + gradient_contraction(u);
  return r;
}

EulerState step(const EulerState& s, double dt, Scheme) {
  require_step(dt, cfl_dt(s), s.t);
  auto at = [&](double a, const VectorField& k) {
    EulerState e{s.v, s.t + a * dt};
    e.v.axpy(a * dt, k);
    return e;
  };
  const VectorField k1 = incompressible_rhs(s);
  const VectorField k2 = incompressible_rhs(at(0.5, k1));
  const VectorField k3 = incompressible_rhs(at(0.5, k2));
  const VectorField k4 = incompressible_rhs(at(1.0, k3));
  EulerState out{s.v, s.t + dt};
  out.v.axpy(dt / 6.0, k1).axpy(dt / 3.0, k2).axpy(dt / 3.0, k3).axpy(dt / 6.0, k4);
  out.v = project_p(out.v);
  require_finite(out.v.x, "v.x", out.t);
  require_finite(out.v.y, "v.y", out.t);
  return out;
}

CompressibleState step(const CompressibleState& s, const Eos& eos, double dt, Scheme) {
  require_step(dt, cfl_dt(s, eos), s.t);
  auto at = [&](double a, const CompressibleRhs& k) {
    CompressibleState e{s.u, s.f, s.t + a * dt};
    e.u.axpy(a * dt, k.du);
    e.f.axpy(a * dt, k.df);
    return e;
  };
  const auto k1 = compressible_rhs(s, eos);
  const auto k2 = compressible_rhs(at(0.5, k1), eos);
  const auto k3 = compressible_rhs(at(0.5, k2), eos);
  const auto k4 = compressible_rhs(at(1.0, k3), eos);
  CompressibleState out{s.u, s.f, s.t + dt};
  out.u.axpy(dt / 6.0, k1.du).axpy(dt / 3.0, k2.du).axpy(dt / 3.0, k3.du).axpy(dt / 6.0, k4.du);
  out.f.axpy(dt / 6.0, k1.df).axpy(dt / 3.0, k2.df).axpy(dt / 3.0, k3.df).axpy(dt / 6.0, k4.df);
  require_finite(out.u.x, "u.x", out.t);
  require_finite(out.u.y, "u.y", out.t);
  require_finite(out.f, "f", out.t);
  return out;
}

WaveState step(const WaveState& s, const Eos& eos, double dt, Scheme) {
  require_step(dt, cfl_dt(s, eos), s.t);
  auto at = [&](double a, const WaveRhs& k) {
    WaveState e{s.f, s.phi, s.t + a * dt, s.background};
    e.f.axpy(a * dt, k.df);
    e.phi.axpy(a * dt, k.dphi);
    return e;
  };
  const auto k1 = convected_wave_rhs(s, eos);
  const auto k2 = convected_wave_rhs(at(0.5, k1), eos);
  const auto k3 = convected_wave_rhs(at(0.5, k2), eos);
  const auto k4 = convected_wave_rhs(at(1.0, k3), eos);
  WaveState out{s.f, s.phi, s.t + dt, s.background};
  out.f.axpy(dt / 6.0, k1.df).axpy(dt / 3.0, k2.df).axpy(dt / 3.0, k3.df).axpy(dt / 6.0, k4.df);
  out.phi.axpy(dt / 6.0, k1.dphi).axpy(dt / 3.0, k2.dphi).axpy(dt / 3.0, k3.dphi).axpy(dt / 6.0, k4.dphi);
  require_finite(out.f, "f", out.t);
  require_finite(out.phi, "phi", out.t);
  return out;
}

double min_spacing(const DomainSpec& d) { return std::min(d.dx(), d.dy()); }

double cfl_dt(const DomainSpec& d, double umax, double c2max, double cfl) {
  const double speed = umax + std::sqrt(std::max(c2max, 0.0));
  if (speed <= 0.0) return std::numeric_limits<double>::infinity();
  return cfl * min_spacing(d) / speed;
}

double cfl_dt(const EulerState& s, double cfl) { return cfl_dt(s.v.domain(), s.v.max_abs(), 0.0, cfl); }

double cfl_dt(const CompressibleState& s, const Eos& eos, double cfl) {
  return cfl_dt(s.u.domain(), s.u.max_abs(), max_c2(eos, s.f), cfl);
}

double cfl_dt(const WaveState& s, const Eos& eos, double cfl) {
  const double umax = s.background ? s.background(s.t).max_abs() : 0.0;
  return cfl_dt(s.f.domain(), umax, max_c2(eos, s.f), cfl);
}

double kinetic_energy(const VectorField& v) { return 0.5 * (integrate(v.x * v.x) + integrate(v.y * v.y)); }

double kinetic_energy(const CompressibleState& s) {
  const ScalarField rho = map(s.f, [](double f) { return std::exp(f); });
  return 0.5 * (integrate(rho * s.u.x * s.u.x) + integrate(rho * s.u.y * s.u.y));
}

double total_mass(const ScalarField& f) {
  return integrate(map(f, [](double x) { return std::exp(x); }));
}

ScalarField fdot_from_velocity(const VectorField& u) { return -div(u); }

TimeSeriesRow diagnostics_row(const EulerState& s, double dt) {
  TimeSeriesRow r;
  r.t = s.t;
  r.kinetic = kinetic_energy(s.v);
  r.mass = s.v.domain().area();
  r.div0 = sobolev_norm(div(s.v), {0});
  r.dt = dt;
  return r;
}

TimeSeriesRow diagnostics_row(const CompressibleState& s, double dt) {
  TimeSeriesRow r;
  r.t = s.t;
  r.kinetic = kinetic_energy(s);
  r.mass = total_mass(s.f);
  r.f4 = sobolev_norm(s.f, {4}, NormConvention::IntegerSum);
  const ScalarField fdot = fdot_from_velocity(s.u);
  r.fdot3 = sobolev_norm(fdot, {3}, NormConvention::IntegerSum);
  r.div0 = sobolev_norm(fdot, {0});
  r.dt = dt;
  return r;
}

void write_time_series_csv(const std::string& path, const std::vector<TimeSeriesRow>& rows) {
  std::ofstream os(path);
  if (!os) throw InputError("cannot open " + path + " for writing");
  os << "t,kinetic_energy,mass,f_H4,fdot_H3,div_L2,dt\n" << std::setprecision(17);
  for (const auto& r : rows)
    os << r.t << ',' << r.kinetic << ',' << r.mass << ',' << r.f4 << ',' << r.fdot3 << ',' << r.div0 << ','
       << r.dt << '\n';
}

int step_count(double span, double dt) {
  if (!(span >= 0.0) || !(dt > 0.0)) throw InputError("invalid time span or step");
  if (span == 0.0) return 0;
  return std::max(1, static_cast<int>(std::ceil(span / dt - 1e-9)));
}

namespace {

template <class State, class Stepper, class Limit>
std::vector<TimeSeriesRow> drive(State& s, const RunOptions& opt, double dt0, Stepper advance, Limit limit,
                                 const SnapshotCallback<State>& cb) {
  const double span = opt.t_final - s.t;
  const int n = step_count(span, dt0);
  const double dt = n > 0 ? span / n : 0.0;
  const int series_every = opt.series_every > 0 ? opt.series_every : std::max(1, n / 100);
  const double t0 = s.t;
  std::vector<TimeSeriesRow> rows;
  rows.push_back(diagnostics_row(s, dt));
  if (cb) cb(s, 0);
  for (int i = 1; i <= n; ++i) {
    const double lim = limit(s);
    if (dt > opt.cfl_tolerance * lim) {
      std::ostringstream os;
      os << "CFL violated at t=" << s.t << ": dt=" << dt << " > " << opt.cfl_tolerance << " * " << lim;
      throw CflError(os.str(), s.t);
    }
    s = advance(s, dt);
    if (i == n) s.t = opt.t_final;
    else s.t = t0 + i * dt;
    if (i % series_every == 0 || i == n) rows.push_back(diagnostics_row(s, dt));
    if (cb && ((opt.snapshot_every > 0 && i % opt.snapshot_every == 0) || i == n)) cb(s, i);
  }
  return rows;
}

}  // namespace

EulerRun run_incompressible(const EulerState& init, const RunOptions& opt, const SnapshotCallback<EulerState>& cb) {
  EulerState s{project_p(dealias(init.v)), init.t};
  const double dt0 = opt.dt ? *opt.dt : cfl_dt(s, opt.dt_safety);
  if (!std::isfinite(dt0)) {
    // zero velocity: nothing moves
    EulerRun r{s, {diagnostics_row(s, 0.0)}};
    r.final.t = opt.t_final;
    if (cb) cb(r.final, 0);
    return r;
  }
  auto rows = drive(
      s, opt, dt0, [](const EulerState& x, double dt) { return step(x, dt); },
      [&](const EulerState& x) { return cfl_dt(x, opt.dt_safety); }, cb);
  return {s, std::move(rows)};
}

CompressibleRun run_compressible(const CompressibleState& init, const Eos& eos, const RunOptions& opt,
                                 const SnapshotCallback<CompressibleState>& cb) {
  CompressibleState s{dealias(init.u), dealias(init.f), init.t};
  const double dt0 = opt.dt ? *opt.dt : cfl_dt(s, eos, opt.dt_safety);
  auto rows = drive(
      s, opt, dt0, [&](const CompressibleState& x, double dt) { return step(x, eos, dt); },
      [&](const CompressibleState& x) { return cfl_dt(x, eos, opt.dt_safety); }, cb);
  return {s, std::move(rows)};
}

}  // namespace lowmach
