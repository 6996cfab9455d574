#include <cmath>
#include <sstream>

#include "lowmach/analysis.hpp"

namespace lowmach {

CompressibleState BaseTrajectory::at(double t, const Eos&) const {
  if (states.empty() || !(dt > 0.0)) throw InputError("empty base trajectory");
  const double s = (t - t0) / dt;
  const double last = static_cast<double>(states.size() - 1);
  if (s < -1e-9 || s > last + 1e-9) {
    std::ostringstream os;
    os << "time " << t << " outside the stored base trajectory [" << t0 << ", " << t_end() << "]";
    throw InputError(os.str());
  }
  const double r = std::round(s);
  if (std::abs(s - r) <= 1e-9) return states[static_cast<std::size_t>(r)];
  const auto i = static_cast<std::size_t>(std::floor(s));
  const double th = s - static_cast<double>(i);
  // cubic Hermite basis
  const double h00 = (1 + 2 * th) * (1 - th) * (1 - th), h10 = th * (1 - th) * (1 - th);
  const double h01 = th * th * (3 - 2 * th), h11 = th * th * (th - 1);
  const auto& a = states[i];
  const auto& b = states[i + 1];
  CompressibleState out{h00 * a.u, h00 * a.f, t};
  out.u.axpy(h01, b.u).axpy(h10 * dt, rates[i].du).axpy(h11 * dt, rates[i + 1].du);
  out.f.axpy(h01, b.f).axpy(h10 * dt, rates[i].df).axpy(h11 * dt, rates[i + 1].df);
  return out;
}

BaseTrajectory record_trajectory(const CompressibleState& init, const Eos& eos, double t_final, const RunOptions& opt) {
  RunOptions o = opt;
  o.t_final = t_final;
  o.snapshot_every = 1;
  BaseTrajectory b;
  b.t0 = init.t;
  run_compressible(init, eos, o, [&](const CompressibleState& s, int) {
    b.states.push_back(s);
    b.rates.push_back(compressible_rhs(s, eos));
  });
  if (b.states.size() < 2) throw InputError("base trajectory needs at least one step");
  b.dt = (t_final - b.t0) / static_cast<double>(b.states.size() - 1);
  return b;
}

SensitivityRhs linearized_rhs(const CompressibleState& s, const SensitivityState& v, const Eos& eos) {
  const ScalarField c2 = sound_speed_sq(eos, s.f);
  const ScalarField dc2h = sound_speed_sq_slope(eos, s.f) * v.h;
  const VectorField gf = grad(s.f), gh = grad(v.h);
  const VectorField a = covariant(s.u, v.z) + covariant(v.z, s.u);
  SensitivityRhs r;
  r.dz = VectorField(-dealias(a.x + c2 * gh.x + dc2h * gf.x), -dealias(a.y + c2 * gh.y + dc2h * gf.y));
  r.dh = -dealias(directional(s.u, v.h) + directional(v.z, s.f)) - div(v.z);
  return r;
}

std::vector<SensitivityState> linearized_solve(const BaseTrajectory& base, const Eos& eos, const VectorField& z0,
                                               const ScalarField& h0, int every) {
  if (base.states.size() < 2) throw InputError("base trajectory has no steps");
  if (base.rates.size() != base.states.size()) throw InputError("base trajectory has a gap: rates missing");
  if (every < 1) every = 1;
  const double dt = base.dt;
  SensitivityState v{dealias(z0), dealias(h0), base.t0};
  std::vector<SensitivityState> out{v};
  const int n = static_cast<int>(base.states.size()) - 1;
  for (int i = 0; i < n; ++i) {
    const CompressibleState& s0 = base.states[i];
    const CompressibleState sm = base.at(base.t0 + (i + 0.5) * dt, eos);
    const CompressibleState& s1 = base.states[i + 1];
    auto stage = [&](double c, const SensitivityRhs& k) {
      SensitivityState w{v.z, v.h, v.t + c * dt};
      w.z.axpy(c * dt, k.dz);
      w.h.axpy(c * dt, k.dh);
      return w;
    };
    const auto k1 = linearized_rhs(s0, v, eos);
    const auto k2 = linearized_rhs(sm, stage(0.5, k1), eos);
    const auto k3 = linearized_rhs(sm, stage(0.5, k2), eos);
    const auto k4 = linearized_rhs(s1, stage(1.0, k3), eos);
    v.z.axpy(dt / 6, k1.dz).axpy(dt / 3, k2.dz).axpy(dt / 3, k3.dz).axpy(dt / 6, k4.dz);
    v.h.axpy(dt / 6, k1.dh).axpy(dt / 3, k2.dh).axpy(dt / 3, k3.dh).axpy(dt / 6, k4.dh);
    v.t = base.t0 + (i + 1) * dt;
    if (!v.z.all_finite() || !v.h.all_finite()) throw NonFiniteError("non-finite linearized state", "z");
    if ((i + 1) % every == 0 || i + 1 == n) out.push_back(v);
  }
  return out;
}

namespace {

ScalarField exp_field(const ScalarField& f) {
  return map(f, [](double x) { return std::exp(x); });
}

double probe_dt(const VectorField& u0, const ScalarField& f0, const Eos& eos, const ProbeOptions& opt) {
  if (opt.dt) return *opt.dt;
  const double dt = 0.5 * cfl_dt(CompressibleState{u0, f0, 0.0}, eos);
  if (opt.t <= 0.0 || !std::isfinite(dt)) return dt;
  return opt.t / step_count(opt.t, dt);
}

}  // namespace

ProbeDerivative central_difference(const VectorField& u0, const ScalarField& f0, const VectorField& z0,
                                   const ScalarField& h0, const Eos& eos, double lambda, const ProbeOptions& opt) {
  if (!(lambda > 0.0)) throw InputError("lambda must be positive");
  LagrangianOptions lo;
  lo.dt = probe_dt(u0, f0, eos, opt);
  lo.interpolation = opt.interpolation;
  const auto plus = psi_t(u0 + lambda * z0, exp_field(f0 + lambda * h0), eos, opt.t, lo);
  const auto minus = psi_t(u0 - lambda * z0, exp_field(f0 - lambda * h0), eos, opt.t, lo);
  const double s = 0.5 / lambda;
  return {s * (plus.flow.displacement - minus.flow.displacement), s * (plus.flow.velocity - minus.flow.velocity),
          s * (plus.state.u - minus.state.u)};
}

ProbeReport derivative_probe(const VectorField& u0, const ScalarField& f0, const VectorField& z0,
                             const ScalarField& h0, const Eos& eos, const ProbeOptions& opt) {
  if (opt.lambdas.size() < 2) throw InputError("derivative probe needs at least two lambda values");
  ProbeOptions o = opt;
  o.dt = probe_dt(u0, f0, eos, opt);
  ProbeReport rep;
  rep.t = opt.t;
  rep.k = eos.k;
  rep.dt = *o.dt;
  std::vector<ProbeDerivative> ds;
  for (double l : opt.lambdas) ds.push_back(central_difference(u0, f0, z0, h0, eos, l, o));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    ProbeRow row;
    row.lambda = opt.lambdas[i];
    row.d_norm_h3 = lagrangian_norm(ds[i].displacement, ds[i].velocity, {3});
    if (i + 1 < ds.size()) {
      const VectorField dd = ds[i].displacement - ds[i + 1].displacement;
      const VectorField dv = ds[i].velocity - ds[i + 1].velocity;
      const VectorField de = ds[i].eulerian - ds[i + 1].eulerian;
      row.lagrangian_h3 = lagrangian_norm(dd, dv, {3});
      row.lagrangian_h2 = lagrangian_norm(dd, dv, {2});
      row.eulerian_h3 = sobolev_norm(de, {3}, NormConvention::IntegerSum);
      row.eulerian_h2 = sobolev_norm(de, {2}, NormConvention::IntegerSum);
    }
    rep.rows.push_back(row);
  }
  for (std::size_t i = 0; i + 2 < rep.rows.size(); ++i) {
    const auto& a = rep.rows[i];
    const auto& b = rep.rows[i + 1];
    rep.lagrangian_ratios.push_back(b.lagrangian_h3 > 0.0 ? a.lagrangian_h3 / b.lagrangian_h3 : 0.0);
    rep.eulerian_ratios.push_back(b.eulerian_h3 > 0.0 ? a.eulerian_h3 / b.eulerian_h3 : 0.0);
  }
  return rep;
}

}  // namespace lowmach
