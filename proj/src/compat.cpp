#include <algorithm>
#include <cmath>
#include <sstream>

#include "lowmach/analysis.hpp"

namespace lowmach {

namespace {

using Traces = WallData;

Traces trace(const ScalarField& h) { return {trace_values(h, Wall::Y0), trace_values(h, Wall::Y1)}; }

Traces operator*(const Traces& a, const Traces& b) {
  Traces r = a;
  for (std::size_t i = 0; i < r.y0.size(); ++i) {
    r.y0[i] *= b.y0[i];
    r.y1[i] *= b.y1[i];
  }
  return r;
}

Traces operator+(const Traces& a, const Traces& b) {
  Traces r = a;
  for (std::size_t i = 0; i < r.y0.size(); ++i) {
    r.y0[i] += b.y0[i];
    r.y1[i] += b.y1[i];
  }
  return r;
}

Traces scaled(double s, Traces a) {
  for (double& v : a.y0) v *= s;
  for (double& v : a.y1) v *= s;
  return a;
}

Traces divided(const Traces& a, const Traces& b) {
  Traces r = a;
  for (std::size_t i = 0; i < r.y0.size(); ++i) {
    r.y0[i] /= b.y0[i];
    r.y1[i] /= b.y1[i];
  }
  return r;
}

double wall_norm(const Traces& t, double lx, double s) {
  return std::hypot(boundary_norm(t.y0, lx, {s}), boundary_norm(t.y1, lx, {s}));
}

struct Inputs {
  VectorField u;
  ScalarField f;
};

Inputs common_grid(const VectorField& u, const ScalarField& f) {
  const bool general = u.is_general() || f.parity() == Parity::General;
  if (!general) return {u, f};
  return {u.is_general() ? u : to_general(u), f.parity() == Parity::General ? f : to_general(f)};
}

// General field sum_k c_k(x) y^k, k = 1..4, from per-wall coefficient rows.
ScalarField wall_polynomial(const DomainSpec& d, const std::vector<std::vector<double>>& c) {
  ScalarField r(d, Parity::General);
  for (int j = 0; j < r.rows(); ++j) {
    const double y = r.y(j);
    for (int i = 0; i < d.nx; ++i) {
      double v = 0.0, p = 1.0;
      for (const auto& ck : c) {
        p *= y;
        v += ck[i] * p;
      }
      r(i, j) = v;
    }
  }
  return r;
}

// h_y(0) = a, h_y(1) = b, h_yyy = 0 at both walls.
ScalarField slope_profile(const DomainSpec& d, const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> c1(a), c2(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c2[i] = 0.5 * (b[i] - a[i]);
  return wall_polynomial(d, {c1, c2});
}

// h_y = 0 at both walls, h_yyy(0) = a, h_yyy(1) = b.
ScalarField third_derivative_profile(const DomainSpec& d, const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  std::vector<double> c1(n, 0.0), c2(n), c3(n), c4(n);
  for (std::size_t i = 0; i < n; ++i) {
    c3[i] = a[i] / 6.0;
    c4[i] = (b[i] - a[i]) / 24.0;
    c2[i] = -(3.0 * c3[i] + 4.0 * c4[i]) / 2.0;
  }
  return wall_polynomial(d, {c1, c2, c3, c4});
}

ScalarField remove_mean(const ScalarField& f) { return f + (-mean(f)); }

}  // namespace

double CompatReport::scaled() const {
  auto q = [](double a, double s) { return s > 0.0 ? a / s : (a > 0.0 ? INFINITY : 0.0); };
  return std::max({q(phi1, scale1), q(phi2, scale2), q(phi3, scale3)});
}

CompatTraces compat_traces(const VectorField& u0, const ScalarField& f0, const Eos& eos) {
  const DomainSpec& d = u0.domain();
  CompatTraces r;
  if (!d.is_channel()) {
    r.phi1 = r.phi2 = r.phi3 = WallData::zero(d.nx);
    return r;
  }
  const auto [u, f] = common_grid(u0, f0);
  const ScalarField c2 = sound_speed_sq(eos, f);
  const ScalarField dc2 = sound_speed_sq_slope(eos, f);
  const ScalarField d2c2 = map(f, [&](double x) {
    const double rho = std::exp(x);
    return eos.derivative(rho, 3) * rho * rho + eos.derivative(rho, 2) * rho;
  });
  const VectorField gf = grad(f);
  const VectorField adv = covariant(u, u);
  const VectorField force = c2 * gf;
  // time derivatives at t = 0 from the equations of motion
  const VectorField a = -(adv + force);                   // u_t
  const ScalarField b = -directional(u, f) - div(u);      // f_t
  const ScalarField ftt = -directional(a, f) - directional(u, b) - div(a);
  const ScalarField ct = dc2 * b;
  const ScalarField ctt = d2c2 * b * b + dc2 * ftt;

  const Traces nf = WallData::normal_derivative(f), nb = WallData::normal_derivative(b),
               nftt = WallData::normal_derivative(ftt);
  const Traces tc2 = trace(c2);

  r.phi1 = WallData::normal_component(adv) + WallData::normal_component(force);
  r.phi2 = trace(dc2 * b) * nf + tc2 * nb;
  r.phi3 = trace(ctt) * nf + scaled(2.0, trace(ct) * nb) + tc2 * nftt;

  // data scales: the size each phi_i takes for generic data of the same norms
  const double cmax = c2.max_abs(), f4 = sobolev_norm(f, {4}), u3 = sobolev_norm(u, {3}),
               d3 = sobolev_norm(div(u), {3});
  r.scale1 = cmax * f4 + u3 * u3;
  r.scale2 = cmax * (d3 + u3 * f4);
  r.scale3 = cmax * (cmax * f4 + u3 * u3 + u3 * d3);
  return r;
}

namespace {

CompatReport report_of(const CompatTraces& t, double lx) {
  CompatReport r;
  r.phi1 = wall_norm(t.phi1, lx, 2.5);
  r.phi2 = wall_norm(t.phi2, lx, 1.5);
  r.phi3 = wall_norm(t.phi3, lx, 0.5);
  r.scale1 = t.scale1;
  r.scale2 = t.scale2;
  r.scale3 = t.scale3;
  return r;
}


// c2 d_nu lap dg = phi2 with d_nu dg = 0, so the normal velocity stays zero.
void update_g(VectorField& u, const ScalarField& f, const CompatTraces& tr, const Eos& eos) {
  const DomainSpec& d = u.domain();
  const Traces a2 = divided(tr.phi2, trace(sound_speed_sq(eos, f)));
  std::vector<double> s0(d.nx), s1(d.nx);
  for (int i = 0; i < d.nx; ++i) {
    s0[i] = -a2.y0[i];  // d_nu = -d_y at y = 0
    s1[i] = a2.y1[i];
  }
  u += grad(third_derivative_profile(d, s0, s1));
}

// c2 d_nu df = -phi1 and c2^2 d_nu lap df = -phi3.
void update_f(ScalarField& f, const CompatTraces& tr, const Eos& eos) {
  const DomainSpec& d = f.domain();
  const Traces tc2 = trace(sound_speed_sq(eos, f));
  const Traces a1 = divided(scaled(-1.0, tr.phi1), tc2);
  const Traces a3 = divided(scaled(-1.0, tr.phi3), tc2 * tc2);
  std::vector<double> s0(d.nx), s1(d.nx);
  for (int i = 0; i < d.nx; ++i) {
    s0[i] = -a1.y0[i];
    s1[i] = a1.y1[i];
  }
  const ScalarField fa = slope_profile(d, s0, s1);
  const Traces left = WallData::normal_derivative(laplacian(fa));
  for (int i = 0; i < d.nx; ++i) {
    s0[i] = -(a3.y0[i] - left.y0[i]);
    s1[i] = a3.y1[i] - left.y1[i];
  }
  f += remove_mean(fa + third_derivative_profile(d, s0, s1));
}

}  // namespace

CompatReport compat_residuals(const VectorField& u0, const ScalarField& f0, const Eos& eos) {
  return report_of(compat_traces(u0, f0, eos), u0.domain().lx);
}

CompatProjection compat_project(const VectorField& u0, const ScalarField& f0, const Eos& eos,
                                const CompatOptions& opt) {
  const DomainSpec& d = u0.domain();
  CompatProjection out;
  if (!d.is_channel()) {
    out.u = u0;
    out.f = f0;
    out.report.history.push_back({});
    return out;
  }
  auto [u, f] = common_grid(u0, f0);
  const CompatTraces initial = compat_traces(u, f, eos);
  double prev = 0.0;
  int rising = 0;
  for (int it = 0;; ++it) {
    CompatTraces tr = it == 0 ? initial : compat_traces(u, f, eos);
    tr.scale1 = initial.scale1;
    tr.scale2 = initial.scale2;
    tr.scale3 = initial.scale3;
    CompatReport rep = report_of(tr, d.lx);
    CompatIteration row{it, rep.phi1, rep.phi2, rep.phi3, rep.scaled(), it > 0 && prev > 0.0 ? rep.scaled() / prev : 0.0};
    out.report.history.push_back(row);
    if (it == 1) {
      // worst per-condition reduction over the conditions that started violated
      const CompatIteration& first = out.report.history.front();
      const double before[3] = {first.phi1, first.phi2, first.phi3};
      const double after[3] = {row.phi1, row.phi2, row.phi3};
      const double scale[3] = {tr.scale1, tr.scale2, tr.scale3};
      for (int i = 0; i < 3; ++i)
        if (before[i] > opt.tol * scale[i]) out.contraction = std::max(out.contraction, after[i] / before[i]);
    }
    const double now = row.scaled;
    if (now <= opt.tol) {
      const auto hist = std::move(out.report.history);
      out.report = rep;
      out.report.history = hist;
      out.iterations = it;
      break;
    }
    rising = (it > 0 && row.ratio >= 1.0) ? rising + 1 : 0;
    if (rising >= 2 || it >= opt.max_iter) {
      std::ostringstream os;
      os << "compatibility projection does not contract: scaled residual " << now << " after " << it
         << " iterations (ratio " << row.ratio << ")";
      throw DivergenceError(os.str(), row.ratio);
    }
    prev = now;

    // f from phi_1 and phi_3, g from phi_2, then f again for the phi_3 change caused by g
    update_f(f, tr, eos);
    update_g(u, f, compat_traces(u, f, eos), eos);
    update_f(f, compat_traces(u, f, eos), eos);
  }
  out.u = std::move(u);
  out.f = std::move(f);
  return out;
}

}  // namespace lowmach
