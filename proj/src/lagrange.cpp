#include "lowmach/lagrange.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "lowmach/elliptic.hpp"
#include "spectral.hpp"

namespace lowmach {

using detail::cplx;
using detail::Spectrum;

std::string to_string(Interpolation i) { return i == Interpolation::Exact ? "exact" : "fast"; }

Interpolation interpolation_from_string(const std::string& s) {
  if (s == "exact") return Interpolation::Exact;
  if (s == "fast") return Interpolation::Fast;
  throw ConfigError("unknown interpolation '" + s + "' (expected exact or fast)");
}

// ---- sampling ------------------------------------------------------------------

namespace {

constexpr int kUpsample = 4;
constexpr int kStencil = 10;

// Lagrange weights for nodes at offsets -(S/2-1) .. S/2 evaluated at t in [0, 1).
struct StencilWeights {
  std::array<double, kStencil> denom{};
  StencilWeights() {
    for (int j = 0; j < kStencil; ++j) {
      double d = 1.0;
      for (int m = 0; m < kStencil; ++m)
        if (m != j) d *= static_cast<double>(j - m);
      denom[j] = d;
    }
  }
  void eval(double t, double* w) const {
    for (int j = 0; j < kStencil; ++j) {
      double p = 1.0;
      for (int m = 0; m < kStencil; ++m)
        if (m != j) p *= t - (m - (kStencil / 2 - 1));
      w[j] = p / denom[j];
    }
  }
};

const StencilWeights& stencil() {
  static const StencilWeights s;
  return s;
}

std::vector<double> upsampled_values(const Spectrum& s, int NX, int MY) {
  Spectrum big;
  big.nx = NX;
  big.my = MY;
  big.lx = s.lx;
  big.lyw = s.lyw;
  big.c.assign(static_cast<std::size_t>(MY) * big.nxh(), cplx(0.0, 0.0));
  for (int n = 0; n < s.my; ++n) {
    if (n == s.my / 2) continue;
    const int sn = s.signed_n(n);
    const int bn = sn >= 0 ? sn : sn + MY;
    for (int m = 0; m < s.nxh(); ++m) {
      if (2 * m == s.nx) continue;
      big.at(bn, m) = s.at(n, m);
    }
  }
  std::vector<double> out(static_cast<std::size_t>(MY) * NX);
  detail::c2r_2d(MY, NX, big.c.data(), out.data());
  return out;
}

}  // namespace

struct FieldSampler::Impl {
  Interpolation mode = Interpolation::Exact;
  std::optional<PointEvaluator> exact;
  int NX = 0, MY = 0;
  double hx = 1.0, hy = 1.0;
  std::vector<double> v, gx, gy;

  double interp(const std::vector<double>& g, double x, double y) const {
    const double sx = x / hx, sy = y / hy;
    const double fx = std::floor(sx), fy = std::floor(sy);
    double wx[kStencil], wy[kStencil];
    stencil().eval(sx - fx, wx);
    stencil().eval(sy - fy, wy);
    const long ix0 = static_cast<long>(fx) - (kStencil / 2 - 1);
    const long iy0 = static_cast<long>(fy) - (kStencil / 2 - 1);
    int cols[kStencil];
    for (int a = 0; a < kStencil; ++a) cols[a] = static_cast<int>(((ix0 + a) % NX + NX) % NX);
    double acc = 0.0;
    for (int b = 0; b < kStencil; ++b) {
      const int row = static_cast<int>(((iy0 + b) % MY + MY) % MY);
      const double* r = g.data() + static_cast<std::size_t>(row) * NX;
      double sr = 0.0;
      for (int a = 0; a < kStencil; ++a) sr += wx[a] * r[cols[a]];
      acc += wy[b] * sr;
    }
    return acc;
  }
};

FieldSampler::FieldSampler(const ScalarField& f, Interpolation mode, bool with_gradient)
    : impl_(std::make_unique<Impl>()) {
  impl_->mode = mode;
  if (mode == Interpolation::Exact) {
    impl_->exact.emplace(f);
    return;
  }
  const Spectrum s = detail::forward(f);
  auto& I = *impl_;
  I.NX = kUpsample * s.nx;
  I.MY = kUpsample * s.my;
  I.hx = s.lx / I.NX;
  I.hy = s.lyw / I.MY;
  I.v = upsampled_values(s, I.NX, I.MY);
  if (with_gradient) {
    I.gx = upsampled_values(detail::deriv_x(s), I.NX, I.MY);
    I.gy = upsampled_values(detail::deriv_y(s), I.NX, I.MY);
  }
}

FieldSampler::~FieldSampler() = default;
FieldSampler::FieldSampler(FieldSampler&&) noexcept = default;
FieldSampler& FieldSampler::operator=(FieldSampler&&) noexcept = default;

double FieldSampler::value(double x, double y) const {
  if (impl_->exact) return impl_->exact->value(x, y);
  return impl_->interp(impl_->v, x, y);
}

void FieldSampler::value_and_gradient(double x, double y, double& v, double& gx, double& gy) const {
  if (impl_->exact) {
    impl_->exact->value_and_gradient(x, y, v, gx, gy);
    return;
  }
  if (impl_->gx.empty()) throw InputError("sampler was built without gradient tables");
  v = impl_->interp(impl_->v, x, y);
  gx = impl_->interp(impl_->gx, x, y);
  gy = impl_->interp(impl_->gy, x, y);
}

// ---- flow maps -------------------------------------------------------------------

namespace {

void zero_walls(ScalarField& f) {
  if (f.parity() != Parity::OddInY) return;
  for (int i = 0; i < f.nx(); ++i) {
    f(i, 0) = 0.0;
    f(i, f.rows() - 1) = 0.0;
  }
}

ScalarField empty_like(const ScalarField& f) { return ScalarField(f.domain(), f.parity()); }

}  // namespace

FlowMap FlowMap::identity(const DomainSpec& d, double t0) {
  FlowMap m;
  m.displacement = VectorField::zero(d);
  m.velocity = VectorField::zero(d);
  m.jacobian = ScalarField::constant(d, d.scalar_parity(), 1.0);
  m.t = t0;
  return m;
}

FlowMap FlowMap::identity(const VectorField& u0, double t0) {
  FlowMap m = identity(u0.domain(), t0);
  if (u0.is_general()) throw ParityError("flow maps need Fourier (non-General) velocities");
  m.velocity = u0;
  return m;
}

double FlowMap::pos_x(int i, int j) const { return domain().x(i) + displacement.x(i, j); }

double FlowMap::pos_y(int i, int j) const {
  return displacement.y.y(j) + displacement.y(i, j);
}

ScalarField jacobian_of(const VectorField& d) {
  const ScalarField a = dx(d.x), b = dy(d.x), c = dx(d.y), e = dy(d.y);
  return (a + 1.0) * (e + 1.0) - b * c;
}

void refresh_jacobian(FlowMap& flow) {
  flow.jacobian = jacobian_of(flow.displacement);
  const auto& v = flow.jacobian.values();
  for (std::size_t q = 0; q < v.size(); ++q)
    if (!(v[q] > 0.0)) {
      std::ostringstream os;
      os << "flow map degenerate at t=" << flow.t << ": J=" << v[q] << " at node " << q;
      throw DegenerateMapError(os.str(), static_cast<int>(q));
    }
}

VectorField sample_at_markers(const VectorField& u, const VectorField& disp, Interpolation mode) {
  const DomainSpec& d = disp.domain();
  const FieldSampler sx(u.x, mode), sy(u.y, mode);
  ScalarField ox = empty_like(u.x), oy = empty_like(u.y);
  const int rows = disp.x.rows();
  for (int j = 0; j < rows; ++j) {
    const double y0 = disp.y.y(j);
    for (int i = 0; i < d.nx; ++i) {
      const double X = d.x(i) + disp.x(i, j);
      const double Y = y0 + disp.y(i, j);
      ox(i, j) = sx.value(X, Y);
      oy(i, j) = sy.value(X, Y);
    }
  }
  zero_walls(ox);
  zero_walls(oy);
  return {std::move(ox), std::move(oy)};
}

FlowMap flow_advance(const FlowMap& flow, const VelocityProvider& u, double dt, Interpolation mode) {
  const double t = flow.t;
  const VectorField& d0 = flow.displacement;
  const VectorField m1 = sample_at_markers(u(t), d0, mode);
  const VectorField m2 = sample_at_markers(u(t + 0.5 * dt), d0 + (0.5 * dt) * m1, mode);
  const VectorField m3 = sample_at_markers(u(t + 0.5 * dt), d0 + (0.5 * dt) * m2, mode);
  const VectorField m4 = sample_at_markers(u(t + dt), d0 + dt * m3, mode);
  FlowMap out;
  out.displacement = d0;
  out.displacement.axpy(dt / 6.0, m1).axpy(dt / 3.0, m2).axpy(dt / 3.0, m3).axpy(dt / 6.0, m4);
  out.t = t + dt;
  refresh_jacobian(out);
  out.velocity = sample_at_markers(u(out.t), out.displacement, mode);
  return out;
}

InverseMap invert(const FlowMap& flow, Interpolation mode, double tol, int max_iter) {
  const DomainSpec& d = flow.domain();
  const VectorField& disp = flow.displacement;
  const FieldSampler sx(disp.x, mode, true), sy(disp.y, mode, true);
  const int rows = disp.x.rows();
  const bool channel = d.is_channel();
  InverseMap inv;
  inv.x.resize(static_cast<std::size_t>(rows) * d.nx);
  inv.y.resize(inv.x.size());
  for (int j = 0; j < rows; ++j) {
    const double yn = disp.y.y(j);
    for (int i = 0; i < d.nx; ++i) {
      const double xn = d.x(i);
      double X = xn - disp.x(i, j), Y = yn - disp.y(i, j);
      bool ok = false;
      double res = 0.0;
      int it = 0;
      for (; it < max_iter; ++it) {
        double ax, axx, axy, ay, ayx, ayy;
        sx.value_and_gradient(X, Y, ax, axx, axy);
        sy.value_and_gradient(X, Y, ay, ayx, ayy);
        const double fx = X + ax - xn, fy = Y + ay - yn;
        res = std::hypot(fx, fy);
        if (res <= tol) {
          ok = true;
          break;
        }
        const double a = 1.0 + axx, b = axy, c = ayx, e = 1.0 + ayy;
        const double det = a * e - b * c;
        if (!(det > 0.0)) break;
        X -= (e * fx - b * fy) / det;
        Y -= (a * fy - c * fx) / det;
        if (channel) Y = std::clamp(Y, 0.0, 1.0);
      }
      if (!ok) {
        std::ostringstream os;
        os << "backward characteristic solve failed at node (" << i << "," << j << "), residual " << res;
        throw DegenerateMapError(os.str(), j * d.nx + i);
      }
      const std::size_t q = static_cast<std::size_t>(j) * d.nx + i;
      inv.x[q] = X;
      inv.y[q] = Y;
      inv.max_iterations = std::max(inv.max_iterations, it);
      inv.max_residual = std::max(inv.max_residual, res);
    }
  }
  return inv;
}

ScalarField pullback_inverse(const ScalarField& f, const FlowMap& flow, const InverseMap& inv, Interpolation mode) {
  const FieldSampler s(f, mode);
  ScalarField out = empty_like(f);
  const int nx = flow.domain().nx;
  for (int j = 0; j < f.rows(); ++j)
    for (int i = 0; i < nx; ++i) {
      const std::size_t q = static_cast<std::size_t>(j) * nx + i;
      out(i, j) = s.value(inv.x[q], inv.y[q]);
    }
  zero_walls(out);
  return out;
}

ScalarField pullback(const ScalarField& f, const FlowMap& flow, PullbackDirection dir, Interpolation mode) {
  if (dir == PullbackDirection::WithZetaInverse) return pullback_inverse(f, flow, invert(flow, mode), mode);
  const FieldSampler s(f, mode);
  ScalarField out = empty_like(f);
  const int nx = flow.domain().nx;
  for (int j = 0; j < f.rows(); ++j)
    for (int i = 0; i < nx; ++i) out(i, j) = s.value(flow.pos_x(i, j), flow.pos_y(i, j));
  zero_walls(out);
  return out;
}

VectorField pullback(const VectorField& u, const FlowMap& flow, PullbackDirection dir, Interpolation mode) {
  if (dir == PullbackDirection::WithZeta) return sample_at_markers(u, flow.displacement, mode);
  const InverseMap inv = invert(flow, mode);
  return {pullback_inverse(u.x, flow, inv, mode), pullback_inverse(u.y, flow, inv, mode)};
}

ScalarField log_density_change(const FlowMap& flow, const InverseMap& inv, Interpolation mode) {
  const ScalarField logj = map(flow.jacobian, [](double j) { return std::log(j); });
  return -pullback_inverse(logj, flow, inv, mode);
}

ScalarField density_from_jacobian(const FlowMap& flow, const ScalarField& f0, Interpolation mode) {
  const InverseMap inv = invert(flow, mode);
  return pullback_inverse(f0, flow, inv, mode) + log_density_change(flow, inv, mode);
}

ZROperators zrz_from_eulerian(const FlowMap& flow, const VectorField& a, Interpolation mode) {
  const Helmholtz h = helmholtz_decompose(a);
  const VectorField z = project_q(covariant(a, h.p));
  const VectorField r = project_p(covariant(a, h.q));
  ZROperators out;
  out.Z = sample_at_markers(z, flow.displacement, mode);
  out.R = sample_at_markers(r, flow.displacement, mode);
  out.Ztilde = out.Z - out.R;
  return out;
}

ZROperators zrz_operators(const FlowMap& flow, const VectorField& alpha, Interpolation mode) {
  const VectorField a = pullback(alpha, flow, PullbackDirection::WithZetaInverse, mode);
  return zrz_from_eulerian(flow, a, mode);
}

// ---- coupled Lagrangian march ------------------------------------------------------

LagrangianPair coupled_step(const LagrangianPair& p, const Eos& eos, double dt, Interpolation mode,
                            bool need_velocity) {
  const CompressibleState& s = p.state;
  const VectorField& d0 = p.flow.displacement;
  auto stage = [&](double a, const CompressibleRhs& k) {
    CompressibleState e{s.u, s.f, s.t + a * dt};
    e.u.axpy(a * dt, k.du);
    e.f.axpy(a * dt, k.df);
    return e;
  };
  const auto k1 = compressible_rhs(s, eos);
  const VectorField m1 = sample_at_markers(s.u, d0, mode);
  const auto s2 = stage(0.5, k1);
  const auto k2 = compressible_rhs(s2, eos);
  const VectorField m2 = sample_at_markers(s2.u, d0 + (0.5 * dt) * m1, mode);
  const auto s3 = stage(0.5, k2);
  const auto k3 = compressible_rhs(s3, eos);
  const VectorField m3 = sample_at_markers(s3.u, d0 + (0.5 * dt) * m2, mode);
  const auto s4 = stage(1.0, k3);
  const auto k4 = compressible_rhs(s4, eos);
  const VectorField m4 = sample_at_markers(s4.u, d0 + dt * m3, mode);

  LagrangianPair out;
  out.state = s;
  out.state.t = s.t + dt;
  out.state.u.axpy(dt / 6.0, k1.du).axpy(dt / 3.0, k2.du).axpy(dt / 3.0, k3.du).axpy(dt / 6.0, k4.du);
  out.state.f.axpy(dt / 6.0, k1.df).axpy(dt / 3.0, k2.df).axpy(dt / 3.0, k3.df).axpy(dt / 6.0, k4.df);
  if (!out.state.u.all_finite() || !out.state.f.all_finite())
    throw NonFiniteError("non-finite values in the compressible state", out.state.f.all_finite() ? "u" : "f");
  out.flow.displacement = d0;
  out.flow.displacement.axpy(dt / 6.0, m1).axpy(dt / 3.0, m2).axpy(dt / 3.0, m3).axpy(dt / 6.0, m4);
  out.flow.t = out.state.t;
  refresh_jacobian(out.flow);
  out.flow.velocity = need_velocity ? sample_at_markers(out.state.u, out.flow.displacement, mode)
                                    : VectorField::zero(d0.domain());
  return out;
}

LagrangianPair psi_t(const VectorField& u0, const ScalarField& rho0, const Eos& eos, double t,
                     const LagrangianOptions& opt, const LagrangianCallback& cb) {
  if (rho0.min() <= 0.0) throw InputError("initial density must be positive");
  LagrangianPair p;
  p.state = CompressibleState{u0, map(rho0, [](double r) { return std::log(r); }), 0.0};
  p.flow = FlowMap::identity(u0);
  if (cb) cb(p.state, p.flow, 0);
  if (t <= 0.0) return p;
  const double dt0 = opt.dt ? *opt.dt : cfl_dt(p.state, eos, opt.dt_safety);
  const int n = std::isfinite(dt0) ? step_count(t, dt0) : 1;
  const double dt = t / n;
  for (int i = 1; i <= n; ++i) {
    const bool out = i == n || (opt.snapshot_every > 0 && i % opt.snapshot_every == 0);
    if (dt > 2.0 * cfl_dt(p.state, eos)) {
      std::ostringstream os;
      os << "CFL violated at t=" << p.state.t;
      throw CflError(os.str(), p.state.t);
    }
    p = coupled_step(p, eos, dt, opt.interpolation, out);
    if (i == n) {
      p.state.t = t;
      p.flow.t = t;
    }
    if (cb && out) cb(p.state, p.flow, i);
  }
  return p;
}

double lagrangian_norm(const VectorField& displacement, const VectorField& velocity, SobolevIndex s) {
  const double a = sobolev_norm(displacement, s, NormConvention::IntegerSum);
  const double b = sobolev_norm(velocity, s, NormConvention::IntegerSum);
  return std::sqrt(a * a + b * b);
}

// ---- successive approximations ---------------------------------------------------

namespace {

struct SeqState {
  CompressibleState ex;
  std::vector<VectorField> w;    // 0..n
  std::vector<ScalarField> f;    // 1..n (index 0 unused)
  std::vector<ScalarField> phi;  // 1..n
  std::vector<VectorField> disp; // markers, 0..n when tracked
  double t = 0.0;
};

struct SeqRhs {
  CompressibleRhs ex;
  std::vector<VectorField> dw;
  std::vector<ScalarField> df, dphi;
  std::vector<VectorField> ddisp;
};

VectorField gradient_part(const ScalarField& phi) { return -grad(inverse_laplacian(phi)); }

std::vector<VectorField> velocities(const SeqState& s) {
  std::vector<VectorField> u(s.w.size());
  u[0] = s.w[0];
  for (std::size_t n = 1; n < s.w.size(); ++n) u[n] = s.w[n] + gradient_part(s.phi[n]);
  return u;
}

SeqRhs seq_rhs(const SeqState& s, const Eos& eos, Interpolation mode) {
  const std::size_t N = s.w.size();
  SeqRhs r;
  r.ex = compressible_rhs(s.ex, eos);
  const auto u = velocities(s);
  r.dw.resize(N);
  r.df.resize(N);
  r.dphi.resize(N);
  r.dw[0] = incompressible_rhs(EulerState{s.w[0], s.t});
  for (std::size_t n = 1; n < N; ++n) {
    r.dw[n] = -project_p(covariant(u[n], u[n]));
    const VectorField& bg = u[n - 1];
    WaveState ws{s.f[n], s.phi[n], s.t, [&bg](double) { return bg; }};
    auto wr = convected_wave_rhs(ws, eos);
    r.df[n] = std::move(wr.df);
    r.dphi[n] = std::move(wr.dphi);
  }
  if (!s.disp.empty()) {
    r.ddisp.resize(N);
    for (std::size_t n = 0; n < N; ++n) r.ddisp[n] = sample_at_markers(u[n], s.disp[n], mode);
  }
  return r;
}

SeqState seq_axpy(const SeqState& s, double a, const SeqRhs& k) {
  SeqState o = s;
  o.t = s.t + a;
  o.ex.t = o.t;
  o.ex.u.axpy(a, k.ex.du);
  o.ex.f.axpy(a, k.ex.df);
  for (std::size_t n = 0; n < s.w.size(); ++n) {
    o.w[n].axpy(a, k.dw[n]);
    if (n > 0) {
      o.f[n].axpy(a, k.df[n]);
      o.phi[n].axpy(a, k.dphi[n]);
    }
    if (!s.disp.empty()) o.disp[n].axpy(a, k.ddisp[n]);
  }
  return o;
}

void seq_accumulate(SeqState& o, double a, const SeqRhs& k) {
  o.ex.u.axpy(a, k.ex.du);
  o.ex.f.axpy(a, k.ex.df);
  for (std::size_t n = 0; n < o.w.size(); ++n) {
    o.w[n].axpy(a, k.dw[n]);
    if (n > 0) {
      o.f[n].axpy(a, k.df[n]);
      o.phi[n].axpy(a, k.dphi[n]);
    }
    if (!o.disp.empty()) o.disp[n].axpy(a, k.ddisp[n]);
  }
}

SeqState seq_step(const SeqState& s, const Eos& eos, double dt, Interpolation mode) {
  const SeqRhs k1 = seq_rhs(s, eos, mode);
  const SeqRhs k2 = seq_rhs(seq_axpy(s, 0.5 * dt, k1), eos, mode);
  const SeqRhs k3 = seq_rhs(seq_axpy(s, 0.5 * dt, k2), eos, mode);
  const SeqRhs k4 = seq_rhs(seq_axpy(s, dt, k3), eos, mode);
  SeqState o = s;
  seq_accumulate(o, dt / 6.0, k1);
  seq_accumulate(o, dt / 3.0, k2);
  seq_accumulate(o, dt / 3.0, k3);
  seq_accumulate(o, dt / 6.0, k4);
  o.t = s.t + dt;
  o.ex.t = o.t;
  for (auto& w : o.w) w = project_p(w);
  auto finite = [&](const ScalarField& f, const char* name) {
    if (!f.all_finite()) throw NonFiniteError(std::string("non-finite values in approximation entry ") + name, name);
  };
  finite(o.ex.f, "f");
  for (std::size_t n = 0; n < o.w.size(); ++n) finite(o.w[n].x, "w");
  return o;
}

}  // namespace

ApproxSequence approx_sequence(const VectorField& u0k, const ScalarField& rho0k, const Eos& eos,
                               const ApproxOptions& opt) {
  if (opt.n_max < 0 || opt.n_max > 3) throw InputError("n_max must lie in [0, 3]");
  if (!(opt.T > 0.0) || opt.snapshots < 1) throw InputError("approximation horizon and snapshot count must be positive");
  const DomainSpec& d = u0k.domain();
  const int N = opt.n_max + 1;
  SeqState s;
  s.ex = CompressibleState{dealias(u0k), dealias(map(rho0k, [](double r) { return std::log(r); })), 0.0};
  const VectorField pu0 = project_p(s.ex.u);
  const ScalarField phi0 = fdot_from_velocity(s.ex.u);
  const ScalarField f_init = s.ex.f;
  s.w.assign(N, pu0);
  s.f.assign(N, s.ex.f);
  s.phi.assign(N, phi0);
  if (opt.track_markers) s.disp.assign(N, VectorField::zero(d));

  ApproxSequence out;
  out.k = eos.k;
  out.n_max = opt.n_max;

  auto record = [&](const SeqState& st) {
    ApproxSnapshot snap;
    snap.t = st.t;
    snap.u_exact = st.ex.u;
    snap.f_exact = st.ex.f;
    snap.u = velocities(st);
    snap.grad_g.resize(N);
    snap.f.resize(N);
    snap.grad_g[0] = VectorField::zero(d);
    snap.f[0] = f_init;
    for (int n = 1; n < N; ++n) {
      snap.grad_g[n] = gradient_part(st.phi[n]);
      snap.f[n] = st.f[n];
    }
    if (!st.disp.empty()) {
      for (int n = 0; n < N; ++n) {
        FlowMap fm;
        fm.displacement = st.disp[n];
        fm.t = st.t;
        refresh_jacobian(fm);
        fm.velocity = sample_at_markers(snap.u[n], fm.displacement, opt.interpolation);
        snap.flows.push_back(std::move(fm));
      }
    }
    out.snapshots.push_back(std::move(snap));
  };

  const double dt0 = cfl_dt(s.ex, eos, opt.dt_safety);
  int nsteps = std::isfinite(dt0) ? step_count(opt.T, dt0) : opt.snapshots;
  nsteps = opt.snapshots * ((nsteps + opt.snapshots - 1) / opt.snapshots);
  const double dt = opt.T / nsteps;
  const int every = nsteps / opt.snapshots;
  record(s);
  for (int i = 1; i <= nsteps; ++i) {
    const double lim = cfl_dt(s.ex, eos, opt.dt_safety);
    if (dt > 1.5 * lim) {
      std::ostringstream os;
      os << "CFL violated in approximation sequence at t=" << s.t;
      throw CflError(os.str(), s.t);
    }
    s = seq_step(s, eos, dt, opt.interpolation);
    if (i % every == 0) {
      s.t = opt.T * (i / every) / opt.snapshots;
      s.ex.t = s.t;
      record(s);
    }
  }

  out.increment_h1.assign(N, 0.0);
  out.increment_h3.assign(N, 0.0);
  out.error_h1.assign(N, 0.0);
  out.error_h3.assign(N, 0.0);
  out.grad_g_h3.assign(N, 0.0);
  out.lagrangian_increment_h3.assign(N, 0.0);
  for (const auto& sn : out.snapshots) {
    for (int n = 0; n < N; ++n) {
      const VectorField e = sn.u_exact - sn.u[n];
      out.error_h1[n] = std::max(out.error_h1[n], sobolev_norm(e, {1}, NormConvention::IntegerSum));
      out.error_h3[n] = std::max(out.error_h3[n], sobolev_norm(e, {3}, NormConvention::IntegerSum));
      out.grad_g_h3[n] = std::max(out.grad_g_h3[n], sobolev_norm(sn.grad_g[n], {3}, NormConvention::IntegerSum));
      if (n == 0) continue;
      const VectorField inc = sn.u[n] - sn.u[n - 1];
      out.increment_h1[n] = std::max(out.increment_h1[n], sobolev_norm(inc, {1}, NormConvention::IntegerSum));
      out.increment_h3[n] = std::max(out.increment_h3[n], sobolev_norm(inc, {3}, NormConvention::IntegerSum));
      if (!sn.flows.empty()) {
        const double l = lagrangian_norm(sn.flows[n].displacement - sn.flows[n - 1].displacement,
                                         sn.flows[n].velocity - sn.flows[n - 1].velocity, {3});
        out.lagrangian_increment_h3[n] = std::max(out.lagrangian_increment_h3[n], l);
      }
    }
  }
  return out;
}

}  // namespace lowmach
