#include "lowmach/elliptic.hpp"

#include <cmath>
#include <random>

#include "chebyshev.hpp"
#include "spectral.hpp"

namespace lowmach {

namespace {

double l1(const ScalarField& f) {
  return integrate(map(f, [](double x) { return std::abs(x); }));
}

double trace_l1(const std::vector<double>& t, double lx) {
  double s = 0.0;
  for (double x : t) s += std::abs(x);
  return s * lx / static_cast<double>(t.size());
}

// L2 norm. For Chebyshev fields the wall rows are skipped (the boundary
// conditions replace the equation there) and the constant mode is removed,
// since the Neumann solve only determines L f up to a constant.
double residual_norm(const ScalarField& r) {
  if (r.parity() != Parity::General) return sobolev_norm(r, {0});
  ScalarField s = r;
  ScalarField w = ScalarField::constant(r.domain(), Parity::General, 1.0);
  for (int i = 0; i < s.nx(); ++i) {
    s(i, 0) = s(i, s.rows() - 1) = 0.0;
    w(i, 0) = w(i, w.rows() - 1) = 0.0;
  }
  const double c = integrate(s) / integrate(w);
  s = s + (-c);
  for (int i = 0; i < s.nx(); ++i) s(i, 0) = s(i, s.rows() - 1) = 0.0;
  return std::sqrt(std::max(0.0, integrate(s * s)));
}

ScalarField remove_mean(const ScalarField& f) {
  const double m = mean(f);
  if (f.parity() == Parity::OddInY) return f;
  return f + (-m);
}

}  // namespace

WallData WallData::normal_derivative(const ScalarField& f) {
  const ScalarField fy = dy(f);
  WallData w{trace_values(fy, Wall::Y0), trace_values(fy, Wall::Y1)};
  for (double& v : w.y0) v = -v;
  return w;
}

WallData WallData::normal_component(const VectorField& u) {
  WallData w{trace_values(u.y, Wall::Y0), trace_values(u.y, Wall::Y1)};
  for (double& v : w.y0) v = -v;
  return w;
}

double WallData::integral(double lx) const {
  double s = 0.0;
  for (double v : y0) s += v;
  for (double v : y1) s += v;
  return s * lx / static_cast<double>(y0.size());
}

bool WallData::is_zero() const {
  for (double v : y0)
    if (v != 0.0) return false;
  for (double v : y1)
    if (v != 0.0) return false;
  return true;
}

MeanSplit split_mean(const ScalarField& f) {
  const double m = f.parity() == Parity::OddInY ? 0.0 : mean(f);
  MeanSplit s{f, m};
  if (m != 0.0) s.f1 = f + (-m);
  return s;
}

ScalarField inverse_laplacian(const ScalarField& rhs) {
  if (rhs.parity() == Parity::General) {
    const int nx = rhs.nx();
    ScalarField g = detail::cheb_neumann(rhs, std::vector<double>(nx, 0.0), std::vector<double>(nx, 0.0));
    return g;
  }
  if (rhs.parity() == Parity::OddInY) throw ParityError("Neumann inverse Laplacian needs an even field");
  detail::Spectrum s = detail::forward(rhs);
  for (int n = 0; n < s.my; ++n) {
    const double ky = s.ky(n);
    for (int m = 0; m < s.nxh(); ++m) {
      const double kx = s.kx(m);
      const double k2 = kx * kx + ky * ky;
      s.at(n, m) = (k2 == 0.0 || s.nyquist(n, m)) ? detail::cplx(0.0, 0.0) : -s.at(n, m) / k2;
    }
  }
  return detail::inverse(s, rhs.domain(), rhs.parity());
}

ScalarField laplace_solve(const ScalarField& rhs, const std::optional<WallData>& data) {
  const DomainSpec& d = rhs.domain();
  if (!d.is_channel()) {
    if (data) throw InputError("boundary data supplied on a torus");
    const double defect = integrate(rhs);
    if (std::abs(defect) > 1e-10 * (l1(rhs) + 1e-300))
      throw IncompatibleDataError("right-hand side has nonzero mean", defect);
    return inverse_laplacian(rhs);
  }
  const bool has_data = data && !data->is_zero();
  if (data && (static_cast<int>(data->y0.size()) != d.nx || static_cast<int>(data->y1.size()) != d.nx))
    throw InputError("wall data length must equal nx");
  const double bint = has_data ? data->integral(d.lx) : 0.0;
  const double defect = integrate(rhs) - bint;
  const double scale = l1(rhs) + (has_data ? trace_l1(data->y0, d.lx) + trace_l1(data->y1, d.lx) : 0.0);
  if (std::abs(defect) > 1e-10 * (scale + 1e-300))
    throw IncompatibleDataError("Neumann data incompatible with right-hand side", defect);
  if (!has_data && rhs.parity() != Parity::General) return inverse_laplacian(rhs);
  const ScalarField r = to_general(rhs);
  const WallData w = has_data ? *data : WallData::zero(d.nx);
  return detail::cheb_neumann(r, w.y0, w.y1);
}

ScalarField neumann_extension(const DomainSpec& d, const WallData& data) {
  if (!d.is_channel()) throw InputError("Neumann extension needs a channel");
  return detail::cheb_neumann(ScalarField(d, Parity::General), data.y0, data.y1);
}

Helmholtz helmholtz_decompose(const VectorField& w) {
  const ScalarField dv = div(w);
  ScalarField g;
  if (w.is_general()) {
    const WallData nd = WallData::normal_component(w);
    g = detail::cheb_neumann(dv, nd.y0, nd.y1);
  } else {
    g = inverse_laplacian(dv);
  }
  VectorField q = grad(g);
  VectorField p = w - q;
  return {std::move(p), std::move(q)};
}

VectorField project_p(const VectorField& w) { return helmholtz_decompose(w).p; }
VectorField project_q(const VectorField& w) { return helmholtz_decompose(w).q; }

LOperator::LOperator(ScalarField c2_, double k_) : c2(std::move(c2_)), k(k_) {
  if (!(k > 0.0)) throw InputError("L operator needs k > 0");
  if (c2.parity() == Parity::OddInY) throw ParityError("sound speed must be an even field");
  if (!(c2.min() > 0.0)) throw InputError("L operator needs c2 > 0 everywhere");
}

ScalarField LOperator::apply(const ScalarField& f) const {
  const ScalarField& c = (f.parity() == Parity::General && c2.parity() != Parity::General) ? to_general(c2) : c2;
  const VectorField g = grad(f);
  return dx(c * g.x) + dy(c * g.y);
}

double LOperator::smallness() const {
  ScalarField r = c2 * (1.0 / k);
  return sobolev_norm(r + (-1.0), {4});
}

LSolveResult l_solve(const LOperator& op_in, const ScalarField& rhs_in, const std::optional<WallData>& data,
                     LSolveMode mode, const LSolveOptions& opt) {
  const DomainSpec& d = rhs_in.domain();
  const bool has_data = data && !data->is_zero();
  if (mode == LSolveMode::Inverse && has_data) throw InputError("Inverse mode takes no boundary data");
  if (has_data && !d.is_channel()) throw InputError("boundary data supplied on a torus");

  const bool general = rhs_in.parity() == Parity::General || has_data;
  const LOperator op = general && op_in.c2.parity() != Parity::General ? LOperator(to_general(op_in.c2), op_in.k) : op_in;
  ScalarField rhs = general ? to_general(rhs_in) : rhs_in;

  ScalarField base(rhs.domain(), rhs.parity());
  double lf_const = 0.0;
  if (mode == LSolveMode::GL) {
    if (has_data) {
      // oint c2 * data
      const auto c0 = trace_values(op.c2, Wall::Y0), c1 = trace_values(op.c2, Wall::Y1);
      WallData cd = *data;
      for (int i = 0; i < d.nx; ++i) {
        cd.y0[i] *= c0[i];
        cd.y1[i] *= c1[i];
      }
      const double defect = cd.integral(d.lx);
      const double scale = trace_l1(cd.y0, d.lx) + trace_l1(cd.y1, d.lx);
      if (!opt.allow_constant && std::abs(defect) > 1e-10 * (scale + 1e-300))
        throw IncompatibleDataError("GL data violates oint c2 data = 0", defect);
      lf_const = defect / d.area();
      base = neumann_extension(d, *data);
    }
    // remaining problem: L h = lf_const - L base, dh/dnu = 0
    ScalarField lb = op.apply(base);
    rhs = lb * -1.0;
    rhs = rhs + lf_const;
  } else {
    const double defect = integrate(rhs);
    if (std::abs(defect) > 1e-9 * (l1(rhs) + 1e-300))
      throw IncompatibleDataError("L^{-1} needs a zero-mean right-hand side", defect);
  }
  rhs = remove_mean(rhs);

  LSolveResult res;
  res.f = ScalarField(rhs.domain(), rhs.parity());
  const double rnorm = residual_norm(rhs);
  if (rnorm == 0.0) {
    res.f = base;
    return res;
  }
  // Contraction is measured on iterations well above the roundoff floor;
  // a stall below `floor` counts as convergence (Chebyshev operators lose
  // a few digits to the N^4 growth of second-derivative roundoff).
  constexpr double floor = 1e-6;
  double prev = rnorm;
  double log_ratio_sum = 0.0;
  int counted = 0;
  int growth = 0;
  double last_ratio = 0.0;
  for (int it = 0;; ++it) {
    ScalarField r = rhs - op.apply(res.f);
    const double rn = residual_norm(r);
    if (it > 0) {
      last_ratio = rn / prev;
      if (rn / rnorm > 1e3 * opt.tol || counted == 0) {
        log_ratio_sum += std::log(std::max(last_ratio, 1e-300));
        ++counted;
      }
      growth = last_ratio >= 1.0 ? growth + 1 : 0;
      if (growth >= 2 && rn / rnorm > floor)
        throw DivergenceError("Neumann series for L^{-1} diverges (ratio " + std::to_string(last_ratio) +
                                  "); c2 is too far from k, increase k",
                              last_ratio);
    }
    prev = rn;
    res.iterations = it;
    res.residual = rn / rnorm;
    if (res.residual <= opt.tol) break;
    if (it > 0 && last_ratio > 0.5 && res.residual < floor) break;
    if (it >= opt.max_iter)
      throw DivergenceError("Neumann series for L^{-1} did not converge in " + std::to_string(opt.max_iter) +
                                " iterations (ratio " + std::to_string(last_ratio) + ")",
                            last_ratio);
    r = remove_mean(r);
    res.f.axpy(1.0 / op.k, inverse_laplacian(r));
  }
  res.contraction = counted > 0 ? std::exp(log_ratio_sum / counted) : 0.0;
  res.f = remove_mean(res.f);
  if (mode == LSolveMode::GL) res.f += base;
  return res;
}

OperatorNormEstimate measure_inverse_norm(const LOperator& op, int samples, std::uint64_t seed) {
  OperatorNormEstimate e;
  const DomainSpec& d = op.c2.domain();
  for (int s = 0; s < samples; ++s) {
    ScalarField r = remove_mean(random_field(d, op.c2.parity() == Parity::General ? Parity::General : d.scalar_parity(),
                                             4, seed + 31 * s, 1.0));
    const auto sol = l_solve(op, r, std::nullopt, LSolveMode::Inverse);
    e.value = std::max(e.value, sobolev_norm(sol.f, {0}) / sobolev_norm(r, {0}));
    ++e.samples;
  }
  return e;
}

OperatorNormEstimate measure_gl_norm(const LOperator& op, int samples, std::uint64_t seed) {
  OperatorNormEstimate e;
  const DomainSpec& d = op.c2.domain();
  if (!d.is_channel()) throw InputError("G_L needs a channel");
  const ScalarField c2 = to_general(op.c2);
  const auto c0 = trace_values(c2, Wall::Y0), c1 = trace_values(c2, Wall::Y1);
  double csum = 0.0;
  for (int i = 0; i < d.nx; ++i) csum += c0[i] + c1[i];
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    WallData a = WallData::zero(d.nx);
    for (int m = 1; m <= 3; ++m) {
      const double a0c = nd(rng), a0s = nd(rng), a1c = nd(rng), a1s = nd(rng);
      for (int i = 0; i < d.nx; ++i) {
        const double th = 2.0 * std::acos(-1.0) * m * d.x(i) / d.lx;
        a.y0[i] += (a0c * std::cos(th) + a0s * std::sin(th)) / (m * m);
        a.y1[i] += (a1c * std::cos(th) + a1s * std::sin(th)) / (m * m);
      }
    }
    double ca = 0.0;
    for (int i = 0; i < d.nx; ++i) ca += c0[i] * a.y0[i] + c1[i] * a.y1[i];
    const double shift = ca / csum;
    for (int i = 0; i < d.nx; ++i) {
      a.y0[i] -= shift;
      a.y1[i] -= shift;
    }
    const auto sol = l_solve(LOperator(c2, op.k), ScalarField(d, Parity::General), a, LSolveMode::GL);
    const double an = std::hypot(boundary_norm(a.y0, d.lx, {0.5}), boundary_norm(a.y1, d.lx, {0.5}));
    e.value = std::max(e.value, sobolev_norm(sol.f, {1}) / an);
    ++e.samples;
  }
  return e;
}

}  // namespace lowmach
