#include "lowmach/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "chebyshev.hpp"
#include "spectral.hpp"

namespace lowmach {

using detail::cplx;
using detail::Spectrum;

namespace {

constexpr double kPi = std::numbers::pi;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

void require_same(const ScalarField& a, const ScalarField& b, const char* what) {
  if (!(a.domain() == b.domain())) throw InputError(std::string(what) + ": fields live on different domains");
  if (a.parity() != b.parity())
    throw ParityError(std::string(what) + ": parity mismatch (" + to_string(a.parity()) + " vs " +
                      to_string(b.parity()) + ")");
}

bool spectral(const ScalarField& f) { return f.parity() != Parity::General; }

}  // namespace

std::string to_string(Geometry g) { return g == Geometry::Torus2D ? "torus" : "channel"; }

std::string to_string(Parity p) {
  switch (p) {
    case Parity::Periodic: return "periodic";
    case Parity::EvenInY: return "even";
    case Parity::OddInY: return "odd";
    case Parity::General: return "general";
  }
  return "?";
}

Geometry geometry_from_string(const std::string& s) {
  if (s == "torus" || s == "Torus2D") return Geometry::Torus2D;
  if (s == "channel" || s == "Channel2D") return Geometry::Channel2D;
  throw ConfigError("unknown geometry '" + s + "'");
}

Parity parity_from_string(const std::string& s) {
  if (s == "periodic") return Parity::Periodic;
  if (s == "even") return Parity::EvenInY;
  if (s == "odd") return Parity::OddInY;
  if (s == "general") return Parity::General;
  throw ConfigError("unknown parity '" + s + "'");
}

DomainSpec DomainSpec::torus(int nx, int ny, double lx, double ly) {
  DomainSpec d{Geometry::Torus2D, nx, ny, lx, ly > 0.0 ? ly : lx};
  d.validate();
  return d;
}

DomainSpec DomainSpec::channel(int nx, int ny, double lx) {
  DomainSpec d{Geometry::Channel2D, nx, ny, lx, 1.0};
  d.validate();
  return d;
}

void DomainSpec::validate() const {
  if (!is_pow2(nx) || !is_pow2(ny) || nx < 4 || ny < 4)
    throw InputError("grid sizes must be powers of two >= 4");
  if (!(lx > 0.0) || !(ly > 0.0)) throw InputError("domain lengths must be positive");
  if (is_channel() && ly != 1.0) throw InputError("channel height is fixed to 1");
}

int DomainSpec::rows(Parity p) const {
  if (!is_channel()) {
    if (p != Parity::Periodic) throw ParityError("torus fields must be Periodic");
    return ny;
  }
  if (p == Parity::Periodic) throw ParityError("channel fields cannot be Periodic in y");
  return ny + 1;
}

double DomainSpec::y(int j, Parity p) const {
  if (p == Parity::General) return detail::cheb_node(j, ny);
  return ly * j / ny;
}

// ---- ScalarField ---------------------------------------------------------

ScalarField::ScalarField(const DomainSpec& d, Parity p) : d_(d), p_(p), rows_(d.rows(p)) {
  v_.assign(static_cast<std::size_t>(rows_) * d.nx, 0.0);
}

ScalarField::ScalarField(const DomainSpec& d, Parity p, std::vector<double> values)
    : d_(d), p_(p), rows_(d.rows(p)), v_(std::move(values)) {
  if (v_.size() != static_cast<std::size_t>(rows_) * d.nx)
    throw InputError("field value count does not match the grid");
}

ScalarField ScalarField::sample(const DomainSpec& d, Parity p,
                                const std::function<double(double, double)>& fn) {
  ScalarField f(d, p);
  for (int j = 0; j < f.rows(); ++j)
    for (int i = 0; i < d.nx; ++i) f(i, j) = fn(d.x(i), d.y(j, p));
  if (p == Parity::OddInY)
    for (int i = 0; i < d.nx; ++i) f(i, 0) = f(i, d.ny) = 0.0;
  return f;
}

ScalarField ScalarField::constant(const DomainSpec& d, Parity p, double c) {
  if (p == Parity::OddInY && c != 0.0) throw ParityError("nonzero constant is not odd in y");
  ScalarField f(d, p);
  std::fill(f.v_.begin(), f.v_.end(), c);
  return f;
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double x : v_) m = std::max(m, std::abs(x));
  return m;
}
double ScalarField::min() const { return *std::min_element(v_.begin(), v_.end()); }
double ScalarField::max() const { return *std::max_element(v_.begin(), v_.end()); }
bool ScalarField::all_finite() const {
  return std::all_of(v_.begin(), v_.end(), [](double x) { return std::isfinite(x); });
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same(*this, o, "sum");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
  return *this;
}
ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same(*this, o, "difference");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
  return *this;
}
ScalarField& ScalarField::operator*=(double a) {
  for (double& x : v_) x *= a;
  return *this;
}
ScalarField& ScalarField::axpy(double a, const ScalarField& o) {
  require_same(*this, o, "axpy");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += a * o.v_[i];
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator-(ScalarField a) { return a *= -1.0; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }
ScalarField operator*(ScalarField a, double s) { return a *= s; }

ScalarField operator+(ScalarField a, double c) {
  if (a.parity() == Parity::OddInY && c != 0.0) throw ParityError("adding a constant to an odd field");
  for (double& x : a.values()) x += c;
  return a;
}

Parity product_parity(Parity a, Parity b) {
  if (a == b) return a == Parity::OddInY ? Parity::EvenInY : a;
  const bool ca = a == Parity::EvenInY || a == Parity::OddInY;
  const bool cb = b == Parity::EvenInY || b == Parity::OddInY;
  if (ca && cb) return Parity::OddInY;
  throw ParityError("incompatible parities in product: " + to_string(a) + " and " + to_string(b));
}

Parity y_derivative_parity(Parity p) {
  if (p == Parity::EvenInY) return Parity::OddInY;
  if (p == Parity::OddInY) return Parity::EvenInY;
  return p;
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  if (!(a.domain() == b.domain())) throw InputError("product of fields on different domains");
  ScalarField r(a.domain(), product_parity(a.parity(), b.parity()));
  auto& rv = r.values();
  const auto& av = a.values();
  const auto& bv = b.values();
  for (std::size_t i = 0; i < rv.size(); ++i) rv[i] = av[i] * bv[i];
  return r;
}

ScalarField operator/(const ScalarField& a, const ScalarField& b) {
  if (b.parity() == Parity::OddInY) throw ParityError("division by an odd field");
  if (!(a.domain() == b.domain())) throw InputError("quotient of fields on different domains");
  ScalarField r(a.domain(), product_parity(a.parity(), b.parity()));
  for (std::size_t i = 0; i < r.size(); ++i) r.values()[i] = a.values()[i] / b.values()[i];
  return r;
}

ScalarField map(const ScalarField& f, const std::function<double(double)>& g) {
  if (f.parity() == Parity::OddInY) throw ParityError("nonlinear map of an odd field");
  ScalarField r = f;
  for (double& x : r.values()) x = g(x);
  return r;
}

// ---- VectorField ---------------------------------------------------------

VectorField::VectorField(ScalarField ux, ScalarField uy) : x(std::move(ux)), y(std::move(uy)) {
  if (!(x.domain() == y.domain())) throw InputError("vector components on different domains");
  const bool ok = x.parity() == Parity::General
                      ? y.parity() == Parity::General
                      : (x.domain().is_channel()
                             ? x.parity() == Parity::EvenInY && y.parity() == Parity::OddInY
                             : x.parity() == Parity::Periodic && y.parity() == Parity::Periodic);
  if (!ok)
    throw ParityError("inadmissible vector parities (" + to_string(x.parity()) + ", " +
                      to_string(y.parity()) + ")");
}

VectorField VectorField::zero(const DomainSpec& d, bool general) {
  if (general) return {ScalarField(d, Parity::General), ScalarField(d, Parity::General)};
  if (d.is_channel()) return {ScalarField(d, Parity::EvenInY), ScalarField(d, Parity::OddInY)};
  return {ScalarField(d, Parity::Periodic), ScalarField(d, Parity::Periodic)};
}

VectorField VectorField::sample(const DomainSpec& d, const std::function<double(double, double)>& fx,
                                const std::function<double(double, double)>& fy) {
  if (d.is_channel())
    return {ScalarField::sample(d, Parity::EvenInY, fx), ScalarField::sample(d, Parity::OddInY, fy)};
  return {ScalarField::sample(d, Parity::Periodic, fx), ScalarField::sample(d, Parity::Periodic, fy)};
}

double VectorField::max_abs() const {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::hypot(x.values()[i], y.values()[i]));
  return m;
}

VectorField& VectorField::operator+=(const VectorField& o) {
  x += o.x;
  y += o.y;
  return *this;
}
VectorField& VectorField::operator-=(const VectorField& o) {
  x -= o.x;
  y -= o.y;
  return *this;
}
VectorField& VectorField::operator*=(double a) {
  x *= a;
  y *= a;
  return *this;
}
VectorField& VectorField::axpy(double a, const VectorField& o) {
  x.axpy(a, o.x);
  y.axpy(a, o.y);
  return *this;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator-(VectorField a) { return a *= -1.0; }
VectorField operator*(double s, VectorField a) { return a *= s; }
VectorField operator*(const ScalarField& s, const VectorField& a) { return {s * a.x, s * a.y}; }

// ---- calculus ------------------------------------------------------------

ScalarField dx(const ScalarField& f) {
  if (!spectral(f)) return detail::cheb_dx(f);
  return detail::inverse(detail::deriv_x(detail::forward(f)), f.domain(), f.parity());
}

ScalarField dy(const ScalarField& f) {
  if (!spectral(f)) return detail::cheb_dy(f);
  return detail::inverse(detail::deriv_y(detail::forward(f)), f.domain(), y_derivative_parity(f.parity()));
}

VectorField grad(const ScalarField& f) {
  if (!spectral(f)) return {detail::cheb_dx(f), detail::cheb_dy(f)};
  if (f.parity() == Parity::OddInY) throw ParityError("gradient of an odd field is not an admissible vector");
  const Spectrum s = detail::forward(f);
  return {detail::inverse(detail::deriv_x(s), f.domain(), f.parity()),
          detail::inverse(detail::deriv_y(s), f.domain(), y_derivative_parity(f.parity()))};
}

ScalarField div(const VectorField& u) { return dx(u.x) + dy(u.y); }

ScalarField delta(const VectorField& u) { return -div(u); }

ScalarField laplacian(const ScalarField& f) {
  if (!spectral(f)) return detail::cheb_dx(detail::cheb_dx(f)) + detail::cheb_dyy(f);
  return detail::inverse(detail::laplace(detail::forward(f)), f.domain(), f.parity());
}

VectorField differentiate_grad(const ScalarField& f) { return grad(f); }

ScalarField differentiate(const ScalarField& f, DiffOp op) {
  if (op == DiffOp::Laplacian) return laplacian(f);
  throw InputError("scalar differentiate supports Laplacian; use grad() for Grad");
}

ScalarField differentiate(const VectorField& u, DiffOp op) {
  if (op == DiffOp::Delta) return delta(u);
  throw InputError("vector differentiate supports Delta only");
}

ScalarField dealias(const ScalarField& f) {
  if (!spectral(f)) return f;
  Spectrum s = detail::forward(f);
  detail::truncate_two_thirds(s);
  return detail::inverse(s, f.domain(), f.parity());
}

VectorField dealias(const VectorField& u) { return {dealias(u.x), dealias(u.y)}; }

ScalarField dealiased_product(const ScalarField& a, const ScalarField& b) { return dealias(a * b); }

ScalarField directional(const VectorField& u, const ScalarField& f) {
  if (!spectral(f)) return u.x * dx(f) + u.y * dy(f);
  const Spectrum s = detail::forward(f);
  const ScalarField fx = detail::inverse(detail::deriv_x(s), f.domain(), f.parity());
  const ScalarField fy = detail::inverse(detail::deriv_y(s), f.domain(), y_derivative_parity(f.parity()));
  return dealias(u.x * fx + u.y * fy);
}

VectorField covariant(const VectorField& u, const VectorField& w) {
  return {directional(u, w.x), directional(u, w.y)};
}

ScalarField gradient_contraction(const VectorField& u) {
  const ScalarField uxx = dx(u.x), uxy = dy(u.x), uyx = dx(u.y), uyy = dy(u.y);
  return dealias(uxx * uxx + 2.0 * (uxy * uyx) + uyy * uyy);
}

// ---- integrals -------------------------------------------------------------

double integrate(const ScalarField& f) {
  const DomainSpec& d = f.domain();
  if (f.parity() == Parity::General) return detail::cheb_integrate(f);
  double sum = 0.0;
  if (!d.is_channel()) {
    for (double x : f.values()) sum += x;
    return sum * d.dx() * d.dy();
  }
  for (int j = 0; j <= d.ny; ++j) {
    double row = 0.0;
    for (int i = 0; i < d.nx; ++i) row += f(i, j);
    sum += (j == 0 || j == d.ny) ? 0.5 * row : row;
  }
  return sum * d.dx() * d.dy();
}

double mean(const ScalarField& f) { return integrate(f) / f.domain().area(); }

double inner(const ScalarField& a, const ScalarField& b) { return integrate(a * b); }

double inner(const VectorField& a, const VectorField& b) { return inner(a.x, b.x) + inner(a.y, b.y); }

// ---- norms -----------------------------------------------------------------

bool SobolevIndex::is_integer() const { return std::floor(s) == s; }

NormConvention resolve_convention(SobolevIndex s, NormConvention c) {
  if (c != NormConvention::Auto) return c;
  return s.is_integer() ? NormConvention::IntegerSum : NormConvention::Bessel;
}

std::string to_string(NormConvention c) {
  switch (c) {
    case NormConvention::Auto: return "auto";
    case NormConvention::IntegerSum: return "integer-sum";
    case NormConvention::Bessel: return "bessel";
  }
  return "?";
}

namespace {

std::function<double(double)> weight(SobolevIndex s, NormConvention c) {
  if (s.s < 0.0) throw InputError("Sobolev index must be non-negative");
  const NormConvention r = resolve_convention(s, c);
  if (r == NormConvention::IntegerSum) {
    const int top = static_cast<int>(std::floor(s.s));
    return [top](double k2) {
      double w = 0.0, p = 1.0;
      for (int l = 0; l <= top; ++l, p *= k2) w += p;
      return w;
    };
  }
  const double e = s.s;
  return [e](double k2) { return std::pow(1.0 + k2, e); };
}

}  // namespace

double sobolev_norm(const ScalarField& f, SobolevIndex s, NormConvention c) {
  const DomainSpec& d = f.domain();
  if (f.parity() == Parity::General) {
    if (resolve_convention(s, c) != NormConvention::IntegerSum)
      throw InputError("Chebyshev fields support integer-convention norms only");
    return std::sqrt(detail::cheb_sobolev_sq(f, static_cast<int>(std::floor(s.s))));
  }
  const Spectrum sp = detail::forward(f);
  const double e = detail::weighted_energy(sp, weight(s, c));
  // channel: the reflected field covers twice the physical area
  const double area = d.is_channel() ? d.lx : d.area();
  return std::sqrt(std::max(0.0, area * e));
}

double sobolev_norm(const VectorField& u, SobolevIndex s, NormConvention c) {
  return std::hypot(sobolev_norm(u.x, s, c), sobolev_norm(u.y, s, c));
}

double boundary_norm(std::span<const double> trace, double lx, SobolevIndex s, NormConvention c) {
  const int n = static_cast<int>(trace.size());
  std::vector<cplx> h(n / 2 + 1);
  std::vector<double> buf(trace.begin(), trace.end());
  detail::r2c_1d(n, buf.data(), h.data());
  const auto w = weight(s, c);
  double sum = 0.0;
  for (int m = 0; m <= n / 2; ++m) {
    const double k = 2.0 * kPi * m / lx;
    const double mult = (m == 0 || 2 * m == n) ? 1.0 : 2.0;
    sum += mult * w(k * k) * std::norm(h[m] / static_cast<double>(n));
  }
  return std::sqrt(lx * sum);
}

std::vector<double> trace_values(const ScalarField& f, Wall w) {
  const DomainSpec& d = f.domain();
  if (!d.is_channel()) throw InputError("wall trace requested on a torus (no boundary)");
  const int j = w == Wall::Y0 ? 0 : f.rows() - 1;
  std::vector<double> t(d.nx);
  for (int i = 0; i < d.nx; ++i) t[i] = f(i, j);
  return t;
}

WallTrace wall_trace(const ScalarField& f, Wall w, SobolevIndex s) {
  WallTrace r;
  r.values = trace_values(f, w);
  const double lx = f.domain().lx;
  r.norm = boundary_norm(r.values, lx, s);
  if (s.s >= 0.5) {
    SobolevIndex vol = s;
    if (f.parity() == Parity::General) vol.s = std::ceil(s.s);
    const double fn = sobolev_norm(f, vol);
    r.restriction_ratio = fn > 0.0 ? boundary_norm(r.values, lx, SobolevIndex{s.s - 0.5}) / fn : 0.0;
  } else {
    r.restriction_ratio = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

// ---- conversions -------------------------------------------------------------

ScalarField to_general(const ScalarField& f) {
  if (f.parity() == Parity::General) return f;
  const DomainSpec& d = f.domain();
  if (!d.is_channel()) throw InputError("Chebyshev representation exists on the channel only");
  const Spectrum s = detail::forward(f);
  const int nh = s.nxh();
  const int rows = d.ny + 1;
  std::vector<cplx> R(static_cast<std::size_t>(rows) * nh, cplx(0.0, 0.0));
  for (int j = 0; j < rows; ++j) {
    const double y = detail::cheb_node(j, d.ny);
    for (int n = 0; n < s.my; ++n) {
      if (n == s.my / 2) continue;
      const cplx e = std::polar(1.0, s.ky(n) * y);
      for (int m = 0; m < nh; ++m) R[static_cast<std::size_t>(j) * nh + m] += s.at(n, m) * e;
    }
    R[static_cast<std::size_t>(j) * nh].imag(0.0);
  }
  return ScalarField(d, Parity::General, detail::rows_inverse(R, d.nx, rows));
}

VectorField to_general(const VectorField& u) {
  if (u.is_general()) return u;
  return {to_general(u.x), to_general(u.y)};
}

// ---- point evaluation --------------------------------------------------------

PointEvaluator::PointEvaluator(const ScalarField& f) {
  if (f.parity() == Parity::General) throw ParityError("point evaluation needs a Fourier field");
  const Spectrum s = detail::forward(f);
  double cmax = 0.0;
  for (const auto& c : s.c) cmax = std::max(cmax, std::abs(c));
  const double thr = 1e-16 * cmax;
  mx_ = 0;
  my_ = 0;
  for (int n = 0; n < s.my; ++n)
    for (int m = 0; m < s.nxh(); ++m)
      if (std::abs(s.at(n, m)) > thr && !s.nyquist(n, m)) {
        mx_ = std::max(mx_, m);
        my_ = std::max(my_, std::abs(s.signed_n(n)));
      }
  kx0_ = 2.0 * kPi / s.lx;
  ky0_ = 2.0 * kPi / s.lyw;
  const int w = 2 * my_ + 1;
  re_.assign(static_cast<std::size_t>(mx_ + 1) * w, 0.0);
  im_.assign(re_.size(), 0.0);
  for (int m = 0; m <= mx_; ++m) {
    const double mult = m == 0 ? 1.0 : 2.0;
    for (int q = -my_; q <= my_; ++q) {
      const int n = q >= 0 ? q : q + s.my;
      const cplx c = mult * s.at(n, m);
      re_[static_cast<std::size_t>(m) * w + (q + my_)] = c.real();
      im_[static_cast<std::size_t>(m) * w + (q + my_)] = c.imag();
    }
  }
}

namespace {

// e^{i q theta} for q in [lo, hi] written into (cr, ci)
void phases(double theta, int lo, int hi, double* cr, double* ci) {
  const int n = hi - lo + 1;
  const double c1 = std::cos(theta), s1 = std::sin(theta);
  double r = std::cos(lo * theta), i = std::sin(lo * theta);
  for (int q = 0; q < n; ++q) {
    if (q % 16 == 0) {
      r = std::cos((lo + q) * theta);
      i = std::sin((lo + q) * theta);
    }
    cr[q] = r;
    ci[q] = i;
    const double nr = r * c1 - i * s1;
    i = r * s1 + i * c1;
    r = nr;
  }
}

}  // namespace

double PointEvaluator::value(double x, double y) const {
  const int w = 2 * my_ + 1;
  thread_local std::vector<double> ey_r, ey_i, ex_r, ex_i;
  ey_r.resize(w);
  ey_i.resize(w);
  ex_r.resize(mx_ + 1);
  ex_i.resize(mx_ + 1);
  phases(ky0_ * y, -my_, my_, ey_r.data(), ey_i.data());
  phases(kx0_ * x, 0, mx_, ex_r.data(), ex_i.data());
  double v = 0.0;
  for (int m = 0; m <= mx_; ++m) {
    const double* cr = re_.data() + static_cast<std::size_t>(m) * w;
    const double* ci = im_.data() + static_cast<std::size_t>(m) * w;
    double sr = 0.0, si = 0.0;
    for (int q = 0; q < w; ++q) {
      sr += cr[q] * ey_r[q] - ci[q] * ey_i[q];
      si += cr[q] * ey_i[q] + ci[q] * ey_r[q];
    }
    v += ex_r[m] * sr - ex_i[m] * si;
  }
  return v;
}

void PointEvaluator::value_and_gradient(double x, double y, double& v, double& gx, double& gy) const {
  const int w = 2 * my_ + 1;
  thread_local std::vector<double> ey_r, ey_i, ex_r, ex_i;
  ey_r.resize(w);
  ey_i.resize(w);
  ex_r.resize(mx_ + 1);
  ex_i.resize(mx_ + 1);
  phases(ky0_ * y, -my_, my_, ey_r.data(), ey_i.data());
  phases(kx0_ * x, 0, mx_, ex_r.data(), ex_i.data());
  v = gx = gy = 0.0;
  for (int m = 0; m <= mx_; ++m) {
    const double* cr = re_.data() + static_cast<std::size_t>(m) * w;
    const double* ci = im_.data() + static_cast<std::size_t>(m) * w;
    double sr = 0.0, si = 0.0, tr = 0.0, ti = 0.0;
    for (int q = 0; q < w; ++q) {
      const double ar = cr[q] * ey_r[q] - ci[q] * ey_i[q];
      const double ai = cr[q] * ey_i[q] + ci[q] * ey_r[q];
      const double k = ky0_ * (q - my_);
      sr += ar;
      si += ai;
      tr += k * ar;
      ti += k * ai;
    }
    const double km = kx0_ * m;
    v += ex_r[m] * sr - ex_i[m] * si;
    // Re(i km e S) = -km Im(e S)
    gx -= km * (ex_r[m] * si + ex_i[m] * sr);
    // Re(e * i T) = -Im(e T)
    gy -= ex_r[m] * ti + ex_i[m] * tr;
  }
}

// ---- random fields -------------------------------------------------------------

ScalarField random_field(const DomainSpec& d, Parity p, int band, std::uint64_t seed, double decay) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  ScalarField f(d, p);
  const int rows = f.rows();
  const int bx = std::min(band, d.nx / 2 - 1);
  const int byl = p == Parity::Periodic ? std::min(band, d.ny / 2 - 1) : std::min(band, d.ny - 1);
  // separable tables
  std::vector<std::vector<double>> cx(2 * bx + 1, std::vector<double>(d.nx));
  for (int m = -bx; m <= bx; ++m)
    for (int i = 0; i < d.nx; ++i) {
      const double th = 2.0 * kPi * std::abs(m) * d.x(i) / d.lx;
      cx[m + bx][i] = m >= 0 ? std::cos(th) : std::sin(th);
    }
  auto ybasis = [&](int n, int j, bool sine) {
    const double y = d.y(j, p);
    switch (p) {
      case Parity::Periodic: {
        const double th = 2.0 * kPi * n * y / d.ly;
        return sine ? std::sin(th) : std::cos(th);
      }
      case Parity::EvenInY: return std::cos(kPi * n * y);
      case Parity::OddInY: return std::sin(kPi * n * y);
      case Parity::General: return std::cos(n * std::acos(std::clamp(1.0 - 2.0 * y, -1.0, 1.0)));
    }
    return 0.0;
  };
  const int nlo = p == Parity::OddInY ? 1 : 0;
  const bool two_y = p == Parity::Periodic;
  for (int m = -bx; m <= bx; ++m)
    for (int n = nlo; n <= byl; ++n)
      for (int sy = 0; sy < (two_y && n > 0 ? 2 : 1); ++sy) {
        const double amp = std::pow(1.0 + m * m + n * n, -0.5 * decay) * nd(rng);
        for (int j = 0; j < rows; ++j) {
          const double yb = amp * ybasis(n, j, sy == 1);
          for (int i = 0; i < d.nx; ++i) f(i, j) += cx[m + bx][i] * yb;
        }
      }
  if (p == Parity::OddInY)
    for (int i = 0; i < d.nx; ++i) f(i, 0) = f(i, d.ny) = 0.0;
  return f;
}

VectorField random_vector_field(const DomainSpec& d, int band, std::uint64_t seed, double decay, bool general) {
  if (general)
    return {random_field(d, Parity::General, band, seed, decay),
            random_field(d, Parity::General, band, seed + 7919, decay)};
  if (d.is_channel())
    return {random_field(d, Parity::EvenInY, band, seed, decay),
            random_field(d, Parity::OddInY, band, seed + 7919, decay)};
  return {random_field(d, Parity::Periodic, band, seed, decay),
          random_field(d, Parity::Periodic, band, seed + 7919, decay)};
}

}  // namespace lowmach
