#include "lowmach/oracle1d.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "spectral.hpp"

namespace lowmach {

namespace {

using cplx = std::complex<double>;
constexpr double two_pi = 2.0 * std::numbers::pi;

std::vector<cplx> coefficients(const Profile1D& p) {
  const int n = p.n();
  std::vector<cplx> c(static_cast<std::size_t>(n / 2 + 1));
  detail::r2c_1d(n, p.v.data(), c.data());
  for (auto& z : c) z /= static_cast<double>(n);
  return c;
}

void require_size(const Profile1D& p, const char* what) {
  if (p.n() < 4 || p.n() % 2 != 0) throw InputError(std::string(what) + ": grid size must be even and >= 4");
}

}  // namespace

Profile1D Profile1D::sample(int n, const std::function<double(double)>& g) {
  Profile1D p = zeros(n);
  for (int j = 0; j < n; ++j) p.v[static_cast<std::size_t>(j)] = g(p.x(j));
  return p;
}

double max_abs_diff(const Profile1D& a, const Profile1D& b) {
  if (a.n() != b.n()) throw InputError("profile sizes differ");
  double m = 0.0;
  for (std::size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
  return m;
}

double max_abs(const Profile1D& a) {
  double m = 0.0;
  for (double x : a.v) m = std::max(m, std::abs(x));
  return m;
}

Trig1D::Trig1D(const Profile1D& p) {
  require_size(p, "trigonometric interpolant");
  const auto c = coefficients(p);
  mean_ = c[0].real();
  const int top = p.n() / 2 - 1;
  double cmax = 0.0;
  for (int m = 1; m <= top; ++m) cmax = std::max(cmax, std::abs(c[m]));
  int last = 0;
  for (int m = 1; m <= top; ++m)
    if (std::abs(c[m]) > 1e-17 * cmax) last = m;
  coef_.assign(c.begin() + 1, c.begin() + 1 + last);
  for (int m = 1; m <= last; ++m) modes_.push_back(m);
}

double Trig1D::operator()(double x, int derivative) const {
  double s = derivative == 0 ? mean_ : 0.0;
  const cplx w = std::polar(1.0, two_pi * x);
  cplx p = 1.0;
  for (std::size_t i = 0; i < coef_.size(); ++i) {
    p *= w;
    const double m = modes_[i];
    cplx f = coef_[i] * p;
    for (int d = 0; d < derivative; ++d) f *= cplx(0.0, two_pi * m);
    s += 2.0 * f.real();
  }
  return s;
}

double Trig1D::sobolev_norm(int s) const {
  double sum = 0.0;
  for (int j = 0; j <= s; ++j) {
    if (j == 0) sum += mean_ * mean_;
    for (std::size_t i = 0; i < coef_.size(); ++i)
      sum += 2.0 * std::norm(coef_[i]) * std::pow(two_pi * modes_[i], 2 * j);
  }
  return std::sqrt(sum);
}

namespace {

double min_slope(const Trig1D& u, int n) {
  int jmin = 0;
  double vmin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    const double v = u(static_cast<double>(j) / n, 1);
    if (v < vmin) {
      vmin = v;
      jmin = j;
    }
  }
  // Newton on u'' = 0 near the grid minimum
  const double x0 = static_cast<double>(jmin) / n, h = 1.0 / n;
  double x = x0;
  for (int it = 0; it < 30; ++it) {
    const double d3 = u(x, 3);
    if (!(d3 > 0.0)) break;
    const double step = u(x, 2) / d3;
    x = std::clamp(x - step, x0 - h, x0 + h);
    if (std::abs(step) < 1e-15) break;
  }
  return std::min(vmin, u(x, 1));
}

double horizon_of(const Trig1D& u, int n) {
  const double m = min_slope(u, n);
  return m < 0.0 ? -1.0 / m : std::numeric_limits<double>::infinity();
}

void check_horizon(const Trig1D& u, int n, double t) {
  const double tc = horizon_of(u, n);
  if (t < 0.0) throw InputError("time must be non-negative");
  if (t >= tc) {
    std::ostringstream os;
    os << "characteristics cross before t = " << t << ": critical time " << tc;
    throw HorizonError(os.str(), tc);
  }
}

// x with x + t u(x) = y by safeguarded Newton on a bracket.
double solve_label(const Trig1D& u, double t, double y, double umin, double umax) {
  if (t == 0.0) return y;
  const double pad = 1e-3 * (umax - umin) + 1e-12;
  double a = y - t * (umax + pad), b = y - t * (umin - pad);
  auto g = [&](double x) { return x + t * u(x) - y; };
  while (g(a) > 0.0) a -= t * (umax - umin + 1.0);
  while (g(b) < 0.0) b += t * (umax - umin + 1.0);
  double x = std::clamp(y - t * u(y), a, b);
  bool done = false;
  for (int it = 0; it < 200; ++it) {
    const double r = g(x);
    if (r == 0.0) return x;
    if (r > 0.0) b = x; else a = x;
    const double dg = 1.0 + t * u(x, 1);
    double next = x - r / dg;
    if (!(next >= a && next <= b)) next = 0.5 * (a + b);
    if (done) return next;
    // one more Newton step after the tolerance is met brings the root to roundoff
    if (std::abs(r) <= 1e-13 || b - a <= 1e-15) done = true;
    x = next;
  }
  return x;
}

std::vector<double> labels(const Trig1D& u, const Profile1D& u0, double t) {
  const int n = u0.n();
  const auto [lo, hi] = std::minmax_element(u0.v.begin(), u0.v.end());
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) x[static_cast<std::size_t>(j)] = solve_label(u, t, u0.x(j), *lo, *hi);
  return x;
}

Profile1D resample(const Profile1D& p, int n) {
  if (p.n() == n) return p;
  const Trig1D tr(p);
  return Profile1D::sample(n, [&](double x) { return tr(x); });
}

}  // namespace

double burgers_horizon(const Profile1D& u0) {
  require_size(u0, "horizon");
  return horizon_of(Trig1D(u0), u0.n());
}

Profile1D burgers_characteristics(const Profile1D& u0, double t) {
  require_size(u0, "burgers");
  const Trig1D u(u0);
  check_horizon(u, u0.n(), t);
  return {labels(u, u0, t)};
}

Profile1D burgers_exact(const Profile1D& u0, double t) {
  require_size(u0, "burgers");
  const Trig1D u(u0);
  check_horizon(u, u0.n(), t);
  if (t == 0.0) return u0;
  Profile1D out{labels(u, u0, t)};
  for (double& x : out.v) x = u(x);
  return out;
}

Profile1D burgers_sensitivity_exact(const Profile1D& u0, const Profile1D& z0, double t) {
  require_size(u0, "burgers");
  if (z0.n() != u0.n()) throw InputError("u0 and z0 sizes differ");
  const Trig1D u(u0), z(z0);
  check_horizon(u, u0.n(), t);
  if (t == 0.0) return z0;
  Profile1D out{labels(u, u0, t)};
  for (double& x : out.v) x = z(x) / (1.0 + t * u(x, 1));
  return out;
}

double burgers_stable_dt(double umax, int n) {
  // RK4 reaches 2.8 on the imaginary axis; the largest retained wavenumber is 2 pi n / 3
  if (!(umax > 0.0)) return std::numeric_limits<double>::infinity();
  return 2.8 / (umax * two_pi * n / 3.0);
}

Profile1D burgers_numeric(const Profile1D& u0, double t, int n, const BurgersOptions& opt) {
  require_size(u0, "burgers");
  if (n < 4 || n % 2 != 0) throw InputError("burgers: grid size must be even and >= 4");
  if (t < 0.0) throw InputError("time must be non-negative");
  Profile1D u = resample(u0, n);
  const int nh = n / 2 + 1;
  const int cut = n / 3;
  std::vector<cplx> c(static_cast<std::size_t>(nh));
  auto truncate = [&](Profile1D& p) {
    detail::r2c_1d(n, p.v.data(), c.data());
    for (int m = 0; m < nh; ++m) c[m] = m <= cut ? c[m] / static_cast<double>(n) : 0.0;
    detail::c2r_1d(n, c.data(), p.v.data());
  };
  truncate(u);
  const double umax = max_abs(u);
  const double limit = burgers_stable_dt(umax, n);
  double dt = opt.dt > 0.0 ? opt.dt : opt.safety * limit;
  if (t == 0.0) return u;
  if (!std::isfinite(dt)) return u;
  const int steps = std::max(1, static_cast<int>(std::ceil(t / dt - 1e-12)));
  dt = t / steps;
  if (dt > limit) {
    std::ostringstream os;
    os << "step " << dt << " exceeds the RK4 stability limit " << limit;
    throw CflError(os.str(), 0.0);
  }
  Profile1D w = Profile1D::zeros(n);
  auto rhs = [&](const Profile1D& s) {
    for (int j = 0; j < n; ++j) w.v[j] = 0.5 * s.v[j] * s.v[j];
    detail::r2c_1d(n, w.v.data(), c.data());
    for (int m = 0; m < nh; ++m) c[m] = m <= cut ? c[m] * cplx(0.0, -two_pi * m) / static_cast<double>(n) : 0.0;
    Profile1D r = Profile1D::zeros(n);
    detail::c2r_1d(n, c.data(), r.v.data());
    return r;
  };
  auto axpy = [](Profile1D a, double s, const Profile1D& b) {
    for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] += s * b.v[i];
    return a;
  };
  for (int it = 0; it < steps; ++it) {
    const auto k1 = rhs(u);
    const auto k2 = rhs(axpy(u, 0.5 * dt, k1));
    const auto k3 = rhs(axpy(u, 0.5 * dt, k2));
    const auto k4 = rhs(axpy(u, dt, k3));
    for (int j = 0; j < n; ++j) u.v[j] += dt / 6.0 * (k1.v[j] + 2.0 * k2.v[j] + 2.0 * k3.v[j] + k4.v[j]);
    if (!std::isfinite(u.v[0]) || max_abs(u) > 10.0 * umax + 1.0)
      throw NonFiniteError("burgers solution blew up", "u");
  }
  return u;
}

BurgersComparison burgers_compare(const Profile1D& u0, const Profile1D& z0, double t, int n, double lambda,
                                  const BurgersOptions& opt) {
  if (!(lambda > 0.0)) throw InputError("lambda must be positive");
  const Profile1D u = resample(u0, n), z = resample(z0, n);
  BurgersComparison c;
  c.t = t;
  c.lambda = lambda;
  c.u_exact = burgers_exact(u, t);
  c.u_numeric = burgers_numeric(u, t, n, opt);
  c.z_exact = burgers_sensitivity_exact(u, z, t);
  Profile1D up = u, um = u;
  for (int j = 0; j < n; ++j) {
    up.v[j] += lambda * z.v[j];
    um.v[j] -= lambda * z.v[j];
  }
  const auto a = burgers_exact(up, t), b = burgers_exact(um, t);
  c.z_fd = Profile1D::zeros(n);
  for (int j = 0; j < n; ++j) c.z_fd.v[j] = (a.v[j] - b.v[j]) / (2.0 * lambda);
  c.u_error = max_abs_diff(c.u_numeric, c.u_exact);
  c.z_error = max_abs_diff(c.z_fd, c.z_exact);
  return c;
}

void write_burgers_csv(const std::string& path, const BurgersComparison& c) {
  std::ofstream os(path);
  if (!os) throw InputError("cannot open " + path + " for writing");
  os << "x,u_exact,u_numeric,z_exact,z_fd\n" << std::setprecision(17);
  for (int j = 0; j < c.u_exact.n(); ++j)
    os << c.u_exact.x(j) << ',' << c.u_exact.v[j] << ',' << c.u_numeric.v[j] << ',' << c.z_exact.v[j] << ','
       << c.z_fd.v[j] << '\n';
}

namespace {

std::vector<double> orders(const std::vector<double>& l, const std::vector<double>& e) {
  std::vector<double> r;
  for (std::size_t i = 0; i + 1 < e.size(); ++i) r.push_back(std::log(e[i] / e[i + 1]) / std::log(l[i] / l[i + 1]));
  return r;
}

Profile1D shifted(const Profile1D& u, double s, const Profile1D& z) {
  Profile1D r = u;
  for (std::size_t i = 0; i < r.v.size(); ++i) r.v[i] += s * z.v[i];
  return r;
}

}  // namespace

SensitivityConvergence burgers_sensitivity_convergence(const Profile1D& u0, const Profile1D& z0, double t,
                                                        const std::vector<double>& lambdas) {
  if (lambdas.size() < 2) throw InputError("need at least two lambda values");
  const auto z = burgers_sensitivity_exact(u0, z0, t);
  SensitivityConvergence r;
  r.lambdas = lambdas;
  for (double l : lambdas) {
    const auto a = burgers_exact(shifted(u0, l, z0), t), b = burgers_exact(shifted(u0, -l, z0), t);
    double e = 0.0;
    for (int j = 0; j < z.n(); ++j) e = std::max(e, std::abs((a.v[j] - b.v[j]) / (2.0 * l) - z.v[j]));
    r.errors.push_back(e);
  }
  r.orders = orders(r.lambdas, r.errors);
  return r;
}

namespace {

// |c_m| = m^-(s+1) with golden-ratio phases, scaled so that t max|u0'| = 1/2.
Profile1D rough_profile(int s, int n, double t) {
  std::vector<cplx> c(static_cast<std::size_t>(n / 2 + 1), 0.0);
  for (int m = 1; m < n / 2; ++m)
    c[m] = std::polar(std::pow(m, -(s + 1.0)), two_pi * std::fmod(m * 0.6180339887498949, 1.0));
  Profile1D u0 = Profile1D::zeros(n);
  detail::c2r_1d(n, c.data(), u0.v.data());
  const Trig1D tr(u0);
  const double slope = max_abs(Profile1D::sample(4 * n, [&](double x) { return tr(x, 1); }));
  for (double& v : u0.v) v *= 0.5 / (t * slope);
  return u0;
}

// One-sided quotient defect in H^{s-1} and H^s along z0 = u0.
std::pair<double, double> quotient_defect(const Profile1D& u0, int s, double t, double l) {
  const int n = u0.n();
  const auto base = burgers_exact(u0, t);
  const auto z = burgers_sensitivity_exact(u0, u0, t);
  const auto a = burgers_exact(shifted(u0, l, u0), t);
  Profile1D d = Profile1D::zeros(n);
  for (int j = 0; j < n; ++j) d.v[j] = (a.v[j] - base.v[j]) / l - z.v[j];
  const Trig1D tr(d);
  return {tr.sobolev_norm(s - 1), tr.sobolev_norm(s)};
}

}  // namespace

DerivativeLossReport derivative_loss_witness(int s, int n, double t, const std::vector<double>& lambdas) {
  if (s < 2) throw InputError("derivative loss witness needs s >= 2");
  if (lambdas.size() < 2) throw InputError("need at least two lambda values");
  if (n < 32) throw InputError("derivative loss witness needs n >= 32");
  DerivativeLossReport r;
  r.s = s;
  r.n = n;
  r.t = t;
  r.lambdas = lambdas;
  const Profile1D u0 = rough_profile(s, n, t);
  for (double l : lambdas) {
    const auto [lo, hi] = quotient_defect(u0, s, t, l);
    r.error_low.push_back(lo);
    r.error_top.push_back(hi);
  }
  r.order_low = orders(r.lambdas, r.error_low);
  r.order_top = orders(r.lambdas, r.error_top);
  // the same data family on coarser grids: defect / lambda at the smallest lambda
  for (int m = n / 4; m <= n; m *= 2) {
    const auto [lo, hi] = quotient_defect(rough_profile(s, m, t), s, t, lambdas.back());
    r.grid.push_back(m);
    r.constant_low.push_back(lo / lambdas.back());
    r.constant_top.push_back(hi / lambdas.back());
  }
  return r;
}

}  // namespace lowmach
