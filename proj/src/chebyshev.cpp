#include "chebyshev.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "spectral.hpp"

namespace lowmach::detail {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

ChebGrid build(int n) {
  ChebGrid g;
  g.n = n;
  const double pi = std::numbers::pi;
  std::vector<double> x(n + 1);
  g.y.resize(n + 1);
  for (int j = 0; j <= n; ++j) {
    x[j] = std::sin(pi * (n - 2.0 * j) / (2.0 * n));
    g.y[j] = cheb_node(j, n);
  }
  Eigen::MatrixXd Dx = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int i = 0; i <= n; ++i) {
    const double ci = (i == 0 || i == n) ? 2.0 : 1.0;
    for (int j = 0; j <= n; ++j) {
      if (i == j) continue;
      const double cj = (j == 0 || j == n) ? 2.0 : 1.0;
      const double sgn = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      Dx(i, j) = ci / cj * sgn / (x[i] - x[j]);
    }
  }
  for (int i = 0; i <= n; ++i) Dx(i, i) = -Dx.row(i).sum();
  // y = (1 - x)/2
  g.D = -2.0 * Dx;
  g.D2 = g.D * g.D;

  g.w = Eigen::VectorXd::Zero(n + 1);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n - 1);
  auto theta = [&](int j) { return pi * j / n; };
  if (n % 2 == 0) {
    g.w(0) = g.w(n) = 1.0 / (n * n - 1.0);
    for (int k = 1; k < n / 2; ++k)
      for (int j = 1; j < n; ++j) v(j - 1) -= 2.0 * std::cos(2.0 * k * theta(j)) / (4.0 * k * k - 1.0);
    for (int j = 1; j < n; ++j) v(j - 1) -= std::cos(n * theta(j)) / (n * n - 1.0);
  } else {
    g.w(0) = g.w(n) = 1.0 / (static_cast<double>(n) * n);
    for (int k = 1; k <= (n - 1) / 2; ++k)
      for (int j = 1; j < n; ++j) v(j - 1) -= 2.0 * std::cos(2.0 * k * theta(j)) / (4.0 * k * k - 1.0);
  }
  for (int j = 1; j < n; ++j) g.w(j) = 2.0 * v(j - 1) / n;
  g.w *= 0.5;
  return g;
}

template <class T>
struct Registry {
  std::mutex mu;
  std::map<std::tuple<int, int, double>, std::shared_ptr<T>> items;
};

void require_general(const ScalarField& f) {
  if (f.parity() != Parity::General) throw ParityError("Chebyshev operation needs a General field");
}

ScalarField apply_y(const ScalarField& f, const Eigen::MatrixXd& M) {
  ScalarField r(f.domain(), Parity::General);
  Eigen::Map<const RowMat> in(f.values().data(), f.rows(), f.nx());
  Eigen::Map<RowMat> out(r.values().data(), r.rows(), r.nx());
  out.noalias() = M * in;
  return r;
}

}  // namespace

double cheb_node(int j, int n) {
  const double s = std::sin(std::numbers::pi * j / (2.0 * n));
  return s * s;
}

const ChebGrid& cheb_grid(int n) {
  static Registry<ChebGrid> reg;
  std::lock_guard<std::mutex> lock(reg.mu);
  auto key = std::make_tuple(n, 0, 0.0);
  auto it = reg.items.find(key);
  if (it == reg.items.end()) it = reg.items.emplace(key, std::make_shared<ChebGrid>(build(n))).first;
  return *it->second;
}

ScalarField cheb_dx(const ScalarField& f) {
  require_general(f);
  auto c = rows_forward(f);
  const int nh = f.nx() / 2 + 1;
  const double k0 = 2.0 * std::numbers::pi / f.domain().lx;
  for (int j = 0; j < f.rows(); ++j)
    for (int m = 0; m < nh; ++m) {
      auto& z = c[static_cast<std::size_t>(j) * nh + m];
      z = (2 * m == f.nx()) ? cplx(0.0, 0.0) : cplx(0.0, k0 * m) * z;
    }
  return ScalarField(f.domain(), Parity::General, rows_inverse(c, f.nx(), f.rows()));
}

ScalarField cheb_dy(const ScalarField& f) {
  require_general(f);
  return apply_y(f, cheb_grid(f.domain().ny).D);
}

ScalarField cheb_dyy(const ScalarField& f) {
  require_general(f);
  return apply_y(f, cheb_grid(f.domain().ny).D2);
}

double cheb_integrate(const ScalarField& f) {
  require_general(f);
  const auto& g = cheb_grid(f.domain().ny);
  double sum = 0.0;
  for (int j = 0; j < f.rows(); ++j) {
    double row = 0.0;
    for (int i = 0; i < f.nx(); ++i) row += f(i, j);
    sum += g.w(j) * row;
  }
  return sum * f.domain().lx / f.nx();
}

double cheb_sobolev_sq(const ScalarField& f, int s) {
  require_general(f);
  // all partial derivatives d_x^a d_y^b, counted with tensor multiplicity
  ScalarField col = f;
  double total = 0.0;
  for (int b = 0; b <= s; ++b) {
    ScalarField cur = col;
    for (int a = 0; a + b <= s; ++a) {
      const int l = a + b;
      double binom = 1.0;
      for (int t = 1; t <= a; ++t) binom = binom * (l - a + t) / t;
      total += binom * cheb_integrate(cur * cur);
      if (a + b < s) cur = cheb_dx(cur);
    }
    if (b < s) col = cheb_dy(col);
  }
  return total;
}

ScalarField cheb_neumann(const ScalarField& rhs, const std::vector<double>& a,
                         const std::vector<double>& b, double* cout) {
  require_general(rhs);
  const DomainSpec& d = rhs.domain();
  const int n = d.ny;
  const int nx = d.nx;
  const int nh = nx / 2 + 1;
  if (static_cast<int>(a.size()) != nx || static_cast<int>(b.size()) != nx)
    throw InputError("wall data length must equal nx");
  const ChebGrid& g = cheb_grid(n);

  static Registry<Eigen::PartialPivLU<Eigen::MatrixXd>> reg;
  auto solver_for = [&](int m) -> std::shared_ptr<Eigen::PartialPivLU<Eigen::MatrixXd>> {
    std::lock_guard<std::mutex> lock(reg.mu);
    auto key = std::make_tuple(n, m, d.lx);
    auto it = reg.items.find(key);
    if (it != reg.items.end()) return it->second;
    const int sz = n + 1 + (m == 0 ? 1 : 0);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(sz, sz);
    const double kx = 2.0 * std::numbers::pi * m / d.lx;
    for (int j = 1; j < n; ++j) {
      A.block(j, 0, 1, n + 1) = g.D2.row(j);
      A(j, j) -= kx * kx;
      if (m == 0) A(j, n + 1) = -1.0;
    }
    A.block(0, 0, 1, n + 1) = -g.D.row(0);
    A.block(n, 0, 1, n + 1) = g.D.row(n);
    if (m == 0) A.block(n + 1, 0, 1, n + 1) = g.w.transpose();
    auto lu = std::make_shared<Eigen::PartialPivLU<Eigen::MatrixXd>>(A);
    reg.items.emplace(key, lu);
    return lu;
  };

  auto R = rows_forward(rhs);
  std::vector<cplx> ah(nh), bh(nh);
  r2c_1d(nx, a.data(), ah.data());
  r2c_1d(nx, b.data(), bh.data());
  for (int m = 0; m < nh; ++m) {
    ah[m] /= nx;
    bh[m] /= nx;
  }
  std::vector<cplx> G(static_cast<std::size_t>(n + 1) * nh, cplx(0.0, 0.0));
  double cval = 0.0;
  for (int m = 0; m < nh; ++m) {
    if (2 * m == nx) continue;
    auto lu = solver_for(m);
    const int sz = n + 1 + (m == 0 ? 1 : 0);
    Eigen::VectorXd re = Eigen::VectorXd::Zero(sz), im = Eigen::VectorXd::Zero(sz);
    for (int j = 1; j < n; ++j) {
      re(j) = R[static_cast<std::size_t>(j) * nh + m].real();
      im(j) = R[static_cast<std::size_t>(j) * nh + m].imag();
    }
    re(0) = ah[m].real();
    im(0) = ah[m].imag();
    re(n) = bh[m].real();
    im(n) = bh[m].imag();
    Eigen::VectorXd xr = lu->solve(re), xi = lu->solve(im);
    for (int j = 0; j <= n; ++j) G[static_cast<std::size_t>(j) * nh + m] = cplx(xr(j), m == 0 ? 0.0 : xi(j));
    if (m == 0) cval = xr(n + 1);
  }
  if (cout) *cout = cval;
  return ScalarField(d, Parity::General, rows_inverse(G, nx, n + 1));
}

}  // namespace lowmach::detail
