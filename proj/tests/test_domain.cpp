#include <cmath>
#include <numbers>

#include "doctest.h"
#include "lowmach/domain.hpp"

using namespace lowmach;
namespace {
constexpr double pi = std::numbers::pi;

double max_diff(const ScalarField& a, const ScalarField& b) { return (a - b).max_abs(); }
}  // namespace

TEST_CASE("gradient and divergence of single modes") {
  auto d = DomainSpec::torus(32, 32);
  auto f = ScalarField::sample(d, Parity::Periodic, [](double x, double) { return std::sin(2 * pi * x); });
  auto g = grad(f);
  auto ex = ScalarField::sample(d, Parity::Periodic, [](double x, double) { return 2 * pi * std::cos(2 * pi * x); });
  CHECK(max_diff(g.x, ex) < 1e-12);
  CHECK(g.y.max_abs() < 1e-12);
  VectorField u(f, ScalarField(d, Parity::Periodic));
  CHECK(max_diff(delta(u), -1.0 * ex) < 1e-12);
}

TEST_CASE("spectral Laplacian agrees with centered differences at second order") {
  auto fn = [](double x, double y) {
    return std::sin(2 * pi * x) * std::cos(4 * pi * y) + 0.3 * std::cos(2 * pi * (x + 2 * y)) +
           0.1 * std::sin(6 * pi * y);
  };
  double prev = 0.0;
  for (int n : {32, 64, 128}) {
    auto d = DomainSpec::torus(n, n);
    auto f = ScalarField::sample(d, Parity::Periodic, fn);
    auto lap = laplacian(f);
    double err = 0.0;
    const double h = 1.0 / n;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double fd = (f((i + 1) % n, j) + f((i + n - 1) % n, j) + f(i, (j + 1) % n) +
                           f(i, (j + n - 1) % n) - 4 * f(i, j)) / (h * h);
        err = std::max(err, std::abs(fd - lap(i, j)));
      }
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("delta of grad is minus Laplacian and adjointness holds") {
  for (auto d : {DomainSpec::torus(32, 16, 1.0, 0.5), DomainSpec::channel(32, 16, 2.0)}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto g = random_field(d, d.scalar_parity(), 6, seed);
      auto u = random_vector_field(d, 6, seed + 100);
      auto lhs = delta(grad(g));
      auto rhs = -1.0 * laplacian(g);
      CHECK(max_diff(lhs, rhs) <= 1e-12 * rhs.max_abs());
      const double a = inner(g, delta(u));
      const double b = inner(grad(g), u);
      CHECK(std::abs(a - b) <= 1e-10 * (std::abs(a) + std::abs(b) + 1e-300));
    }
  }
}

TEST_CASE("round trip and band-limited dealias are exact") {
  auto d = DomainSpec::channel(32, 32);
  auto f = random_field(d, Parity::EvenInY, 8, 3);
  CHECK(max_diff(dealias(f), f) <= 1e-12 * f.max_abs());
  auto o = random_field(d, Parity::OddInY, 8, 4);
  auto od = dealias(o);
  CHECK(max_diff(od, o) <= 1e-12 * o.max_abs());
  for (int i = 0; i < d.nx; ++i) {
    CHECK(od(i, 0) == 0.0);
    CHECK(od(i, d.ny) == 0.0);
  }
  // even fields have vanishing normal derivative at the walls exactly
  auto fy = dy(f);
  CHECK(fy.parity() == Parity::OddInY);
  CHECK(trace_values(fy, Wall::Y0)[5] == 0.0);
}

TEST_CASE("Sobolev norms") {
  auto d = DomainSpec::torus(32, 32);
  auto f = ScalarField::sample(d, Parity::Periodic, [](double x, double) { return std::sin(2 * pi * x); });
  CHECK(sobolev_norm(f, {0}) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(sobolev_norm(f, {1}) == doctest::Approx(std::sqrt(0.5 + 4 * pi * pi / 2)).epsilon(1e-12));
  CHECK(resolve_convention({1.5}, NormConvention::Auto) == NormConvention::Bessel);

  for (auto dd : {DomainSpec::torus(32, 32), DomainSpec::channel(32, 32)}) {
    auto r = random_field(dd, dd.scalar_parity(), 7, 11);
    auto gr = grad(r);
    auto fxx = dx(gr.x), fxy = dy(gr.x), fyy = dy(gr.y);
    const double quad = integrate(r * r) + integrate(gr.x * gr.x) + integrate(gr.y * gr.y) +
                        integrate(fxx * fxx) + 2 * integrate(fxy * fxy) + integrate(fyy * fyy);
    CHECK(sobolev_norm(r, {2}) == doctest::Approx(std::sqrt(quad)).epsilon(1e-10));
    double prev = 0.0;
    for (double s : {0.0, 0.5, 1.0, 1.5, 2.0, 3.0}) {
      const double n = sobolev_norm(r, {s}, NormConvention::Bessel);
      CHECK(n >= prev);
      prev = n;
    }
  }
}

TEST_CASE("wall traces") {
  auto d = DomainSpec::channel(32, 16, 2.0);
  auto one = ScalarField::constant(d, Parity::EvenInY, 1.0);
  auto t = wall_trace(one, Wall::Y0, {0});
  CHECK(t.norm == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  auto o = random_field(d, Parity::OddInY, 5, 2);
  CHECK(wall_trace(o, Wall::Y1, {1}).norm == 0.0);
  auto c = ScalarField::sample(d, Parity::EvenInY, [](double x, double y) { return std::cos(pi * y) * std::sin(pi * x); });
  auto tr = wall_trace(c, Wall::Y0, {1.5});
  for (int i = 0; i < d.nx; ++i) CHECK(tr.values[i] == doctest::Approx(std::sin(pi * d.x(i))).epsilon(1e-14));
  CHECK(tr.restriction_ratio > 0.0);
  CHECK_THROWS_AS(wall_trace(random_field(DomainSpec::torus(8, 8), Parity::Periodic, 2, 1), Wall::Y0, {0}), InputError);
}

TEST_CASE("parity rules are enforced") {
  auto d = DomainSpec::channel(16, 16);
  auto e = random_field(d, Parity::EvenInY, 3, 1);
  auto o = random_field(d, Parity::OddInY, 3, 2);
  CHECK((e * o).parity() == Parity::OddInY);
  CHECK((o * o).parity() == Parity::EvenInY);
  CHECK_THROWS_AS(e + o, ParityError);
  CHECK_THROWS_AS(map(o, [](double x) { return std::exp(x); }), ParityError);
  CHECK_THROWS_AS(VectorField(o, e), ParityError);
  CHECK_THROWS_AS(grad(o), ParityError);
  CHECK_THROWS_AS(ScalarField(DomainSpec::torus(16, 16), Parity::EvenInY), ParityError);
}

TEST_CASE("Chebyshev fields") {
  auto d = DomainSpec::channel(16, 16);
  auto fn = [](double x, double y) { return std::sin(2 * pi * x) * y * y * (1 - y) + y * y * y * y; };
  auto f = ScalarField::sample(d, Parity::General, fn);
  auto fy = dy(f);
  auto ex = ScalarField::sample(d, Parity::General, [](double x, double y) {
    return std::sin(2 * pi * x) * (2 * y - 3 * y * y) + 4 * y * y * y;
  });
  CHECK(max_diff(fy, ex) < 1e-11);
  // integral of y^4 over unit square = 1/5
  CHECK(integrate(f) == doctest::Approx(0.2).epsilon(1e-13));
  // exact resampling of a cosine series
  auto d2 = DomainSpec::channel(16, 32);
  auto c = random_field(d2, Parity::EvenInY, 4, 9);
  auto g = to_general(c);
  CHECK(sobolev_norm(g, {2}) == doctest::Approx(sobolev_norm(c, {2})).epsilon(1e-9));
  CHECK(integrate(g) == doctest::Approx(integrate(c)).epsilon(1e-12));
  auto tr0 = trace_values(c, Wall::Y1), tr1 = trace_values(g, Wall::Y1);
  for (int i = 0; i < d2.nx; ++i) CHECK(tr0[i] == doctest::Approx(tr1[i]).epsilon(1e-11));
}

TEST_CASE("point evaluation reproduces the interpolant") {
  auto d = DomainSpec::channel(32, 16);
  auto fn = [](double x, double y) { return std::cos(pi * y) * std::sin(2 * pi * x) + 0.5 * std::cos(3 * pi * y); };
  auto f = ScalarField::sample(d, Parity::EvenInY, fn);
  PointEvaluator ev(f);
  for (double x : {0.013, 0.4, 0.77})
    for (double y : {0.0, 0.21, 0.93}) {
      CHECK(ev.value(x, y) == doctest::Approx(fn(x, y)).epsilon(1e-13));
      double v, gx, gy;
      ev.value_and_gradient(x, y, v, gx, gy);
      CHECK(gx == doctest::Approx(2 * pi * std::cos(pi * y) * std::cos(2 * pi * x)).epsilon(1e-12));
      CHECK(gy == doctest::Approx(-pi * std::sin(pi * y) * std::sin(2 * pi * x) - 1.5 * pi * std::sin(3 * pi * y))
                      .epsilon(1e-12));
    }
}
