#include <cmath>
#include <numbers>

#include "doctest.h"
#include "lowmach/elliptic.hpp"

using namespace lowmach;
namespace {
constexpr double pi = std::numbers::pi;
double max_diff(const ScalarField& a, const ScalarField& b) { return (a - b).max_abs(); }
}  // namespace

TEST_CASE("Laplace solve: eigenfunction, harmonic extension, zero") {
  auto d = DomainSpec::torus(32, 32);
  auto rhs = ScalarField::sample(d, Parity::Periodic, [](double x, double) { return -4 * pi * pi * std::sin(2 * pi * x); });
  auto g = laplace_solve(rhs);
  CHECK(max_diff(g, ScalarField::sample(d, Parity::Periodic, [](double x, double) { return std::sin(2 * pi * x); })) < 1e-13);

  auto c = DomainSpec::channel(32, 32);
  WallData w = WallData::zero(c.nx);
  for (int i = 0; i < c.nx; ++i) w.y1[i] = std::sin(2 * pi * c.x(i));
  auto h = laplace_solve(ScalarField(c, Parity::EvenInY), w);
  CHECK(h.parity() == Parity::General);
  auto ex = ScalarField::sample(c, Parity::General, [](double x, double y) {
    return std::cosh(2 * pi * y) * std::sin(2 * pi * x) / (2 * pi * std::sinh(2 * pi));
  });
  CHECK(max_diff(h, ex) < 1e-12);
  CHECK(laplace_solve(ScalarField(c, Parity::EvenInY), WallData::zero(c.nx)).max_abs() == 0.0);

  auto bad = ScalarField::constant(d, Parity::Periodic, 1.0);
  CHECK_THROWS_AS(laplace_solve(bad), IncompatibleDataError);
  WallData w2 = WallData::zero(c.nx);
  for (int i = 0; i < c.nx; ++i) w2.y0[i] = 1.0;
  try {
    laplace_solve(ScalarField(c, Parity::EvenInY), w2);
    CHECK(false);
  } catch (const IncompatibleDataError& e) {
    CHECK(e.defect() == doctest::Approx(-1.0));
  }
}

TEST_CASE("general Neumann problem with compatible data") {
  auto c = DomainSpec::channel(16, 32);
  // g = cos(2 pi x) y^2 (1-y)^2 + y^3/3 - y^4/4 ... use g = y^3 - 1.5 y^2 + cos(2 pi x) y^2
  auto gfn = [](double x, double y) { return y * y * y - 1.5 * y * y + std::cos(2 * pi * x) * y * y * (1 - y) * (1 - y); };
  auto g = ScalarField::sample(c, Parity::General, gfn);
  auto lap = laplacian(g);
  auto data = WallData::normal_derivative(g);
  auto sol = laplace_solve(lap, data);
  auto shifted = g + (-mean(g));
  CHECK(max_diff(sol, shifted) < 1e-10);
}

TEST_CASE("Helmholtz projections") {
  auto d = DomainSpec::torus(32, 32);
  auto g = ScalarField::sample(d, Parity::Periodic, [](double x, double y) { return std::sin(2 * pi * x) * std::cos(2 * pi * y); });
  auto w = grad(g);
  auto h = helmholtz_decompose(w);
  CHECK((h.q - w).max_abs() < 1e-12);
  CHECK(h.p.max_abs() < 1e-12);
  VectorField s(ScalarField::sample(d, Parity::Periodic, [](double, double y) { return std::cos(2 * pi * y); }),
                ScalarField(d, Parity::Periodic));
  auto hs = helmholtz_decompose(s);
  CHECK((hs.p - s).max_abs() < 1e-13);
  CHECK(hs.q.max_abs() < 1e-13);

  for (auto dd : {DomainSpec::torus(32, 16, 1.0, 0.5), DomainSpec::channel(32, 16)}) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      auto r = random_vector_field(dd, 7, seed);
      auto hr = helmholtz_decompose(r);
      const double n0 = sobolev_norm(r, {0});
      CHECK(std::abs(inner(hr.p, hr.q)) <= 1e-10 * n0 * n0);
      CHECK(sobolev_norm(project_p(hr.p) - hr.p, {0}) <= 1e-10 * n0);
      CHECK(sobolev_norm(project_p(hr.q), {0}) <= 1e-10 * n0);
      CHECK(sobolev_norm(project_q(hr.q) - hr.q, {0}) <= 1e-10 * n0);
      CHECK(sobolev_norm(div(hr.p), {0}) <= 1e-10 * sobolev_norm(r, {1}));
    }
  }
}

TEST_CASE("Helmholtz on Chebyshev fields") {
  auto c = DomainSpec::channel(16, 32);
  auto w = random_vector_field(c, 4, 3, 2.0, true);
  auto h = helmholtz_decompose(w);
  CHECK(sobolev_norm(div(h.p), {0}) < 1e-9 * sobolev_norm(w, {1}));
  auto nc = WallData::normal_component(h.p);
  for (int i = 0; i < c.nx; ++i) {
    CHECK(std::abs(nc.y0[i]) < 1e-10);
    CHECK(std::abs(nc.y1[i]) < 1e-10);
  }
  CHECK(sobolev_norm(project_p(h.p) - h.p, {0}) < 1e-9 * sobolev_norm(w, {0}));
}

TEST_CASE("L operator") {
  auto d = DomainSpec::channel(32, 16);
  const double k = 100.0;
  LOperator flat(ScalarField::constant(d, Parity::EvenInY, k), k);
  auto rhs = random_field(d, Parity::EvenInY, 5, 1);
  rhs = rhs + (-mean(rhs));
  auto sol = l_solve(flat, rhs, std::nullopt, LSolveMode::Inverse);
  CHECK(max_diff(sol.f, (1.0 / k) * laplace_solve(rhs)) < 1e-12 * sol.f.max_abs());

  auto zero = l_solve(flat, ScalarField(d, Parity::EvenInY), WallData::zero(d.nx), LSolveMode::GL);
  CHECK(zero.f.max_abs() == 0.0);

  auto c2 = ScalarField::sample(d, Parity::EvenInY, [&](double x, double) { return k * (1 + 0.1 * std::sin(2 * pi * x)); });
  LOperator op(c2, k);
  auto r = l_solve(op, rhs, std::nullopt, LSolveMode::Inverse);
  CHECK(sobolev_norm(op.apply(r.f) - rhs, {0}) <= 1e-9 * sobolev_norm(rhs, {0}));
  CHECK(r.contraction < 0.15);
  CHECK(r.contraction > 0.005);
  CHECK(std::abs(mean(r.f)) < 1e-14);

  // self-adjointness: int g L f = -int c2 grad f . grad g
  auto f = random_field(d, Parity::EvenInY, 5, 7), g = random_field(d, Parity::EvenInY, 5, 8);
  const double lhs = inner(g, op.apply(f));
  const double rhs2 = -inner(c2 * grad(f), grad(g));
  CHECK(lhs == doctest::Approx(rhs2).epsilon(1e-10));

  LOperator far(ScalarField::sample(d, Parity::EvenInY, [&](double x, double) { return k * (1 + 0.99 * std::sin(2 * pi * x)); }), k);
  CHECK_THROWS_AS(l_solve(far, rhs, std::nullopt, LSolveMode::Inverse), DivergenceError);
}

TEST_CASE("G_L boundary solve") {
  auto d = DomainSpec::channel(16, 32);
  const double k = 1000.0;
  auto c2 = ScalarField::sample(d, Parity::General, [&](double x, double y) { return k * (1 + 0.05 * std::cos(2 * pi * x) * y); });
  LOperator op(c2, k);
  WallData a = WallData::zero(d.nx);
  for (int i = 0; i < d.nx; ++i) {
    a.y0[i] = std::sin(2 * pi * d.x(i));
    a.y1[i] = 0.5 * std::cos(4 * pi * d.x(i));
  }
  // make oint c2 a = 0
  double ca = 0, cs = 0;
  auto c0 = trace_values(c2, Wall::Y0), c1 = trace_values(c2, Wall::Y1);
  for (int i = 0; i < d.nx; ++i) { ca += c0[i] * a.y0[i] + c1[i] * a.y1[i]; cs += c0[i] + c1[i]; }
  for (int i = 0; i < d.nx; ++i) { a.y0[i] -= ca / cs; a.y1[i] -= ca / cs; }
  auto r = l_solve(op, ScalarField(d, Parity::General), a, LSolveMode::GL);
  auto lf = op.apply(r.f);
  for (int i = 0; i < lf.nx(); ++i) lf(i, 0) = lf(i, lf.rows() - 1) = 0.0;
  CHECK(lf.max_abs() < 1e-7 * k);
  auto nd = WallData::normal_derivative(r.f);
  for (int i = 0; i < d.nx; ++i) {
    CHECK(nd.y0[i] == doctest::Approx(a.y0[i]).epsilon(1e-9));
    CHECK(nd.y1[i] == doctest::Approx(a.y1[i]).epsilon(1e-9));
  }
}
