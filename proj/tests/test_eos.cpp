#include <cmath>
#include <numbers>

#include "doctest.h"
#include "lowmach/eos.hpp"

using namespace lowmach;

TEST_CASE("equilibrium and closed forms") {
  auto d = DomainSpec::torus(16, 16);
  for (auto eos : {Eos::linear(100.0), Eos::gamma_law(100.0, 1.4)}) {
    auto r = eos_eval(eos, ScalarField(d, Parity::Periodic));
    CHECK(r.rho.max() == 1.0);
    CHECK(r.c2.max_abs() == doctest::Approx(100.0).epsilon(1e-15));
    CHECK(r.q.max_abs() == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(eos.derivative(1.0, 1) == 100.0);
  }
  auto f = ScalarField::sample(d, Parity::Periodic, [](double x, double) { return 0.01 * std::sin(2 * std::numbers::pi * x); });
  auto lin = eos_eval(Eos::linear(50.0), f);
  CHECK(lin.c2.min() == 50.0);
  CHECK(lin.c2.max() == 50.0);
  auto gam = eos_eval(Eos::gamma_law(50.0, 1.4), f);
  for (std::size_t i = 0; i < f.size(); ++i)
    CHECK(gam.c2.values()[i] == doctest::Approx(50.0 * std::exp(0.4 * f.values()[i])).epsilon(1e-14));
  auto g4 = eos_eval(Eos::gamma_law(200.0, 1.4), f);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(g4.c2.values()[i] == 4.0 * gam.c2.values()[i]);
  CHECK_THROWS_AS(Eos::gamma_law(10.0, 0.5), InputError);
}

TEST_CASE("pressure derivatives match finite differences") {
  const Eos e = Eos::gamma_law(7.0, 1.7);
  const double h = 1e-4;
  for (double rho : {0.8, 1.0, 1.3})
    for (int l = 1; l <= 4; ++l) {
      const double fd = (e.derivative(rho + h, l) - e.derivative(rho - h, l)) / (2 * h);
      const double ex = e.derivative(rho, l + 1);
      CHECK(fd == doctest::Approx(ex).epsilon(1e-6));
    }
  const double fd = (e.pressure(1.0 + h) - e.pressure(1.0 - h)) / (2 * h);
  CHECK(fd == doctest::Approx(7.0).epsilon(1e-8));
}

TEST_CASE("material chain") {
  auto d = DomainSpec::torus(8, 8);
  ScalarField z(d, Parity::Periodic);
  auto f = random_field(d, Parity::Periodic, 2, 5);
  f *= 0.01;
  auto a = random_field(d, Parity::Periodic, 2, 6);
  auto lin = c2_material_chain(Eos::linear(10.0), f, a, a, a);
  CHECK(lin.c2_dot.max_abs() == 0.0);
  CHECK(lin.c2_ddot.max_abs() == 0.0);
  CHECK(lin.c2_dddot.max_abs() == 0.0);
  auto gz = c2_material_chain(Eos::gamma_law(10.0), f, z, z, z);
  CHECK(gz.c2_dot.max_abs() == 0.0);
  CHECK(gz.q_dddot.max_abs() == 0.0);

  // along a particle the material derivative is an ordinary time derivative:
  // f(t) = 0.3 sin(t) + 0.1 t^2, c2(t) = p'(exp f(t))
  const Eos e = Eos::gamma_law(3.0, 1.6);
  auto fpath = [](double t) { return 0.3 * std::sin(t) + 0.1 * t * t; };
  auto c2 = [&](double t) { return e.derivative(std::exp(fpath(t)), 1); };
  auto q = [&](double t) { return 1.0 / c2(t); };
  const double t0 = 0.7, h = 1e-3;
  auto d1 = [&](auto g) { return (g(t0 + h) - g(t0 - h)) / (2 * h); };
  auto d2 = [&](auto g) { return (g(t0 + h) - 2 * g(t0) + g(t0 - h)) / (h * h); };
  auto d3 = [&](auto g) { return (g(t0 + 2 * h) - 2 * g(t0 + h) + 2 * g(t0 - h) - g(t0 - 2 * h)) / (2 * h * h * h); };
  auto one = [&](double v) { return ScalarField::constant(d, Parity::Periodic, v); };
  auto ch = c2_material_chain(e, one(fpath(t0)), one(0.3 * std::cos(t0) + 0.2 * t0), one(-0.3 * std::sin(t0) + 0.2),
                              one(-0.3 * std::cos(t0)));
  CHECK(ch.c2_dot(0, 0) == doctest::Approx(d1(c2)).epsilon(1e-6));
  CHECK(ch.c2_ddot(0, 0) == doctest::Approx(d2(c2)).epsilon(1e-5));
  CHECK(ch.c2_dddot(0, 0) == doctest::Approx(d3(c2)).epsilon(1e-4));
  CHECK(ch.q_dot(0, 0) == doctest::Approx(d1(q)).epsilon(1e-6));
  CHECK(ch.q_ddot(0, 0) == doctest::Approx(d2(q)).epsilon(1e-5));
  CHECK(ch.q_dddot(0, 0) == doctest::Approx(d3(q)).epsilon(1e-4));
}

TEST_CASE("derivative-bound audit") {
  auto d = DomainSpec::torus(16, 16);
  auto f = random_field(d, Parity::Periodic, 3, 2);
  f *= 1e-6;
  const Eos e = Eos::gamma_law(1000.0, 1.4);
  auto a = audit_assumption(e, f, 10.0);
  CHECK(a.ratios[0] == doctest::Approx(1.0).epsilon(0.05));
  CHECK(a.a1 >= a.ratios[3]);
  CHECK_THROWS_AS(audit_assumption(e, f, 0.5), NumericalError);
}
