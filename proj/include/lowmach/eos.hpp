#pragma once

#include <array>
#include <string>

#include "lowmach/domain.hpp"

namespace lowmach {

enum class EosFamily { Linear, GammaLaw };

std::string to_string(EosFamily f);
EosFamily eos_family_from_string(const std::string& s);

// Pressure law with stiffness k = p'(1).
//   Linear:   p = k (rho - 1)
//   GammaLaw: p = (k / gamma) (rho^gamma - 1)
struct Eos {
  EosFamily family = EosFamily::GammaLaw;
  double k = 1000.0;
  double gamma = 1.4;

  static Eos linear(double k);
  static Eos gamma_law(double k, double gamma = 1.4);

  void validate() const;
  double pressure(double rho) const;
  // p^(order)(rho), order >= 1
  double derivative(double rho, int order) const;
  // c^2 as a function of f = log rho, and its f-derivative p''(rho) rho
  double c2_of_f(double f) const;
  double dc2_df(double f) const;
};

struct EosFields {
  ScalarField rho, p, c2, q;
};

EosFields eos_eval(const Eos& eos, const ScalarField& f);
ScalarField sound_speed_sq(const Eos& eos, const ScalarField& f);
// d(c^2)/df evaluated pointwise
ScalarField sound_speed_sq_slope(const Eos& eos, const ScalarField& f);

struct MaterialChain {
  ScalarField c2_dot, c2_ddot, c2_dddot;
  ScalarField q_dot, q_ddot, q_dddot;
};

// Material derivatives of c^2 and q = 1/c^2 given the cascade f, f', f'', f'''.
MaterialChain c2_material_chain(const Eos& eos, const ScalarField& f, const ScalarField& fdot,
                                const ScalarField& fddot, const ScalarField& fdddot);

struct EosAudit {
  double k = 0.0;
  double a0 = 0.0;                 // sqrt(k) ||rho - 1||_4
  double a1 = 0.0;                 // max_l ||p^(l)(rho)||_4 / k
  int worst_order = 0;
  std::array<double, 5> ratios{};  // ||p^(l)(rho)||_4 / k, l = 1..5
};

// Evaluates the derivative bounds of the pressure law on a state. Throws
// NumericalError naming the order l when ||p^(l)(rho)||_4 > k * a1_limit.
EosAudit audit_assumption(const Eos& eos, const ScalarField& f, double a1_limit);

}  // namespace lowmach
