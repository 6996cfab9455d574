#include "lowmach/eos.hpp"

#include <cmath>

namespace lowmach {

std::string to_string(EosFamily f) { return f == EosFamily::Linear ? "linear" : "gamma"; }

EosFamily eos_family_from_string(const std::string& s) {
  if (s == "linear" || s == "Linear") return EosFamily::Linear;
  if (s == "gamma" || s == "GammaLaw" || s == "gamma_law") return EosFamily::GammaLaw;
  throw ConfigError("unknown eos.family '" + s + "' (expected linear or gamma)");
}

Eos Eos::linear(double k) {
  Eos e{EosFamily::Linear, k, 1.0};
  e.validate();
  return e;
}

Eos Eos::gamma_law(double k, double gamma) {
  Eos e{EosFamily::GammaLaw, k, gamma};
  e.validate();
  return e;
}

void Eos::validate() const {
  if (!(k > 0.0) || !std::isfinite(k)) throw InputError("eos stiffness k must be positive and finite");
  if (family == EosFamily::GammaLaw && !(gamma >= 1.0)) throw InputError("eos gamma must be >= 1");
}

double Eos::pressure(double rho) const {
  if (family == EosFamily::Linear) return k * (rho - 1.0);
  return k / gamma * (std::pow(rho, gamma) - 1.0);
}

double Eos::derivative(double rho, int order) const {
  if (order < 1) throw InputError("pressure derivative order must be >= 1");
  if (family == EosFamily::Linear) return order == 1 ? k : 0.0;
  double c = k;
  for (int j = 1; j < order; ++j) c *= (gamma - j);
  return c * std::pow(rho, gamma - order);
}

double Eos::c2_of_f(double f) const {
  if (family == EosFamily::Linear) return k;
  return k * std::exp((gamma - 1.0) * f);
}

double Eos::dc2_df(double f) const {
  if (family == EosFamily::Linear) return 0.0;
  return k * (gamma - 1.0) * std::exp((gamma - 1.0) * f);
}

ScalarField sound_speed_sq(const Eos& eos, const ScalarField& f) {
  ScalarField c2 = map(f, [&](double x) { return eos.c2_of_f(x); });
  for (double v : c2.values())
    if (!(v > 0.0)) throw NumericalError("non-positive sound speed squared (unphysical state)");
  return c2;
}

ScalarField sound_speed_sq_slope(const Eos& eos, const ScalarField& f) {
  return map(f, [&](double x) { return eos.dc2_df(x); });
}

EosFields eos_eval(const Eos& eos, const ScalarField& f) {
  EosFields r;
  r.rho = map(f, [](double x) { return std::exp(x); });
  r.p = map(r.rho, [&](double x) { return eos.pressure(x); });
  r.c2 = sound_speed_sq(eos, f);
  r.q = map(r.c2, [](double x) { return 1.0 / x; });
  return r;
}

MaterialChain c2_material_chain(const Eos& eos, const ScalarField& f, const ScalarField& fd,
                                const ScalarField& fdd, const ScalarField& fddd) {
  const DomainSpec& d = f.domain();
  const Parity p = f.parity();
  MaterialChain m{ScalarField(d, p), ScalarField(d, p), ScalarField(d, p),
                  ScalarField(d, p), ScalarField(d, p), ScalarField(d, p)};
  for (const ScalarField* g : {&fd, &fdd, &fddd})
    if (g->parity() != p || !(g->domain() == d)) throw ParityError("material chain inputs must share grid and parity");
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double rho = std::exp(f.values()[i]);
    const double a1 = fd.values()[i], a2 = fdd.values()[i], a3 = fddd.values()[i];
    const double A = rho * a1;                                  // rho'
    const double B = rho * a1 * a1 + rho * a2;                  // rho''
    const double C = rho * a3 + 3.0 * rho * a1 * a2 + rho * a1 * a1 * a1;  // rho'''
    const double p2 = eos.derivative(rho, 2), p3 = eos.derivative(rho, 3), p4 = eos.derivative(rho, 4);
    const double c1 = p2 * A;
    const double c2 = p3 * A * A + p2 * B;
    const double c3 = p4 * A * A * A + 3.0 * p3 * A * B + p2 * C;
    const double q = 1.0 / eos.derivative(rho, 1);
    m.c2_dot.values()[i] = c1;
    m.c2_ddot.values()[i] = c2;
    m.c2_dddot.values()[i] = c3;
    m.q_dot.values()[i] = -q * q * c1;
    m.q_ddot.values()[i] = -q * q * c2 + 2.0 * q * q * q * c1 * c1;
    m.q_dddot.values()[i] = -q * q * c3 + 6.0 * q * q * q * c1 * c2 - 6.0 * q * q * q * q * c1 * c1 * c1;
  }
  return m;
}

EosAudit audit_assumption(const Eos& eos, const ScalarField& f, double a1_limit) {
  EosAudit a;
  a.k = eos.k;
  const ScalarField rho = map(f, [](double x) { return std::exp(x); });
  a.a0 = std::sqrt(eos.k) * sobolev_norm(rho + (-1.0), {4});
  for (int l = 1; l <= 5; ++l) {
    const ScalarField pl = map(rho, [&](double r) { return eos.derivative(r, l); });
    a.ratios[l - 1] = sobolev_norm(pl, {4}) / eos.k;
    if (a.ratios[l - 1] > a.a1) {
      a.a1 = a.ratios[l - 1];
      a.worst_order = l;
    }
    if (a.ratios[l - 1] > a1_limit)
      throw NumericalError("pressure-law derivative bound violated at order " + std::to_string(l) +
                           ": ||p^(l)||_4 / k = " + std::to_string(a.ratios[l - 1]));
  }
  return a;
}

}  // namespace lowmach
