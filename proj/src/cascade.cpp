#include <cmath>
#include <fstream>
#include <iomanip>

#include "lowmach/analysis.hpp"

namespace lowmach {

namespace {

ScalarField apply_l(const ScalarField& c2, const ScalarField& h) {
  const VectorField g = grad(h);
  return div(VectorField(c2 * g.x, c2 * g.y));
}

}  // namespace

CascadeFields cascade_fields(const CompressibleState& s, const Eos& eos) {
  const VectorField& u = s.u;
  const ScalarField& f = s.f;
  const ScalarField c2 = sound_speed_sq(eos, f);
  const ScalarField dc2 = sound_speed_sq_slope(eos, f);
  // J = [[a, b], [c, e]] with a = d_x u^x, b = d_y u^x, c = d_x u^y, e = d_y u^y
  const ScalarField a = dx(u.x), b = dy(u.x), c = dx(u.y), e = dy(u.y);
  const VectorField gf = grad(f);

  CascadeFields r;
  r.f = f;
  r.fdot = -(a + e);
  const ScalarField F = a * a + 2.0 * (b * c) + e * e;
  r.fddot = apply_l(c2, f) + F;

  const ScalarField c2dot = dc2 * r.fdot;
  const ScalarField qx = c2 * gf.x, qy = c2 * gf.y;
  // sum_ij u^j_i d_j(c2 f_i)
  const ScalarField jq = a * dx(qx) + c * dy(qx) + b * dx(qy) + e * dy(qy);
  const VectorField m(c2 * (a * gf.x + c * gf.y), c2 * (b * gf.x + e * gf.y));
  const ScalarField l1f = div(VectorField(c2dot * gf.x, c2dot * gf.y)) - div(m) - jq;
  const ScalarField trj3 = a * a * a + e * e * e + 3.0 * (b * c * (a + e));
  const ScalarField Fdot = -2.0 * jq - 2.0 * trj3;
  r.fdddot = apply_l(c2, r.fdot) + l1f + Fdot;
  return r;
}

CascadeReport cascade(const CompressibleState& s, const Eos& eos) {
  const CascadeFields c = cascade_fields(s, eos);
  const ScalarField c2 = sound_speed_sq(eos, s.f);
  CascadeReport r;
  r.t = s.t;
  r.k = eos.k;
  constexpr auto conv = NormConvention::IntegerSum;
  r.f4 = sobolev_norm(c.f, {4}, conv);
  r.fdot3 = sobolev_norm(c.fdot, {3}, conv);
  r.fddot2 = sobolev_norm(c.fddot, {2}, conv);
  r.fdddot1 = sobolev_norm(c.fdddot, {1}, conv);
  const VectorField g3 = grad(c.fdddot);
  const ScalarField lf2 = apply_l(c2, c.fddot);
  r.E = integrate(c2 * (g3.x * g3.x + g3.y * g3.y)) + integrate(lf2 * lf2);
  const double k = eos.k;
  r.E1 = k * k * k * k * r.f4 * r.f4 + k * k * k * r.fdot3 * r.fdot3 + k * k * r.fddot2 * r.fddot2 +
         k * r.fdddot1 * r.fdddot1 + k * k;
  const DomainSpec& d = s.f.domain();
  if (d.is_channel()) {
    const ScalarField tx = dx(c.fddot);
    double sum = 0.0;
    for (Wall w : {Wall::Y0, Wall::Y1}) {
      const auto cv = trace_values(c2, w), gx = trace_values(tx, w), f3 = trace_values(c.fdddot, w);
      for (int i = 0; i < d.nx; ++i) sum += cv[i] * cv[i] * gx[i] * gx[i] + cv[i] * f3[i] * f3[i];
    }
    r.P = 0.5 * sum * d.dx();
  }
  return r;
}

void write_cascade_csv(const std::string& path, const std::vector<CascadeReport>& rows) {
  std::ofstream os(path);
  if (!os) throw InputError("cannot open " + path + " for writing");
  os << "t,k,f_H4,fdot_H3,fddot_H2,fdddot_H1,E,E1,P\n" << std::setprecision(17);
  for (const auto& r : rows)
    os << r.t << ',' << r.k << ',' << r.f4 << ',' << r.fdot3 << ',' << r.fddot2 << ',' << r.fdddot1 << ',' << r.E
       << ',' << r.E1 << ',' << r.P << '\n';
}

}  // namespace lowmach
