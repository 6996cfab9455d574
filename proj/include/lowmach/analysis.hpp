#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lowmach/domain.hpp"
#include "lowmach/elliptic.hpp"
#include "lowmach/eos.hpp"
#include "lowmach/lagrange.hpp"
#include "lowmach/solvers.hpp"

namespace lowmach {

// ---- compatibility conditions ------------------------------------------

// Wall values of the three compatibility functions (flat walls, outward normal).
struct CompatTraces {
  WallData phi1, phi2, phi3;
  // boundary norm of the largest single term of each phi_i
  double scale1 = 0.0, scale2 = 0.0, scale3 = 0.0;
};

struct CompatIteration {
  int iteration = 0;
  double phi1 = 0.0, phi2 = 0.0, phi3 = 0.0;
  double scaled = 0.0;  // max_i phi_i / scale_i
  double ratio = 0.0;   // scaled / previous scaled (0 for the first entry)
};

struct CompatReport {
  double phi1 = 0.0, phi2 = 0.0, phi3 = 0.0;  // ||phi_i||_{boundary, 7/2 - i}
  double scale1 = 0.0, scale2 = 0.0, scale3 = 0.0;
  std::vector<CompatIteration> history;
  double scaled() const;
};

// Torus: all zero. Mixed parity/General inputs are evaluated on the Chebyshev grid.
CompatTraces compat_traces(const VectorField& u0, const ScalarField& f0, const Eos& eos);
CompatReport compat_residuals(const VectorField& u0, const ScalarField& f0, const Eos& eos);

struct CompatOptions {
  int max_iter = 30;
  double tol = 1e-8;  // on max_i phi_i / scale_i
};

struct CompatProjection {
  VectorField u;
  ScalarField f;
  CompatReport report;  // residuals of the result, history of the iteration
  double contraction = 0.0;  // max_i phi_i after one iteration / before, over violated conditions
  int iterations = 0;
};

// Corrects f0 and the gradient part of u0 (the solenoidal part is kept) until
// all residuals fall below tol relative to their scales. Each iteration
// inverts the dominant wall terms: c2 d_nu f for phi_1, c2^2 d_nu lap f for
// phi_3 (f update) and -c2 d_nu lap g for phi_2 (g update). Throws
// DivergenceError when the residual stops contracting.
CompatProjection compat_project(const VectorField& u0, const ScalarField& f0, const Eos& eos,
                                const CompatOptions& opt = {});

// ---- material-derivative cascade -----------------------------------------

struct CascadeFields {
  ScalarField f, fdot, fddot, fdddot;
};

struct CascadeReport {
  double t = 0.0;
  double k = 0.0;
  double f4 = 0.0, fdot3 = 0.0, fddot2 = 0.0, fdddot1 = 0.0;  // integer-sum norms
  double E = 0.0;   // int c2 |grad fddd|^2 + (L fdd)^2
  double E1 = 0.0;  // k^4 ||f||_4^2 + k^3 ||f'||_3^2 + k^2 ||f''||_2^2 + k ||f'''||_1^2 + k^2
  double P = 0.0;   // 1/2 oint c^4 |d_x fdd|^2 + c2 fddd^2 (channel)
};

// Material derivatives of f from the state at one time:
//   f' = -div u,  f'' = L f + F,  f''' = L f' + L1 f + F'
// with F = u^i_j u^j_i, L1 f = div((c2)' grad f) - d_i(c2 u^j_i f_j) - u^j_i d_j(c2 f_i)
// and F' = -2 u^j_i d_j(c2 f_i) - 2 u^i_j u^j_k u^k_i.
CascadeFields cascade_fields(const CompressibleState& s, const Eos& eos);
CascadeReport cascade(const CompressibleState& s, const Eos& eos);

void write_cascade_csv(const std::string& path, const std::vector<CascadeReport>& rows);

// ---- linearized (sensitivity) solver ---------------------------------------

// Base trajectory sampled at every step of a fixed-step run, with its time
// derivatives for Hermite interpolation at RK4 midpoints.
struct BaseTrajectory {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<CompressibleState> states;
  std::vector<CompressibleRhs> rates;

  double t_end() const { return t0 + dt * (static_cast<double>(states.size()) - 1.0); }
  // Exact at stored times, cubic Hermite in between. Rejects times outside the range.
  CompressibleState at(double t, const Eos& eos) const;
};

BaseTrajectory record_trajectory(const CompressibleState& init, const Eos& eos, double t_final,
                                 const RunOptions& opt = {});

struct SensitivityState {
  VectorField z;  // velocity variation
  ScalarField h;  // log-density variation
  double t = 0.0;
};

struct SensitivityRhs {
  VectorField dz;
  ScalarField dh;
};

// Tangent of the compressible right-hand side at the base state s.
SensitivityRhs linearized_rhs(const CompressibleState& s, const SensitivityState& v, const Eos& eos);

// Integrates the tangent system along the base with the base step size;
// returns the state at every `every`-th base time (and the final one).
std::vector<SensitivityState> linearized_solve(const BaseTrajectory& base, const Eos& eos, const VectorField& z0,
                                               const ScalarField& h0, int every = 1);

// ---- differentiability probes ---------------------------------------------

struct ProbeOptions {
  double t = 0.1;
  std::vector<double> lambdas{0.1, 0.05, 0.025, 0.0125};
  std::optional<double> dt;  // shared by every run (default: CFL step of the base data / 2)
  Interpolation interpolation = Interpolation::Exact;
};

struct ProbeRow {
  double lambda = 0.0;
  double lagrangian_h3 = 0.0, lagrangian_h2 = 0.0;  // ||D_l - D_{l/2}|| (0 for the last lambda)
  double eulerian_h3 = 0.0, eulerian_h2 = 0.0;
  double d_norm_h3 = 0.0;                           // ||D_l||_3 (Lagrangian)
};

struct ProbeReport {
  double t = 0.0, k = 0.0, dt = 0.0;
  std::vector<ProbeRow> rows;
  // successive ratios ||D_l - D_{l/2}|| / ||D_{l/2} - D_{l/4}||
  std::vector<double> lagrangian_ratios, eulerian_ratios;
};

struct ProbeDerivative {
  VectorField displacement, velocity;  // Lagrangian central difference
  VectorField eulerian;                // Eulerian central difference of u(t)
};

// Central differences of psi_t along (z0, h0): data (u0 + l z0, f0 + l h0).
ProbeDerivative central_difference(const VectorField& u0, const ScalarField& f0, const VectorField& z0,
                                   const ScalarField& h0, const Eos& eos, double lambda, const ProbeOptions& opt);
ProbeReport derivative_probe(const VectorField& u0, const ScalarField& f0, const VectorField& z0,
                             const ScalarField& h0, const Eos& eos, const ProbeOptions& opt = {});

}  // namespace lowmach
