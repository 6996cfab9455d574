#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "lowmach/domain.hpp"
#include "lowmach/eos.hpp"
#include "lowmach/solvers.hpp"

namespace lowmach {

// Exact: direct trigonometric summation. Fast: spectral upsampling followed by
// local high-order Lagrange interpolation on the refined grid.
enum class Interpolation { Exact, Fast };

std::string to_string(Interpolation i);
Interpolation interpolation_from_string(const std::string& s);

// Evaluates a Periodic/EvenInY/OddInY field at arbitrary points.
class FieldSampler {
 public:
  FieldSampler(const ScalarField& f, Interpolation mode, bool with_gradient = false);
  ~FieldSampler();
  FieldSampler(FieldSampler&&) noexcept;
  FieldSampler& operator=(FieldSampler&&) noexcept;

  double value(double x, double y) const;
  void value_and_gradient(double x, double y, double& v, double& gx, double& gy) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Lagrangian state: one marker per grid node, labelled by its initial position.
struct FlowMap {
  VectorField displacement;  // zeta(t, x) - x
  VectorField velocity;      // zeta-dot(t, x) = u(t, zeta(t, x))
  ScalarField jacobian;      // det D zeta(t) at the labels
  double t = 0.0;

  static FlowMap identity(const DomainSpec& d, double t0 = 0.0);
  // identity with zeta-dot = u0
  static FlowMap identity(const VectorField& u0, double t0 = 0.0);
  const DomainSpec& domain() const { return displacement.domain(); }
  double pos_x(int i, int j) const;
  double pos_y(int i, int j) const;
};

// det(I + grad d), spectral derivatives.
ScalarField jacobian_of(const VectorField& displacement);

// u evaluated at the marker positions x + displacement, returned as a field over labels.
VectorField sample_at_markers(const VectorField& u, const VectorField& displacement, Interpolation mode);

// RK4 marker step with velocities from `u` at t, t+dt/2, t+dt. Throws
// DegenerateMapError at the first node with J <= 0.
FlowMap flow_advance(const FlowMap& flow, const VelocityProvider& u, double dt,
                     Interpolation mode = Interpolation::Exact);

// Recomputes the Jacobian and fails on J <= 0.
void refresh_jacobian(FlowMap& flow);

struct InverseMap {
  std::vector<double> x, y;  // labels zeta^{-1}(node), row-major like field values
  int max_iterations = 0;
  double max_residual = 0.0;
};

// Per-node Newton solve of  X + d(X) = node  from  node - d(node); tolerance 1e-10.
InverseMap invert(const FlowMap& flow, Interpolation mode = Interpolation::Exact, double tol = 1e-10,
                  int max_iter = 50);

enum class PullbackDirection { WithZeta, WithZetaInverse };

// WithZeta: values of f at the marker positions (a field over labels).
// WithZetaInverse: values at grid nodes of f o zeta^{-1} (f given over labels).
ScalarField pullback(const ScalarField& f, const FlowMap& flow, PullbackDirection dir,
                     Interpolation mode = Interpolation::Exact);
VectorField pullback(const VectorField& u, const FlowMap& flow, PullbackDirection dir,
                     Interpolation mode = Interpolation::Exact);
// Same with a precomputed inverse map (WithZetaInverse only).
ScalarField pullback_inverse(const ScalarField& f, const FlowMap& flow, const InverseMap& inv,
                             Interpolation mode = Interpolation::Exact);

// -log J(zeta) o zeta^{-1}
ScalarField log_density_change(const FlowMap& flow, const InverseMap& inv, Interpolation mode = Interpolation::Exact);
// f0 o zeta^{-1} - log J(zeta) o zeta^{-1}: the log density carried by the flow.
ScalarField density_from_jacobian(const FlowMap& flow, const ScalarField& f0,
                                  Interpolation mode = Interpolation::Exact);

struct ZROperators {
  VectorField Z;       // Q(grad_a P a) o zeta, a = alpha o zeta^{-1}
  VectorField R;       // P(grad_a Q a) o zeta
  VectorField Ztilde;  // Z - R
};

ZROperators zrz_operators(const FlowMap& flow, const VectorField& alpha, Interpolation mode = Interpolation::Exact);
// The same operators given the Eulerian field a directly (flow used only for the final composition).
ZROperators zrz_from_eulerian(const FlowMap& flow, const VectorField& a, Interpolation mode = Interpolation::Exact);

struct LagrangianOptions {
  double dt_safety = kDefaultCfl;
  std::optional<double> dt;
  Interpolation interpolation = Interpolation::Exact;
  int snapshot_every = 0;  // steps between callbacks (0: start and end only)
};

struct LagrangianPair {
  FlowMap flow;             // zeta(t), zeta-dot(t)
  CompressibleState state;  // Eulerian (u, f) at t
};

using LagrangianCallback = std::function<void(const CompressibleState&, const FlowMap&, int step)>;

// One coupled RK4 step of the compressible system and its markers.
LagrangianPair coupled_step(const LagrangianPair& p, const Eos& eos, double dt, Interpolation mode,
                            bool need_velocity = true);

// Runs the compressible solver and the markers together from (u0, rho0) to time t.
LagrangianPair psi_t(const VectorField& u0, const ScalarField& rho0, const Eos& eos, double t,
                     const LagrangianOptions& opt = {}, const LagrangianCallback& cb = {});

// ---- successive approximations ----------------------------------------

struct ApproxOptions {
  int n_max = 2;
  double T = 0.5;
  double dt_safety = kDefaultCfl;
  int snapshots = 10;           // output times evenly spaced in (0, T]
  bool track_markers = false;   // also integrate zeta_n for every entry
  Interpolation interpolation = Interpolation::Fast;
};

struct ApproxSnapshot {
  double t = 0.0;
  VectorField u_exact;
  ScalarField f_exact;
  std::vector<VectorField> u;       // u_n, n = 0..n_max
  std::vector<VectorField> grad_g;  // grad g_n (zero for n = 0)
  std::vector<ScalarField> f;       // f_n (f_0 = exact initial f transported trivially: the initial data)
  std::vector<FlowMap> flows;       // zeta_n when tracked
};

struct ApproxSequence {
  double k = 0.0;
  int n_max = 0;
  std::vector<ApproxSnapshot> snapshots;
  // sup over snapshots
  std::vector<double> increment_h1;  // ||u_n - u_{n-1}||_1, index n (entry 0 unused)
  std::vector<double> increment_h3;
  std::vector<double> error_h1;      // ||u_exact - u_n||_1
  std::vector<double> error_h3;
  std::vector<double> grad_g_h3;     // ||grad g_n||_3
  std::vector<double> lagrangian_increment_h3;  // ||(zeta_n, zeta_n') - (zeta_{n-1}, ...)||_3 when tracked
};

// Marches the exact compressible flow and the entries n = 0..n_max jointly:
//   w_n' = -P(grad_{u_n} u_n),  u_n = w_n + grad g_n,  grad g_n = -grad lap^{-1} phi_n,
//   (f_n, phi_n) solve the convected wave equation over u_{n-1} with forcing from u_{n-1},
//   f_n(0) = f0, phi_n(0) = -div u0, w_n(0) = P u0,  u_0 = w_0 (incompressible).
ApproxSequence approx_sequence(const VectorField& u0k, const ScalarField& rho0k, const Eos& eos,
                               const ApproxOptions& opt);

// ||(d, v)||_s over labels: sqrt(||displacement||_s^2 + ||velocity||_s^2)
double lagrangian_norm(const VectorField& displacement, const VectorField& velocity, SobolevIndex s);

}  // namespace lowmach
