#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lowmach/domain.hpp"
#include "lowmach/eos.hpp"

namespace lowmach {

constexpr double kDefaultCfl = 0.4;

struct EulerState {
  VectorField v;
  double t = 0.0;
};

struct CompressibleState {
  VectorField u;
  ScalarField f;  // log density
  double t = 0.0;
};

// Background velocity as a function of time; throws InputError outside its range.
using VelocityProvider = std::function<VectorField(double)>;

struct WaveState {
  ScalarField f;
  ScalarField phi;  // material derivative of f
  double t = 0.0;
  VelocityProvider background;
};

struct CompressibleRhs {
  VectorField du;
  ScalarField df;
};

struct WaveRhs {
  ScalarField df;
  ScalarField dphi;
};

enum class Scheme { RK4 };

// -P(grad_v v)
VectorField incompressible_rhs(const EulerState& s);
// du/dt = -grad_u u - c2 grad f,  df/dt = -grad_u f - div u
CompressibleRhs compressible_rhs(const CompressibleState& s, const Eos& eos);
// df/dt = phi - grad_u f,  dphi/dt = -grad_u phi + div(c2 grad f) + u^i_j u^j_i
WaveRhs convected_wave_rhs(const WaveState& s, const Eos& eos);

// One explicit step. Rejects dt above twice the default-safety CFL step, and
// NaN/Inf results (NonFiniteError names the field).
EulerState step(const EulerState& s, double dt, Scheme scheme = Scheme::RK4);
CompressibleState step(const CompressibleState& s, const Eos& eos, double dt, Scheme scheme = Scheme::RK4);
WaveState step(const WaveState& s, const Eos& eos, double dt, Scheme scheme = Scheme::RK4);

double cfl_dt(const EulerState& s, double cfl = kDefaultCfl);
double cfl_dt(const CompressibleState& s, const Eos& eos, double cfl = kDefaultCfl);
double cfl_dt(const WaveState& s, const Eos& eos, double cfl = kDefaultCfl);
// generic form: cfl * min(dx, dy) / (umax + sqrt(c2max))
double cfl_dt(const DomainSpec& d, double umax, double c2max, double cfl = kDefaultCfl);

// Smallest grid spacing (the channel uses 1/ny in y).
double min_spacing(const DomainSpec& d);

double kinetic_energy(const VectorField& v);               // 1/2 int |v|^2
double kinetic_energy(const CompressibleState& s);         // 1/2 int rho |u|^2
double total_mass(const ScalarField& f);                   // int exp(f)
ScalarField fdot_from_velocity(const VectorField& u);      // -div u

struct TimeSeriesRow {
  double t = 0.0;
  double kinetic = 0.0;
  double mass = 0.0;
  double f4 = 0.0;
  double fdot3 = 0.0;
  double div0 = 0.0;
  double dt = 0.0;
};

TimeSeriesRow diagnostics_row(const EulerState& s, double dt);
TimeSeriesRow diagnostics_row(const CompressibleState& s, double dt);
void write_time_series_csv(const std::string& path, const std::vector<TimeSeriesRow>& rows);

struct RunOptions {
  double t_final = 1.0;
  double dt_safety = kDefaultCfl;
  int snapshot_every = 0;        // steps between callbacks (0: only start and end)
  int series_every = 0;          // steps between time-series rows (0: about 100 rows)
  std::optional<double> dt;      // fixed step; default from the CFL step of the initial state
  double cfl_tolerance = 1.5;    // abort when dt exceeds tolerance * current CFL step
};

// Uniform step count covering [t0, t_final] with dt <= the requested step.
int step_count(double span, double dt);

template <class State>
using SnapshotCallback = std::function<void(const State&, int step)>;

struct EulerRun {
  EulerState final;
  std::vector<TimeSeriesRow> series;
};

struct CompressibleRun {
  CompressibleState final;
  std::vector<TimeSeriesRow> series;
};

EulerRun run_incompressible(const EulerState& init, const RunOptions& opt,
                            const SnapshotCallback<EulerState>& cb = {});
CompressibleRun run_compressible(const CompressibleState& init, const Eos& eos, const RunOptions& opt,
                                 const SnapshotCallback<CompressibleState>& cb = {});

}  // namespace lowmach
