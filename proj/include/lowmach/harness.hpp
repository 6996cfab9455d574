#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lowmach/analysis.hpp"
#include "lowmach/domain.hpp"
#include "lowmach/eos.hpp"
#include "lowmach/lagrange.hpp"
#include "lowmach/solvers.hpp"

namespace lowmach {

// ---- configuration ----------------------------------------------------------

// Flat "key = value" text; '#' starts a comment. Unknown keys are rejected.
struct Config {
  DomainSpec domain = DomainSpec::torus(32, 32);
  Eos eos = Eos::gamma_law(1000.0);

  double t_final = 0.5;
  double dt_safety = kDefaultCfl;
  std::optional<double> dt;
  int series_every = 0;
  Interpolation interpolation = Interpolation::Fast;

  std::vector<double> k_list{1e2, 1e3, 1e4};  // "inf" runs the incompressible solver only
  int n_max = 2;
  int samples = 10;  // matched output times in (0, t_final]

  // u_0k = v0 + gradient_amplitude k^{-1/2} grad chi, f_0k = density_amplitude chi_2 / k,
  // with v0 solenoidal of sup norm velocity_amplitude and chi, chi_2 of sup norm 1.
  double velocity_amplitude = 0.25;
  double gradient_amplitude = 0.05;
  double density_amplitude = 1.0;
  int band = 3;

  int compat_max_iter = 30;
  double compat_tol = 1e-8;

  double probe_t = 0.1;
  std::vector<double> probe_lambdas{0.1, 0.05, 0.025, 0.0125};

  int burgers_n = 2048;
  double burgers_t = 0.5;
  double burgers_amplitude = 0.1;
  std::vector<double> burgers_lambdas{1e-2, 1e-3, 1e-4};

  int operator_samples = 4;

  std::uint64_t seed = 1;
  std::string output_dir = "out";

  RunOptions run_options() const;
  // the documented keys with their current values
  std::map<std::string, std::string> entries() const;
};

Config parse_config(const std::string& text);
Config load_config(const std::string& path);
// Applies one "key=value" assignment; throws ConfigError on unknown keys or bad values.
void apply_setting(Config& c, const std::string& key, const std::string& value);
std::vector<std::string> config_keys();

// ---- initial data -----------------------------------------------------------

struct InitialData {
  VectorField v0;    // solenoidal part
  VectorField grad;  // grad chi (sup of chi = 1)
  ScalarField chi2;  // zero mean, sup 1
};

InitialData initial_data(const Config& c);
VectorField velocity_for(const InitialData& d, const Config& c, double k);
ScalarField log_density_for(const InitialData& d, const Config& c, double k);

// Perturbation direction of the same well-prepared form: z0 = w + k^{-1/2} grad chi3, h0 = chi4 / k,
// w solenoidal with sup 0.1, chi3 and chi4 of sup 1.
struct Direction {
  VectorField z0;
  ScalarField h0;
};
Direction probe_direction(const Config& c, double k);

// Channel data on the Chebyshev grid whose wall behaviour violates all three
// compatibility conditions: u0k plus a General gradient of size k^{-1/2}, f0k plus
// a General field of size 1/k.
CompressibleState wall_violating_data(const Config& c, double k);

// ---- slope fits -------------------------------------------------------------

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;  // log value at k = 1
  double stderr_ = 0.0;    // standard error of the slope (0 for three collinear points)
  int points = 0;
  double constant() const;  // exp(intercept)
};

// Least squares on (log k, log value); needs >= 3 points, all values > 0.
SlopeFit fit_slope(const std::vector<double>& k, const std::vector<double>& value);

// ---- k sweep ------------------------------------------------------------------

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct SweepCell {
  double k = 0.0;
  bool ok = true;
  std::string error;
  double horizon = kNaN;  // time reached (t_final on success)

  // sup over matched times
  double u_err_h1 = kNaN, u_err_h3 = kNaN;  // ||u_k - v||
  double rho_err_l2 = kNaN;                  // ||rho_k - 1||_0
  double f4 = kNaN, fdot3 = kNaN, fddot2 = kNaN, fdddot1 = kNaN;  // cascade norms
  double E = kNaN, E1 = kNaN;

  // successive approximations (index n)
  std::vector<double> increment_h1, error_h1, grad_g_h3;

  // L operator at the initial density
  double linv_norm = kNaN, gl_norm = kNaN;

  std::vector<CascadeReport> cascade_rows;
};

struct SweepResult {
  Config config;
  std::vector<SweepCell> cells;
  std::vector<double> times;  // matched output times
  std::map<std::string, SlopeFit> slopes;
  std::vector<std::string> incomplete;  // "k=...: message"
};

struct SweepOptions {
  bool approx = true;     // run the successive approximations
  bool operators = true;  // measure L^{-1} and G_L norms
};

SweepResult run_sweep(const Config& c, const SweepOptions& opt = {});

// ---- writers ------------------------------------------------------------------

void write_sweep_csv(const std::string& path, const SweepResult& r);
void write_sweep_json(const std::string& path, const SweepResult& r);
// gnuplot table: "# k col..." then one row per finite k
void write_sweep_dat(const std::string& path, const SweepResult& r);
void write_compat_json(const std::string& path, const CompatProjection& p);
void write_probe_json(const std::string& path, const ProbeReport& r);
void write_sequence_json(const std::string& path, const ApproxSequence& s);

// Columns of a CSV file by header name (numeric cells; empty cells read as NaN).
std::map<std::string, std::vector<double>> read_csv_columns(const std::string& path);

}  // namespace lowmach
