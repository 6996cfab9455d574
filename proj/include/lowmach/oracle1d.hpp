#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "lowmach/error.hpp"

namespace lowmach {

// Samples on the periodic grid x_j = j / n of [0, 1).
struct Profile1D {
  std::vector<double> v;

  int n() const { return static_cast<int>(v.size()); }
  double x(int j) const { return static_cast<double>(j) / n(); }
  static Profile1D sample(int n, const std::function<double(double)>& g);
  static Profile1D zeros(int n) { return {std::vector<double>(static_cast<std::size_t>(n), 0.0)}; }
};

double max_abs_diff(const Profile1D& a, const Profile1D& b);
double max_abs(const Profile1D& a);

// Trigonometric interpolant of a profile (Nyquist mode dropped), evaluated
// anywhere with its derivatives. Modes below roundoff are skipped.
class Trig1D {
 public:
  explicit Trig1D(const Profile1D& p);
  double operator()(double x, int derivative = 0) const;
  double integral() const { return mean_; }
  // sqrt(sum_{j<=s} ||d^j u||^2) from the coefficients
  double sobolev_norm(int s) const;

 private:
  double mean_ = 0.0;
  std::vector<int> modes_;
  std::vector<std::complex<double>> coef_;
};

// Critical time -1 / min u0' (infinity when u0' >= 0), min refined off the grid.
double burgers_horizon(const Profile1D& u0);

// u(t) = u0 o zeta(t)^{-1}, zeta(t, x) = x + t u0(x). Throws HorizonError past the horizon.
Profile1D burgers_exact(const Profile1D& u0, double t);
// Label x with x + t u0(x) = y for every grid node y.
Profile1D burgers_characteristics(const Profile1D& u0, double t);
// z(t) o zeta(t) = z0 / (1 + t u0').
Profile1D burgers_sensitivity_exact(const Profile1D& u0, const Profile1D& z0, double t);

struct BurgersOptions {
  double dt = 0.0;     // 0: half the stability limit
  double safety = 0.5;
};

// Pseudo-spectral RK4 solve of u_t + (u^2/2)_x = 0 at resolution n (2/3 dealiasing).
// Throws CflError when dt exceeds the RK4 stability limit.
Profile1D burgers_numeric(const Profile1D& u0, double t, int n, const BurgersOptions& opt = {});
double burgers_stable_dt(double umax, int n);

struct BurgersComparison {
  double t = 0.0, lambda = 0.0;
  Profile1D u_exact, u_numeric, z_exact, z_fd;
  double u_error = 0.0;  // max |u_numeric - u_exact|
  double z_error = 0.0;  // max |z_fd - z_exact|
};

// Exact and numeric flows plus the exact sensitivity and its central difference
// (burgers_exact(u0 + l z0) - burgers_exact(u0 - l z0)) / 2l, all at resolution n.
BurgersComparison burgers_compare(const Profile1D& u0, const Profile1D& z0, double t, int n, double lambda,
                                  const BurgersOptions& opt = {});

// Columns x,u_exact,u_numeric,z_exact,z_fd.
void write_burgers_csv(const std::string& path, const BurgersComparison& c);

// Central-difference defects ||D_l - z(t)||_inf over lambdas and the measured orders.
struct SensitivityConvergence {
  std::vector<double> lambdas, errors, orders;
};
SensitivityConvergence burgers_sensitivity_convergence(const Profile1D& u0, const Profile1D& z0, double t,
                                                        const std::vector<double>& lambdas);

// Data with |u0_m| ~ |m|^-(s+1), perturbed along itself: one-sided quotient
// defects in H^{s-1} and H^s. On a fixed grid both converge at first order;
// the loss shows in the defect constants (defect / lambda) under refinement,
// bounded in H^{s-1} and growing in H^s.
struct DerivativeLossReport {
  int s = 0, n = 0;
  double t = 0.0;
  std::vector<double> lambdas, error_low, error_top, order_low, order_top;
  std::vector<int> grid;  // n/4, n/2, n
  std::vector<double> constant_low, constant_top;
};
DerivativeLossReport derivative_loss_witness(int s, int n, double t, const std::vector<double>& lambdas);

}  // namespace lowmach
