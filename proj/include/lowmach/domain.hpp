#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lowmach/error.hpp"

namespace lowmach {

enum class Geometry { Torus2D, Channel2D };

// Expansion used in y. Periodic: Fourier (torus). EvenInY / OddInY: cosine /
// sine series on the channel, sampled on uniform nodes y_j = j/ny including
// both walls. General: Chebyshev-Lobatto nodes in y on the channel, for data
// with arbitrary wall behaviour.
enum class Parity { Periodic, EvenInY, OddInY, General };

enum class Wall { Y0, Y1 };

std::string to_string(Geometry g);
std::string to_string(Parity p);
Geometry geometry_from_string(const std::string& s);
Parity parity_from_string(const std::string& s);

struct DomainSpec {
  Geometry geometry = Geometry::Torus2D;
  int nx = 32;
  int ny = 32;
  double lx = 1.0;
  double ly = 1.0;  // y-period on the torus; wall separation (1) on the channel

  static DomainSpec torus(int nx, int ny, double lx = 1.0, double ly = 0.0);
  static DomainSpec channel(int nx, int ny, double lx = 1.0);

  void validate() const;
  bool is_channel() const { return geometry == Geometry::Channel2D; }
  int rows(Parity p) const;
  double x(int i) const { return lx * i / nx; }
  double y(int j, Parity p) const;
  double dx() const { return lx / nx; }
  double dy() const { return ly / ny; }
  double area() const { return lx * ly; }
  Parity scalar_parity() const { return is_channel() ? Parity::EvenInY : Parity::Periodic; }
  bool operator==(const DomainSpec&) const = default;
};

class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(const DomainSpec& d, Parity p);
  ScalarField(const DomainSpec& d, Parity p, std::vector<double> values);

  static ScalarField sample(const DomainSpec& d, Parity p,
                            const std::function<double(double, double)>& fn);
  static ScalarField constant(const DomainSpec& d, Parity p, double c);

  const DomainSpec& domain() const { return d_; }
  Parity parity() const { return p_; }
  int nx() const { return d_.nx; }
  int rows() const { return rows_; }
  std::size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }

  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }
  double operator()(int i, int j) const { return v_[static_cast<std::size_t>(j) * d_.nx + i]; }
  double& operator()(int i, int j) { return v_[static_cast<std::size_t>(j) * d_.nx + i]; }
  double x(int i) const { return d_.x(i); }
  double y(int j) const { return d_.y(j, p_); }

  double max_abs() const;
  double min() const;
  double max() const;
  bool all_finite() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double a);
  // this += a * o
  ScalarField& axpy(double a, const ScalarField& o);

 private:
  DomainSpec d_{};
  Parity p_ = Parity::Periodic;
  int rows_ = 0;
  std::vector<double> v_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a);
ScalarField operator*(double s, ScalarField a);
ScalarField operator*(ScalarField a, double s);
// Pointwise product; parity follows the usual sign rule.
ScalarField operator*(const ScalarField& a, const ScalarField& b);
// Pointwise quotient; the divisor must not be OddInY.
ScalarField operator/(const ScalarField& a, const ScalarField& b);
ScalarField operator+(ScalarField a, double c);

// Pointwise nonlinear map. OddInY input is rejected: g(odd) is not odd.
ScalarField map(const ScalarField& f, const std::function<double(double)>& g);

Parity product_parity(Parity a, Parity b);
Parity y_derivative_parity(Parity p);

struct VectorField {
  ScalarField x;
  ScalarField y;

  VectorField() = default;
  VectorField(ScalarField ux, ScalarField uy);
  // Zero field with admissible parities for the domain.
  static VectorField zero(const DomainSpec& d, bool general = false);
  static VectorField sample(const DomainSpec& d,
                            const std::function<double(double, double)>& fx,
                            const std::function<double(double, double)>& fy);

  const DomainSpec& domain() const { return x.domain(); }
  bool is_general() const { return x.parity() == Parity::General; }
  double max_abs() const;
  bool all_finite() const { return x.all_finite() && y.all_finite(); }

  VectorField& operator+=(const VectorField& o);
  VectorField& operator-=(const VectorField& o);
  VectorField& operator*=(double a);
  VectorField& axpy(double a, const VectorField& o);
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator-(VectorField a);
VectorField operator*(double s, VectorField a);
VectorField operator*(const ScalarField& s, const VectorField& a);

// ---- spectral calculus --------------------------------------------------

ScalarField dx(const ScalarField& f);
ScalarField dy(const ScalarField& f);
VectorField grad(const ScalarField& f);
ScalarField div(const VectorField& u);
// delta = -div, the formal adjoint of grad.
ScalarField delta(const VectorField& u);
ScalarField laplacian(const ScalarField& f);

enum class DiffOp { Grad, Delta, Laplacian };
// Scalar input: Grad or Laplacian. Vector input: Delta.
VectorField differentiate_grad(const ScalarField& f);
ScalarField differentiate(const ScalarField& f, DiffOp op);
ScalarField differentiate(const VectorField& u, DiffOp op);

// 2/3-rule truncation (no-op for General fields).
ScalarField dealias(const ScalarField& f);
VectorField dealias(const VectorField& u);
// Band-limited product: pointwise product followed by 2/3 truncation.
ScalarField dealiased_product(const ScalarField& a, const ScalarField& b);

// u . grad f
ScalarField directional(const VectorField& u, const ScalarField& f);
// grad_u w  (componentwise u . grad w^i)
VectorField covariant(const VectorField& u, const VectorField& w);
// u^i_j u^j_i
ScalarField gradient_contraction(const VectorField& u);

// ---- integrals and norms ---------------------------------------------------

double integrate(const ScalarField& f);
double mean(const ScalarField& f);
double inner(const ScalarField& a, const ScalarField& b);
double inner(const VectorField& a, const VectorField& b);

struct SobolevIndex {
  double s = 0.0;
  bool is_integer() const;
};

enum class NormConvention { Auto, IntegerSum, Bessel };

NormConvention resolve_convention(SobolevIndex s, NormConvention c);
std::string to_string(NormConvention c);

double sobolev_norm(const ScalarField& f, SobolevIndex s,
                    NormConvention c = NormConvention::Auto);
double sobolev_norm(const VectorField& u, SobolevIndex s,
                    NormConvention c = NormConvention::Auto);

// 1D spectral H^s norm of a periodic trace sampled on nx points over [0, lx).
double boundary_norm(std::span<const double> trace, double lx, SobolevIndex s,
                     NormConvention c = NormConvention::Auto);

std::vector<double> trace_values(const ScalarField& f, Wall w);

struct WallTrace {
  std::vector<double> values;
  double norm = 0.0;               // ||trace||_{boundary, s}
  double restriction_ratio = 0.0;  // ||trace||_{boundary, s-1/2} / ||f||_s
};

WallTrace wall_trace(const ScalarField& f, Wall w, SobolevIndex s);

// ---- conversions and evaluation ----------------------------------------

// Exact resampling of a cosine/sine series onto the Chebyshev-Lobatto grid.
ScalarField to_general(const ScalarField& f);
VectorField to_general(const VectorField& u);

// Evaluates the trigonometric interpolant of a Periodic/EvenInY/OddInY field
// at arbitrary points by direct summation over the populated band.
class PointEvaluator {
 public:
  explicit PointEvaluator(const ScalarField& f);
  double value(double x, double y) const;
  void value_and_gradient(double x, double y, double& v, double& gx, double& gy) const;

 private:
  int mx_ = 0;
  int my_ = 0;
  double kx0_ = 0.0;
  double ky0_ = 0.0;
  std::vector<double> re_;
  std::vector<double> im_;
};

// Random smooth field with modes up to `band` (in each direction),
// amplitude decaying like (1+|m|^2)^(-decay/2). Deterministic in `seed`.
ScalarField random_field(const DomainSpec& d, Parity p, int band, std::uint64_t seed,
                         double decay = 2.0);
VectorField random_vector_field(const DomainSpec& d, int band, std::uint64_t seed,
                                double decay = 2.0, bool general = false);

}  // namespace lowmach
