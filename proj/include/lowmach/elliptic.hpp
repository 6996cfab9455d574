#pragma once

#include <optional>
#include <vector>

#include "lowmach/domain.hpp"

namespace lowmach {

// Outward normal derivative prescribed on each channel wall (nx samples each).
struct WallData {
  std::vector<double> y0;
  std::vector<double> y1;

  static WallData zero(int nx) { return {std::vector<double>(nx, 0.0), std::vector<double>(nx, 0.0)}; }
  // Outward normal derivative of f: -df/dy at y=0, df/dy at y=1.
  static WallData normal_derivative(const ScalarField& f);
  // Normal component <w, nu> of a vector field.
  static WallData normal_component(const VectorField& w);
  // Boundary integral over both walls.
  double integral(double lx) const;
  bool is_zero() const;
};

struct MeanSplit {
  ScalarField f1;  // zero mean
  double f2 = 0.0; // mean value
};

MeanSplit split_mean(const ScalarField& f);

// Inverse Laplacian with homogeneous Neumann (channel) or periodic conditions,
// applied to the zero-mean part of rhs; returns the zero-mean solution.
ScalarField inverse_laplacian(const ScalarField& rhs);

// lap g = rhs, dg/dnu = data, mean(g) = 0. Rejects rhs with nonzero mean on
// the torus and data violating  int rhs = oint data  on the channel. Nonzero
// wall data yields a Chebyshev (General) result.
ScalarField laplace_solve(const ScalarField& rhs, const std::optional<WallData>& data = std::nullopt);

// Neumann extension of wall data: lap g = const, dg/dnu = data, mean(g) = 0,
// where const = oint data / |Omega| (zero for compatible data).
ScalarField neumann_extension(const DomainSpec& d, const WallData& data);

struct Helmholtz {
  VectorField p;  // divergence free, tangent to walls
  VectorField q;  // gradient part
};

Helmholtz helmholtz_decompose(const VectorField& w);
VectorField project_p(const VectorField& w);
VectorField project_q(const VectorField& w);

// L f = div(c2 grad f)
struct LOperator {
  ScalarField c2;
  double k = 1.0;

  LOperator(ScalarField c2_, double k_);
  ScalarField apply(const ScalarField& f) const;
  // ||c2/k - 1||_4
  double smallness() const;
};

enum class LSolveMode { Inverse, GL };

struct LSolveOptions {
  double tol = 1e-9;
  int max_iter = 200;
  // GL mode: tolerate oint c2 * data != 0 by letting L f equal the matching constant.
  bool allow_constant = false;
};

struct LSolveResult {
  ScalarField f;
  int iterations = 0;
  double contraction = 0.0;  // geometric mean of successive residual ratios
  double residual = 0.0;     // ||L f - rhs||_0 / ||rhs||_0 (absolute when rhs = 0)
};

// Inverse: L f = rhs, df/dnu = 0, mean 0 (rhs must have zero mean).
// GL: L f = 0, df/dnu = data, mean 0 (requires oint c2 data = 0).
// Both run the Neumann series f <- f + (1/k) lap^{-1}(rhs - L f).
LSolveResult l_solve(const LOperator& op, const ScalarField& rhs, const std::optional<WallData>& data,
                     LSolveMode mode, const LSolveOptions& opt = {});

struct OperatorNormEstimate {
  double value = 0.0;   // max ratio over samples
  int samples = 0;
};

// max ||L^{-1} r||_0 / ||r||_0 over random zero-mean r
OperatorNormEstimate measure_inverse_norm(const LOperator& op, int samples, std::uint64_t seed);
// max ||G_L a||_1 / ||a||_{boundary,1/2} over random compatible wall data
OperatorNormEstimate measure_gl_norm(const LOperator& op, int samples, std::uint64_t seed);

}  // namespace lowmach
