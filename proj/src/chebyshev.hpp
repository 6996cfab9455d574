#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lowmach/domain.hpp"

namespace lowmach::detail {

// Chebyshev-Lobatto grid on [0,1]: y_j = (1 - cos(pi j / n)) / 2.
struct ChebGrid {
  int n = 0;
  std::vector<double> y;
  Eigen::MatrixXd D;   // d/dy
  Eigen::MatrixXd D2;  // d^2/dy^2
  Eigen::VectorXd w;   // Clenshaw-Curtis weights on [0,1]
};

const ChebGrid& cheb_grid(int n);
double cheb_node(int j, int n);

ScalarField cheb_dx(const ScalarField& f);
ScalarField cheb_dy(const ScalarField& f);
ScalarField cheb_dyy(const ScalarField& f);
double cheb_integrate(const ScalarField& f);
double cheb_sobolev_sq(const ScalarField& f, int s);

// Solves  lap g = rhs + c  with outward normal derivative a (wall y=0) and
// b (wall y=1), mean(g) = 0. The constant c absorbs any compatibility defect
// and is returned through `c` when non-null.
ScalarField cheb_neumann(const ScalarField& rhs, const std::vector<double>& a,
                         const std::vector<double>& b, double* c = nullptr);

}  // namespace lowmach::detail
