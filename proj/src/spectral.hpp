#pragma once

#include <complex>
#include <vector>

#include "lowmach/domain.hpp"

namespace lowmach::detail {

using cplx = std::complex<double>;

// Unnormalized real-to-complex transforms over an n0 x n1 row-major array
// (n1 fastest); the complex side holds n0 x (n1/2+1) entries.
void r2c_2d(int n0, int n1, const double* in, cplx* out);
void c2r_2d(int n0, int n1, const cplx* in, double* out);
void r2c_1d(int n, const double* in, cplx* out);
void c2r_1d(int n, const cplx* in, double* out);

// Normalized Fourier coefficients of a field on its periodic working grid.
// Torus: nx x ny. Channel cosine/sine fields: reflected to an nx x 2ny grid
// of y-period 2.
struct Spectrum {
  int nx = 0;
  int my = 0;
  double lx = 1.0;
  double lyw = 1.0;
  std::vector<cplx> c;

  int nxh() const { return nx / 2 + 1; }
  cplx& at(int n, int m) { return c[static_cast<std::size_t>(n) * nxh() + m]; }
  const cplx& at(int n, int m) const { return c[static_cast<std::size_t>(n) * nxh() + m]; }
  int signed_n(int n) const { return n <= my / 2 ? n : n - my; }
  double kx(int m) const;
  double ky(int n) const;
  bool nyquist(int n, int m) const { return m == nx / 2 || n == my / 2; }
};

Spectrum make_spectrum(const DomainSpec& d);
// Fourier coefficients (requires a non-General field).
Spectrum forward(const ScalarField& f);
// Back to grid values; for OddInY the wall rows are set to exactly zero.
ScalarField inverse(const Spectrum& s, const DomainSpec& d, Parity p);

Spectrum deriv_x(const Spectrum& s);
Spectrum deriv_y(const Spectrum& s);
Spectrum laplace(const Spectrum& s);
void truncate_two_thirds(Spectrum& s);

// Sum over all modes of w(|k|^2) |c|^2 (half-spectrum storage accounted for).
double weighted_energy(const Spectrum& s, const std::function<double(double)>& w);

// Row-by-row 1D transform in x (used for Chebyshev fields): rows x (nx/2+1).
std::vector<cplx> rows_forward(const ScalarField& f);
std::vector<double> rows_inverse(const std::vector<cplx>& c, int nx, int rows);

}  // namespace lowmach::detail
