#include "spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace lowmach::detail {

namespace {

enum class Kind { R2C, C2R };

struct PlanCache {
  std::mutex mu;
  std::map<std::tuple<Kind, int, int>, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, p] : plans) fftw_destroy_plan(p);
  }

  // n0 == 0 marks a 1D plan of length n1.
  fftw_plan get(Kind kind, int n0, int n1) {
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(kind, n0, n1);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    const int rows = n0 == 0 ? 1 : n0;
    const std::size_t nreal = static_cast<std::size_t>(rows) * n1;
    const std::size_t ncplx = static_cast<std::size_t>(rows) * (n1 / 2 + 1);
    double* r = fftw_alloc_real(nreal);
    fftw_complex* c = fftw_alloc_complex(ncplx);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p;
    if (kind == Kind::R2C)
      p = n0 == 0 ? fftw_plan_dft_r2c_1d(n1, r, c, flags) : fftw_plan_dft_r2c_2d(n0, n1, r, c, flags);
    else
      p = n0 == 0 ? fftw_plan_dft_c2r_1d(n1, c, r, flags) : fftw_plan_dft_c2r_2d(n0, n1, c, r, flags);
    fftw_free(r);
    fftw_free(c);
    plans.emplace(key, p);
    return p;
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void run_c2r(fftw_plan p, std::size_t ncplx, const cplx* in, double* out) {
  // c2r overwrites its input
  thread_local std::vector<cplx> buf;
  buf.assign(in, in + ncplx);
  fftw_execute_dft_c2r(p, reinterpret_cast<fftw_complex*>(buf.data()), out);
}

}  // namespace

void r2c_2d(int n0, int n1, const double* in, cplx* out) {
  fftw_execute_dft_r2c(cache().get(Kind::R2C, n0, n1), const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void c2r_2d(int n0, int n1, const cplx* in, double* out) {
  run_c2r(cache().get(Kind::C2R, n0, n1), static_cast<std::size_t>(n0) * (n1 / 2 + 1), in, out);
}

void r2c_1d(int n, const double* in, cplx* out) {
  fftw_execute_dft_r2c(cache().get(Kind::R2C, 0, n), const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void c2r_1d(int n, const cplx* in, double* out) {
  run_c2r(cache().get(Kind::C2R, 0, n), static_cast<std::size_t>(n / 2 + 1), in, out);
}

double Spectrum::kx(int m) const { return 2.0 * std::numbers::pi * m / lx; }
double Spectrum::ky(int n) const { return 2.0 * std::numbers::pi * signed_n(n) / lyw; }

Spectrum make_spectrum(const DomainSpec& d) {
  Spectrum s;
  s.nx = d.nx;
  s.lx = d.lx;
  if (d.is_channel()) {
    s.my = 2 * d.ny;
    s.lyw = 2.0;
  } else {
    s.my = d.ny;
    s.lyw = d.ly;
  }
  s.c.assign(static_cast<std::size_t>(s.my) * s.nxh(), cplx(0.0, 0.0));
  return s;
}

Spectrum forward(const ScalarField& f) {
  const DomainSpec& d = f.domain();
  if (f.parity() == Parity::General)
    throw ParityError("Fourier transform requested for a Chebyshev (General) field");
  Spectrum s = make_spectrum(d);
  const int nx = d.nx;
  const auto& v = f.values();
  if (!d.is_channel()) {
    r2c_2d(s.my, nx, v.data(), s.c.data());
  } else {
    thread_local std::vector<double> ext;
    ext.resize(static_cast<std::size_t>(s.my) * nx);
    const double sign = f.parity() == Parity::OddInY ? -1.0 : 1.0;
    const int ny = d.ny;
    std::copy(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(ny + 1) * nx, ext.begin());
    for (int j = ny + 1; j < 2 * ny; ++j) {
      const double* src = v.data() + static_cast<std::size_t>(2 * ny - j) * nx;
      double* dst = ext.data() + static_cast<std::size_t>(j) * nx;
      for (int i = 0; i < nx; ++i) dst[i] = sign * src[i];
    }
    r2c_2d(s.my, nx, ext.data(), s.c.data());
  }
  const double norm = 1.0 / (static_cast<double>(s.my) * nx);
  for (auto& c : s.c) c *= norm;
  return s;
}

ScalarField inverse(const Spectrum& s, const DomainSpec& d, Parity p) {
  ScalarField f(d, p);
  auto& v = f.values();
  const int nx = d.nx;
  if (!d.is_channel()) {
    c2r_2d(s.my, nx, s.c.data(), v.data());
  } else {
    thread_local std::vector<double> ext;
    ext.resize(static_cast<std::size_t>(s.my) * nx);
    c2r_2d(s.my, nx, s.c.data(), ext.data());
    std::copy(ext.begin(), ext.begin() + static_cast<std::ptrdiff_t>(d.ny + 1) * nx, v.begin());
    if (p == Parity::OddInY) {
      for (int i = 0; i < nx; ++i) {
        f(i, 0) = 0.0;
        f(i, d.ny) = 0.0;
      }
    }
  }
  return f;
}

Spectrum deriv_x(const Spectrum& s) {
  Spectrum r = s;
  for (int n = 0; n < s.my; ++n)
    for (int m = 0; m < s.nxh(); ++m)
      r.at(n, m) = s.nyquist(n, m) ? cplx(0.0, 0.0) : cplx(0.0, s.kx(m)) * s.at(n, m);
  return r;
}

Spectrum deriv_y(const Spectrum& s) {
  Spectrum r = s;
  for (int n = 0; n < s.my; ++n) {
    const double k = s.ky(n);
    for (int m = 0; m < s.nxh(); ++m)
      r.at(n, m) = s.nyquist(n, m) ? cplx(0.0, 0.0) : cplx(0.0, k) * s.at(n, m);
  }
  return r;
}

Spectrum laplace(const Spectrum& s) {
  Spectrum r = s;
  for (int n = 0; n < s.my; ++n) {
    const double ky = s.ky(n);
    for (int m = 0; m < s.nxh(); ++m) {
      const double kx = s.kx(m);
      r.at(n, m) = s.nyquist(n, m) ? cplx(0.0, 0.0) : -(kx * kx + ky * ky) * s.at(n, m);
    }
  }
  return r;
}

void truncate_two_thirds(Spectrum& s) {
  const int mcut = s.nx / 3;
  const int ncut = s.my / 3;
  for (int n = 0; n < s.my; ++n) {
    const bool ykeep = std::abs(s.signed_n(n)) <= ncut && n != s.my / 2;
    for (int m = 0; m < s.nxh(); ++m)
      if (!ykeep || m > mcut) s.at(n, m) = cplx(0.0, 0.0);
  }
}

double weighted_energy(const Spectrum& s, const std::function<double(double)>& w) {
  double sum = 0.0;
  for (int n = 0; n < s.my; ++n) {
    const double ky = s.ky(n);
    for (int m = 0; m < s.nxh(); ++m) {
      const double kx = s.kx(m);
      const double mult = (m == 0 || 2 * m == s.nx) ? 1.0 : 2.0;
      sum += mult * w(kx * kx + ky * ky) * std::norm(s.at(n, m));
    }
  }
  return sum;
}

std::vector<cplx> rows_forward(const ScalarField& f) {
  const int nx = f.nx();
  const int nh = nx / 2 + 1;
  std::vector<cplx> out(static_cast<std::size_t>(f.rows()) * nh);
  const double norm = 1.0 / nx;
  for (int j = 0; j < f.rows(); ++j) {
    cplx* o = out.data() + static_cast<std::size_t>(j) * nh;
    r2c_1d(nx, f.values().data() + static_cast<std::size_t>(j) * nx, o);
    for (int m = 0; m < nh; ++m) o[m] *= norm;
  }
  return out;
}

std::vector<double> rows_inverse(const std::vector<cplx>& c, int nx, int rows) {
  const int nh = nx / 2 + 1;
  std::vector<double> out(static_cast<std::size_t>(rows) * nx);
  for (int j = 0; j < rows; ++j)
    c2r_1d(nx, c.data() + static_cast<std::size_t>(j) * nh, out.data() + static_cast<std::size_t>(j) * nx);
  return out;
}

}  // namespace lowmach::detail
