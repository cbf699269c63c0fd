/*
 Copyright 2026 The spinoc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#pragma once

#include "spinoc/common.hpp"

#include <unsupported/Eigen/FFT>

#include <array>
#include <complex>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace spinoc {

using Complex = std::complex<double>;
/// Real phase-space field, Nx rows (position) by Np columns (momentum).
using Grid2 = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CGrid2 = Eigen::Array<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
/// A position-only symbol restricted to the x1 axis.
using AxisSymbol = std::function<double(double)>;

/// Periodic box [x0, x0 + Lx) x [p0, p0 + Lp).
struct PhaseGrid {
  int nx = 64;
  int np = 64;
  double x0 = -4.0;
  double lx = 8.0;
  double p0 = -4.0;
  double lp = 8.0;

  static PhaseGrid centered(int nx, int np, double half_x, double half_p) {
    return {nx, np, -half_x, 2 * half_x, -half_p, 2 * half_p};
  }

  double dx() const { return lx / nx; }
  double dp() const { return lp / np; }
  double cell() const { return dx() * dp(); }
  double x(int i) const { return x0 + i * dx(); }
  double p(int j) const { return p0 + j * dp(); }
  VecX xs() const;
  VecX ps() const;
  /// Signed angular frequencies conjugate to p (FFT ordering); the Nyquist
  /// entry is -pi/dp.
  VecX kappa() const;
  /// Signed angular frequencies conjugate to x.
  VecX mu() const;

  std::vector<std::string> violations() const;
  void validate() const;
  bool operator==(const PhaseGrid& o) const = default;
};

/// Pauli components (f0, f1, f2, f3) of a 2x2 hermitian Wigner matrix.
struct WignerState {
  PhaseGrid grid;
  double hbar = 1.0;
  double time = 0.0;
  std::array<Grid2, 4> f;

  static WignerState zeros(const PhaseGrid& grid, double hbar);
  Grid2& operator[](int c) { return f[static_cast<std::size_t>(c)]; }
  const Grid2& operator[](int c) const { return f[static_cast<std::size_t>(c)]; }
  bool all_finite() const;

  WignerState& axpy(double a, const WignerState& o);  ///< this += a * o
  WignerState& scale(double a);
};

/// Transform engine for one grid. Caches FFT plans; not thread-safe, use one
/// instance per thread.
class Spectral {
 public:
  explicit Spectral(const PhaseGrid& grid);

  const PhaseGrid& grid() const { return grid_; }

  /// Row-wise DFT along p with kernel exp(-i kappa p).
  void p_forward(const Grid2& in, CGrid2& out);
  void p_forward(const CGrid2& in, CGrid2& out);
  /// Row-wise inverse DFT along p; keeps the real part.
  void p_inverse(const CGrid2& in, Grid2& out);
  /// In-place spectral d/dx (column-wise, Nyquist dropped) of the p-spectrum of
  /// a real field. Only columns 0..Np/2 are transformed; the rest are mirrored
  /// by conjugation.
  void x_derivative(CGrid2& a);

  Grid2 dx(const Grid2& f);
  Grid2 dp(const Grid2& f);
  /// Trigonometric-interpolation shift of every momentum column j along x:
  /// result(x, p_j) = f(x - shifts(j), p_j).
  Grid2 shift_x(const Grid2& f, const VecX& shifts);

 private:
  PhaseGrid grid_;
  Eigen::FFT<double> fft_;
  VecX kappa_, mu_;
  std::vector<Complex> col_in_, col_out_;
  std::vector<double> real_col_;
};

/// Fourier multipliers of the shifted-argument symbols of V at momentum
/// frequency -kappa:  minus = (V(x + hbar kappa/2) - V(x - hbar kappa/2))/hbar,
/// so that Theta^- = P^{-1}[ i minus P[f] ]; plus = V(x + .) + V(x - .).
/// The Nyquist column of `minus` is zero, matching half trapezoid weights at
/// +-eta_max in the quadrature definition.
struct ThetaSymbol {
  Grid2 minus;
  Grid2 plus;
  bool constant = false;
};

ThetaSymbol make_theta_symbol(const AxisSymbol& v, const PhaseGrid& grid, double hbar);

Grid2 theta_minus(const AxisSymbol& v, const Grid2& f, double hbar, const PhaseGrid& grid);
Grid2 theta_plus(const AxisSymbol& v, const Grid2& f, double hbar, const PhaseGrid& grid);
Grid2 apply_theta(const Grid2& multiplier, bool odd, const Grid2& f, Spectral& s);

/// Six-sigma envelope check of a coherent state against the box; one entry
/// per offending axis, each with a suggested domain length.
std::vector<std::string> coherent_envelope_violations(const PhaseGrid& grid, double hbar, double x_bar,
                                                      double p_bar, double sigma);

/// Exact Wigner transform of a Gaussian coherent state with spin d.
WignerState coherent_wigner(const PhaseGrid& grid, double hbar, double x_bar, double p_bar, double sigma,
                            const Vec3& d_bar);

/// <f, h> = 1/2 tr int f^dagger h = sum (f0 h0 + f.h) dx dp.
double inner_product(const WignerState& f, const WignerState& h);
double l2_norm(const WignerState& f);
/// (sum_i int (1 + p^2) f_i^2 + (d_x f_i)^2 + (d_p f_i)^2)^{1/2}
double h1p_norm(const WignerState& f);

struct Moments {
  double mass = 0.0;
  double mean_x = 0.0;
  double mean_p = 0.0;
  Vec3 spin = Vec3::Zero();
  double var_x = 0.0;
  double var_p = 0.0;
};

Moments moments(const WignerState& f, double min_mass = 1e-14);

/// Flat binary snapshot: int64 Nx, Np; doubles x0, Lx, p0, Lp, hbar, time;
/// then f0..f3 as row-major doubles (native endianness).
void write_binary(std::ostream& out, const WignerState& f);
WignerState read_binary(std::istream& in);
/// Long-format CSV: x, p, f0, f1, f2, f3.
void write_csv(std::ostream& out, const WignerState& f);

}  // namespace spinoc
