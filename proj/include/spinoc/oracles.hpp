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

// Brute-force references for tiny grids. Everything here is deliberately
// transform-free: sums are written out over the quadrature nodes.

#include "spinoc/control.hpp"
#include "spinoc/wigner_core.hpp"

#include <functional>

namespace spinoc::oracles {

/// Largest grid accepted by the quadrature oracles.
inline constexpr int kTinyMax = 16;

/// Symbol of (x, p) for the Moyal-product oracle.
using PhaseSymbol = std::function<Complex(double, double)>;

void require_tiny(const PhaseGrid& g, int limit = kTinyMax);

/// Direct trapezoidal double sum over (eta, p') of
///   (1/2pi) int delta(x, eta) F(x, p') exp(-i eta (p - p')) dp' deta,
/// eta in [-pi/dp, pi/dp] with half weights at both ends.
/// sign = -1 uses delta_- = (V(x + hbar eta/2) - V(x - hbar eta/2)) / (i hbar),
/// sign = +1 uses delta_+ = V(x + hbar eta/2) + V(x - hbar eta/2).
Grid2 direct_theta(const AxisSymbol& v, const Grid2& f, int sign, double hbar, const PhaseGrid& g);

/// Moyal product computed from the Fourier expansion of the right (left)
/// factor on the grid, with the analytic symbol shifted by (+-hbar eta/2,
/// +-hbar xi/2). Half weights at the Nyquist frequencies in both directions.
CGrid2 moyal_left(const PhaseSymbol& a, const CGrid2& b, double hbar, const PhaseGrid& g);   ///< a # b
CGrid2 moyal_right(const PhaseSymbol& a, const CGrid2& b, double hbar, const PhaseGrid& g);  ///< b # a

/// (1/i) [p K, f]_# and {p K, f}_# for a position symbol K, by independent routes.
struct PkRoutes {
  Grid2 literal;          ///< direct_theta: hbar (p T- f - T+ dx f / 2), resp. p T+ f + hbar^2/2 T- dx f
  Grid2 symmetric;        ///< direct_theta assembly of the Weyl-symmetric form
  Grid2 moyal_whole;      ///< 4D quadrature with the symbol p K(x) as a whole
  Grid2 moyal_composed;   ///< 4D quadrature of (p#K + K#p)/2 composed with f
  double imag_residue = 0.0;
};

PkRoutes commutator_pk(const Grid2& f, const AxisSymbol& k, double hbar, const PhaseGrid& g);
PkRoutes anticommutator_pk(const Grid2& f, const AxisSymbol& k, double hbar, const PhaseGrid& g);

/// Trigonometric-interpolant derivative along x by direct sums.
Grid2 direct_dx(const Grid2& f, const PhaseGrid& g);

/// 1/2 tr sum f^dagger h over reassembled 2x2 matrices.
double matrix_inner_product(const WignerState& f, const WignerState& h);

/// Central difference (J(u + eps e_ki) - J(u - eps e_ki)) / (2 eps w_k), w_k the
/// trapezoid weight of node k. eps <= 0 picks 1e-5 max(1, |u_ki|).
double fd_gradient(const std::function<double(const ControlSignal&)>& objective, const ControlSignal& u,
                   int k, int i, double eps = 0.0);

/// d(t) for d' = 2 (p ^ K - B) ^ d with constant fields and momentum.
Vec3 precession(const Vec3& d0, const Vec3& b, const Vec3& k, const Vec3& p, double t);

/// Harmonic oscillator with U = k/2 |x|^2: (x(t), p(t)).
std::pair<Vec3, Vec3> oscillator(const Vec3& x0, const Vec3& p0, double mass, double stiffness, double t);

/// Closed-form squared H1_p norm of coherent_wigner on the whole line.
double coherent_h1p_squared(double hbar, double p_bar, double sigma, const Vec3& d);

}  // namespace spinoc::oracles
