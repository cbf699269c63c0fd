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
#include "spinoc/oracles.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>

namespace spinoc::oracles {

namespace {

constexpr Complex I(0.0, 1.0);
constexpr double kPi = std::numbers::pi;

// Symmetric frequency list k = -n/2 .. n/2 with half weights at both ends.
struct Modes {
  std::vector<double> freq, weight;
};

Modes modes(int n, double length) {
  Modes m;
  for (int k = -n / 2; k <= n / 2; ++k) {
    m.freq.push_back(2.0 * kPi * k / length);
    m.weight.push_back(std::abs(k) == n / 2 ? 0.5 : 1.0);
  }
  return m;
}

CGrid2 moyal(const PhaseSymbol& a, const CGrid2& b, double hbar, const PhaseGrid& g, double side) {
  require_tiny(g);
  const Modes mx = modes(g.nx, g.lx), mp = modes(g.np, g.lp);
  const int nxi = static_cast<int>(mx.freq.size()), neta = static_cast<int>(mp.freq.size());
  // b(x, p) = sum B(xi, eta) exp(i (xi x - eta p))
  CGrid2 coef(nxi, neta);
  for (int a_ = 0; a_ < nxi; ++a_)
    for (int b_ = 0; b_ < neta; ++b_) {
      Complex s = 0.0;
      for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.np; ++j)
          s += b(i, j) * std::exp(-I * (mx.freq[a_] * g.x(i) - mp.freq[b_] * g.p(j)));
      coef(a_, b_) = s * mx.weight[a_] * mp.weight[b_] / double(g.nx * g.np);
    }
  CGrid2 out(g.nx, g.np);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.np; ++j) {
      const double x = g.x(i), p = g.p(j);
      Complex s = 0.0;
      for (int a_ = 0; a_ < nxi; ++a_)
        for (int b_ = 0; b_ < neta; ++b_) {
          const double xi = mx.freq[a_], eta = mp.freq[b_];
          s += coef(a_, b_) * a(x + side * 0.5 * hbar * eta, p + side * 0.5 * hbar * xi) *
               std::exp(I * (xi * x - eta * p));
        }
      out(i, j) = s;
    }
  return out;
}

Grid2 times_p(const Grid2& f, const PhaseGrid& g) { return f.rowwise() * g.ps().transpose().array(); }

double max_imag(const CGrid2& a) { return a.imag().abs().maxCoeff(); }

}  // namespace

void require_tiny(const PhaseGrid& g, int limit) {
  g.validate();
  if (g.nx > limit || g.np > limit)
    throw ConfigError("quadrature oracles need grids of at most " + std::to_string(limit) + " nodes per axis");
}

Grid2 direct_theta(const AxisSymbol& v, const Grid2& f, int sign, double hbar, const PhaseGrid& g) {
  require_tiny(g);
  const Modes m = modes(g.np, g.lp);
  Grid2 out(g.nx, g.np);
  for (int i = 0; i < g.nx; ++i) {
    const double x = g.x(i);
    for (int j = 0; j < g.np; ++j) {
      Complex s = 0.0;
      for (std::size_t k = 0; k < m.freq.size(); ++k) {
        const double eta = m.freq[k];
        const double vp = v(x + 0.5 * hbar * eta), vm = v(x - 0.5 * hbar * eta);
        const Complex delta = sign < 0 ? Complex(vp - vm) / (I * hbar) : Complex(vp + vm);
        Complex inner = 0.0;
        for (int jp = 0; jp < g.np; ++jp) inner += f(i, jp) * std::exp(-I * eta * (g.p(j) - g.p(jp)));
        s += m.weight[k] * delta * inner;
      }
      out(i, j) = s.real() / g.np;
    }
  }
  return out;
}

Grid2 direct_dx(const Grid2& f, const PhaseGrid& g) {
  Grid2 out(g.nx, g.np);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.np; ++j) {
      Complex s = 0.0;
      for (int k = -g.nx / 2 + 1; k < g.nx / 2; ++k) {
        const double xi = 2.0 * kPi * k / g.lx;
        for (int ip = 0; ip < g.nx; ++ip) s += I * xi * f(ip, j) * std::exp(I * xi * (g.x(i) - g.x(ip)));
      }
      out(i, j) = s.real() / g.nx;
    }
  return out;
}

CGrid2 moyal_left(const PhaseSymbol& a, const CGrid2& b, double hbar, const PhaseGrid& g) {
  return moyal(a, b, hbar, g, 1.0);
}

CGrid2 moyal_right(const PhaseSymbol& a, const CGrid2& b, double hbar, const PhaseGrid& g) {
  return moyal(a, b, hbar, g, -1.0);
}

namespace {

struct Compositions {
  CGrid2 left, right;  // (p#(K#F) + K#(p#F))/2 and ((F#K)#p + (F#p)#K)/2
  CGrid2 whole_left, whole_right;
};

Compositions compose(const Grid2& f, const AxisSymbol& k, double hbar, const PhaseGrid& g) {
  const PhaseSymbol ps = [](double, double p) { return Complex(p); };
  const PhaseSymbol ks = [&k](double x, double) { return Complex(k(x)); };
  const PhaseSymbol pk = [&k](double x, double p) { return Complex(p * k(x)); };
  const CGrid2 F = f.cast<Complex>();
  Compositions c;
  c.left = 0.5 * (moyal_left(ps, moyal_left(ks, F, hbar, g), hbar, g) +
                  moyal_left(ks, moyal_left(ps, F, hbar, g), hbar, g));
  c.right = 0.5 * (moyal_right(ps, moyal_right(ks, F, hbar, g), hbar, g) +
                   moyal_right(ks, moyal_right(ps, F, hbar, g), hbar, g));
  c.whole_left = moyal_left(pk, F, hbar, g);
  c.whole_right = moyal_right(pk, F, hbar, g);
  return c;
}

}  // namespace

PkRoutes commutator_pk(const Grid2& f, const AxisSymbol& k, double hbar, const PhaseGrid& g) {
  PkRoutes r;
  const Grid2 dxf = direct_dx(f, g);
  const Grid2 tm = direct_theta(k, f, -1, hbar, g);
  r.literal = hbar * (times_p(tm, g) - 0.5 * direct_theta(k, dxf, +1, hbar, g));
  r.symmetric = hbar * (0.5 * (times_p(tm, g) + direct_theta(k, times_p(f, g), -1, hbar, g)) -
                        0.25 * (direct_theta(k, dxf, +1, hbar, g) + direct_dx(direct_theta(k, f, +1, hbar, g), g)));
  const Compositions c = compose(f, k, hbar, g);
  const CGrid2 whole = (c.whole_left - c.whole_right) / I;
  const CGrid2 composed = (c.left - c.right) / I;
  r.moyal_whole = whole.real();
  r.moyal_composed = composed.real();
  r.imag_residue = std::max(max_imag(whole), max_imag(composed));
  return r;
}

PkRoutes anticommutator_pk(const Grid2& f, const AxisSymbol& k, double hbar, const PhaseGrid& g) {
  PkRoutes r;
  const Grid2 dxf = direct_dx(f, g);
  const Grid2 tp = direct_theta(k, f, +1, hbar, g);
  r.literal = times_p(tp, g) + 0.5 * hbar * hbar * direct_theta(k, dxf, -1, hbar, g);
  r.symmetric = 0.5 * (times_p(tp, g) + direct_theta(k, times_p(f, g), +1, hbar, g)) +
                0.25 * hbar * hbar * (direct_theta(k, dxf, -1, hbar, g) + direct_dx(direct_theta(k, f, -1, hbar, g), g));
  const Compositions c = compose(f, k, hbar, g);
  const CGrid2 whole = c.whole_left + c.whole_right;
  const CGrid2 composed = c.left + c.right;
  r.moyal_whole = whole.real();
  r.moyal_composed = composed.real();
  r.imag_residue = std::max(max_imag(whole), max_imag(composed));
  return r;
}

double matrix_inner_product(const WignerState& f, const WignerState& h) {
  using M2 = Eigen::Matrix2cd;
  M2 sigma[4];
  sigma[0] << 1, 0, 0, 1;
  sigma[1] << 0, 1, 1, 0;
  sigma[2] << 0, Complex(0, -1), Complex(0, 1), 0;
  sigma[3] << 1, 0, 0, -1;
  double total = 0.0;
  for (int i = 0; i < f.grid.nx; ++i)
    for (int j = 0; j < f.grid.np; ++j) {
      M2 a = M2::Zero(), b = M2::Zero();
      for (int c = 0; c < 4; ++c) {
        a += f[c](i, j) * sigma[c];
        b += h[c](i, j) * sigma[c];
      }
      total += 0.5 * (a.adjoint() * b).trace().real();
    }
  return total * f.grid.cell();
}

double fd_gradient(const std::function<double(const ControlSignal&)>& objective, const ControlSignal& u,
                   int k, int i, double eps) {
  if (eps <= 0.0) eps = 1e-5 * std::max(1.0, std::abs(u.values()(k, i)));
  ControlSignal a = u, b = u;
  a.values()(k, i) += eps;
  b.values()(k, i) -= eps;
  return (objective(a) - objective(b)) / (2.0 * eps * u.weights()(k));
}

Vec3 precession(const Vec3& d0, const Vec3& b, const Vec3& k, const Vec3& p, double t) {
  const Vec3 a = 2.0 * (p.cross(k) - b);
  const double n = a.norm();
  if (n == 0.0) return d0;
  return Eigen::AngleAxisd(n * t, a / n) * d0;
}

std::pair<Vec3, Vec3> oscillator(const Vec3& x0, const Vec3& p0, double mass, double stiffness, double t) {
  const double w = std::sqrt(stiffness / mass);
  const double c = std::cos(w * t), s = std::sin(w * t);
  return {x0 * c + p0 / (mass * w) * s, p0 * c - mass * w * x0 * s};
}

double coherent_h1p_squared(double hbar, double p_bar, double sigma, const Vec3& d) {
  const double sx2 = hbar * sigma * sigma / 2.0, sp2 = hbar / (2.0 * sigma * sigma);
  const double g2 = 1.0 / (4.0 * kPi * std::sqrt(sx2 * sp2));
  return (1.0 + d.squaredNorm()) / 4.0 * g2 *
         (1.0 + p_bar * p_bar + sp2 / 2.0 + 1.0 / (2.0 * sx2) + 1.0 / (2.0 * sp2));
}

}  // namespace spinoc::oracles
