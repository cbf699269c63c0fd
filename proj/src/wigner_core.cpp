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
#include "spinoc/wigner_core.hpp"

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace spinoc {

namespace {

bool power_of_two(int n) { return n >= 2 && (n & (n - 1)) == 0; }

VecX angular_frequencies(int n, double length) {
  VecX k(n);
  for (int j = 0; j < n; ++j) k(j) = 2.0 * std::numbers::pi * (j < n / 2 ? j : j - n) / length;
  return k;
}

void require_same_grid(const WignerState& a, const WignerState& b) {
  if (!(a.grid == b.grid)) throw ConfigError("Wigner states live on different grids");
}

}  // namespace

VecX PhaseGrid::xs() const { return VecX::LinSpaced(nx, x0, x0 + (nx - 1) * dx()); }
VecX PhaseGrid::ps() const { return VecX::LinSpaced(np, p0, p0 + (np - 1) * dp()); }
VecX PhaseGrid::kappa() const { return angular_frequencies(np, lp); }
VecX PhaseGrid::mu() const { return angular_frequencies(nx, lx); }

std::vector<std::string> PhaseGrid::violations() const {
  std::vector<std::string> out;
  if (!power_of_two(nx)) out.push_back("grid.nx = " + std::to_string(nx) + " is not a power of two");
  if (!power_of_two(np)) out.push_back("grid.np = " + std::to_string(np) + " is not a power of two");
  if (!(lx > 0.0)) out.push_back("grid x-domain length must be > 0");
  if (!(lp > 0.0)) out.push_back("grid p-domain length must be > 0");
  if (!std::isfinite(x0) || !std::isfinite(p0)) out.push_back("grid origin must be finite");
  return out;
}

void PhaseGrid::validate() const {
  const auto v = violations();
  if (v.empty()) return;
  std::string msg = "invalid phase grid:";
  for (const auto& s : v) msg += "\n  - " + s;
  throw ConfigError(msg);
}

WignerState WignerState::zeros(const PhaseGrid& grid, double hbar) {
  WignerState s;
  s.grid = grid;
  s.hbar = hbar;
  for (auto& c : s.f) c = Grid2::Zero(grid.nx, grid.np);
  return s;
}

bool WignerState::all_finite() const {
  for (const auto& c : f)
    if (!c.allFinite()) return false;
  return true;
}

WignerState& WignerState::axpy(double a, const WignerState& o) {
  for (int c = 0; c < 4; ++c) (*this)[c] += a * o[c];
  return *this;
}

WignerState& WignerState::scale(double a) {
  for (auto& c : f) c *= a;
  return *this;
}

Spectral::Spectral(const PhaseGrid& grid)
    : grid_(grid), kappa_(grid.kappa()), mu_(grid.mu()), col_in_(grid.nx), col_out_(grid.nx), real_col_(grid.nx) {
  grid_.validate();
}

void Spectral::p_forward(const Grid2& in, CGrid2& out) {
  out.resize(in.rows(), in.cols());
  for (Eigen::Index i = 0; i < in.rows(); ++i) fft_.fwd(&out(i, 0), &in(i, 0), in.cols());
}

void Spectral::p_forward(const CGrid2& in, CGrid2& out) {
  out.resize(in.rows(), in.cols());
  for (Eigen::Index i = 0; i < in.rows(); ++i) fft_.fwd(&out(i, 0), &in(i, 0), in.cols());
}

void Spectral::p_inverse(const CGrid2& in, Grid2& out) {
  out.resize(in.rows(), in.cols());
  for (Eigen::Index i = 0; i < in.rows(); ++i) fft_.inv(&out(i, 0), &in(i, 0), in.cols());
}

void Spectral::x_derivative(CGrid2& a) {
  const int n = grid_.nx, m = grid_.np;
  for (Eigen::Index j = 0; j <= m / 2; ++j) {
    for (int i = 0; i < n; ++i) col_in_[i] = a(i, j);
    fft_.fwd(col_out_.data(), col_in_.data(), n);
    for (int i = 0; i < n; ++i) col_out_[i] *= Complex(0.0, mu_(i));
    col_out_[n / 2] = 0.0;
    fft_.inv(col_in_.data(), col_out_.data(), n);
    for (int i = 0; i < n; ++i) a(i, j) = col_in_[i];
  }
  for (Eigen::Index j = m / 2 + 1; j < m; ++j) a.col(j) = a.col(m - j).conjugate();
}

Grid2 Spectral::dx(const Grid2& f) {
  const int n = grid_.nx;
  Grid2 out(f.rows(), f.cols());
  for (Eigen::Index j = 0; j < f.cols(); ++j) {
    for (int i = 0; i < n; ++i) real_col_[i] = f(i, j);
    fft_.fwd(col_out_.data(), real_col_.data(), n);
    for (int i = 0; i < n; ++i) col_out_[i] *= Complex(0.0, mu_(i));
    col_out_[n / 2] = 0.0;
    fft_.inv(real_col_.data(), col_out_.data(), n);
    for (int i = 0; i < n; ++i) out(i, j) = real_col_[i];
  }
  return out;
}

Grid2 Spectral::dp(const Grid2& f) {
  CGrid2 F;
  p_forward(f, F);
  for (Eigen::Index j = 0; j < F.cols(); ++j) F.col(j) *= Complex(0.0, kappa_(j));
  F.col(grid_.np / 2).setZero();
  Grid2 out;
  p_inverse(F, out);
  return out;
}

Grid2 Spectral::shift_x(const Grid2& f, const VecX& shifts) {
  const int n = grid_.nx;
  Grid2 out(f.rows(), f.cols());
  for (Eigen::Index j = 0; j < f.cols(); ++j) {
    for (int i = 0; i < n; ++i) col_in_[i] = f(i, j);
    fft_.fwd(col_out_.data(), col_in_.data(), n);
    for (int i = 0; i < n; ++i) {
      const double phase = -mu_(i) * shifts(j);
      col_out_[i] *= i == n / 2 ? Complex(std::cos(phase), 0.0) : std::polar(1.0, phase);
    }
    fft_.inv(col_in_.data(), col_out_.data(), n);
    for (int i = 0; i < n; ++i) out(i, j) = col_in_[i].real();
  }
  return out;
}

ThetaSymbol make_theta_symbol(const AxisSymbol& v, const PhaseGrid& grid, double hbar) {
  if (!(hbar > 0.0)) throw ConfigError("hbar must be > 0");
  const VecX kappa = grid.kappa();
  ThetaSymbol s;
  s.minus.resize(grid.nx, grid.np);
  s.plus.resize(grid.nx, grid.np);
  for (int i = 0; i < grid.nx; ++i) {
    const double x = grid.x(i);
    for (int j = 0; j < grid.np; ++j) {
      const double a = 0.5 * hbar * kappa(j);
      const double vp = v(x + a), vm = v(x - a);
      s.minus(i, j) = (vp - vm) / hbar;
      s.plus(i, j) = vp + vm;
    }
    s.minus(i, grid.np / 2) = 0.0;
  }
  return s;
}

Grid2 apply_theta(const Grid2& multiplier, bool odd, const Grid2& f, Spectral& s) {
  CGrid2 F;
  s.p_forward(f, F);
  if (odd)
    F *= Complex(0.0, 1.0) * multiplier.cast<Complex>();
  else
    F *= multiplier.cast<Complex>();
  Grid2 out;
  s.p_inverse(F, out);
  return out;
}

Grid2 theta_minus(const AxisSymbol& v, const Grid2& f, double hbar, const PhaseGrid& grid) {
  Spectral s(grid);
  return apply_theta(make_theta_symbol(v, grid, hbar).minus, true, f, s);
}

Grid2 theta_plus(const AxisSymbol& v, const Grid2& f, double hbar, const PhaseGrid& grid) {
  Spectral s(grid);
  return apply_theta(make_theta_symbol(v, grid, hbar).plus, false, f, s);
}

std::vector<std::string> coherent_envelope_violations(const PhaseGrid& grid, double hbar, double x_bar,
                                                      double p_bar, double sigma) {
  std::vector<std::string> problems;
  if (!(hbar > 0.0) || !(sigma > 0.0)) return problems;
  const double sx = std::sqrt(hbar * sigma * sigma / 2.0);
  const double sp = std::sqrt(hbar / (2.0 * sigma * sigma));
  auto fits = [&](double c, double s, double lo, double len, const char* axis) {
    if (c - 6 * s < lo || c + 6 * s > lo + len) {
      std::ostringstream m;
      m << "envelope exceeds box along " << axis << " at hbar = " << hbar << ": need [" << c - 6 * s << ", "
        << c + 6 * s << "] inside [" << lo << ", " << lo + len << "); suggested L" << axis << " >= "
        << 2 * (std::abs(c) + 6 * s);
      problems.push_back(m.str());
    }
  };
  fits(x_bar, sx, grid.x0, grid.lx, "x");
  fits(p_bar, sp, grid.p0, grid.lp, "p");
  return problems;
}

WignerState coherent_wigner(const PhaseGrid& grid, double hbar, double x_bar, double p_bar, double sigma,
                            const Vec3& d_bar) {
  grid.validate();
  if (!(hbar > 0.0)) throw ConfigError("hbar must be > 0");
  if (!(sigma > 0.0)) throw ConfigError("coherent-state width sigma must be > 0");
  if (d_bar.norm() > 1.0 + 1e-12) throw ConfigError("spin vector must satisfy |d| <= 1");
  const auto problems = coherent_envelope_violations(grid, hbar, x_bar, p_bar, sigma);
  if (!problems.empty()) {
    std::string msg = "coherent state does not fit the grid:";
    for (const auto& s : problems) msg += "\n  - " + s;
    throw ConfigError(msg);
  }
  const double sx = std::sqrt(hbar * sigma * sigma / 2.0);
  const double sp = std::sqrt(hbar / (2.0 * sigma * sigma));
  WignerState w = WignerState::zeros(grid, hbar);
  const VecX gx = (-(grid.xs().array() - x_bar).square() / (2 * sx * sx)).exp();
  const VecX gp = (-(grid.ps().array() - p_bar).square() / (2 * sp * sp)).exp();
  const Grid2 g = (gx * gp.transpose()).array() / (2.0 * std::numbers::pi * sx * sp);
  w[0] = 0.5 * g;
  for (int c = 0; c < 3; ++c) w[c + 1] = 0.5 * d_bar(c) * g;
  return w;
}

double inner_product(const WignerState& f, const WignerState& h) {
  require_same_grid(f, h);
  double s = 0.0;
  for (int c = 0; c < 4; ++c) s += (f[c] * h[c]).sum();
  return s * f.grid.cell();
}

double l2_norm(const WignerState& f) { return std::sqrt(inner_product(f, f)); }

double h1p_norm(const WignerState& f) {
  Spectral s(f.grid);
  const Eigen::Array<double, 1, Eigen::Dynamic> weight = 1.0 + f.grid.ps().array().square().transpose();
  double total = 0.0;
  for (int c = 0; c < 4; ++c) {
    total += (f[c].square().rowwise() * weight).sum();
    total += s.dx(f[c]).square().sum() + s.dp(f[c]).square().sum();
  }
  return std::sqrt(total * f.grid.cell());
}

Moments moments(const WignerState& f, double min_mass) {
  const double cell = f.grid.cell();
  Moments m;
  m.mass = 2.0 * f[0].sum() * cell;
  if (!(std::abs(m.mass) > min_mass)) throw DegenerateError("Wigner state has (near) zero mass");
  const Eigen::ArrayXd xm = f[0].rowwise().sum();  // marginal in x (times 1/dp)
  const Eigen::ArrayXd pm = f[0].colwise().sum().transpose();
  const Eigen::ArrayXd xs = f.grid.xs().array(), ps = f.grid.ps().array();
  const double scale = 2.0 * cell / m.mass;
  m.mean_x = scale * (xs * xm).sum();
  m.mean_p = scale * (ps * pm).sum();
  m.var_x = scale * ((xs - m.mean_x).square() * xm).sum();
  m.var_p = scale * ((ps - m.mean_p).square() * pm).sum();
  for (int c = 0; c < 3; ++c) m.spin(c) = scale * f[c + 1].sum();
  return m;
}

void write_binary(std::ostream& out, const WignerState& f) {
  const std::int64_t dims[2] = {f.grid.nx, f.grid.np};
  const double header[6] = {f.grid.x0, f.grid.lx, f.grid.p0, f.grid.lp, f.hbar, f.time};
  out.write(reinterpret_cast<const char*>(dims), sizeof dims);
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  for (const auto& c : f.f)
    out.write(reinterpret_cast<const char*>(c.data()), static_cast<std::streamsize>(c.size() * sizeof(double)));
  if (!out) throw std::runtime_error("failed to write Wigner snapshot");
}

WignerState read_binary(std::istream& in) {
  std::int64_t dims[2];
  double header[6];
  in.read(reinterpret_cast<char*>(dims), sizeof dims);
  in.read(reinterpret_cast<char*>(header), sizeof header);
  if (!in) throw ConfigError("truncated Wigner snapshot header");
  PhaseGrid g{static_cast<int>(dims[0]), static_cast<int>(dims[1]), header[0], header[1], header[2], header[3]};
  g.validate();
  WignerState w = WignerState::zeros(g, header[4]);
  w.time = header[5];
  for (auto& c : w.f)
    in.read(reinterpret_cast<char*>(c.data()), static_cast<std::streamsize>(c.size() * sizeof(double)));
  if (!in) throw ConfigError("truncated Wigner snapshot payload");
  return w;
}

void write_csv(std::ostream& out, const WignerState& f) {
  out << "x,p,f0,f1,f2,f3\n" << std::setprecision(17);
  for (int i = 0; i < f.grid.nx; ++i)
    for (int j = 0; j < f.grid.np; ++j)
      out << f.grid.x(i) << ',' << f.grid.p(j) << ',' << f[0](i, j) << ',' << f[1](i, j) << ','
          << f[2](i, j) << ',' << f[3](i, j) << '\n';
}

}  // namespace spinoc
