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
#include "spinoc/wigner_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace spinoc {

namespace {

constexpr Complex I(0.0, 1.0);

// eps_{jkl} for zero-based indices
int levi_civita(int j, int k, int l) {
  if (j == k || k == l || j == l) return 0;
  return ((j + 1) % 3 == k) ? 1 : -1;
}

struct ComponentInfo {
  bool on = false;
  bool varies = false;
};

ComponentInfo inspect(const VectorField& v, int c) {
  ComponentInfo info;
  for (const auto& t : v.terms()) {
    if (t.direction(c) == 0.0) continue;
    info.on = true;
    if (!std::holds_alternative<ConstantProfile>(t.profile)) info.varies = true;
  }
  return info;
}

Eigen::ArrayXd sample(const PhaseGrid& g, const AxisSymbol& v) {
  Eigen::ArrayXd out(g.nx);
  for (int i = 0; i < g.nx; ++i) out(i) = v(g.x(i));
  return out;
}

}  // namespace

EvolutionMode parse_mode(const std::string& name) {
  if (name == "full-quantum" || name == "full") return EvolutionMode::full_quantum;
  if (name == "uniform-field" || name == "uniform") return EvolutionMode::uniform_field;
  if (name == "semiclassical" || name == "semiclassical-O(hbar)") return EvolutionMode::semiclassical;
  throw ConfigError("unknown evolution mode '" + name + "' (expected full-quantum, uniform-field or semiclassical)");
}

std::string to_string(EvolutionMode mode) {
  switch (mode) {
    case EvolutionMode::full_quantum: return "full-quantum";
    case EvolutionMode::uniform_field: return "uniform-field";
    case EvolutionMode::semiclassical: return "semiclassical";
  }
  return "full-quantum";
}

WignerGenerator::WignerGenerator(const FieldSet& fields, const PhaseGrid& grid, double hbar, double mass,
                                 EvolutionMode mode)
    : fields_(&fields), grid_(grid), hbar_(hbar), mass_(mass), mode_(mode), spectral_(grid) {
  if (!(hbar > 0.0)) throw ConfigError("hbar must be > 0");
  if (!(mass > 0.0)) throw ConfigError("mass must be > 0");
  if (mode == EvolutionMode::uniform_field &&
      !(fields.magnetic_field().is_uniform() && fields.rashba_field().is_uniform()))
    throw ConfigError("uniform-field mode requires constant magnetic and Rashba fields");

  p_row_ = grid.ps().transpose().array();
  const auto& pot = fields.potential_field();
  const ScalarField& base = pot.base();
  base_ = make_theta_symbol([&](double x) { return base.on_axis(x); }, grid, hbar);
  u0_prime_ = sample(grid, [&](double x) { return base.gradient(Vec3(x, 0, 0))(0); });
  for (int i = 0; i < pot.control_dim(); ++i) {
    const ScalarField& s = pot.shape(i);
    controls_.push_back(make_theta_symbol([&](double x) { return s.on_axis(x); }, grid, hbar));
    phi_prime_.push_back(sample(grid, [&](double x) { return s.gradient(Vec3(x, 0, 0))(0); }));
  }

  const VectorField& B = fields.magnetic_field();
  const VectorField& K = fields.rashba_field();
  b_const_ = B(Vec3::Zero());
  const Vec3 k0 = K(Vec3::Zero());
  r_const_ = Vec3(0.0, -k0(2), k0(1));
  for (int c = 0; c < 3; ++c) {
    const ComponentInfo bi = inspect(B, c);
    zeeman_on_[c] = bi.on;
    zeeman_varies_[c] = bi.varies;
    auto bc = [&B, c](double x) { return B.component(c, Vec3(x, 0, 0)); };
    auto bd = [&B, c](double x) { return B.jacobian(Vec3(x, 0, 0))(c, 0); };
    b_axis_[c] = sample(grid, bc);
    b_prime_[c] = sample(grid, bd);
    if (bi.on) zeeman_[c] = make_theta_symbol(bc, grid, hbar);

    // R_c = sum_j eps_{0 j c} K_j: R_0 = 0, R_1 = -K_2, R_2 = K_1
    ComponentInfo ri;
    AxisSymbol rc = [](double) { return 0.0; };
    AxisSymbol rd = rc;
    if (c != 0) {
      const int j = c == 1 ? 2 : 1;
      const double sign = c == 1 ? -1.0 : 1.0;
      ri = inspect(K, j);
      rc = [&K, j, sign](double x) { return sign * K.component(j, Vec3(x, 0, 0)); };
      rd = [&K, j, sign](double x) { return sign * K.jacobian(Vec3(x, 0, 0))(j, 0); };
    }
    rashba_on_[c] = ri.on;
    rashba_varies_[c] = ri.varies;
    r_axis_[c] = sample(grid, rc);
    r_prime_[c] = sample(grid, rd);
    if (ri.on) rashba_[c] = make_theta_symbol(rc, grid, hbar);
  }
}

void WignerGenerator::potential_multiplier(const VecX& u) {
  fields_->potential_field().check(u);
  mu_ = base_.minus;
  for (int i = 0; i < u.size(); ++i)
    if (u(i) != 0.0) mu_ += u(i) * controls_[static_cast<std::size_t>(i)].minus;
}

void WignerGenerator::rhs(const WignerState& f, const VecX& u, WignerState& out) {
  if (!(f.grid == grid_)) throw ConfigError("state grid does not match the generator grid");
  if (out.grid.nx != grid_.nx || out.grid.np != grid_.np || out.f[0].rows() != grid_.nx) {
    out = WignerState::zeros(grid_, hbar_);
  }
  out.grid = grid_;
  out.hbar = f.hbar;
  out.time = f.time;
  switch (mode_) {
    case EvolutionMode::full_quantum: full_rhs(f, u, out); break;
    case EvolutionMode::uniform_field: uniform_rhs(f, u, out); break;
    case EvolutionMode::semiclassical: semiclassical_rhs(f, u, out); break;
  }
}

void WignerGenerator::full_rhs(const WignerState& f, const VecX& u, WignerState& out) {
  potential_multiplier(u);
  const int nx = grid_.nx, np = grid_.np;
  const bool any_rashba = rashba_on_[1] || rashba_on_[2];
  for (int c = 0; c < 4; ++c) {
    spectral_.p_forward(f[c], F_[c]);
    D_[c] = F_[c];
    spectral_.x_derivative(D_[c]);
    if (any_rashba) {
      tmp_ = f[c].rowwise() * p_row_;
      spectral_.p_forward(tmp_, G_[c]);
    }
    A_[c].setZero(nx, np);
    C_[c] = (-1.0 / mass_) * D_[c];
    E_[c].setZero(nx, np);
  }
  bool e_used[4] = {false, false, false, false};

  // potential acts on every Pauli component
  for (int c = 0; c < 4; ++c) A_[c] += I * (mu_ * F_[c]);

  const double h = hbar_;
  // Zeeman coupling
  for (int k = 0; k < 3; ++k) {
    if (!zeeman_on_[k]) continue;
    const ThetaSymbol& s = zeeman_[k];
    if (zeeman_varies_[k]) {
      A_[0] += (-h) * I * (s.minus * F_[k + 1]);
      A_[k + 1] += (-h) * I * (s.minus * F_[0]);
    }
    for (int kk = 0; kk < 3; ++kk)
      for (int l = 0; l < 3; ++l) {
        const int e = levi_civita(k, kk, l);
        if (e != 0) A_[l + 1] -= double(e) * (s.plus * F_[kk + 1]);
      }
  }

  // Rashba coupling, Weyl-symmetric assembly
  auto add_a_plus = [&](int k, int in, int o) {
    const ThetaSymbol& s = rashba_[k];
    if (rashba_varies_[k]) {
      C_[o] += (0.5 * h) * I * (s.minus * F_[in]);
      A_[o] += (0.5 * h) * I * (s.minus * G_[in]);
    }
    A_[o] += (-0.25 * h) * (s.plus * D_[in]);
    E_[o] += (-0.25 * h) * (s.plus * F_[in]);
    e_used[o] = true;
  };
  auto add_a_minus = [&](int k, int in, int o, double sign) {
    const ThetaSymbol& s = rashba_[k];
    C_[o] += (0.5 * sign) * (s.plus * F_[in]);
    A_[o] += (0.5 * sign) * (s.plus * G_[in]);
    if (rashba_varies_[k]) {
      A_[o] += (0.25 * h * h * sign) * I * (s.minus * D_[in]);
      E_[o] += (0.25 * h * h * sign) * I * (s.minus * F_[in]);
      e_used[o] = true;
    }
  };
  for (int k = 1; k < 3; ++k) {
    if (!rashba_on_[k]) continue;
    add_a_plus(k, k + 1, 0);
    add_a_plus(k, 0, k + 1);
    for (int kk = 0; kk < 3; ++kk)
      for (int l = 0; l < 3; ++l) {
        const int e = levi_civita(k, kk, l);
        if (e != 0) add_a_minus(k, kk + 1, l + 1, double(e));
      }
  }

  for (int c = 0; c < 4; ++c) {
    if (e_used[c]) {
      spectral_.x_derivative(E_[c]);
      A_[c] += E_[c];
    }
    spectral_.p_inverse(A_[c], out[c]);
    spectral_.p_inverse(C_[c], tmp_);
    out[c] += tmp_.rowwise() * p_row_;
  }
}

void WignerGenerator::uniform_rhs(const WignerState& f, const VecX& u, WignerState& out) {
  potential_multiplier(u);
  std::array<Grid2, 4> dxf;
  for (int c = 0; c < 4; ++c) {
    spectral_.p_forward(f[c], F_[c]);
    F_[c] *= I * mu_;
    spectral_.p_inverse(F_[c], out[c]);
    dxf[c] = spectral_.dx(f[c]);
    out[c] -= (dxf[c].rowwise() * p_row_) / mass_;
  }
  const double h = hbar_;
  const Vec3& R = r_const_;
  const Vec3& B = b_const_;
  // d f0 += hbar (K3 dx f2 - K2 dx f3) = -hbar sum_k R_k dx f_k
  for (int k = 1; k < 3; ++k)
    if (R(k) != 0.0) {
      out[0] -= h * R(k) * dxf[k + 1];
      out[k + 1] -= h * R(k) * dxf[0];
    }
  // d f_l += 2 (a ^ f)_l with a = p R - B
  for (int l = 0; l < 3; ++l) {
    const int j = (l + 1) % 3, k = (l + 2) % 3;
    // (a ^ f)_l = a_j f_k - a_k f_j
    out[l + 1] += 2.0 * ((f[k + 1].rowwise() * (R(j) * p_row_ - B(j))) -
                         (f[j + 1].rowwise() * (R(k) * p_row_ - B(k))));
  }
}

void WignerGenerator::semiclassical_rhs(const WignerState& f, const VecX& u, WignerState& out) {
  fields_->potential_field().check(u);
  Eigen::ArrayXd up = u0_prime_;
  for (int i = 0; i < u.size(); ++i) up += u(i) * phi_prime_[static_cast<std::size_t>(i)];
  std::array<Grid2, 4> dxf, dpf;
  for (int c = 0; c < 4; ++c) {
    dxf[c] = spectral_.dx(f[c]);
    dpf[c] = spectral_.dp(f[c]);
    out[c] = -(dxf[c].rowwise() * p_row_) / mass_ + dpf[c].colwise() * up;
  }
  const double h = hbar_;
  for (int k = 0; k < 3; ++k) {
    // hbar (p R_k' dp - R_k dx - B_k' dp) couples f0 and f_k both ways. The
    // Rashba parts are taken in symmetric order, (M D + D M)/2, which is the
    // same operator but stays skew on the grid.
    auto coupling = [&](const Grid2& in, const Grid2& dp_in, const Grid2& dx_in) -> Grid2 {
      Grid2 t = -(dp_in.colwise() * b_prime_[k]);
      if (rashba_on_[k]) {
        const Grid2 m = (in.colwise() * r_prime_[k]).rowwise() * p_row_;
        t += 0.5 * ((dp_in.colwise() * r_prime_[k]).rowwise() * p_row_ + spectral_.dp(m));
        t -= 0.5 * (dx_in.colwise() * r_axis_[k] + spectral_.dx(in.colwise() * r_axis_[k]));
      }
      return h * t;
    };
    if (!(rashba_on_[k] || zeeman_on_[k])) continue;
    out[0] += coupling(f[k + 1], dpf[k + 1], dxf[k + 1]);
    out[k + 1] += coupling(f[0], dpf[0], dxf[0]);
  }
  for (int l = 0; l < 3; ++l) {
    const int j = (l + 1) % 3, k = (l + 2) % 3;
    const Grid2 aj = (r_axis_[j].matrix() * p_row_.matrix()).array().colwise() - b_axis_[j];
    const Grid2 ak = (r_axis_[k].matrix() * p_row_.matrix()).array().colwise() - b_axis_[k];
    out[l + 1] += 2.0 * (aj * f[k + 1] - ak * f[j + 1]);
  }
}

Grid2 WignerGenerator::a_plus(const Grid2& hfield, int k) {
  if (k < 0 || k > 2) throw ConfigError("axis index must be 0, 1 or 2");
  if (!rashba_on_[k]) return Grid2::Zero(grid_.nx, grid_.np);
  const ThetaSymbol& s = rashba_[k];
  const double h = hbar_;
  CGrid2 F, G, D;
  spectral_.p_forward(hfield, F);
  tmp_ = hfield.rowwise() * p_row_;
  spectral_.p_forward(tmp_, G);
  D = F;
  spectral_.x_derivative(D);
  CGrid2 A = (0.5 * h) * I * (s.minus * G) - (0.25 * h) * (s.plus * D);
  CGrid2 C = (0.5 * h) * I * (s.minus * F);
  CGrid2 E = (-0.25 * h) * (s.plus * F);
  spectral_.x_derivative(E);
  A += E;
  Grid2 out, pc;
  spectral_.p_inverse(A, out);
  spectral_.p_inverse(C, pc);
  return out + pc.rowwise() * p_row_;
}

Grid2 WignerGenerator::a_minus(const Grid2& hfield, int k) {
  if (k < 0 || k > 2) throw ConfigError("axis index must be 0, 1 or 2");
  if (!rashba_on_[k]) return Grid2::Zero(grid_.nx, grid_.np);
  const ThetaSymbol& s = rashba_[k];
  const double h = hbar_;
  CGrid2 F, G, D;
  spectral_.p_forward(hfield, F);
  tmp_ = hfield.rowwise() * p_row_;
  spectral_.p_forward(tmp_, G);
  D = F;
  spectral_.x_derivative(D);
  CGrid2 A = 0.5 * (s.plus * G) + (0.25 * h * h) * I * (s.minus * D);
  CGrid2 C = 0.5 * (s.plus * F);
  CGrid2 E = (0.25 * h * h) * I * (s.minus * F);
  spectral_.x_derivative(E);
  A += E;
  Grid2 out, pc;
  spectral_.p_inverse(A, out);
  spectral_.p_inverse(C, pc);
  return out + pc.rowwise() * p_row_;
}

Grid2 WignerGenerator::theta_minus_control(int i, const Grid2& h) {
  return apply_theta(controls_.at(static_cast<std::size_t>(i)).minus, true, h, spectral_);
}

double WignerGenerator::stable_step(const VecX& u_bound, double safety) const {
  const double kmax = std::numbers::pi / grid_.dp();
  const double mmax = std::numbers::pi / grid_.dx();
  const double pmax = std::max(std::abs(grid_.p0), std::abs(grid_.p0 + grid_.lp));
  Eigen::ArrayXd force = u0_prime_.abs();
  for (int i = 0; i < u_bound.size() && i < control_dim(); ++i)
    force += std::abs(u_bound(i)) * phi_prime_[static_cast<std::size_t>(i)].abs();
  double bmax = 0.0, rmax = 0.0, rpmax = 0.0, bpmax = 0.0;
  for (int c = 0; c < 3; ++c) {
    bmax = std::max(bmax, b_axis_[c].abs().maxCoeff());
    rmax = std::max(rmax, r_axis_[c].abs().maxCoeff());
    rpmax = std::max(rpmax, r_prime_[c].abs().maxCoeff());
    bpmax = std::max(bpmax, b_prime_[c].abs().maxCoeff());
  }
  // rates in units of grid spacings (the spectral operators add a factor pi,
  // absorbed by the RK4 stability radius 2.8)
  double rate = pmax / (mass_ * grid_.dx()) + force.maxCoeff() / grid_.dp() + 2.0 * (2.0 * (bmax + pmax * rmax));
  rate += hbar_ * (pmax * rpmax / grid_.dp() + rmax / grid_.dx() + bpmax / grid_.dp());
  rate += 0.5 * hbar_ * hbar_ * rpmax * kmax * mmax / std::numbers::pi;
  return safety / rate;
}

WignerDiagnostics diagnose(const WignerState& f) {
  WignerDiagnostics d;
  d.time = f.time;
  d.l2 = l2_norm(f);
  d.h1p = h1p_norm(f);
  try {
    d.m = moments(f, 0.0);
  } catch (const DegenerateError&) {
    // massless states (e.g. spin-only perturbations) keep zero moments
  }
  d.mass = 2.0 * f[0].sum() * f.grid.cell();
  return d;
}

void rk4_step(WignerGenerator& gen, WignerState& f, const VecX& u0, const VecX& um, const VecX& u1, double h,
              const WignerState* k1) {
  WignerState k, stage = f, acc = f;
  if (k1)
    k = *k1;
  else
    gen.rhs(f, u0, k);
  acc.axpy(h / 6.0, k);
  stage = f;
  stage.axpy(0.5 * h, k);
  gen.rhs(stage, um, k);
  acc.axpy(h / 3.0, k);
  stage = f;
  stage.axpy(0.5 * h, k);
  gen.rhs(stage, um, k);
  acc.axpy(h / 3.0, k);
  stage = f;
  stage.axpy(h, k);
  gen.rhs(stage, u1, k);
  acc.axpy(h / 6.0, k);
  acc.time = f.time + h;
  f = std::move(acc);
}

WignerTrajectory integrate(const WignerState& f0, const ControlSignal& u, WignerGenerator& gen,
                           const EvolutionSpec& spec, bool keep_nodes, bool with_diagnostics) {
  if (spec.steps < 1) throw ConfigError("evolution needs at least one time step");
  if (u.steps() != spec.steps) throw ConfigError("control grid and evolution steps differ");
  if (!f0.all_finite()) throw IntegrationError("initial Wigner state is non-finite", f0.time);
  const double h = spec.dt();
  const int every = spec.sample_every > 0 ? spec.sample_every : spec.steps;
  WignerTrajectory out;
  WignerState f = f0;
  auto record = [&](int n) {
    if (keep_nodes) out.nodes.push_back(f);
    if (n % every == 0 || n == spec.steps) {
      out.samples.push_back(f);
      if (with_diagnostics) out.diagnostics.push_back(diagnose(f));
    }
  };
  record(0);
  for (int n = 0; n < spec.steps; ++n) {
    WignerState next = f;
    rk4_step(gen, next, u.at(n), u.midpoint(n), u.at(n + 1), h);
    if (!next.all_finite())
      throw IntegrationError("Wigner state became non-finite after t = " + std::to_string(f.time), f.time);
    f = std::move(next);
    record(n + 1);
  }
  return out;
}

Grid2 a_plus(const Grid2& h, int k, const FieldSet& fields, double hbar, const PhaseGrid& grid) {
  WignerGenerator g(fields, grid, hbar, 1.0);
  return g.a_plus(h, k);
}

Grid2 a_minus(const Grid2& h, int k, const FieldSet& fields, double hbar, const PhaseGrid& grid) {
  WignerGenerator g(fields, grid, hbar, 1.0);
  return g.a_minus(h, k);
}

}  // namespace spinoc
