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
#include "spinoc/classical_ocp.hpp"

#include <cmath>
#include <string>

namespace spinoc {

namespace {

bool finite(const ClassicalState& s) { return s.x.allFinite() && s.p.allFinite() && s.d.allFinite(); }
bool finite(const AdjointState& a) { return a.xh.allFinite() && a.ph.allFinite() && a.etah.allFinite(); }

ClassicalState axpy(const ClassicalState& s, double h, const ClassicalState& k) {
  return {s.x + h * k.x, s.p + h * k.p, s.d + h * k.d};
}

AdjointState axpy(const AdjointState& s, double h, const AdjointState& k) {
  return {s.xh + h * k.xh, s.ph + h * k.ph, s.etah + h * k.etah};
}

template <class S>
S rk4_combine(const S& y, double h, const S& k1, const S& k2, const S& k3, const S& k4);

template <>
ClassicalState rk4_combine(const ClassicalState& y, double h, const ClassicalState& k1,
                           const ClassicalState& k2, const ClassicalState& k3,
                           const ClassicalState& k4) {
  return {y.x + h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
          y.p + h / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p),
          y.d + h / 6.0 * (k1.d + 2.0 * k2.d + 2.0 * k3.d + k4.d)};
}

template <>
AdjointState rk4_combine(const AdjointState& y, double h, const AdjointState& k1,
                         const AdjointState& k2, const AdjointState& k3, const AdjointState& k4) {
  return {y.xh + h / 6.0 * (k1.xh + 2.0 * k2.xh + 2.0 * k3.xh + k4.xh),
          y.ph + h / 6.0 * (k1.ph + 2.0 * k2.ph + 2.0 * k3.ph + k4.ph),
          y.etah + h / 6.0 * (k1.etah + 2.0 * k2.etah + 2.0 * k3.etah + k4.etah)};
}

// Cubic Hermite value at the midpoint of [a, b] given end slopes.
Vec3 hermite_mid(const Vec3& a, const Vec3& b, const Vec3& da, const Vec3& db, double h) {
  return 0.5 * (a + b) + h / 8.0 * (da - db);
}

ClassicalState hermite_mid(const ClassicalState& a, const ClassicalState& b, const ClassicalState& da,
                           const ClassicalState& db, double h) {
  return {hermite_mid(a.x, b.x, da.x, db.x, h), hermite_mid(a.p, b.p, da.p, db.p, h),
          hermite_mid(a.d, b.d, da.d, db.d, h)};
}

AdjointState hermite_mid(const AdjointState& a, const AdjointState& b, const AdjointState& da,
                         const AdjointState& db, double h) {
  return {hermite_mid(a.xh, b.xh, da.xh, db.xh, h), hermite_mid(a.ph, b.ph, da.ph, db.ph, h),
          hermite_mid(a.etah, b.etah, da.etah, db.etah, h)};
}

AdjointState adjoint_rhs(const FieldSet& fields, const ClassicalState& s, const AdjointState& a,
                         const VecX& u, double mass) {
  const Vec3 K = fields.rashba(s.x);
  const Vec3 B = fields.magnetic(s.x);
  const Mat3 dE = fields.electric_jacobian(s.x, u);
  const Mat3 dK = fields.rashba_jacobian(s.x);
  const Mat3 dB = fields.magnetic_jacobian(s.x);
  AdjointState out;
  out.xh = -a.ph / mass + 2.0 * K.cross(a.etah);
  out.ph = -dE.transpose() * a.xh;
  for (int i = 0; i < 3; ++i)
    out.ph(i) += 2.0 * (s.p.cross(dK.col(i)) - dB.col(i)).dot(a.etah);
  out.etah = 2.0 * (s.p.cross(K) - B).cross(a.etah);
  return out;
}

std::vector<ClassicalState> node_rates(const FieldSet& fields, const ClassicalTrajectory& traj,
                                       const ControlSignal& u, double mass) {
  std::vector<ClassicalState> rates(traj.states.size());
  for (std::size_t k = 0; k < rates.size(); ++k)
    rates[k] = characteristic_rhs(fields, traj.states[k], u.at(static_cast<int>(k)), mass);
  return rates;
}

void check_grid(const ControlSignal& u, const OCConfig& cfg, const FieldSet& fields) {
  if (u.steps() != cfg.steps)
    throw ConfigError("control grid has " + std::to_string(u.steps()) + " steps, configuration expects " +
                      std::to_string(cfg.steps));
  if (u.dim() != fields.control_dim())
    throw ConfigError("control has " + std::to_string(u.dim()) + " components, potential has " +
                      std::to_string(fields.control_dim()) + " shapes");
}

}  // namespace

ClassicalState characteristic_rhs(const FieldSet& fields, const ClassicalState& s, const VecX& u,
                                  double mass) {
  ClassicalState r;
  r.x = s.p / mass;
  r.p = fields.electric(s.x, u);
  r.d = -fields.total_precession_field(s.x, s.p).cross(s.d);
  return r;
}

ClassicalTrajectory integrate_forward(const FieldSet& fields, const ClassicalState& init,
                                      const ControlSignal& u, const OCConfig& cfg) {
  cfg.validate();
  check_grid(u, cfg, fields);
  const int n = cfg.steps;
  const double h = cfg.horizon / n;
  ClassicalTrajectory traj;
  traj.dt = h;
  traj.states.reserve(n + 1);
  traj.states.push_back(init);
  for (int k = 0; k < n; ++k) {
    const ClassicalState& y = traj.states.back();
    const VecX u0 = u.at(k), um = u.midpoint(k), u1 = u.at(k + 1);
    const ClassicalState k1 = characteristic_rhs(fields, y, u0, cfg.mass);
    const ClassicalState k2 = characteristic_rhs(fields, axpy(y, 0.5 * h, k1), um, cfg.mass);
    const ClassicalState k3 = characteristic_rhs(fields, axpy(y, 0.5 * h, k2), um, cfg.mass);
    const ClassicalState k4 = characteristic_rhs(fields, axpy(y, h, k3), u1, cfg.mass);
    ClassicalState next = rk4_combine(y, h, k1, k2, k3, k4);
    if (!finite(next)) throw IntegrationError("forward trajectory became non-finite", (k + 1) * h);
    traj.states.push_back(std::move(next));
  }
  return traj;
}

AdjointState adjoint_final(const ClassicalState& f, const OCConfig& cfg) {
  AdjointState a;
  const Vec3 p_err = cfg.penalize_momentum_target ? Vec3(f.p - cfg.p_target) : f.p;
  a.xh = -cfg.nu_p * p_err;
  a.ph = cfg.nu_x * (cfg.x_target - f.x);
  a.etah = cfg.nu_d * cfg.d_target.cross(f.d);
  return a;
}

AdjointTrajectory integrate_adjoint(const FieldSet& fields, const ClassicalTrajectory& traj,
                                    const ControlSignal& u, const OCConfig& cfg) {
  const int n = static_cast<int>(traj.states.size()) - 1;
  if (n != u.steps()) throw ConfigError("trajectory and control grids differ");
  const double h = traj.dt;
  const auto rates = node_rates(fields, traj, u, cfg.mass);
  AdjointTrajectory adj;
  adj.dt = h;
  adj.states.resize(n + 1);
  adj.states[n] = adjoint_final(traj.final(), cfg);
  for (int k = n - 1; k >= 0; --k) {
    const ClassicalState& s1 = traj.states[k + 1];
    const ClassicalState& s0 = traj.states[k];
    const ClassicalState sm = hermite_mid(s0, s1, rates[k], rates[k + 1], h);
    const VecX u0 = u.at(k), um = u.midpoint(k), u1 = u.at(k + 1);
    const AdjointState& y = adj.states[k + 1];
    const AdjointState k1 = adjoint_rhs(fields, s1, y, u1, cfg.mass);
    const AdjointState k2 = adjoint_rhs(fields, sm, axpy(y, -0.5 * h, k1), um, cfg.mass);
    const AdjointState k3 = adjoint_rhs(fields, sm, axpy(y, -0.5 * h, k2), um, cfg.mass);
    const AdjointState k4 = adjoint_rhs(fields, s0, axpy(y, -h, k3), u0, cfg.mass);
    adj.states[k] = rk4_combine(y, -h, k1, k2, k3, k4);
    if (!finite(adj.states[k])) throw IntegrationError("adjoint trajectory became non-finite", k * h);
  }
  return adj;
}

double goal_value(const ClassicalState& f, const OCConfig& cfg) {
  const Vec3 p_err = cfg.penalize_momentum_target ? Vec3(f.p - cfg.p_target) : f.p;
  return 0.5 * cfg.nu_x * (f.x - cfg.x_target).squaredNorm() + 0.5 * cfg.nu_p * p_err.squaredNorm() -
         cfg.nu_d * f.d.dot(cfg.d_target);
}

MatX control_forcing(const FieldSet& fields, const ClassicalTrajectory& traj,
                     const AdjointTrajectory& adj, const ControlSignal& u) {
  MatX out(u.steps() + 1, u.dim());
  for (int k = 0; k <= u.steps(); ++k)
    for (int i = 0; i < u.dim(); ++i)
      out(k, i) = -adj.states[k].xh.dot(fields.electric_control_derivative(i, traj.states[k].x));
  return out;
}

ControlSignal control_gradient(const FieldSet& fields, const ControlSignal& u,
                               const ClassicalTrajectory& traj, const AdjointTrajectory& adj,
                               const OCConfig& cfg) {
  return ControlSignal(u.horizon(), cost_gradient(u, cfg) + control_forcing(fields, traj, adj, u));
}

ControlSignal projected_gradient(const FieldSet& fields, const ControlSignal& u,
                                 const ClassicalTrajectory& traj, const AdjointTrajectory& adj,
                                 const OCConfig& cfg) {
  const int n = u.steps();
  const double h = u.dt();
  const MatX nodes = control_forcing(fields, traj, adj, u);
  const auto rates = node_rates(fields, traj, u, cfg.mass);
  std::vector<AdjointState> arates(n + 1);
  for (int k = 0; k <= n; ++k)
    arates[k] = adjoint_rhs(fields, traj.states[k], adj.states[k], u.at(k), cfg.mass);

  MatX acc = MatX::Zero(n + 1, u.dim());
  for (int k = 0; k < n; ++k) {
    const ClassicalState sm = hermite_mid(traj.states[k], traj.states[k + 1], rates[k], rates[k + 1], h);
    const AdjointState am = hermite_mid(adj.states[k], adj.states[k + 1], arates[k], arates[k + 1], h);
    for (int i = 0; i < u.dim(); ++i) {
      const double mid = -am.xh.dot(fields.electric_control_derivative(i, sm.x));
      acc(k, i) += h / 6.0 * (nodes(k, i) + 2.0 * mid);
      acc(k + 1, i) += h / 6.0 * (2.0 * mid + nodes(k + 1, i));
    }
  }
  const VecX w = u.weights();
  return ControlSignal(u.horizon(), cost_gradient(u, cfg) + w.cwiseInverse().asDiagonal() * acc);
}

ClassicalObjective objective(const FieldSet& fields, const ClassicalState& init,
                             const ControlSignal& u, const OCConfig& cfg) {
  const auto traj = integrate_forward(fields, init, u, cfg);
  ClassicalObjective o;
  o.goal = goal_value(traj, cfg);
  o.cost = cost_value(u, cfg);
  o.total = o.goal + o.cost;
  return o;
}

namespace {

struct ClassicalProblem {
  const FieldSet& fields;
  const ClassicalState& init;
  const OCConfig& cfg;

  ClassicalTrajectory forward(const ControlSignal& u) { return integrate_forward(fields, init, u, cfg); }
  ObjectiveParts parts(const ClassicalTrajectory& traj, const ControlSignal& u) {
    const double goal = goal_value(traj, cfg), cost = cost_value(u, cfg);
    return {goal + cost, goal, cost};
  }
  ControlSignal gradient(const ControlSignal& u, const ClassicalTrajectory& traj) {
    return projected_gradient(fields, u, traj, integrate_adjoint(fields, traj, u, cfg), cfg);
  }
};

}  // namespace

ClassicalOptimum optimize(const FieldSet& fields, const ClassicalState& init,
                          const ControlSignal& u0, const OCConfig& cfg, const DescentOptions& opts) {
  cfg.validate();
  check_grid(u0, cfg, fields);
  ClassicalProblem problem{fields, init, cfg};
  ClassicalOptimum out;
  out.control = u0;
  out.report = descend(problem, out.control, cfg, opts);
  out.trajectory = integrate_forward(fields, init, out.control, cfg);
  return out;
}

}  // namespace spinoc
