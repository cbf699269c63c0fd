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
#include "spinoc/quantum_ocp.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

namespace spinoc {

namespace {

// exp(-1/t) for t > 0, else 0
double psi(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

WignerState hermite_midpoint(const WignerState& a, const WignerState& da, const WignerState& b,
                             const WignerState& db, double dt) {
  WignerState m = a;
  m.axpy(1.0, b).scale(0.5);
  m.axpy(dt / 8.0, da).axpy(-dt / 8.0, db);
  m.time = 0.5 * (a.time + b.time);
  return m;
}

VecX forcing_at(WignerGenerator& gen, const WignerState& h, const WignerState& f, int dim) {
  VecX g(dim);
  for (int i = 0; i < dim; ++i) g(i) = control_gradient_integral(h, f, gen, i);
  return g;
}

EvolutionSpec matched_spec(const EvolutionSpec& spec, const ControlSignal& u) {
  EvolutionSpec s = spec;
  s.horizon = u.horizon();
  s.steps = u.steps();
  return s;
}

}  // namespace

double cutoff_profile(double r, double radius) {
  if (!(radius > 0.0)) throw ConfigError("cut-off radius must be > 0");
  const double s = (r - radius) / radius;
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  const double a = psi(1.0 - s), b = psi(s);
  return a / (a + b);
}

TargetSymbol build_target(const PhaseGrid& grid, double hbar, const OCConfig& cfg, double radius) {
  if (!(radius > 0.0)) throw ConfigError("cut-off radius must be > 0");
  TargetSymbol t;
  t.radius = radius;
  t.raw = WignerState::zeros(grid, hbar);
  t.chi.resize(grid.nx, grid.np);
  const Vec3 pt = cfg.penalize_momentum_target ? cfg.p_target : Vec3::Zero();
  const double x_off = cfg.x_target.tail<2>().squaredNorm();
  const double p_off = pt.tail<2>().squaredNorm();
  for (int i = 0; i < grid.nx; ++i) {
    const double x = grid.x(i);
    for (int j = 0; j < grid.np; ++j) {
      const double p = grid.p(j);
      t.raw[0](i, j) = 0.5 * cfg.nu_x * ((x - cfg.x_target(0)) * (x - cfg.x_target(0)) + x_off) +
                       0.5 * cfg.nu_p * ((p - pt(0)) * (p - pt(0)) + p_off);
      t.chi(i, j) = cutoff_profile(std::hypot(x, p), radius);
    }
  }
  for (int c = 0; c < 3; ++c) t.raw[c + 1].setConstant(-cfg.nu_d * cfg.d_target(c));
  t.cut = t.raw;
  for (int c = 0; c < 4; ++c) t.cut[c] *= t.chi;
  return t;
}

double tube_radius(const ClassicalTrajectory& traj) {
  double r = 0.0;
  for (const auto& s : traj.states) r = std::max(r, std::hypot(s.x(0), s.p(0)));
  return r;
}

double auto_cutoff_radius(const ClassicalTrajectory& traj, double hbar, double sigma, double spreads) {
  const double sx = std::sqrt(0.5 * hbar) * sigma, sp = std::sqrt(0.5 * hbar) / sigma;
  return tube_radius(traj) + spreads * std::max(sx, sp);
}

double energy_momentum_bound(const FieldSet& fields, const PhaseGrid& grid, double p_bar, double mass) {
  double sup = 0.0;
  const ScalarField& u0 = fields.potential_field().base();
  for (int i = 0; i < grid.nx; ++i) sup = std::max(sup, std::abs(u0.on_axis(grid.x(i))));
  return std::sqrt(p_bar * p_bar + 4.0 * mass * sup);
}

void require_cutoff_covers(const ClassicalTrajectory& traj, double radius, double suggested) {
  const double tube = tube_radius(traj);
  if (tube >= radius) {
    std::ostringstream os;
    os << "cut-off radius " << radius << " does not cover the classical trajectory (max |(x,p)| = " << tube
       << "); use R >= " << std::max(suggested, tube * 1.5);
    throw ConfigError(os.str());
  }
}

double quantum_goal(const WignerState& final_state, const TargetSymbol& target) {
  return inner_product(final_state, target.raw);
}

std::vector<WignerState> integrate_adjoint_wigner(const TargetSymbol& target, const ControlSignal& u,
                                                  WignerGenerator& gen) {
  const int n = u.steps();
  const double dt = u.dt();
  std::vector<WignerState> out(static_cast<std::size_t>(n) + 1);
  WignerState h = target.cut;
  h.time = u.horizon();
  out[static_cast<std::size_t>(n)] = h;
  for (int k = n - 1; k >= 0; --k) {
    rk4_step(gen, h, u.at(k + 1), u.midpoint(k), u.at(k), -dt);
    if (!h.all_finite())
      throw IntegrationError("adjoint Wigner state became non-finite before t = " + std::to_string(h.time + dt),
                             h.time + dt);
    out[static_cast<std::size_t>(k)] = h;
  }
  return out;
}

double control_gradient_integral(const WignerState& h, const WignerState& f, WignerGenerator& gen, int i) {
  if (!(h.grid == f.grid) || !(f.grid == gen.grid())) throw ConfigError("adjoint and state grids differ");
  double s = 0.0;
  for (int c = 0; c < 4; ++c) s += (h[c] * gen.theta_minus_control(i, f[c])).sum();
  return s * f.grid.cell();
}

MatX quantum_forcing(WignerGenerator& gen, const std::vector<WignerState>& nodes,
                     const std::vector<WignerState>& adjoint, const ControlSignal& u) {
  if (nodes.size() != adjoint.size() || static_cast<int>(nodes.size()) != u.steps() + 1)
    throw ConfigError("forward and adjoint node counts do not match the control grid");
  MatX out(u.steps() + 1, u.dim());
  for (int k = 0; k <= u.steps(); ++k)
    out.row(k) = forcing_at(gen, adjoint[static_cast<std::size_t>(k)], nodes[static_cast<std::size_t>(k)], u.dim())
                     .transpose();
  return out;
}

ControlSignal quantum_gradient(WignerGenerator& gen, const ControlSignal& u, const std::vector<WignerState>& nodes,
                               const TargetSymbol& target, const OCConfig& cfg) {
  const int n = u.steps(), d = u.dim();
  if (static_cast<int>(nodes.size()) != n + 1) throw ConfigError("forward nodes do not match the control grid");
  const double dt = u.dt();
  MatX force = MatX::Zero(n + 1, d);

  WignerState h = target.cut;
  h.time = u.horizon();
  WignerState dh = gen.rhs(h, u.at(n));
  WignerState df = gen.rhs(nodes.back(), u.at(n));
  VecX g_right = forcing_at(gen, h, nodes.back(), d);
  for (int k = n - 1; k >= 0; --k) {
    const auto& f_left = nodes[static_cast<std::size_t>(k)];
    const auto& f_right = nodes[static_cast<std::size_t>(k) + 1];
    WignerState h_left = h;
    rk4_step(gen, h_left, u.at(k + 1), u.midpoint(k), u.at(k), -dt, &dh);
    if (!h_left.all_finite()) throw IntegrationError("adjoint Wigner state became non-finite", f_right.time);
    WignerState dh_left = gen.rhs(h_left, u.at(k));
    WignerState df_left = gen.rhs(f_left, u.at(k));
    const WignerState hm = hermite_midpoint(h_left, dh_left, h, dh, dt);
    const WignerState fm = hermite_midpoint(f_left, df_left, f_right, df, dt);
    const VecX g_mid = forcing_at(gen, hm, fm, d);
    const VecX g_left = forcing_at(gen, h_left, f_left, d);
    force.row(k) += (dt / 6.0) * (g_left + 2.0 * g_mid).transpose();
    force.row(k + 1) += (dt / 6.0) * (2.0 * g_mid + g_right).transpose();
    h = std::move(h_left);
    dh = std::move(dh_left);
    df = std::move(df_left);
    g_right = g_left;
  }
  const VecX w = u.weights();
  for (int k = 0; k <= n; ++k) force.row(k) /= w(k);
  return ControlSignal(u.horizon(), cost_gradient(u, cfg) + force);
}

ObjectiveParts quantum_objective(const QuantumProblem& problem, const ControlSignal& u) {
  WignerGenerator gen(*problem.fields, problem.initial.grid, problem.initial.hbar, problem.cfg.mass,
                      problem.evolution.mode);
  const auto traj = integrate(problem.initial, u, gen, matched_spec(problem.evolution, u), false, false);
  ObjectiveParts p;
  p.goal = quantum_goal(traj.samples.back(), problem.target);
  p.cost = cost_value(u, problem.cfg);
  p.total = p.goal + p.cost;
  return p;
}

namespace {

class WignerProblem {
 public:
  struct Forward {
    std::vector<WignerState> nodes;
  };

  explicit WignerProblem(const QuantumProblem& q)
      : q_(q), gen_(*q.fields, q.initial.grid, q.initial.hbar, q.cfg.mass, q.evolution.mode) {}

  Forward forward(const ControlSignal& u) {
    auto traj = integrate(q_.initial, u, gen_, matched_spec(q_.evolution, u), true, false);
    return {std::move(traj.nodes)};
  }
  ObjectiveParts parts(const Forward& fwd, const ControlSignal& u) const {
    ObjectiveParts p;
    p.goal = quantum_goal(fwd.nodes.back(), q_.target);
    p.cost = cost_value(u, q_.cfg);
    p.total = p.goal + p.cost;
    return p;
  }
  ControlSignal gradient(const ControlSignal& u, const Forward& fwd) {
    return quantum_gradient(gen_, u, fwd.nodes, q_.target, q_.cfg);
  }

 private:
  const QuantumProblem& q_;
  WignerGenerator gen_;
};

}  // namespace

QuantumOptimum optimize_quantum(const QuantumProblem& problem, const ControlSignal& u0, const DescentOptions& opts) {
  if (!problem.fields) throw ConfigError("quantum problem has no fields");
  problem.cfg.validate();
  if (u0.dim() != problem.fields->control_dim()) throw ConfigError("control dimension does not match the fields");
  if (std::abs(u0.horizon() - problem.cfg.horizon) > 1e-12 * problem.cfg.horizon)
    throw ConfigError("control horizon differs from the configured horizon");
  WignerProblem wp(problem);
  QuantumOptimum out;
  out.control = u0;
  out.report = descend(wp, out.control, problem.cfg, opts);
  WignerGenerator gen(*problem.fields, problem.initial.grid, problem.initial.hbar, problem.cfg.mass,
                      problem.evolution.mode);
  out.final_state =
      integrate(problem.initial, out.control, gen, matched_spec(problem.evolution, out.control), false, false)
          .samples.back();
  return out;
}

OCConfig classical_reference_config(const OCConfig& cfg) {
  OCConfig c = cfg;
  c.nu_x *= 0.5;
  c.nu_p *= 0.5;
  c.nu_d *= 0.5;
  return c;
}

namespace {

struct MemberResult {
  SweepRow optimized, dynamics;
};

MemberResult run_member(double hbar, const OCConfig& cfg, const FieldSet& fields, const SweepSetup& setup,
                        const ClassicalOptimum& ref, int steps) {
  MemberResult r;
  r.optimized.hbar = r.dynamics.hbar = hbar;
  const ClassicalState& cf = ref.trajectory.final();
  auto fill_errors = [&](SweepRow& row, const WignerState& fT) {
    const Moments m = moments(fT);
    row.err_x = std::abs(m.mean_x - cf.x(0));
    row.err_p = std::abs(m.mean_p - cf.p(0));
    row.err_d = (m.spin - cf.d).norm();
    row.var_x = m.var_x;
    row.var_p = m.var_p;
  };
  try {
    QuantumProblem q;
    q.fields = &fields;
    q.cfg = cfg;
    q.cfg.steps = steps;
    q.initial = coherent_wigner(setup.grid, hbar, setup.x_bar, setup.p_bar, setup.sigma, setup.d_bar);
    q.evolution.mode = setup.mode;
    q.evolution.horizon = cfg.horizon;
    q.evolution.steps = steps;
    const double suggested = auto_cutoff_radius(ref.trajectory, hbar, setup.sigma, setup.cutoff_spreads);
    const double radius = setup.radius > 0.0 ? setup.radius : suggested;
    require_cutoff_covers(ref.trajectory, radius, suggested);
    q.target = build_target(setup.grid, hbar, q.cfg, radius);
    r.optimized.radius = r.dynamics.radius = radius;

    // dynamics only: the classical optimum injected
    {
      WignerGenerator gen(fields, setup.grid, hbar, cfg.mass, setup.mode);
      const auto traj = integrate(q.initial, ref.control, gen, matched_spec(q.evolution, ref.control), false, false);
      const WignerState& fT = traj.samples.back();
      r.dynamics.goal = quantum_goal(fT, q.target);
      r.dynamics.cost = cost_value(ref.control, cfg);
      r.dynamics.j_star = r.dynamics.goal + r.dynamics.cost;
      r.dynamics.control = ref.control;
      fill_errors(r.dynamics, fT);
    }
    if (setup.optimize) {
      const QuantumOptimum opt = optimize_quantum(q, ref.control, setup.quantum_opts);
      SweepRow& row = r.optimized;
      row.control = opt.control;
      row.history = opt.report.history;
      row.iterations = static_cast<int>(opt.report.history.size()) - 1;
      row.converged = opt.report.converged;
      row.message = opt.report.message;
      row.goal = opt.report.history.back().goal;
      row.cost = opt.report.history.back().cost;
      row.j_star = opt.report.history.back().objective;
      row.u_dist = l2_norm(ControlSignal(cfg.horizon, opt.control.values() - ref.control.values()));
      fill_errors(row, opt.final_state);
    }
  } catch (const std::exception& e) {
    r.optimized.failed = r.dynamics.failed = true;
    r.optimized.message = r.dynamics.message = e.what();
  }
  return r;
}

}  // namespace

SweepTable hbar_sweep(const OCConfig& cfg, const FieldSet& fields, std::vector<double> hbars, const SweepSetup& setup) {
  cfg.validate();
  setup.grid.validate();
  if (hbars.empty()) throw ConfigError("hbar list is empty");
  for (double h : hbars)
    if (!(h > 0.0)) throw ConfigError("every hbar in the sweep must be > 0");
  std::sort(hbars.begin(), hbars.end(), std::greater<>());

  SweepTable table;
  table.reference_cfg = classical_reference_config(cfg);
  const ClassicalState init{Vec3(setup.x_bar, 0, 0), Vec3(setup.p_bar, 0, 0), setup.d_bar};
  ControlSignal zero(cfg.horizon, cfg.steps, fields.control_dim());
  table.reference = optimize(fields, init, zero, table.reference_cfg, setup.classical_opts);

  int steps = setup.steps;
  if (steps <= 0) {
    VecX bound = VecX::Ones(fields.control_dim());
    for (int i = 0; i < bound.size(); ++i)
      bound(i) += 2.0 * table.reference.control.values().col(i).cwiseAbs().maxCoeff();
    double dt = cfg.horizon;
    for (double h : hbars) {
      WignerGenerator gen(fields, setup.grid, h, cfg.mass, setup.mode);
      dt = std::min(dt, gen.stable_step(bound, setup.cfl));
    }
    steps = std::max(cfg.steps, static_cast<int>(std::ceil(cfg.horizon / dt)));
  }
  if (steps != cfg.steps) {
    table.reference_cfg.steps = steps;
    table.reference = optimize(fields, init, ControlSignal(cfg.horizon, steps, fields.control_dim()),
                               table.reference_cfg, setup.classical_opts);
  }
  table.steps = steps;

  std::vector<MemberResult> results(hbars.size());
  const int threads = std::max(1, setup.threads);
  for (std::size_t start = 0; start < hbars.size(); start += static_cast<std::size_t>(threads)) {
    const std::size_t stop = std::min(hbars.size(), start + static_cast<std::size_t>(threads));
    if (threads == 1) {
      results[start] = run_member(hbars[start], cfg, fields, setup, table.reference, steps);
      continue;
    }
    std::vector<std::future<MemberResult>> jobs;
    for (std::size_t i = start; i < stop; ++i)
      jobs.push_back(std::async(std::launch::async, run_member, hbars[i], std::cref(cfg), std::cref(fields),
                                std::cref(setup), std::cref(table.reference), steps));
    for (std::size_t i = start; i < stop; ++i) results[i] = jobs[i - start].get();
  }
  for (auto& r : results) {
    table.partial = table.partial || r.optimized.failed;
    if (setup.optimize) table.optimized.push_back(std::move(r.optimized));
    table.dynamics_only.push_back(std::move(r.dynamics));
  }
  return table;
}

}  // namespace spinoc
