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
// Acceptance suite: one PASS/FAIL line per criterion. Exit status 1 if any fails.

#include "spinoc/classical_ocp.hpp"
#include "spinoc/config.hpp"
#include "spinoc/oracles.hpp"
#include "spinoc/quantum_ocp.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace spinoc;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail, Clock::time_point t0) {
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  std::printf("%s %2d %s: %s [%.1f s]\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str(), secs);
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string list(const std::vector<double>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + "}";
}

void progress(const std::string& what) { std::cerr << "  .. " << what << std::endl; }

double grid_norm(const Grid2& e, const PhaseGrid& g) { return std::sqrt(e.square().sum() * g.cell()); }

Grid2 random_grid(const PhaseGrid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Grid2 f(g.nx, g.np);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.np; ++j) f(i, j) = n(rng);
  return f;
}

WignerState random_state(const PhaseGrid& g, double hbar, std::mt19937_64& rng) {
  WignerState w = WignerState::zeros(g, hbar);
  for (int c = 0; c < 4; ++c) w[c] = random_grid(g, rng);
  return w;
}

double smooth_v(double x) { return 0.7 * std::cos(1.3 * x + 0.2) + 0.4 * std::exp(-x * x / 2.0); }
double smooth_vp(double x) { return -0.91 * std::sin(1.3 * x + 0.2) - 0.4 * x * std::exp(-x * x / 2.0); }

// potential, Zeeman and Rashba fields that all vary in x
FieldSet varying_fields() {
  ScalarField base{HarmonicProfile{1.0, Vec3::Zero()}, CosineProfile{0.2, Vec3(1.5, 0, 0), 0.0}};
  std::vector<ScalarField> shapes{ScalarField{LinearProfile{Vec3(-1, 0, 0), 0.0}},
                                  ScalarField{GaussianProfile{0.5, Vec3(0.3, 0, 0), 0.8}}};
  VectorField B({{Vec3(0.3, 0, 0.8), GaussianProfile{1.0, Vec3(-0.2, 0, 0), 1.1}}, {Vec3(0, 0, 0.4), ConstantProfile{1.0}}});
  VectorField K({{Vec3(0, 0.2, 0.5), CosineProfile{1.0, Vec3(0.8, 0, 0), 0.4}}});
  return FieldSet(ControlledPotential(base, shapes), B, K);
}

ControlSignal wiggle(double T, int steps, int dim) {
  ControlSignal u(T, steps, dim);
  for (int k = 0; k <= steps; ++k)
    for (int i = 0; i < dim; ++i) u.values()(k, i) = 0.2 + 0.3 * std::sin(5.0 * u.time(k) + i);
  return u;
}

// least-squares slope of log(y) against log(x)
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a, sy += b, sxx += a * a, sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<double> pairwise_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> s;
  for (std::size_t i = 1; i < x.size(); ++i) s.push_back(std::log(y[i - 1] / y[i]) / std::log(x[i - 1] / x[i]));
  return s;
}

template <class Get>
bool strictly_decreasing(const std::vector<SweepRow>& rows, Get get) {
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(get(rows[i]) < get(rows[i - 1]))) return false;
  return true;
}

bool non_increasing(const std::vector<IterationRecord>& h) {
  for (std::size_t i = 1; i < h.size(); ++i)
    if (h[i].objective > h[i - 1].objective) return false;
  return true;
}

// ---------------------------------------------------------------------------

void operator_fidelity() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(11);
  double theta = 0.0, routes = 0.0, residue = 0.0;
  for (const auto& [nx, np] : {std::pair{8, 8}, std::pair{8, 16}, std::pair{16, 16}}) {
    const PhaseGrid g{nx, np, -3.1, 6.4, -2.9, 6.0};
    const Grid2 f = random_grid(g, rng);
    for (double hbar : {0.1, 0.4, 1.0}) {
      theta = std::max(theta, (theta_minus(smooth_v, f, hbar, g) - oracles::direct_theta(smooth_v, f, -1, hbar, g))
                                  .abs().maxCoeff());
      theta = std::max(theta, (theta_plus(smooth_v, f, hbar, g) - oracles::direct_theta(smooth_v, f, +1, hbar, g))
                                  .abs().maxCoeff());
    }
  }
  const PhaseGrid g{16, 16, -3.1, 6.4, -2.9, 6.0};
  const FieldSet fields = varying_fields();
  const Grid2 h = random_grid(g, rng);
  for (double hbar : {0.25, 0.8}) {
    WignerGenerator gen(fields, g, hbar, 1.0);
    for (int k = 1; k < 3; ++k) {
      const AxisSymbol R = [&fields, k](double x) {
        const Vec3 K = fields.rashba(Vec3(x, 0, 0));
        return k == 1 ? -K(2) : K(1);
      };
      const auto cp = oracles::commutator_pk(h, R, hbar, g);
      const auto ac = oracles::anticommutator_pk(h, R, hbar, g);
      const Grid2 ap = gen.a_plus(h, k), am = gen.a_minus(h, k);
      routes = std::max({routes, (ap - cp.symmetric).abs().maxCoeff(), (ap - cp.moyal_composed).abs().maxCoeff(),
                         (cp.literal - cp.moyal_whole).abs().maxCoeff(), (am - ac.symmetric).abs().maxCoeff(),
                         (am - ac.moyal_composed).abs().maxCoeff(), (ac.literal - ac.moyal_whole).abs().maxCoeff()});
      residue = std::max({residue, cp.imag_residue, ac.imag_residue});
    }
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  report(1, "operator fidelity",
         theta <= 1e-10 && routes <= 1e-10 && residue <= 1e-10 && secs < 60.0,
         "theta vs quadrature " + fmt(theta) + ", Moyal triple route " + fmt(routes) + ", imaginary residue " +
             fmt(residue) + " (tol 1e-10, < 60 s)",
         t0);
}

void conservation() {
  const auto t0 = Clock::now();
  const PhaseGrid g = PhaseGrid::centered(128, 128, 3.5, 3.5);
  const FieldSet fields = varying_fields();
  WignerGenerator gen(fields, g, 0.1, 1.0, EvolutionMode::full_quantum);
  EvolutionSpec spec;
  spec.steps = 2000;
  spec.sample_every = 100;
  const VecX bound = VecX::Constant(2, 0.5);
  const bool stable = spec.dt() <= gen.stable_step(bound, 0.5);
  const auto traj = integrate(coherent_wigner(g, 0.1, -0.5, 0.25, 1.0, Vec3(1, 0, 0)), wiggle(1.0, 2000, 2), gen, spec);
  const auto& d0 = traj.diagnostics.front();
  double dm = 0.0, dl = 0.0;
  for (const auto& d : traj.diagnostics) {
    dm = std::max(dm, std::abs(d.mass - d0.mass) / d0.mass);
    dl = std::max(dl, std::abs(d.l2 - d0.l2) / d0.l2);
  }
  report(2, "conservation", stable && dm <= 1e-8 && dl <= 1e-6,
         "128x128, 2000 RK4 steps, T = 1, full operator with varying fields: mass drift " + fmt(dm) +
             " (tol 1e-8), L2 drift " + fmt(dl) + " (tol 1e-6)",
         t0);
}

void anti_symmetry() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> uu(-1.0, 1.0);
  const RunConfig def = parse_config(nlohmann::json::object());
  const FieldSet rich = varying_fields();
  struct Case {
    const FieldSet* fields;
    PhaseGrid grid;
    EvolutionMode mode;
  };
  const std::vector<Case> cases{{&rich, PhaseGrid::centered(64, 64, 3.5, 3.5), EvolutionMode::full_quantum},
                                {&rich, PhaseGrid::centered(32, 64, 4.0, 3.0), EvolutionMode::semiclassical},
                                {&def.fields, def.grid, EvolutionMode::uniform_field}};
  double worst = 0.0;
  for (const auto& c : cases) {
    WignerGenerator gen(*c.fields, c.grid, 0.2, 1.0, c.mode);
    for (int n = 0; n < 20; ++n) {
      const WignerState a = random_state(c.grid, 0.2, rng), b = random_state(c.grid, 0.2, rng);
      VecX u(c.fields->control_dim());
      for (int i = 0; i < u.size(); ++i) u(i) = uu(rng);
      worst = std::max(worst, std::abs(inner_product(gen.rhs(a, u), b) + inner_product(a, gen.rhs(b, u))) /
                                  (l2_norm(a) * l2_norm(b)));
    }
  }
  report(3, "anti-symmetry", worst <= 1e-9,
         "20 random pairs per generator (full, semiclassical, uniform): max " + fmt(worst) + " (tol 1e-9)", t0);
}

void semiclassical_limits() {
  const auto t0 = Clock::now();
  const PhaseGrid g = PhaseGrid::centered(64, 128, 5, 6);
  Grid2 f(g.nx, g.np);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.np; ++j) {
      const double x = g.x(i) - 0.2, p = g.p(j) - 0.1;
      f(i, j) = std::exp(-x * x / (2 * 0.64) - p * p / (2 * 0.36));
    }
  Spectral s(g);
  const Grid2 dpf = s.dp(f);
  Eigen::ArrayXd v(g.nx), vp(g.nx);
  for (int i = 0; i < g.nx; ++i) v(i) = smooth_v(g.x(i)), vp(i) = smooth_vp(g.x(i));
  const std::vector<double> hbars{0.4, 0.2, 0.1, 0.05};
  std::vector<double> em, ep;
  for (double hbar : hbars) {
    em.push_back(grid_norm(theta_minus(smooth_v, f, hbar, g) - dpf.colwise() * vp, g));
    ep.push_back(grid_norm(theta_plus(smooth_v, f, hbar, g) - 2.0 * (f.colwise() * v), g));
  }
  auto slopes = pairwise_slopes(hbars, em);
  const auto sp = pairwise_slopes(hbars, ep);
  slopes.insert(slopes.end(), sp.begin(), sp.end());
  const double fm = loglog_slope(hbars, em), fp = loglog_slope(hbars, ep);
  bool ok = std::abs(fm - 2.0) <= 0.1 && std::abs(fp - 2.0) <= 0.1;
  for (double x : slopes) ok = ok && std::abs(x - 2.0) <= 0.1;
  report(4, "semiclassical operator limits", ok,
         "fitted slopes theta- " + fmt(fm) + ", theta+ " + fmt(fp) + "; pairwise " + list(slopes) + " (2 +- 0.1)", t0);
}

double classical_fd_error(const FieldSet& fields, const OCConfig& cfg, const ClassicalState& init, const ControlSignal& u) {
  const auto traj = integrate_forward(fields, init, u, cfg);
  const auto adj = integrate_adjoint(fields, traj, u, cfg);
  const ControlSignal g = projected_gradient(fields, u, traj, adj, cfg);
  auto J = [&](const ControlSignal& v) { return objective(fields, init, v, cfg).total; };
  const int n = u.steps();
  std::vector<std::pair<double, double>> pairs;
  double scale = 0.0;
  for (int i = 0; i < u.dim(); ++i)
    for (int k = 1; k < n; k += 7) {
      const double fd = oracles::fd_gradient(J, u, k, i);
      pairs.emplace_back(g.values()(k, i), fd);
      scale = std::max(scale, std::abs(fd));
    }
  double worst = 0.0;
  for (const auto& [a, fd] : pairs)
    if (std::abs(fd) > 1e-3 * scale) worst = std::max(worst, std::abs(a - fd) / std::abs(fd));
  return worst;
}

void classical_gradient() {
  const auto t0 = Clock::now();
  const RunConfig def = parse_config(nlohmann::json::object());
  const ClassicalState init{Vec3(-0.5, 0, 0), Vec3(0.25, 0, 0), Vec3(1, 0, 0)};
  const double e1 = classical_fd_error(def.fields, def.oc, init, wiggle(1.0, def.oc.steps, 1));
  const FieldSet rich = varying_fields();
  OCConfig cfg = def.oc;
  cfg.p_target = Vec3(0.1, 0, 0);
  cfg.penalize_momentum_target = true;
  const double e2 = classical_fd_error(rich, cfg, init, wiggle(1.0, 200, 2));
  report(5, "classical adjoint gradient", e1 <= 1e-5 && e2 <= 1e-5,
         "max relative error at interior nodes: default fields " + fmt(e1) + ", varying fields " + fmt(e2) +
             " (tol 1e-5)",
         t0);
}

double quantum_fd_error(const FieldSet& fields, EvolutionMode mode) {
  const PhaseGrid g = PhaseGrid::centered(64, 64, 3.5, 3.5);
  const double hbar = 0.1;
  const int dim = fields.control_dim();
  WignerGenerator gen(fields, g, hbar, 1.0, mode);
  QuantumProblem q;
  q.fields = &fields;
  q.initial = coherent_wigner(g, hbar, -0.5, 0.25, 1.0, Vec3(1, 0, 0));
  q.evolution.mode = mode;
  q.evolution.horizon = 1.0;
  q.evolution.steps = static_cast<int>(std::ceil(1.0 / gen.stable_step(VecX::Constant(dim, 0.5), 0.5)));
  q.cfg = parse_config(nlohmann::json::object()).oc;
  q.cfg.steps = q.evolution.steps;
  const ControlSignal u = wiggle(1.0, q.evolution.steps, dim);
  const auto traj = integrate_forward(fields, ClassicalState{Vec3(-0.5, 0, 0), Vec3(0.25, 0, 0), Vec3(1, 0, 0)}, u, q.cfg);
  q.target = build_target(g, hbar, q.cfg, auto_cutoff_radius(traj, hbar, 1.0));
  const auto nodes = integrate(q.initial, u, gen, q.evolution, true, false).nodes;
  const ControlSignal grad = quantum_gradient(gen, u, nodes, q.target, q.cfg);
  auto J = [&](const ControlSignal& v) { return quantum_objective(q, v).total; };
  const int n = u.steps();
  double worst = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int k : {n / 5, 2 * n / 5, 3 * n / 5, 4 * n / 5}) {
      const double fd = oracles::fd_gradient(J, u, k, i);
      worst = std::max(worst, std::abs(grad.values()(k, i) - fd) / std::abs(fd));
    }
  return worst;
}

void quantum_gradient_check() {
  const auto t0 = Clock::now();
  const RunConfig def = parse_config(nlohmann::json::object());
  const double e1 = quantum_fd_error(def.fields, EvolutionMode::uniform_field);
  const double e2 = quantum_fd_error(varying_fields(), EvolutionMode::full_quantum);
  report(6, "quantum adjoint gradient", e1 <= 1e-4 && e2 <= 1e-4,
         "64x64, max relative error at interior nodes: uniform fields " + fmt(e1) + ", varying fields (full) " +
             fmt(e2) + " (tol 1e-4)",
         t0);
}

void spin_exactness() {
  const auto t0 = Clock::now();
  const Vec3 b(0.3, -0.2, 1.1), d0 = Vec3(1, 0.5, -0.3).normalized();
  double classical = 0.0, wigner = 0.0, norm_drift = 0.0;
  {
    // U = 0 keeps p constant, so the Rashba term is a constant extra field
    const Vec3 k(0.1, 0.2, 0.5), p(0.25, 0, 0);
    const FieldSet f({}, VectorField::uniform(b), VectorField::uniform(k));
    OCConfig cfg;
    cfg.steps = 400;
    const auto traj = integrate_forward(f, ClassicalState{Vec3::Zero(), p, d0}, ControlSignal(1.0, 400, 0), cfg);
    for (std::size_t n = 0; n < traj.states.size(); ++n) {
      const Vec3& d = traj.states[n].d;
      classical = std::max(classical, (d - oracles::precession(d0, b, k, p, n * traj.dt)).norm());
      norm_drift = std::max(norm_drift, std::abs(d.norm() - 1.0));
    }
  }
  const PhaseGrid g = PhaseGrid::centered(64, 64, 3.5, 3.5);
  const FieldSet f(ControlledPotential(ScalarField{HarmonicProfile{1.0, Vec3::Zero()}}, {}), VectorField::uniform(b), {});
  for (EvolutionMode mode : {EvolutionMode::full_quantum, EvolutionMode::uniform_field}) {
    WignerGenerator gen(f, g, 0.2, 1.0, mode);
    EvolutionSpec spec;
    spec.steps = 400;
    spec.sample_every = 20;
    const auto traj = integrate(coherent_wigner(g, 0.2, -0.4, 0.3, 1.0, d0), ControlSignal(1.0, 400, 0), gen, spec);
    for (const auto& d : traj.diagnostics) {
      wigner = std::max(wigner, (d.m.spin - oracles::precession(d0, b, Vec3::Zero(), Vec3::Zero(), d.time)).norm());
      norm_drift = std::max(norm_drift, std::abs(d.m.spin.norm() - 1.0));
    }
  }
  report(7, "spin exactness", classical <= 1e-6 && wigner <= 1e-6 && norm_drift <= 1e-8,
         "classical " + fmt(classical) + ", Wigner spin moment " + fmt(wigner) + " (tol 1e-6); |d| drift " +
             fmt(norm_drift) + " (tol 1e-8)",
         t0);
}

void quadratic_moments() {
  const auto t0 = Clock::now();
  const PhaseGrid g = PhaseGrid::centered(64, 64, 4, 4);
  const double k = 1.7, m = 1.1, hbar = 0.2;
  const Vec3 x0(0.6, 0, 0), p0(-0.4, 0, 0);
  const FieldSet f(ControlledPotential(ScalarField{HarmonicProfile{k, Vec3::Zero()}},
                                       {ScalarField{LinearProfile{Vec3(-1, 0, 0), 0.0}}}),
                   {}, {});
  WignerGenerator gen(f, g, hbar, m);
  EvolutionSpec spec;
  spec.steps = 2 * static_cast<int>(std::ceil(1.0 / gen.stable_step(VecX::Constant(1, 0.6), 0.5)));
  spec.sample_every = spec.steps / 20;
  OCConfig cfg;
  cfg.mass = m;
  cfg.steps = spec.steps;
  double free = 0.0, driven = 0.0;
  {
    const auto traj = integrate(coherent_wigner(g, hbar, x0(0), p0(0), 1.0, Vec3::UnitZ()),
                                ControlSignal(1.0, spec.steps, 1), gen, spec);
    for (const auto& d : traj.diagnostics) {
      const auto [x, p] = oracles::oscillator(x0, p0, m, k, d.time);
      free = std::max({free, std::abs(d.m.mean_x - x(0)), std::abs(d.m.mean_p - p(0))});
    }
  }
  {
    // a moving trap centre: the Ehrenfest equations still close
    const ControlSignal u = wiggle(1.0, spec.steps, 1);
    const auto traj = integrate(coherent_wigner(g, hbar, x0(0), p0(0), 1.0, Vec3::UnitZ()), u, gen, spec);
    const auto cl = integrate_forward(f, ClassicalState{x0, p0, Vec3::UnitZ()}, u, cfg);
    for (std::size_t n = 0; n < traj.diagnostics.size(); ++n) {
      const auto& d = traj.diagnostics[n];
      const auto& s = cl.states[static_cast<std::size_t>(std::lround(d.time / cl.dt))];
      driven = std::max({driven, std::abs(d.m.mean_x - s.x(0)), std::abs(d.m.mean_p - s.p(0))});
    }
  }
  report(8, "quadratic-potential moments", free <= 1e-5 && driven <= 1e-5,
         "free oscillator " + fmt(free) + ", driven trap vs classical RK4 " + fmt(driven) + " (tol 1e-5)", t0);
}

// criteria 9, 10 and part of 12 share one sweep on the default problem
struct SweepOutcome {
  RunConfig cfg;
  SweepTable table;
  double seconds = 0.0;
};

SweepOutcome run_sweep() {
  SweepOutcome out;
  out.cfg = parse_config(nlohmann::json::object());
  const RunConfig& c = out.cfg;
  SweepSetup s;
  s.grid = c.grid;
  s.mode = c.mode;
  s.x_bar = c.x_bar;
  s.p_bar = c.p_bar;
  s.sigma = c.sigma;
  s.d_bar = c.d_bar;
  s.cfl = c.cfl;
  s.cutoff_spreads = c.cutoff_spreads;
  s.classical_opts = c.optimizer;
  s.quantum_opts = c.optimizer;
  s.threads = 1;
  const auto t0 = Clock::now();
  out.table = hbar_sweep(c.oc, c.fields, c.sweep_hbars, s);
  out.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return out;
}

void concentration(const SweepOutcome& sw) {
  const auto t0 = Clock::now();
  const RunConfig& c = sw.cfg;
  std::vector<double> hbars, vx0, vp0, vxT, vpT;
  for (const auto& r : sw.table.dynamics_only) {
    const Moments m0 = moments(coherent_wigner(c.grid, r.hbar, c.x_bar, c.p_bar, c.sigma, c.d_bar));
    hbars.push_back(r.hbar);
    vx0.push_back(m0.var_x);
    vp0.push_back(m0.var_p);
    vxT.push_back(r.var_x);
    vpT.push_back(r.var_p);
  }
  std::vector<double> slopes{loglog_slope(hbars, vx0), loglog_slope(hbars, vp0), loglog_slope(hbars, vxT),
                             loglog_slope(hbars, vpT)};
  bool ok = true;
  for (double s : slopes) ok = ok && std::abs(s - 1.0) <= 0.05;
  const auto& rows = sw.table.dynamics_only;
  const bool mono = strictly_decreasing(rows, [](const SweepRow& r) { return r.err_x; }) &&
                    strictly_decreasing(rows, [](const SweepRow& r) { return r.err_p; }) &&
                    strictly_decreasing(rows, [](const SweepRow& r) { return r.err_d; });
  std::vector<double> ex, ep, ed;
  for (const auto& r : rows) ex.push_back(r.err_x), ep.push_back(r.err_p), ed.push_back(r.err_d);
  report(9, "concentration", ok && mono && !sw.table.partial,
         "variance slopes (x0, p0, xT, pT) " + list(slopes) + " (1 +- 0.05); fixed-control errors over hbar " +
             list(hbars) + ": x " + list(ex) + ", p " + list(ep) + ", d " + list(ed) +
             (mono ? " decreasing" : " NOT decreasing"),
         t0);
}

void classical_limit_of_optimum(const SweepOutcome& sw) {
  const auto t0 = Clock::now();
  const auto& rows = sw.table.optimized;
  bool mono = true;
  for (auto get : std::vector<std::function<double(const SweepRow&)>>{
           [](const SweepRow& r) { return r.u_dist; }, [](const SweepRow& r) { return r.err_x; },
           [](const SweepRow& r) { return r.err_p; }, [](const SweepRow& r) { return r.err_d; }})
    mono = mono && strictly_decreasing(rows, get);
  const double ratio = rows.front().u_dist / rows.back().u_dist;
  std::vector<double> ud, ex, ep, ed;
  for (const auto& r : rows) ud.push_back(r.u_dist), ex.push_back(r.err_x), ep.push_back(r.err_p), ed.push_back(r.err_d);
  report(10, "classical limit of the optimum",
         mono && ratio >= 2.0 && !sw.table.partial && sw.seconds <= 3600.0,
         "u_dist " + list(ud) + ", err x " + list(ex) + ", p " + list(ep) + ", d " + list(ed) +
             (mono ? " (decreasing)" : " (NOT decreasing)") + "; ratio hbar 0.4 / 0.05 = " + fmt(ratio) +
             " (>= 2); sweep " + fmt(sw.seconds) + " s (<= 3600)",
         t0);
}

void cutoff_insensitivity() {
  const auto t0 = Clock::now();
  const RunConfig c = parse_config(nlohmann::json::object());
  const double hbar = 0.1;
  const OCConfig ref_cfg = classical_reference_config(c.oc);
  const ClassicalState init{Vec3(c.x_bar, 0, 0), Vec3(c.p_bar, 0, 0), c.d_bar};
  WignerGenerator gen(c.fields, c.grid, hbar, c.oc.mass, c.mode);
  const auto probe = optimize(c.fields, init, ControlSignal(1.0, c.oc.steps, 1), ref_cfg, c.optimizer);
  const VecX bound = VecX::Constant(1, 1.0 + 2.0 * probe.control.values().cwiseAbs().maxCoeff());
  const int steps = static_cast<int>(std::ceil(c.oc.horizon / gen.stable_step(bound, c.cfl)));
  OCConfig rc = ref_cfg;
  rc.steps = steps;
  const auto ref = optimize(c.fields, init, ControlSignal(1.0, steps, 1), rc, c.optimizer);

  QuantumProblem q;
  q.fields = &c.fields;
  q.cfg = c.oc;
  q.cfg.steps = steps;
  q.initial = coherent_wigner(c.grid, hbar, c.x_bar, c.p_bar, c.sigma, c.d_bar);
  q.evolution.mode = c.mode;
  q.evolution.horizon = c.oc.horizon;
  q.evolution.steps = steps;
  const double R = auto_cutoff_radius(ref.trajectory, hbar, c.sigma, c.cutoff_spreads);
  DescentOptions opts = c.optimizer;
  opts.tol = 1e-8;
  opts.max_iters = 80;
  q.target = build_target(c.grid, hbar, q.cfg, R);
  progress("cut-off radius R = " + fmt(R));
  const auto a = optimize_quantum(q, ref.control, opts);
  q.target = build_target(c.grid, hbar, q.cfg, 2.0 * R);
  progress("cut-off radius 2R");
  const auto b = optimize_quantum(q, ref.control, opts);
  const double ja = a.report.history.back().objective, jb = b.report.history.back().objective;
  const double du = l2_norm(ControlSignal(1.0, a.control.values() - b.control.values()));
  report(11, "cut-off insensitivity", std::abs(ja - jb) <= 1e-8,
         "hbar 0.1, R = " + fmt(R) + ", independent runs from the classical optimum (" +
             std::to_string(a.report.history.size() - 1) + " and " + std::to_string(b.report.history.size() - 1) +
             " iterations): |J*(2R) - J*(R)| = " + fmt(std::abs(ja - jb)) + " (tol 1e-8), |u*(2R) - u*(R)| = " +
             fmt(du) + ", final gradients " + fmt(a.report.history.back().grad_inf) + ", " +
             fmt(b.report.history.back().grad_inf),
         t0);
}

void optimizer_contract(const SweepOutcome& sw) {
  const auto t0 = Clock::now();
  bool monotone = true;
  std::string detail;

  // translation in a harmonic trap whose centre is the control
  const FieldSet trap(ControlledPotential(ScalarField{HarmonicProfile{1.0, Vec3::Zero()}},
                                          {ScalarField{LinearProfile{Vec3(-1, 0, 0), 0.0}}}),
                      {}, {});
  OCConfig cfg;
  cfg.nu_x = 2.0;
  cfg.nu_p = 0.0;
  cfg.nu_d = 0.0;
  cfg.x_target = Vec3(0.5, 0, 0);
  cfg.gamma = 0.1;
  cfg.gamma_prime = 0.01;
  cfg.steps = 200;
  const ClassicalState init{Vec3(-0.5, 0, 0), Vec3::Zero(), Vec3::UnitZ()};
  const ControlSignal zero(1.0, 200, 1);
  const double goal0 = objective(trap, init, zero, cfg).goal;
  double goal_c = 0.0;
  for (StepRule rule : {StepRule::gradient, StepRule::bvp, StepRule::lbfgs}) {
    DescentOptions o;
    o.rule = rule;
    o.max_iters = 60;
    const auto opt = optimize(trap, init, zero, cfg, o);
    monotone = monotone && non_increasing(opt.report.history);
    goal_c = std::max(goal_c, opt.report.history.back().goal);
  }

  const PhaseGrid g = PhaseGrid::centered(64, 64, 3.5, 3.5);
  QuantumProblem q;
  q.fields = &trap;
  q.initial = coherent_wigner(g, 0.1, -0.5, 0.0, 1.0, Vec3::UnitZ());
  q.evolution.mode = EvolutionMode::uniform_field;
  WignerGenerator gen(trap, g, 0.1, 1.0, q.evolution.mode);
  q.evolution.steps = static_cast<int>(std::ceil(1.0 / gen.stable_step(VecX::Constant(1, 3.0), 0.5)));
  q.cfg = cfg;
  q.cfg.steps = q.evolution.steps;
  q.target = build_target(g, 0.1, q.cfg, 3.0);
  const ControlSignal qzero(1.0, q.evolution.steps, 1);
  const double qgoal0 = quantum_objective(q, qzero).goal;
  DescentOptions o;
  o.rule = StepRule::lbfgs;
  o.max_iters = 40;
  const auto qopt = optimize_quantum(q, qzero, o);
  monotone = monotone && non_increasing(qopt.report.history);
  const double qgoal = qopt.report.history.back().goal;

  bool sweep_mono = non_increasing(sw.table.reference.report.history);
  for (const auto& r : sw.table.optimized) sweep_mono = sweep_mono && non_increasing(r.history);
  report(12, "optimizer contract", monotone && sweep_mono && goal_c < goal0 && qgoal < qgoal0,
         std::string("histories non-increasing: translation runs ") + (monotone ? "yes" : "NO") + ", sweep runs " +
             (sweep_mono ? "yes" : "NO") + "; translation goal classical " + fmt(goal0) + " -> " + fmt(goal_c) +
             ", quantum " + fmt(qgoal0) + " -> " + fmt(qgoal),
         t0);
}

}  // namespace

int main(int argc, char** argv) {
  // optional argument: comma-separated criteria to run (default: all)
  std::vector<int> only;
  if (argc > 1) {
    std::stringstream ss(argv[1]);
    std::string item;
    while (std::getline(ss, item, ',')) only.push_back(std::stoi(item));
  }
  auto wanted = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };
  try {
    if (wanted(1)) operator_fidelity();
    if (wanted(2)) conservation();
    if (wanted(3)) anti_symmetry();
    if (wanted(4)) semiclassical_limits();
    if (wanted(5)) classical_gradient();
    if (wanted(6)) quantum_gradient_check();
    if (wanted(7)) spin_exactness();
    if (wanted(8)) quadratic_moments();
    if (wanted(11)) cutoff_insensitivity();
    if (wanted(9) || wanted(10) || wanted(12)) {
      progress("hbar sweep");
      const SweepOutcome sw = run_sweep();
      if (wanted(9)) concentration(sw);
      if (wanted(10)) classical_limit_of_optimum(sw);
      if (wanted(12)) optimizer_contract(sw);
    }
  } catch (const std::exception& e) {
    std::printf("FAIL    aborted: %s\n", e.what());
    return 1;
  }
  return failures == 0 ? 0 : 1;
}
