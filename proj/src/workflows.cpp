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
#include "spinoc/workflows.hpp"

#include "spinoc/classical_ocp.hpp"
#include "spinoc/io.hpp"
#include "spinoc/quantum_ocp.hpp"
#if SPINOC_WITH_ORACLES
#include "spinoc/oracles.hpp"
#endif

#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

namespace spinoc {

using nlohmann::json;

RunError::RunError(std::string module, const std::string& what, std::uint64_t fingerprint)
    : std::runtime_error(module + ": " + what + " [config " + hex64(fingerprint) + "]"), module_(std::move(module)) {}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"simulate-classical", "optimize-classical", "simulate-wigner",
                                              "optimize-wigner",    "limit-sweep",        "validate"};
  return names;
}

namespace {

template <class F>
auto stage(const char* module, const RunConfig& cfg, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const RunError&) {
    throw;
  } catch (const std::exception& e) {
    throw RunError(module, e.what(), cfg.fingerprint);
  }
}

ClassicalState initial_classical(const RunConfig& c) {
  return ClassicalState{Vec3(c.x_bar, 0, 0), Vec3(c.p_bar, 0, 0), c.d_bar};
}

std::vector<std::string> numbered(const std::string& stem, int n) {
  std::vector<std::string> out;
  for (int i = 1; i <= n; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

CsvTable control_table(const ControlSignal& u, const ControlSignal* extra = nullptr, const std::string& extra_stem = "") {
  auto header = numbered("u", u.dim());
  header.insert(header.begin(), "t");
  if (extra)
    for (auto& h : numbered(extra_stem, extra->dim())) header.push_back(h);
  CsvTable t(header);
  for (int k = 0; k <= u.steps(); ++k) {
    std::vector<double> row{u.time(k)};
    for (int i = 0; i < u.dim(); ++i) row.push_back(u.values()(k, i));
    if (extra)
      for (int i = 0; i < extra->dim(); ++i) row.push_back(extra->values()(k, i));
    t.add_row(row);
  }
  return t;
}

std::string two_column(const std::vector<std::pair<double, double>>& pts, const std::string& comment) {
  std::string out = "# " + comment + "\n";
  for (const auto& [a, b] : pts) out += format_number(a) + " " + format_number(b) + "\n";
  return out;
}

CsvTable trajectory_table(const ClassicalTrajectory& traj) {
  CsvTable t({"t", "x1", "x2", "x3", "p1", "p2", "p3", "d1", "d2", "d3"});
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const auto& s = traj.states[k];
    t.add_row({static_cast<double>(k) * traj.dt, s.x(0), s.x(1), s.x(2), s.p(0), s.p(1), s.p(2), s.d(0), s.d(1),
               s.d(2)});
  }
  return t;
}

CsvTable history_table(const std::vector<IterationRecord>& h) {
  CsvTable t({"iteration", "objective", "goal", "cost", "grad_inf", "step"});
  for (const auto& r : h) t.add_row({double(r.iteration), r.objective, r.goal, r.cost, r.grad_inf, r.step});
  return t;
}

CsvTable diagnostics_table(const std::vector<WignerDiagnostics>& d) {
  CsvTable t({"t", "mass", "l2", "h1p", "mean_x", "mean_p", "var_x", "var_p", "spin1", "spin2", "spin3"});
  for (const auto& s : d)
    t.add_row({s.time, s.mass, s.l2, s.h1p, s.m.mean_x, s.m.mean_p, s.m.var_x, s.m.var_p, s.m.spin(0), s.m.spin(1),
               s.m.spin(2)});
  return t;
}

json state_json(const ClassicalState& s) {
  return {{"x", {s.x(0), s.x(1), s.x(2)}}, {"p", {s.p(0), s.p(1), s.p(2)}}, {"d", {s.d(0), s.d(1), s.d(2)}}};
}

json report_json(const DescentReport& r) {
  return {{"iterations", static_cast<int>(r.history.size()) - 1},
          {"converged", r.converged},
          {"stagnated", r.stagnated},
          {"message", r.message},
          {"objective", r.history.back().objective},
          {"goal", r.history.back().goal},
          {"cost", r.history.back().cost},
          {"grad_inf", r.history.back().grad_inf}};
}

void write_state(ArtifactWriter& w, const std::string& stem, const WignerState& f) {
  std::ostringstream bin(std::ios::binary);
  write_binary(bin, f);
  w.binary(stem + ".bin", bin.str());
  std::ostringstream csv;
  write_csv(csv, f);
  w.text(stem + ".csv", csv.str(), "csv");
}

double spin_norm_drift(const ClassicalTrajectory& traj) {
  double d = 0.0;
  const double n0 = traj.states.front().d.norm();
  for (const auto& s : traj.states) d = std::max(d, std::abs(s.d.norm() - n0));
  return d;
}

int sample_every(const RunConfig& c, int steps) { return c.samples > 0 ? std::max(1, steps / c.samples) : steps; }

VecX control_bound(const ControlSignal& u, double margin) {
  VecX b(u.dim());
  for (int i = 0; i < u.dim(); ++i) b(i) = margin + 2.0 * u.values().col(i).cwiseAbs().maxCoeff();
  return b;
}

// ---------------------------------------------------------------------------

RunResult simulate_classical(const RunConfig& c, ArtifactWriter& w) {
  const int dim = c.fields.control_dim();
  const ControlSignal u = stage("cli_io", c, [&] { return c.control.sample(c.oc.horizon, c.oc.steps, dim); });
  const auto traj = stage("classical_ocp", c, [&] { return integrate_forward(c.fields, initial_classical(c), u, c.oc); });
  const double goal = goal_value(traj, c.oc), cost = cost_value(u, c.oc);
  w.csv("trajectory.csv", trajectory_table(traj));
  w.csv("control.csv", control_table(u));
  std::vector<std::pair<double, double>> xp;
  for (const auto& s : traj.states) xp.emplace_back(s.x(0), s.p(0));
  w.text("phase_path.dat", two_column(xp, "x p"), "dat");
  RunResult r;
  r.summary = {{"subcommand", "simulate-classical"}, {"goal", goal},  {"cost", cost},
               {"objective", goal + cost},           {"final", state_json(traj.final())},
               {"spin_norm_drift", spin_norm_drift(traj)}, {"steps", c.oc.steps}};
  return r;
}

RunResult optimize_classical(const RunConfig& c, ArtifactWriter& w) {
  const int dim = c.fields.control_dim();
  const ControlSignal u0 = stage("cli_io", c, [&] { return c.control.sample(c.oc.horizon, c.oc.steps, dim); });
  const auto opt =
      stage("classical_ocp", c, [&] { return optimize(c.fields, initial_classical(c), u0, c.oc, c.optimizer); });
  w.csv("history.csv", history_table(opt.report.history));
  w.csv("control.csv", control_table(opt.control));
  w.csv("trajectory.csv", trajectory_table(opt.trajectory));
  std::vector<std::pair<double, double>> tu;
  for (int k = 0; k <= opt.control.steps(); ++k) tu.emplace_back(opt.control.time(k), opt.control.values()(k, 0));
  if (dim > 0) w.text("control.dat", two_column(tu, "t u1"), "dat");
  RunResult r;
  r.summary = {{"subcommand", "optimize-classical"}, {"report", report_json(opt.report)},
               {"final", state_json(opt.trajectory.final())}, {"steps", c.oc.steps}};
  return r;
}

RunResult simulate_wigner(const RunConfig& c, ArtifactWriter& w) {
  const int dim = c.fields.control_dim();
  const ControlSignal probe = stage("cli_io", c, [&] { return c.control.sample(c.oc.horizon, c.oc.steps, dim); });
  const int steps = stage("wigner_dynamics", c, [&] { return c.wigner_steps(c.hbar, control_bound(probe, 0.0)); });
  const ControlSignal u = stage("cli_io", c, [&] { return c.control.sample(c.oc.horizon, steps, dim); });
  const WignerState f0 =
      stage("wigner_core", c, [&] { return coherent_wigner(c.grid, c.hbar, c.x_bar, c.p_bar, c.sigma, c.d_bar); });
  WignerGenerator gen = stage("wigner_dynamics", c, [&] { return WignerGenerator(c.fields, c.grid, c.hbar, c.oc.mass, c.mode); });
  EvolutionSpec spec;
  spec.mode = c.mode;
  spec.horizon = c.oc.horizon;
  spec.steps = steps;
  spec.sample_every = sample_every(c, steps);
  const auto traj = stage("wigner_dynamics", c, [&] { return integrate(f0, u, gen, spec); });

  OCConfig oc = c.oc;
  oc.steps = steps;
  const auto classical = integrate_forward(c.fields, initial_classical(c), u, oc);
  w.csv("diagnostics.csv", diagnostics_table(traj.diagnostics));
  w.csv("control.csv", control_table(u));
  if (c.snapshots)
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
      std::ostringstream name;
      name << "snapshot_" << std::setw(4) << std::setfill('0') << i;
      std::ostringstream bin(std::ios::binary);
      write_binary(bin, traj.samples[i]);
      w.binary(name.str() + ".bin", bin.str());
    }
  write_state(w, "final_state", traj.samples.back());
  std::vector<std::pair<double, double>> mx;
  for (const auto& d : traj.diagnostics) mx.emplace_back(d.time, d.m.mean_x);
  w.text("mean_x.dat", two_column(mx, "t <x>"), "dat");

  const auto& d0 = traj.diagnostics.front();
  double mass_drift = 0.0, l2_drift = 0.0;
  for (const auto& d : traj.diagnostics) {
    mass_drift = std::max(mass_drift, std::abs(d.mass - d0.mass) / d0.mass);
    l2_drift = std::max(l2_drift, std::abs(d.l2 - d0.l2) / d0.l2);
  }
  const Moments& m = traj.diagnostics.back().m;
  const ClassicalState& cf = classical.final();
  RunResult r;
  r.summary = {{"subcommand", "simulate-wigner"},
               {"hbar", c.hbar},
               {"mode", to_string(c.mode)},
               {"steps", steps},
               {"mass_drift", mass_drift},
               {"l2_drift", l2_drift},
               {"final_moments",
                {{"mean_x", m.mean_x}, {"mean_p", m.mean_p}, {"var_x", m.var_x}, {"var_p", m.var_p},
                 {"spin", {m.spin(0), m.spin(1), m.spin(2)}}}},
               {"classical_final", state_json(cf)},
               {"err_x", std::abs(m.mean_x - cf.x(0))},
               {"err_p", std::abs(m.mean_p - cf.p(0))},
               {"err_d", (m.spin - cf.d).norm()}};
  return r;
}

RunResult optimize_wigner(const RunConfig& c, ArtifactWriter& w) {
  const int dim = c.fields.control_dim();
  const OCConfig ref_cfg = classical_reference_config(c.oc);
  const ClassicalState init = initial_classical(c);
  const auto ref = stage("classical_ocp", c, [&] {
    return optimize(c.fields, init, ControlSignal(c.oc.horizon, c.oc.steps, dim), ref_cfg, c.optimizer);
  });
  const int steps = stage("wigner_dynamics", c, [&] { return c.wigner_steps(c.hbar, control_bound(ref.control, 1.0)); });
  OCConfig oc = c.oc;
  oc.steps = steps;
  OCConfig ref_fine = ref_cfg;
  ref_fine.steps = steps;
  const auto reference = stage("classical_ocp", c, [&] {
    return optimize(c.fields, init, ControlSignal(c.oc.horizon, steps, dim), ref_fine, c.optimizer);
  });

  QuantumProblem q;
  q.fields = &c.fields;
  q.cfg = oc;
  q.initial = stage("wigner_core", c, [&] { return coherent_wigner(c.grid, c.hbar, c.x_bar, c.p_bar, c.sigma, c.d_bar); });
  q.evolution.mode = c.mode;
  q.evolution.horizon = c.oc.horizon;
  q.evolution.steps = steps;
  const double suggested = auto_cutoff_radius(reference.trajectory, c.hbar, c.sigma, c.cutoff_spreads);
  const double radius = c.cutoff_radius > 0.0 ? c.cutoff_radius : suggested;
  stage("quantum_ocp", c, [&] { require_cutoff_covers(reference.trajectory, radius, suggested); });
  q.target = stage("quantum_ocp", c, [&] { return build_target(c.grid, c.hbar, oc, radius); });

  const bool given = !c.control.csv_path.empty() || c.control.offset.cwiseAbs().sum() > 0.0 ||
                     c.control.amplitude.cwiseAbs().sum() > 0.0;
  const ControlSignal u0 = given ? c.control.sample(c.oc.horizon, steps, dim) : reference.control;
  const auto opt = stage("quantum_ocp", c, [&] { return optimize_quantum(q, u0, c.optimizer); });

  WignerGenerator gen(c.fields, c.grid, c.hbar, oc.mass, c.mode);
  EvolutionSpec spec = q.evolution;
  spec.sample_every = sample_every(c, steps);
  const auto traj = stage("wigner_dynamics", c, [&] { return integrate(q.initial, opt.control, gen, spec); });
  w.csv("history.csv", history_table(opt.report.history));
  w.csv("control.csv", control_table(opt.control, &reference.control, "u_classical"));
  w.csv("diagnostics.csv", diagnostics_table(traj.diagnostics));
  write_state(w, "final_state", opt.final_state);
  std::vector<std::pair<double, double>> tu;
  for (int k = 0; k <= opt.control.steps(); ++k) tu.emplace_back(opt.control.time(k), opt.control.values()(k, 0));
  if (dim > 0) w.text("control.dat", two_column(tu, "t u1"), "dat");

  RunResult r;
  r.summary = {{"subcommand", "optimize-wigner"},
               {"hbar", c.hbar},
               {"mode", to_string(c.mode)},
               {"steps", steps},
               {"cutoff_radius", radius},
               {"initial_guess", given ? "control block" : "classical reference optimum"},
               {"report", report_json(opt.report)},
               {"u_dist_to_classical",
                l2_norm(ControlSignal(c.oc.horizon, opt.control.values() - reference.control.values()))},
               {"classical_reference", report_json(reference.report)}};
  return r;
}

template <class Get>
bool non_increasing_as_hbar_drops(const std::vector<SweepRow>& rows, Get get) {
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(get(rows[i]) < get(rows[i - 1]))) return false;
  return true;
}

RunResult limit_sweep(const RunConfig& c, ArtifactWriter& w) {
  SweepSetup s;
  s.grid = c.grid;
  s.mode = c.mode;
  s.x_bar = c.x_bar;
  s.p_bar = c.p_bar;
  s.sigma = c.sigma;
  s.d_bar = c.d_bar;
  s.cfl = c.cfl;
  s.steps = c.dt > 0.0 ? c.wigner_steps(c.hbar, VecX()) : 0;
  s.cutoff_spreads = c.cutoff_spreads;
  s.radius = c.cutoff_radius;
  s.classical_opts = c.optimizer;
  s.quantum_opts = c.optimizer;
  s.threads = c.sweep_threads;
  const SweepTable t = stage("quantum_ocp", c, [&] { return hbar_sweep(c.oc, c.fields, c.sweep_hbars, s); });

  auto table = [](const std::vector<SweepRow>& rows) {
    CsvTable out({"hbar", "J_star", "goal", "cost", "u_dist_to_classical", "err_x", "err_p", "err_d", "var_x_T",
                  "var_p_T"});
    for (const auto& r : rows)
      out.add_row({r.hbar, r.j_star, r.goal, r.cost, r.u_dist, r.err_x, r.err_p, r.err_d, r.var_x, r.var_p});
    return out;
  };
  w.csv("sweep.csv", table(t.optimized));
  w.csv("sweep_dynamics_only.csv", table(t.dynamics_only));
  w.csv("reference_control.csv", control_table(t.reference.control));
  w.csv("reference_trajectory.csv", trajectory_table(t.reference.trajectory));
  json members = json::array();
  for (const auto& r : t.optimized) {
    const std::string stem = "hbar_" + format_number(r.hbar);
    if (!r.failed) {
      w.csv(stem + "_history.csv", history_table(r.history));
      w.csv(stem + "_control.csv", control_table(r.control));
    }
    members.push_back({{"hbar", r.hbar}, {"iterations", r.iterations}, {"converged", r.converged},
                       {"failed", r.failed}, {"message", r.message}, {"cutoff_radius", r.radius}});
  }
  const auto& rows = t.optimized;
  json mono = {
      {"u_dist", non_increasing_as_hbar_drops(rows, [](const SweepRow& r) { return r.u_dist; })},
      {"err_x", non_increasing_as_hbar_drops(rows, [](const SweepRow& r) { return r.err_x; })},
      {"err_p", non_increasing_as_hbar_drops(rows, [](const SweepRow& r) { return r.err_p; })},
      {"err_d", non_increasing_as_hbar_drops(rows, [](const SweepRow& r) { return r.err_d; })},
      {"dynamics_only_err_x", non_increasing_as_hbar_drops(t.dynamics_only, [](const SweepRow& r) { return r.err_x; })},
      {"dynamics_only_err_p", non_increasing_as_hbar_drops(t.dynamics_only, [](const SweepRow& r) { return r.err_p; })},
      {"dynamics_only_err_d", non_increasing_as_hbar_drops(t.dynamics_only, [](const SweepRow& r) { return r.err_d; })}};
  RunResult r;
  r.status = t.partial ? exit_check_failed : exit_ok;
  r.summary = {{"subcommand", "limit-sweep"},
               {"partial", t.partial},
               {"steps", t.steps},
               {"mode", to_string(c.mode)},
               {"classical_reference", report_json(t.reference.report)},
               {"strictly_decreasing", mono},
               {"members", members}};
  if (rows.size() >= 2 && rows.back().u_dist > 0.0)
    r.summary["u_dist_ratio_first_over_last"] = rows.front().u_dist / rows.back().u_dist;
  return r;
}

RunResult validate(const RunConfig& c, ArtifactWriter& w) {
  const json report = stage("oracles", c, [&] { return validation_report(c); });
  bool all = true;
  for (const auto& item : report) all = all && item["pass"].get<bool>();
  RunResult r;
  r.status = all ? exit_ok : exit_check_failed;
  r.summary = {{"subcommand", "validate"}, {"all_pass", all}, {"checks", report}};
  w.json("validation.json", r.summary);
  return r;
}

json check(const std::string& name, double value, double tol, const std::string& detail) {
  return {{"name", name}, {"value", value}, {"tolerance", tol}, {"pass", std::isfinite(value) && value <= tol},
          {"detail", detail}};
}

PhaseGrid capped(const PhaseGrid& g, int n) {
  PhaseGrid out = g;
  out.nx = std::min(g.nx, n);
  out.np = std::min(g.np, n);
  return out;
}

WignerState random_state(const PhaseGrid& g, double hbar, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  WignerState w = WignerState::zeros(g, hbar);
  for (int c = 0; c < 4; ++c)
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.np; ++j) w[c](i, j) = n(rng);
  return w;
}

}  // namespace

json validation_report(const RunConfig& c) {
  json out = json::array();
  out.push_back(check("config", 0.0, 0.0, "all constraints satisfied"));
  std::mt19937_64 rng(c.seed);
  const int dim = c.fields.control_dim();

  // anti-symmetry of the full generator
  {
    const PhaseGrid g = capped(c.grid, 64);
    WignerGenerator gen(c.fields, g, c.hbar, c.oc.mass, EvolutionMode::full_quantum);
    std::uniform_real_distribution<double> uu(-1.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const WignerState a = random_state(g, c.hbar, rng), b = random_state(g, c.hbar, rng);
      VecX u(dim);
      for (int i = 0; i < dim; ++i) u(i) = uu(rng);
      worst = std::max(worst, std::abs(inner_product(gen.rhs(a, u), b) + inner_product(a, gen.rhs(b, u))) /
                                  (l2_norm(a) * l2_norm(b)));
    }
    out.push_back(check("antisymmetry", worst, 1e-9, "20 random pairs, full-quantum generator"));
  }

  // conservation along the configured evolution
  {
    const ControlSignal probe = c.control.sample(c.oc.horizon, c.oc.steps, dim);
    const int steps = c.wigner_steps(c.hbar, control_bound(probe, 0.0));
    WignerGenerator gen(c.fields, c.grid, c.hbar, c.oc.mass, c.mode);
    EvolutionSpec spec;
    spec.mode = c.mode;
    spec.horizon = c.oc.horizon;
    spec.steps = steps;
    spec.sample_every = std::max(1, steps / 10);
    const auto traj = integrate(coherent_wigner(c.grid, c.hbar, c.x_bar, c.p_bar, c.sigma, c.d_bar),
                                c.control.sample(c.oc.horizon, steps, dim), gen, spec);
    double dm = 0.0, dl = 0.0;
    const auto& d0 = traj.diagnostics.front();
    for (const auto& d : traj.diagnostics) {
      dm = std::max(dm, std::abs(d.mass - d0.mass) / d0.mass);
      dl = std::max(dl, std::abs(d.l2 - d0.l2) / d0.l2);
    }
    out.push_back(check("mass_drift", dm, 1e-8, std::to_string(steps) + " RK4 steps"));
    out.push_back(check("l2_drift", dl, 1e-6, std::to_string(steps) + " RK4 steps"));
  }

#if SPINOC_WITH_ORACLES
  // spectral Theta against direct quadrature
  {
    const PhaseGrid g = capped(c.grid, 16);
    const Grid2 f = random_state(g, c.hbar, rng)[0];
    const ScalarField& base = c.fields.potential_field().base();
    const AxisSymbol v = [&base](double x) { return base.on_axis(x); };
    const double e = std::max((theta_minus(v, f, c.hbar, g) - oracles::direct_theta(v, f, -1, c.hbar, g)).abs().maxCoeff(),
                              (theta_plus(v, f, c.hbar, g) - oracles::direct_theta(v, f, +1, c.hbar, g)).abs().maxCoeff());
    out.push_back(check("theta_vs_quadrature", e, 1e-10, "16x16, base potential, absolute"));
  }
  // Moyal triple route for the Rashba symbols
  {
    const PhaseGrid g = capped(c.grid, 16);
    const Grid2 f = random_state(g, c.hbar, rng)[0];
    WignerGenerator gen(c.fields, g, c.hbar, c.oc.mass, EvolutionMode::full_quantum);
    double e = 0.0;
    for (int k = 1; k < 3; ++k) {
      const AxisSymbol R = [&c, k](double x) {
        const Vec3 K = c.fields.rashba(Vec3(x, 0, 0));
        return k == 1 ? -K(2) : K(1);
      };
      const auto cp = oracles::commutator_pk(f, R, c.hbar, g);
      const auto ac = oracles::anticommutator_pk(f, R, c.hbar, g);
      e = std::max({e, (gen.a_plus(f, k) - cp.symmetric).abs().maxCoeff(),
                    (gen.a_plus(f, k) - cp.moyal_composed).abs().maxCoeff(),
                    (cp.literal - cp.moyal_whole).abs().maxCoeff(), (gen.a_minus(f, k) - ac.symmetric).abs().maxCoeff(),
                    (gen.a_minus(f, k) - ac.moyal_composed).abs().maxCoeff(),
                    (ac.literal - ac.moyal_whole).abs().maxCoeff()});
    }
    out.push_back(check("moyal_triple_route", e, 1e-10, "16x16, Rashba components, absolute"));
  }
  // classical adjoint gradient
  {
    ControlSignal u = c.control.sample(c.oc.horizon, c.oc.steps, dim);
    for (int k = 0; k <= u.steps(); ++k)
      for (int i = 0; i < dim; ++i) u.values()(k, i) += 0.3 * std::sin(5.0 * u.time(k) + i);
    const ClassicalState init = initial_classical(c);
    const auto traj = integrate_forward(c.fields, init, u, c.oc);
    const auto adj = integrate_adjoint(c.fields, traj, u, c.oc);
    const ControlSignal g = projected_gradient(c.fields, u, traj, adj, c.oc);
    auto J = [&](const ControlSignal& v) { return objective(c.fields, init, v, c.oc).total; };
    double err = 0.0, scale = 0.0;
    const int n = u.steps();
    for (int i = 0; i < dim; ++i)
      for (int k : {1, n / 4, n / 2, 3 * n / 4, n - 1}) {
        const double fd = oracles::fd_gradient(J, u, k, i);
        err = std::max(err, std::abs(g.values()(k, i) - fd));
        scale = std::max(scale, std::abs(fd));
      }
    out.push_back(check("classical_gradient_fd", scale > 0 ? err / scale : err, 1e-5, "relative, interior nodes"));
  }
  // quantum adjoint gradient on a coarse copy of the grid
  if (dim > 0) {
    const PhaseGrid g = capped(c.grid, 64);
    QuantumProblem q;
    q.fields = &c.fields;
    q.initial = coherent_wigner(g, c.hbar, c.x_bar, c.p_bar, c.sigma, c.d_bar);
    q.evolution.mode = c.mode;
    q.evolution.horizon = c.oc.horizon;
    WignerGenerator gen(c.fields, g, c.hbar, c.oc.mass, c.mode);
    q.evolution.steps =
        std::max(c.oc.steps, static_cast<int>(std::ceil(c.oc.horizon / gen.stable_step(VecX::Constant(dim, 1.0), c.cfl))));
    q.cfg = c.oc;
    q.cfg.steps = q.evolution.steps;
    ControlSignal u(c.oc.horizon, q.evolution.steps, dim);
    for (int k = 0; k <= u.steps(); ++k)
      for (int i = 0; i < dim; ++i) u.values()(k, i) = 0.3 * std::sin(5.0 * u.time(k) + i);
    const auto traj = integrate_forward(c.fields, initial_classical(c), u, q.cfg);
    const double radius =
        c.cutoff_radius > 0.0 ? c.cutoff_radius : auto_cutoff_radius(traj, c.hbar, c.sigma, c.cutoff_spreads);
    q.target = build_target(g, c.hbar, q.cfg, radius);
    const auto nodes = integrate(q.initial, u, gen, q.evolution, true, false).nodes;
    // the adjoint differentiates <f(T), chi_R f_T>; mass beyond R separates it from the goal
    const Grid2& fT = nodes.back()[0];
    const double leak = (fT.abs() * (1.0 - q.target.chi)).sum() / fT.abs().sum();
    const ControlSignal grad = quantum_gradient(gen, u, nodes, q.target, q.cfg);
    auto J = [&](const ControlSignal& v) { return quantum_objective(q, v).total; };
    double err = 0.0, scale = 0.0;
    const int n = u.steps();
    for (int k : {n / 4, n / 2, 3 * n / 4}) {
      const double fd = oracles::fd_gradient(J, u, k, 0);
      err = std::max(err, std::abs(grad.values()(k, 0) - fd));
      scale = std::max(scale, std::abs(fd));
    }
    out.push_back(check("quantum_gradient_fd", scale > 0 ? err / scale : err, 1e-4,
                        std::to_string(g.nx) + "x" + std::to_string(g.np) + ", relative, interior nodes, R = " +
                            format_number(radius) + ", mass fraction beyond R at T = " + format_number(leak)));
  }
#else
  out.push_back({{"name", "oracles"}, {"value", 0.0}, {"tolerance", 0.0}, {"pass", true},
                 {"detail", "skipped: built without SPINOC_WITH_ORACLES"}});
#endif
  return out;
}

RunResult run(const std::string& subcommand, const RunConfig& cfg) {
  ArtifactWriter w = stage("cli_io", cfg, [&] { return ArtifactWriter(cfg.output_dir, cfg.fingerprint); });
  w.text("config.json", cfg.document.dump(2) + "\n", "json");
  RunResult r;
  if (subcommand == "simulate-classical")
    r = simulate_classical(cfg, w);
  else if (subcommand == "optimize-classical")
    r = optimize_classical(cfg, w);
  else if (subcommand == "simulate-wigner")
    r = simulate_wigner(cfg, w);
  else if (subcommand == "optimize-wigner")
    r = optimize_wigner(cfg, w);
  else if (subcommand == "limit-sweep")
    r = limit_sweep(cfg, w);
  else if (subcommand == "validate")
    r = validate(cfg, w);
  else
    throw RunError("cli_io", "unknown subcommand '" + subcommand + "'", cfg.fingerprint);
  if (subcommand != "validate") w.json("summary.json", r.summary);
  r.summary["config_fingerprint"] = hex64(cfg.fingerprint);
  r.manifest = w.finish({{"subcommand", subcommand}});
  return r;
}

}  // namespace spinoc
