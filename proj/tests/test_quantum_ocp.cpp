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
#include "doctest.h"
#include "spinoc/oracles.hpp"
#include "spinoc/quantum_ocp.hpp"

#include <cmath>

using namespace spinoc;

namespace {

FieldSet bench_fields(bool varying_rashba) {
  ScalarField base{HarmonicProfile{1.0, Vec3::Zero()}, CosineProfile{0.2, Vec3(1.5, 0, 0), 0.0}};
  std::vector<ScalarField> shapes{ScalarField{LinearProfile{Vec3(-1, 0, 0), 0.0}}};
  VectorField K = varying_rashba
                      ? VectorField({{Vec3(0, 0.2, 0.5), CosineProfile{1.0, Vec3(0.8, 0, 0), 0.4}}})
                      : VectorField::uniform(Vec3(0, 0, 0.5));
  return FieldSet(ControlledPotential(base, shapes), VectorField::uniform(Vec3(0, 0, 0.8)), K);
}

OCConfig bench_config(double horizon, int steps) {
  OCConfig c;
  c.nu_x = 2.0;
  c.nu_p = 0.5;
  c.nu_d = 0.5;
  c.x_target = Vec3(0.5, 0, 0);
  c.d_target = Vec3(0, 1, 0);
  c.gamma = 0.1;
  c.gamma_prime = 0.01;
  c.horizon = horizon;
  c.steps = steps;
  return c;
}

QuantumProblem bench_problem(const FieldSet& fields, const PhaseGrid& g, double hbar, double horizon,
                             EvolutionMode mode, double radius = 0.0) {
  QuantumProblem q;
  q.fields = &fields;
  q.initial = coherent_wigner(g, hbar, -0.5, 0.25, 1.0, Vec3(1, 0, 0));
  q.evolution.mode = mode;
  q.evolution.horizon = horizon;
  WignerGenerator gen(fields, g, hbar, 1.0, mode);
  const int steps = static_cast<int>(std::ceil(horizon / gen.stable_step(VecX::Constant(1, 1.0))));
  q.cfg = bench_config(horizon, steps);
  q.evolution.steps = steps;
  if (radius <= 0.0) {
    const ClassicalState init{Vec3(-0.5, 0, 0), Vec3(0.25, 0, 0), Vec3(1, 0, 0)};
    const auto traj = integrate_forward(fields, init, ControlSignal(horizon, steps, 1), q.cfg);
    radius = auto_cutoff_radius(traj, hbar, 1.0);
  }
  q.target = build_target(g, hbar, q.cfg, radius);
  return q;
}

ControlSignal wavy(double horizon, int steps) {
  ControlSignal u(horizon, steps, 1);
  for (int k = 0; k <= steps; ++k) u.values()(k, 0) = 0.2 + 0.4 * std::sin(6.0 * u.time(k));
  return u;
}

}  // namespace

TEST_CASE("cut-off profile") {
  CHECK(cutoff_profile(0.0, 2.0) == 1.0);
  CHECK(cutoff_profile(2.0, 2.0) == 1.0);
  CHECK(cutoff_profile(4.0, 2.0) == 0.0);
  CHECK(cutoff_profile(3.0, 2.0) == doctest::Approx(0.5).epsilon(1e-14));
  double last = 1.0;
  for (double r = 2.0; r <= 4.0; r += 0.01) {
    const double c = cutoff_profile(r, 2.0);
    CHECK(c <= last + 1e-15);
    last = c;
  }
  // flat at both ends: every difference quotient vanishes faster than any power
  CHECK(1.0 - cutoff_profile(2.0 + 1e-2, 2.0) < 1e-20);
  CHECK(cutoff_profile(4.0 - 1e-2, 2.0) < 1e-20);
  CHECK_THROWS_AS(cutoff_profile(1.0, 0.0), ConfigError);
}

TEST_CASE("target symbol") {
  const PhaseGrid g = PhaseGrid::centered(32, 32, 4, 4);
  OCConfig c;
  c.nu_x = c.nu_p = c.nu_d = 0.0;
  const TargetSymbol zero = build_target(g, 0.2, c, 2.0);
  for (int k = 0; k < 4; ++k) CHECK(zero.raw[k].abs().maxCoeff() == 0.0);

  c.nu_x = 3.0;
  c.nu_p = 1.0;
  c.x_target = Vec3(g.x(20), 0, 0);
  const TargetSymbol t = build_target(g, 0.2, c, 2.0);
  CHECK(t.raw[0](20, 16) == 0.0);  // p(16) = 0
  CHECK(t.cut[0](20, 16) == 0.0);
  CHECK(t.chi(16, 16) == 1.0);
  CHECK(t.chi(0, 0) == 0.0);
  CHECK_THROWS_AS(build_target(g, 0.2, c, -1.0), ConfigError);
}

TEST_CASE("quantum goal equals the moment formula") {
  const PhaseGrid g = PhaseGrid::centered(64, 64, 5, 5);
  OCConfig c = bench_config(1.0, 10);
  c.x_target = Vec3(0.3, 0.2, 0);
  c.penalize_momentum_target = true;
  c.p_target = Vec3(-0.2, 0, 0.1);
  const Vec3 d(0.6, 0.0, 0.8);
  const WignerState f = coherent_wigner(g, 0.3, 0.4, -0.3, 1.2, d);
  const TargetSymbol t = build_target(g, 0.3, c, 10.0);
  const Moments m = moments(f);
  const double expect =
      0.5 * m.mass *
      (0.5 * c.nu_x * (std::pow(m.mean_x - 0.3, 2) + 0.04 + m.var_x) +
       0.5 * c.nu_p * (std::pow(m.mean_p + 0.2, 2) + 0.01 + m.var_p) - c.nu_d * m.spin.dot(c.d_target));
  CHECK(quantum_goal(f, t) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("cut-off must cover the classical tube") {
  ClassicalTrajectory traj;
  traj.states = {ClassicalState{Vec3(1, 0, 0), Vec3(0, 0, 0), Vec3::UnitZ()},
                 ClassicalState{Vec3(0, 0, 0), Vec3(-2, 0, 0), Vec3::UnitZ()}};
  CHECK(tube_radius(traj) == 2.0);
  CHECK(auto_cutoff_radius(traj, 0.5, 1.0, 4.0) == doctest::Approx(4.0));
  CHECK_THROWS_AS(require_cutoff_covers(traj, 1.5, 3.0), ConfigError);
  CHECK_NOTHROW(require_cutoff_covers(traj, 2.5, 3.0));
  const FieldSet f = bench_fields(false);
  const PhaseGrid g = PhaseGrid::centered(32, 32, 3, 3);
  CHECK(energy_momentum_bound(f, g, 1.0, 1.0) > 1.0);
}

TEST_CASE("adjoint Wigner evolution") {
  const PhaseGrid g = PhaseGrid::centered(64, 64, 4, 4);
  const FieldSet fields = bench_fields(true);
  QuantumProblem q = bench_problem(fields, g, 0.2, 0.5, EvolutionMode::full_quantum);
  const ControlSignal u = wavy(0.5, q.evolution.steps);
  WignerGenerator gen(fields, g, 0.2, 1.0);

  SUBCASE("zero target gives a zero adjoint") {
    OCConfig c = q.cfg;
    c.nu_x = c.nu_p = c.nu_d = 0.0;
    const auto h = integrate_adjoint_wigner(build_target(g, 0.2, c, 3.0), u, gen);
    for (const auto& s : h)
      for (int k = 0; k < 4; ++k) CHECK(s[k].abs().maxCoeff() == 0.0);
  }
  SUBCASE("norm conservation and forward duality") {
    const auto h = integrate_adjoint_wigner(q.target, u, gen);
    const auto f = integrate(q.initial, u, gen, q.evolution, true, false).nodes;
    const double n0 = l2_norm(q.target.cut);
    const double pair = inner_product(f.back(), h.back());
    double drift = 0.0, pair_drift = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) {
      drift = std::max(drift, std::abs(l2_norm(h[k]) - n0) / n0);
      pair_drift = std::max(pair_drift, std::abs(inner_product(f[k], h[k]) - pair));
    }
    MESSAGE("adjoint norm drift " << drift << ", duality drift " << pair_drift);
    CHECK(drift < 1e-6);
    CHECK(pair_drift < 1e-6 * l2_norm(f.front()) * n0);
  }
}

TEST_CASE("control gradient integral") {
  const PhaseGrid g = PhaseGrid::centered(32, 32, 4, 4);
  const FieldSet with_shape = bench_fields(false);
  const FieldSet flat(ControlledPotential(ScalarField{HarmonicProfile{}},
                                          {ScalarField{ConstantProfile{2.0}}}),
                      {}, {});
  const WignerState f = coherent_wigner(g, 0.3, 0.2, 0.1, 1.0, Vec3::UnitZ());
  WignerState h = f;
  h[0] = h[0] * (g.xs().array() + 0.5).replicate(1, g.np);
  WignerGenerator gf(flat, g, 0.3, 1.0);
  CHECK(control_gradient_integral(h, f, gf, 0) == 0.0);
  WignerGenerator gs(with_shape, g, 0.3, 1.0);
  // phi = -x: Theta- gives -d/dp, so <h, Theta- f> = -int h0 df0/dp (+ spin parts)
  Spectral s(g);
  double expect = 0.0;
  for (int c = 0; c < 4; ++c) expect -= (h[c] * s.dp(f[c])).sum() * g.cell();
  CHECK(control_gradient_integral(h, f, gs, 0) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("quantum adjoint gradient matches finite differences") {
  const PhaseGrid g = PhaseGrid::centered(64, 64, 4, 4);
  const FieldSet fields = bench_fields(true);
  const QuantumProblem q = bench_problem(fields, g, 0.2, 0.5, EvolutionMode::full_quantum);
  const ControlSignal u = wavy(0.5, q.evolution.steps);
  WignerGenerator gen(fields, g, 0.2, 1.0);
  const auto nodes = integrate(q.initial, u, gen, q.evolution, true, false).nodes;
  const ControlSignal grad = quantum_gradient(gen, u, nodes, q.target, q.cfg);
  auto J = [&](const ControlSignal& v) { return quantum_objective(q, v).total; };
  const int n = u.steps();
  double err = 0.0, scale = 0.0;
  for (int k : {1, n / 4, n / 2, 3 * n / 4, n - 1}) {
    const double fd = oracles::fd_gradient(J, u, k, 0);
    err = std::max(err, std::abs(grad.values()(k, 0) - fd));
    scale = std::max(scale, std::abs(fd));
  }
  MESSAGE("quantum gradient relative error " << err / scale << " over " << n << " steps");
  CHECK(err / scale < 1e-4);
}

TEST_CASE("quantum forcing approaches the classical forcing") {
  const FieldSet fields = bench_fields(false);
  const PhaseGrid g = PhaseGrid::centered(128, 128, 3.5, 3.5);
  const double T = 0.5;
  std::vector<double> err;
  for (double hbar : {0.2, 0.1, 0.05}) {
    QuantumProblem q = bench_problem(fields, g, hbar, T, EvolutionMode::uniform_field);
    const ControlSignal u = wavy(T, q.evolution.steps);
    WignerGenerator gen(fields, g, hbar, 1.0, EvolutionMode::uniform_field);
    const auto f = integrate(q.initial, u, gen, q.evolution, true, false).nodes;
    const auto h = integrate_adjoint_wigner(q.target, u, gen);
    const MatX qf = quantum_forcing(gen, f, h, u);

    const OCConfig half = classical_reference_config(q.cfg);
    const ClassicalState init{Vec3(-0.5, 0, 0), Vec3(0.25, 0, 0), Vec3(1, 0, 0)};
    const auto traj = integrate_forward(fields, init, u, half);
    const auto adj = integrate_adjoint(fields, traj, u, half);
    const MatX cf = control_forcing(fields, traj, adj, u);
    err.push_back((qf - cf).cwiseAbs().maxCoeff() / cf.cwiseAbs().maxCoeff());
  }
  MESSAGE("forcing gap " << err[0] << " " << err[1] << " " << err[2]);
  CHECK(err[1] < err[0]);
  CHECK(err[2] < err[1]);
}

TEST_CASE("quantum optimizer") {
  const PhaseGrid g = PhaseGrid::centered(64, 64, 4, 4);
  const FieldSet fields = bench_fields(false);
  QuantumProblem q = bench_problem(fields, g, 0.2, 0.5, EvolutionMode::uniform_field);
  DescentOptions opts;
  opts.rule = StepRule::lbfgs;
  opts.max_iters = 15;
  opts.tol = 1e-7;

  SUBCASE("pure cost drives the control to zero") {
    q.cfg.nu_x = q.cfg.nu_p = q.cfg.nu_d = 0.0;
    q.target = build_target(g, 0.2, q.cfg, q.target.radius);
    const auto opt = optimize_quantum(q, wavy(0.5, q.evolution.steps), opts);
    CHECK(max_abs(opt.control) < 1e-6);
  }
  SUBCASE("translation improves the goal monotonically") {
    const ControlSignal u0(0.5, q.evolution.steps, 1);
    const double goal0 = quantum_objective(q, u0).goal;
    const auto opt = optimize_quantum(q, u0, opts);
    const auto& hist = opt.report.history;
    for (std::size_t i = 1; i < hist.size(); ++i) CHECK(hist[i].objective <= hist[i - 1].objective);
    MESSAGE("goal " << goal0 << " -> " << hist.back().goal << " in " << hist.size() - 1 << " iterations");
    CHECK(hist.back().goal < goal0);
  }
}

TEST_CASE("adjoint approaches the transported classical target") {
  // no spin coupling: h0 is f_T carried back along the controlled characteristics
  ScalarField base{HarmonicProfile{1.0, Vec3::Zero()}, CosineProfile{0.2, Vec3(1.5, 0, 0), 0.0}};
  const FieldSet fields(ControlledPotential(base, {ScalarField{LinearProfile{Vec3(-1, 0, 0), 0.0}}}), {}, {});
  const PhaseGrid g = PhaseGrid::centered(128, 128, 3.5, 3.5);
  const double T = 0.5;
  OCConfig c = bench_config(T, 10);
  c.nu_d = 0.0;
  std::vector<double> err;
  for (double hbar : {0.2, 0.1, 0.05}) {
    WignerGenerator gen(fields, g, hbar, 1.0, EvolutionMode::uniform_field);
    c.steps = static_cast<int>(std::ceil(T / gen.stable_step(VecX::Constant(1, 1.0))));
    const ControlSignal u = wavy(T, c.steps);
    const TargetSymbol t = build_target(g, hbar, c, 1.6);  // support inside the box keeps chi f_T periodic
    const WignerState h0 = integrate_adjoint_wigner(t, u, gen).front();
    double e = 0.0;
    for (int i = 0; i < g.nx; i += 4)
      for (int j = 0; j < g.np; j += 4) {
        if (std::hypot(g.x(i), g.p(j)) > 1.0) continue;
        const ClassicalState s{Vec3(g.x(i), 0, 0), Vec3(g.p(j), 0, 0), Vec3::UnitZ()};
        const ClassicalState fin = integrate_forward(fields, s, u, c).final();
        const double expect = 0.5 * c.nu_x * std::pow(fin.x(0) - 0.5, 2) + 0.5 * c.nu_p * fin.p(0) * fin.p(0);
        e = std::max(e, std::abs(h0[0](i, j) - expect));
      }
    err.push_back(e);
  }
  MESSAGE("tube sup-norm gap " << err[0] << " " << err[1] << " " << err[2]);
  CHECK(err[1] < err[0]);
  CHECK(err[2] < err[1]);
}
