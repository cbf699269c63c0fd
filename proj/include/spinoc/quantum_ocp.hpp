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

#include "spinoc/classical_ocp.hpp"
#include "spinoc/descent.hpp"
#include "spinoc/wigner_dynamics.hpp"

#include <string>
#include <vector>

namespace spinoc {

/// Goal symbol of the quantum problem.
///   f_T = ( (nu_x/2)|x - x_T|^2 + (nu_p/2) p^2 ,  -nu_d d_T )
/// `raw` is f_T itself (used by the objective), `cut` = chi_R f_T is the final
/// datum of the adjoint.
struct TargetSymbol {
  WignerState raw;
  WignerState cut;
  Grid2 chi;
  double radius = 0.0;
};

/// C-infinity radial cut-off: 1 for r <= R, 0 for r >= 2R, smooth step between.
double cutoff_profile(double r, double radius);

TargetSymbol build_target(const PhaseGrid& grid, double hbar, const OCConfig& cfg, double radius);

/// Largest |(x, p)| along the reduced classical trajectory.
double tube_radius(const ClassicalTrajectory& traj);

/// Cut-off radius covering the classical tube plus `spreads` standard
/// deviations of a coherent packet of width sigma at this hbar.
double auto_cutoff_radius(const ClassicalTrajectory& traj, double hbar, double sigma, double spreads = 8.0);

/// Energy bound on the momentum range, sqrt(pbar^2 + 4 m sup|U|), with the
/// supremum of the uncontrolled potential taken over the grid's x range.
double energy_momentum_bound(const FieldSet& fields, const PhaseGrid& grid, double p_bar, double mass);

/// Throws ConfigError (with a suggested radius) when the tube leaves radius R.
void require_cutoff_covers(const ClassicalTrajectory& traj, double radius, double suggested);

/// Phi(f) = <f(T), f_T> without cut-off.
double quantum_goal(const WignerState& final_state, const TargetSymbol& target);

/// Backward RK4 from h(T) = chi_R f_T with the forward generator. Returns the
/// adjoint at every time node, ordered by increasing time.
std::vector<WignerState> integrate_adjoint_wigner(const TargetSymbol& target, const ControlSignal& u,
                                                  WignerGenerator& gen);

/// <h, Theta-_{phi_i}[f]>, the derivative of the goal with respect to u_i at
/// one instant. Equals -1/2 tr int Theta-_{phi_i}[h] f.
double control_gradient_integral(const WignerState& h, const WignerState& f, WignerGenerator& gen, int i);

/// Gradient of J = Phi + k in the trapezoidal metric from the forward nodes.
/// The adjoint is integrated inside the call; the forcing is projected on the
/// hat functions of the control grid (Simpson per interval with Hermite
/// midpoints of state and adjoint).
ControlSignal quantum_gradient(WignerGenerator& gen, const ControlSignal& u, const std::vector<WignerState>& nodes,
                               const TargetSymbol& target, const OCConfig& cfg);

/// Pointwise forcing <h(t_k), Theta-_{phi_i} f(t_k)> at every node, (N+1) x d.
MatX quantum_forcing(WignerGenerator& gen, const std::vector<WignerState>& nodes,
                     const std::vector<WignerState>& adjoint, const ControlSignal& u);

struct QuantumProblem {
  const FieldSet* fields = nullptr;
  OCConfig cfg;
  WignerState initial;
  EvolutionSpec evolution;
  TargetSymbol target;
};

ObjectiveParts quantum_objective(const QuantumProblem& problem, const ControlSignal& u);

struct QuantumOptimum {
  ControlSignal control;
  WignerState final_state;
  DescentReport report;
};

QuantumOptimum optimize_quantum(const QuantumProblem& problem, const ControlSignal& u0,
                                const DescentOptions& opts = {});

/// Initial data shared by every member of an hbar sweep.
struct SweepSetup {
  PhaseGrid grid;
  EvolutionMode mode = EvolutionMode::full_quantum;
  double x_bar = 0.0, p_bar = 0.0, sigma = 1.0;
  Vec3 d_bar = Vec3::UnitZ();
  /// Time steps for every run; 0 picks the CFL bound of the smallest step.
  int steps = 0;
  double cfl = 0.5;
  double cutoff_spreads = 8.0;
  /// Fixed cut-off radius; 0 uses auto_cutoff_radius per hbar.
  double radius = 0.0;
  DescentOptions classical_opts, quantum_opts;
  /// Run the optimizer (otherwise only the dynamics-only rows are produced).
  bool optimize = true;
  int threads = 1;
};

struct SweepRow {
  double hbar = 0.0;
  double j_star = 0.0, goal = 0.0, cost = 0.0;
  double u_dist = 0.0;
  double err_x = 0.0, err_p = 0.0, err_d = 0.0;
  double var_x = 0.0, var_p = 0.0;
  double radius = 0.0;
  int iterations = 0;
  bool converged = false;
  bool failed = false;
  std::string message;
  ControlSignal control;
  std::vector<IterationRecord> history;
};

struct SweepTable {
  /// Classical reference solved with the goal weights halved (the quantum
  /// goal of a normalized state is half of the classical one, see README).
  OCConfig reference_cfg;
  ClassicalOptimum reference;
  std::vector<SweepRow> optimized;     ///< sorted by decreasing hbar
  std::vector<SweepRow> dynamics_only; ///< u = u0 injected, no optimization
  bool partial = false;
  int steps = 0;
};

/// Classical reference configuration: same problem with nu_x, nu_p, nu_d halved.
OCConfig classical_reference_config(const OCConfig& cfg);

SweepTable hbar_sweep(const OCConfig& cfg, const FieldSet& fields, std::vector<double> hbars,
                      const SweepSetup& setup);

}  // namespace spinoc
