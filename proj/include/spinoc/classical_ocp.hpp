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

#include "spinoc/control.hpp"
#include "spinoc/descent.hpp"
#include "spinoc/fields.hpp"

#include <vector>

namespace spinoc {

/// Position, momentum and spin expectation of a single spin carrier.
struct ClassicalState {
  Vec3 x = Vec3::Zero();
  Vec3 p = Vec3::Zero();
  Vec3 d = Vec3::UnitZ();
};

/// Adjoint variables; etah = p_d^h ^ d carries the spin multiplier.
struct AdjointState {
  Vec3 xh = Vec3::Zero();
  Vec3 ph = Vec3::Zero();
  Vec3 etah = Vec3::Zero();
};

struct ClassicalTrajectory {
  double dt = 0.0;
  std::vector<ClassicalState> states;
  const ClassicalState& final() const { return states.back(); }
};

struct AdjointTrajectory {
  double dt = 0.0;
  std::vector<AdjointState> states;
};

/// Right-hand side of the characteristic system at time t with control u.
ClassicalState characteristic_rhs(const FieldSet& fields, const ClassicalState& s, const VecX& u,
                                  double mass);

/// RK4 on the control grid; u is linearly interpolated at substages.
ClassicalTrajectory integrate_forward(const FieldSet& fields, const ClassicalState& init,
                                      const ControlSignal& u, const OCConfig& cfg);

/// Backward RK4 for the adjoint system from the final data of `traj`.
/// Trajectory values at half steps come from cubic Hermite interpolation.
AdjointTrajectory integrate_adjoint(const FieldSet& fields, const ClassicalTrajectory& traj,
                                    const ControlSignal& u, const OCConfig& cfg);

/// Final data of the adjoint system.
AdjointState adjoint_final(const ClassicalState& final, const OCConfig& cfg);

/// (nu_x/2)|x(T)-x_T|^2 + (nu_p/2)|p(T)|^2 - nu_d d(T).d_T
double goal_value(const ClassicalState& final, const OCConfig& cfg);
inline double goal_value(const ClassicalTrajectory& traj, const OCConfig& cfg) {
  return goal_value(traj.final(), cfg);
}

/// -xh . dE/du_i at every node, (N+1) x d.
MatX control_forcing(const FieldSet& fields, const ClassicalTrajectory& traj,
                     const AdjointTrajectory& adj, const ControlSignal& u);

/// g = gamma u - gamma' u'' - xh . dE/du at the nodes.
ControlSignal control_gradient(const FieldSet& fields, const ControlSignal& u,
                               const ClassicalTrajectory& traj, const AdjointTrajectory& adj,
                               const OCConfig& cfg);

/// Gradient of the discrete objective in the trapezoidal metric. The forcing
/// term is projected onto the hat functions of the control grid (Simpson per
/// interval, midpoint values by Hermite interpolation of state and adjoint),
/// so it agrees with finite differences of J to the integrator's order.
ControlSignal projected_gradient(const FieldSet& fields, const ControlSignal& u,
                                 const ClassicalTrajectory& traj, const AdjointTrajectory& adj,
                                 const OCConfig& cfg);

struct ClassicalObjective {
  double total = 0.0;
  double goal = 0.0;
  double cost = 0.0;
};

ClassicalObjective objective(const FieldSet& fields, const ClassicalState& init,
                             const ControlSignal& u, const OCConfig& cfg);

struct ClassicalOptimum {
  ControlSignal control;
  ClassicalTrajectory trajectory;
  DescentReport report;
};

ClassicalOptimum optimize(const FieldSet& fields, const ClassicalState& init,
                          const ControlSignal& u0, const OCConfig& cfg,
                          const DescentOptions& opts = {});

}  // namespace spinoc
