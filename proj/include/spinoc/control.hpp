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

#include "spinoc/common.hpp"

#include <string>
#include <vector>

namespace spinoc {

/// Control values u(t_k) on the uniform grid t_k = k T / N, k = 0..N.
/// Stored (N+1) x d; the same grid carries trajectories and adjoints.
class ControlSignal {
 public:
  ControlSignal() = default;
  ControlSignal(double horizon, int steps, int dim)
      : horizon_(horizon), values_(MatX::Zero(steps + 1, dim)) {}
  ControlSignal(double horizon, MatX values) : horizon_(horizon), values_(std::move(values)) {}

  int steps() const { return static_cast<int>(values_.rows()) - 1; }
  int dim() const { return static_cast<int>(values_.cols()); }
  double horizon() const { return horizon_; }
  double dt() const { return horizon_ / steps(); }
  double time(int k) const { return k * dt(); }

  VecX at(int k) const { return values_.row(k).transpose(); }
  /// Linear interpolation between nodes (used at Runge-Kutta substages).
  VecX at_time(double t) const;
  /// u at the midpoint of step k -> k+1.
  VecX midpoint(int k) const { return 0.5 * (values_.row(k) + values_.row(k + 1)).transpose(); }

  const MatX& values() const { return values_; }
  MatX& values() { return values_; }

  /// Trapezoidal quadrature weights of the time grid.
  VecX weights() const;

 private:
  double horizon_ = 1.0;
  MatX values_;
};

/// Weighted (trapezoidal) inner product of two signals on the same grid.
double inner(const ControlSignal& a, const ControlSignal& b);
/// sqrt(int_0^T |a|^2 dt)
double l2_norm(const ControlSignal& a);
double max_abs(const ControlSignal& a);

/// Discrete second derivative with natural (zero-slope) closure: the
/// endpoints use the mirrored ghost node u_{-1} = u_1, u_{N+1} = u_{N-1}.
MatX second_derivative(const ControlSignal& u);

/// Cost and goal weights, targets, horizon and mass.
struct OCConfig {
  double nu_x = 1.0;
  double nu_p = 0.0;
  double nu_d = 0.0;
  double gamma = 1.0;
  double gamma_prime = 0.0;
  Vec3 x_target = Vec3::Zero();
  Vec3 p_target = Vec3::Zero();
  Vec3 d_target = Vec3::UnitZ();
  double horizon = 1.0;
  double mass = 1.0;
  int steps = 200;
  /// Off by default: the goal penalizes |p(T)|^2 as written. When set, the
  /// goal (and adjoint final datum) use |p(T) - p_T|^2 instead.
  bool penalize_momentum_target = false;

  /// All violated constraints (empty when valid).
  std::vector<std::string> violations() const;
  /// Non-fatal remarks (e.g. non-unit spin target).
  std::vector<std::string> warnings() const;
  void validate() const;
};

/// k(u) = 1/2 int (gamma |u|^2 + gamma' |u'|^2) dt.
///
/// |u|^2 uses the trapezoidal rule; |u'|^2 is integrated exactly for the
/// piecewise-linear interpolant (forward differences per interval), which is
/// the control representation used inside the integrators.
double cost_value(const ControlSignal& u, const OCConfig& cfg);

/// Gradient density of k(u) w.r.t. the trapezoidal metric:
/// gamma u - gamma' u'' with natural closure.
MatX cost_gradient(const ControlSignal& u, const OCConfig& cfg);

/// Solves gamma' u'' - gamma u = rhs (per component) with u'(0) = u'(T) = 0.
/// With gamma' = 0 this is u = -rhs / gamma.
ControlSignal solve_control_bvp(const MatX& rhs, const OCConfig& cfg);

}  // namespace spinoc
