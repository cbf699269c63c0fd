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
#include "spinoc/fields.hpp"
#include "spinoc/wigner_core.hpp"

#include <array>
#include <string>
#include <vector>

namespace spinoc {

enum class EvolutionMode { full_quantum, uniform_field, semiclassical };

EvolutionMode parse_mode(const std::string& name);
std::string to_string(EvolutionMode mode);

struct EvolutionSpec {
  EvolutionMode mode = EvolutionMode::full_quantum;
  double horizon = 1.0;
  int steps = 200;
  /// Diagnostics (and returned samples) every `sample_every` steps; the final
  /// time is always sampled.
  int sample_every = 0;
  double cfl = 0.5;
  double dt() const { return horizon / steps; }
};

/// Right-hand side of the Wigner system for fixed fields, grid and hbar.
///
/// The reduced model keeps p = (p, 0, 0) and evaluates fields at (x, 0, 0).
/// In the full-quantum mode the Rashba operators are assembled in Weyl
/// symmetric order,
///   A+_k h = hbar [ (p T-_k h + T-_k (p h))/2 - (T+_k dx h + dx T+_k h)/4 ],
///   A-_k h = (p T+_k h + T+_k (p h))/2 + hbar^2 (T-_k dx h + dx T-_k h)/4,
/// with T+-_k = Theta+-_{R_k}, R_k = sum_j eps_{1jk} K_j. This equals the
/// Moyal (anti)commutator with p K exactly and is skew on the grid.
class WignerGenerator {
 public:
  WignerGenerator(const FieldSet& fields, const PhaseGrid& grid, double hbar, double mass,
                  EvolutionMode mode = EvolutionMode::full_quantum);

  const PhaseGrid& grid() const { return grid_; }
  double hbar() const { return hbar_; }
  double mass() const { return mass_; }
  EvolutionMode mode() const { return mode_; }
  int control_dim() const { return static_cast<int>(controls_.size()); }

  void rhs(const WignerState& f, const VecX& u, WignerState& out);
  WignerState rhs(const WignerState& f, const VecX& u) {
    WignerState out;
    rhs(f, u, out);
    return out;
  }

  /// A+[h]_k and A-[h]_k for axis k in {0, 1, 2} (full-quantum assembly).
  Grid2 a_plus(const Grid2& h, int k);
  Grid2 a_minus(const Grid2& h, int k);

  /// Theta-_{phi_i}[h] for control shape i.
  Grid2 theta_minus_control(int i, const Grid2& h);

  /// Largest stable step for controls bounded by |u_i| <= u_bound(i).
  double stable_step(const VecX& u_bound, double safety = 0.5) const;

  Spectral& spectral() { return spectral_; }

 private:
  void full_rhs(const WignerState& f, const VecX& u, WignerState& out);
  void uniform_rhs(const WignerState& f, const VecX& u, WignerState& out);
  void semiclassical_rhs(const WignerState& f, const VecX& u, WignerState& out);
  void potential_multiplier(const VecX& u);

  const FieldSet* fields_;
  PhaseGrid grid_;
  double hbar_, mass_;
  EvolutionMode mode_;
  Spectral spectral_;
  Eigen::Array<double, 1, Eigen::Dynamic> p_row_;

  ThetaSymbol base_;
  std::vector<ThetaSymbol> controls_;
  std::array<ThetaSymbol, 3> zeeman_, rashba_;
  std::array<bool, 3> zeeman_on_{}, rashba_on_{};
  std::array<bool, 3> zeeman_varies_{}, rashba_varies_{};
  Vec3 b_const_ = Vec3::Zero(), r_const_ = Vec3::Zero();

  // axis samples for the semiclassical and uniform paths
  Eigen::ArrayXd u0_prime_;
  std::vector<Eigen::ArrayXd> phi_prime_;
  std::array<Eigen::ArrayXd, 3> b_axis_, b_prime_, r_axis_, r_prime_;

  // workspace
  Grid2 mu_;
  std::array<CGrid2, 4> F_, G_, D_;
  std::array<CGrid2, 4> A_, C_, E_;
  Grid2 tmp_;
};

struct WignerDiagnostics {
  double time = 0.0;
  double mass = 0.0;
  double l2 = 0.0;
  double h1p = 0.0;
  Moments m;
};

WignerDiagnostics diagnose(const WignerState& f);

struct WignerTrajectory {
  std::vector<WignerState> samples;
  std::vector<WignerDiagnostics> diagnostics;
  /// Every time node (only when requested).
  std::vector<WignerState> nodes;
};

/// Classical RK4 on the control grid; u is linearly interpolated at
/// substages. Throws IntegrationError (with the last good time) on NaN/Inf.
WignerTrajectory integrate(const WignerState& f0, const ControlSignal& u, WignerGenerator& gen,
                           const EvolutionSpec& spec, bool keep_nodes = false, bool with_diagnostics = true);

/// One RK4 step of size h (negative for backward integration). `k1`, when
/// given, must equal gen.rhs(f, u0) and saves one evaluation.
void rk4_step(WignerGenerator& gen, WignerState& f, const VecX& u0, const VecX& um, const VecX& u1, double h,
              const WignerState* k1 = nullptr);

/// Convenience wrappers around a temporary full-quantum generator.
Grid2 a_plus(const Grid2& h, int k, const FieldSet& fields, double hbar, const PhaseGrid& grid);
Grid2 a_minus(const Grid2& h, int k, const FieldSet& fields, double hbar, const PhaseGrid& grid);

}  // namespace spinoc
