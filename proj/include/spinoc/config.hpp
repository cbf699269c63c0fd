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
#include "spinoc/wigner_core.hpp"
#include "spinoc/wigner_dynamics.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinoc {

/// Thrown by load_config; carries every violated constraint.
class ConfigViolations : public ConfigError {
 public:
  explicit ConfigViolations(std::vector<std::string> items);
  const std::vector<std::string>& items() const { return items_; }

 private:
  std::vector<std::string> items_;
};

/// Prescribed control for the simulate-* subcommands:
///   u_i(t) = offset_i + amplitude_i sin(omega t + phase), or values from a CSV.
struct ControlSpec {
  VecX offset, amplitude;
  double omega = 0.0, phase = 0.0;
  std::string csv_path;

  ControlSignal sample(double horizon, int steps, int dim) const;
};

struct RunConfig {
  nlohmann::json document;  ///< effective document (defaults filled, overrides applied)
  std::uint64_t fingerprint = 0;

  FieldSet fields;
  OCConfig oc;

  // initial data (reduced model: x = (x, 0, 0), p = (p, 0, 0))
  double x_bar = -0.5, p_bar = 0.25, sigma = 1.0;
  Vec3 d_bar = Vec3::UnitX();

  PhaseGrid grid;
  EvolutionMode mode = EvolutionMode::full_quantum;
  double hbar = 0.1;
  double dt = 0.0;  ///< 0 selects the CFL step
  double cfl = 0.5;
  int samples = 10;

  std::vector<double> sweep_hbars{0.4, 0.2, 0.1, 0.05};
  int sweep_threads = 1;

  DescentOptions optimizer;
  double cutoff_radius = 0.0;  ///< 0 selects the automatic radius
  double cutoff_spreads = 8.0;

  ControlSpec control;
  std::uint64_t seed = 12345;
  std::string output_dir = "spinoc-out";
  bool snapshots = true;

  /// Time steps for a Wigner run at this hbar with controls bounded by u_bound.
  int wigner_steps(double h, const VecX& u_bound) const;
};

/// Command-line overrides applied to the document before validation.
struct ConfigOverrides {
  std::optional<std::string> output_dir;
  std::optional<std::vector<double>> hbars;
  std::optional<std::uint64_t> seed;
};

/// Parses, fills defaults and validates. Throws ConfigViolations listing every
/// failed constraint, or ConfigError for unreadable / malformed documents
/// (with line and column).
RunConfig load_config(const std::string& path, const ConfigOverrides& overrides = {});
RunConfig parse_config(const nlohmann::json& document, const ConfigOverrides& overrides = {});

/// The built-in defaults as a complete document.
nlohmann::json default_document();

/// Parses "0.4,0.2,0.1".
std::vector<double> parse_number_list(const std::string& text);

}  // namespace spinoc
