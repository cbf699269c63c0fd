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
#include "spinoc/config.hpp"

#include "spinoc/classical_ocp.hpp"
#include "spinoc/io.hpp"
#include "spinoc/quantum_ocp.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace spinoc {

using nlohmann::json;

namespace {

std::string join_items(const std::vector<std::string>& items) {
  std::string msg = "invalid configuration (" + std::to_string(items.size()) + " problem" +
                    (items.size() == 1 ? "" : "s") + "):";
  for (const auto& s : items) msg += "\n  - " + s;
  return msg;
}

// Collects type errors instead of stopping at the first one.
class Reader {
 public:
  std::vector<std::string> errors;

  double num(const json& j, const std::string& path) {
    if (!j.is_number()) return fail(path, "expected a number"), 0.0;
    return j.get<double>();
  }
  int integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) return fail(path, "expected an integer"), 0;
    return j.get<int>();
  }
  bool boolean(const json& j, const std::string& path) {
    if (!j.is_boolean()) return fail(path, "expected true or false"), false;
    return j.get<bool>();
  }
  std::string str(const json& j, const std::string& path) {
    if (!j.is_string()) return fail(path, "expected a string"), std::string();
    return j.get<std::string>();
  }
  /// A 3-vector, or a single number meaning (v, 0, 0).
  Vec3 vec3(const json& j, const std::string& path) {
    if (j.is_number()) return Vec3(j.get<double>(), 0, 0);
    if (!j.is_array() || j.size() != 3) return fail(path, "expected a number or an array of 3 numbers"), Vec3::Zero();
    Vec3 v;
    for (int i = 0; i < 3; ++i) v(i) = num(j[static_cast<std::size_t>(i)], path + "[" + std::to_string(i) + "]");
    return v;
  }
  std::vector<double> list(const json& j, const std::string& path) {
    std::vector<double> out;
    if (j.is_number()) return {j.get<double>()};
    if (!j.is_array()) return fail(path, "expected an array of numbers"), out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(num(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }

  Profile profile(const json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("type")) return fail(path, "expected an object with a \"type\""), ConstantProfile{};
    const std::string type = str(j["type"], path + ".type");
    auto field = [&](const char* key, const json& fallback) -> json {
      return j.contains(key) ? j[key] : fallback;
    };
    allow(j, path, type == "constant"   ? std::set<std::string>{"type", "value"}
                   : type == "linear"   ? std::set<std::string>{"type", "gradient", "offset"}
                   : type == "harmonic" ? std::set<std::string>{"type", "stiffness", "center"}
                   : type == "cosine"   ? std::set<std::string>{"type", "amplitude", "wavevector", "phase"}
                                        : std::set<std::string>{"type", "amplitude", "center", "width"});
    if (type == "constant") return ConstantProfile{num(field("value", 1.0), path + ".value")};
    if (type == "linear")
      return LinearProfile{vec3(field("gradient", json::array({0, 0, 0})), path + ".gradient"),
                           num(field("offset", 0.0), path + ".offset")};
    if (type == "harmonic")
      return HarmonicProfile{num(field("stiffness", 1.0), path + ".stiffness"),
                             vec3(field("center", json::array({0, 0, 0})), path + ".center")};
    if (type == "cosine")
      return CosineProfile{num(field("amplitude", 1.0), path + ".amplitude"),
                           vec3(field("wavevector", json::array({1, 0, 0})), path + ".wavevector"),
                           num(field("phase", 0.0), path + ".phase")};
    if (type == "gaussian") {
      const double w = num(field("width", 1.0), path + ".width");
      if (!(w > 0.0)) fail(path + ".width", "must be > 0");
      return GaussianProfile{num(field("amplitude", 1.0), path + ".amplitude"),
                             vec3(field("center", json::array({0, 0, 0})), path + ".center"), w};
    }
    fail(path + ".type", "unknown profile '" + type + "' (constant, linear, harmonic, cosine, gaussian)");
    return ConstantProfile{};
  }

  ScalarField scalar(const json& j, const std::string& path) {
    std::vector<Profile> terms;
    if (!j.is_array()) return fail(path, "expected an array of profiles"), ScalarField();
    for (std::size_t i = 0; i < j.size(); ++i) terms.push_back(profile(j[i], path + "[" + std::to_string(i) + "]"));
    return ScalarField(std::move(terms));
  }

  VectorField vector(const json& j, const std::string& path) {
    std::vector<VectorField::Term> terms;
    if (!j.is_array()) return fail(path, "expected an array of {direction, profile} terms"), VectorField();
    for (std::size_t i = 0; i < j.size(); ++i) {
      const std::string p = path + "[" + std::to_string(i) + "]";
      if (!j[i].is_object() || !j[i].contains("direction")) {
        fail(p, "expected an object with \"direction\" (and optional \"profile\")");
        continue;
      }
      allow(j[i], p, {"direction", "profile"});
      VectorField::Term t;
      t.direction = vec3(j[i]["direction"], p + ".direction");
      if (j[i].contains("profile")) t.profile = profile(j[i]["profile"], p + ".profile");
      terms.push_back(t);
    }
    return VectorField(std::move(terms));
  }

  void allow(const json& j, const std::string& path, const std::set<std::string>& keys) {
    for (const auto& [k, v] : j.items())
      if (!keys.count(k)) fail(path + "." + k, "unknown key");
  }

  void fail(const std::string& path, const std::string& what) { errors.push_back(path + ": " + what); }
};

// Keys present in `doc` but not in `defaults`, and nulls (which would delete
// defaults under merge-patch). Arrays are checked by their own parsers.
void unknown_keys(const json& doc, const json& defaults, const std::string& path, std::vector<std::string>& out) {
  for (const auto& [k, v] : doc.items()) {
    const std::string p = path.empty() ? k : path + "." + k;
    if (!defaults.contains(k))
      out.push_back(p + ": unknown key");
    else if (v.is_null())
      out.push_back(p + ": null is not allowed (omit the key to keep the default)");
    else if (v.is_object() && defaults[k].is_object())
      unknown_keys(v, defaults[k], p, out);
  }
}

}  // namespace

ConfigViolations::ConfigViolations(std::vector<std::string> items)
    : ConfigError(join_items(items)), items_(std::move(items)) {}

ControlSignal ControlSpec::sample(double horizon, int steps, int dim) const {
  ControlSignal u(horizon, steps, dim);
  if (!csv_path.empty()) {
    // rows "t,u1,..,ud" with increasing t covering [0, horizon]; linear interpolation
    std::istringstream is(read_file(csv_path));
    std::string line;
    std::getline(is, line);  // header
    std::vector<double> ts;
    std::vector<VecX> us;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      std::stringstream ls(line);
      std::string cell;
      VecX row(dim);
      try {
        std::getline(ls, cell, ',');
        ts.push_back(std::stod(cell));
        for (int i = 0; i < dim; ++i) {
          if (!std::getline(ls, cell, ',')) throw ConfigError("control CSV " + csv_path + ": too few columns");
          row(i) = std::stod(cell);
        }
      } catch (const std::logic_error&) {
        throw ConfigError("control CSV " + csv_path + ": unreadable row '" + line + "'");
      }
      if (ts.size() > 1 && !(ts.back() > ts[ts.size() - 2]))
        throw ConfigError("control CSV " + csv_path + ": times must increase");
      us.push_back(row);
    }
    if (ts.size() < 2 || ts.front() > 1e-12 || ts.back() < horizon - 1e-9)
      throw ConfigError("control CSV " + csv_path + " must cover [0, " + format_number(horizon) + "]");
    std::size_t j = 0;
    for (int k = 0; k <= steps; ++k) {
      const double t = u.time(k);
      while (j + 2 < ts.size() && ts[j + 1] < t) ++j;
      const double w = std::clamp((t - ts[j]) / (ts[j + 1] - ts[j]), 0.0, 1.0);
      u.values().row(k) = ((1.0 - w) * us[j] + w * us[j + 1]).transpose();
    }
    return u;
  }
  for (int k = 0; k <= steps; ++k)
    for (int i = 0; i < dim; ++i) {
      const double a = i < amplitude.size() ? amplitude(i) : 0.0;
      const double o = i < offset.size() ? offset(i) : 0.0;
      u.values()(k, i) = o + a * std::sin(omega * u.time(k) + phase);
    }
  return u;
}

int RunConfig::wigner_steps(double h, const VecX& u_bound) const {
  if (dt > 0.0) return std::max(1, static_cast<int>(std::ceil(oc.horizon / dt - 1e-9)));
  WignerGenerator gen(fields, grid, h, oc.mass, mode);
  return std::max(oc.steps, static_cast<int>(std::ceil(oc.horizon / gen.stable_step(u_bound, cfl))));
}

json default_document() {
  return json::parse(R"({
    "fields": {
      "potential": {
        "base": [{"type": "harmonic", "stiffness": 1.0, "center": [0, 0, 0]},
                 {"type": "cosine", "amplitude": 0.2, "wavevector": [1.5, 0, 0], "phase": 0.0}],
        "controls": [[{"type": "linear", "gradient": [-1, 0, 0], "offset": 0.0}]]
      },
      "magnetic": [{"direction": [0, 0, 0.8], "profile": {"type": "constant", "value": 1.0}}],
      "rashba": [{"direction": [0, 0, 0.5], "profile": {"type": "constant", "value": 1.0}}]
    },
    "oc": {
      "nu_x": 2.0, "nu_p": 0.5, "nu_d": 0.5, "gamma": 0.1, "gamma_prime": 0.01,
      "x_target": [0.5, 0, 0], "p_target": [0, 0, 0], "d_target": [0, 1, 0],
      "horizon": 1.0, "mass": 1.0, "steps": 200, "penalize_momentum_target": false
    },
    "initial": {"x": -0.5, "p": 0.25, "d": [1, 0, 0], "sigma": 1.0},
    "grid": {"nx": 128, "np": 128, "x_range": [-3.5, 3.5], "p_range": [-3.5, 3.5]},
    "evolution": {"mode": "auto", "hbar": 0.1, "dt": 0.0, "cfl": 0.5, "samples": 10},
    "sweep": {"hbar": [0.4, 0.2, 0.1, 0.05], "threads": 1},
    "optimizer": {"rule": "lbfgs", "max_iters": 40, "tol": 1e-6, "initial_step": 1.0, "armijo": 1e-4,
                  "backtrack": 0.5, "max_backtracks": 30, "memory": 6},
    "cutoff": {"radius": 0.0, "spreads": 8.0},
    "control": {"offset": [0.0], "amplitude": [0.0], "omega": 0.0, "phase": 0.0, "csv": ""},
    "seed": 12345,
    "output": {"dir": "spinoc-out", "snapshots": true}
  })");
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used == 0 || used != item.size()) throw ConfigError("'" + item + "' in '" + text + "' is not a number");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty number list");
  return out;
}

RunConfig parse_config(const json& user, const ConfigOverrides& overrides) {
  if (!user.is_object()) throw ConfigError("configuration must be a JSON object");
  const json defaults = default_document();
  std::vector<std::string> errors;
  unknown_keys(user, defaults, "", errors);

  json doc = defaults;
  doc.merge_patch(user);
  if (overrides.output_dir) doc["output"]["dir"] = *overrides.output_dir;
  if (overrides.hbars) doc["sweep"]["hbar"] = *overrides.hbars;
  if (overrides.seed) doc["seed"] = *overrides.seed;

  RunConfig c;
  c.document = doc;
  c.fingerprint = fnv1a64(doc.dump());
  Reader r;

  // fields
  const json& fp = doc["fields"]["potential"];
  ScalarField base = r.scalar(fp["base"], "fields.potential.base");
  std::vector<ScalarField> shapes;
  if (!fp["controls"].is_array()) {
    r.fail("fields.potential.controls", "expected an array of profile arrays");
  } else {
    for (std::size_t i = 0; i < fp["controls"].size(); ++i)
      shapes.push_back(r.scalar(fp["controls"][i], "fields.potential.controls[" + std::to_string(i) + "]"));
  }
  c.fields = FieldSet(ControlledPotential(std::move(base), std::move(shapes)),
                      r.vector(doc["fields"]["magnetic"], "fields.magnetic"),
                      r.vector(doc["fields"]["rashba"], "fields.rashba"));

  // optimal control block
  const json& oc = doc["oc"];
  c.oc.nu_x = r.num(oc["nu_x"], "oc.nu_x");
  c.oc.nu_p = r.num(oc["nu_p"], "oc.nu_p");
  c.oc.nu_d = r.num(oc["nu_d"], "oc.nu_d");
  c.oc.gamma = r.num(oc["gamma"], "oc.gamma");
  c.oc.gamma_prime = r.num(oc["gamma_prime"], "oc.gamma_prime");
  c.oc.x_target = r.vec3(oc["x_target"], "oc.x_target");
  c.oc.p_target = r.vec3(oc["p_target"], "oc.p_target");
  c.oc.d_target = r.vec3(oc["d_target"], "oc.d_target");
  c.oc.horizon = r.num(oc["horizon"], "oc.horizon");
  c.oc.mass = r.num(oc["mass"], "oc.mass");
  c.oc.steps = r.integer(oc["steps"], "oc.steps");
  c.oc.penalize_momentum_target = r.boolean(oc["penalize_momentum_target"], "oc.penalize_momentum_target");

  const json& in = doc["initial"];
  c.x_bar = r.num(in["x"], "initial.x");
  c.p_bar = r.num(in["p"], "initial.p");
  c.d_bar = r.vec3(in["d"], "initial.d");
  c.sigma = r.num(in["sigma"], "initial.sigma");

  const json& g = doc["grid"];
  c.grid.nx = r.integer(g["nx"], "grid.nx");
  c.grid.np = r.integer(g["np"], "grid.np");
  const auto xr = r.list(g["x_range"], "grid.x_range");
  const auto pr = r.list(g["p_range"], "grid.p_range");
  if (xr.size() != 2) r.fail("grid.x_range", "expected [min, max]");
  if (pr.size() != 2) r.fail("grid.p_range", "expected [min, max]");
  if (xr.size() == 2) c.grid.x0 = xr[0], c.grid.lx = xr[1] - xr[0];
  if (pr.size() == 2) c.grid.p0 = pr[0], c.grid.lp = pr[1] - pr[0];

  const json& ev = doc["evolution"];
  const std::string mode = r.str(ev["mode"], "evolution.mode");
  const bool uniform = c.fields.magnetic_field().is_uniform() && c.fields.rashba_field().is_uniform();
  if (mode == "auto") {
    c.mode = uniform ? EvolutionMode::uniform_field : EvolutionMode::full_quantum;
  } else {
    try {
      c.mode = parse_mode(mode);
    } catch (const ConfigError& e) {
      r.fail("evolution.mode", e.what());
    }
  }
  c.hbar = r.num(ev["hbar"], "evolution.hbar");
  c.dt = r.num(ev["dt"], "evolution.dt");
  c.cfl = r.num(ev["cfl"], "evolution.cfl");
  c.samples = r.integer(ev["samples"], "evolution.samples");

  c.sweep_hbars = r.list(doc["sweep"]["hbar"], "sweep.hbar");
  c.sweep_threads = r.integer(doc["sweep"]["threads"], "sweep.threads");

  const json& op = doc["optimizer"];
  try {
    c.optimizer.rule = parse_step_rule(r.str(op["rule"], "optimizer.rule"));
  } catch (const ConfigError& e) {
    r.fail("optimizer.rule", e.what());
  }
  c.optimizer.max_iters = r.integer(op["max_iters"], "optimizer.max_iters");
  c.optimizer.tol = r.num(op["tol"], "optimizer.tol");
  c.optimizer.initial_step = r.num(op["initial_step"], "optimizer.initial_step");
  c.optimizer.armijo = r.num(op["armijo"], "optimizer.armijo");
  c.optimizer.backtrack = r.num(op["backtrack"], "optimizer.backtrack");
  c.optimizer.max_backtracks = r.integer(op["max_backtracks"], "optimizer.max_backtracks");
  c.optimizer.memory = r.integer(op["memory"], "optimizer.memory");

  c.cutoff_radius = r.num(doc["cutoff"]["radius"], "cutoff.radius");
  c.cutoff_spreads = r.num(doc["cutoff"]["spreads"], "cutoff.spreads");

  const json& ct = doc["control"];
  const auto off = r.list(ct["offset"], "control.offset");
  const auto amp = r.list(ct["amplitude"], "control.amplitude");
  c.control.offset = Eigen::Map<const VecX>(off.data(), static_cast<Eigen::Index>(off.size()));
  c.control.amplitude = Eigen::Map<const VecX>(amp.data(), static_cast<Eigen::Index>(amp.size()));
  c.control.omega = r.num(ct["omega"], "control.omega");
  c.control.phase = r.num(ct["phase"], "control.phase");
  c.control.csv_path = r.str(ct["csv"], "control.csv");

  if (!doc["seed"].is_number_unsigned())
    r.fail("seed", "expected a non-negative integer");
  else
    c.seed = doc["seed"].get<std::uint64_t>();
  c.output_dir = r.str(doc["output"]["dir"], "output.dir");
  c.snapshots = r.boolean(doc["output"]["snapshots"], "output.snapshots");

  errors.insert(errors.end(), r.errors.begin(), r.errors.end());
  if (!errors.empty()) throw ConfigViolations(errors);  // types first; cross checks need sane values

  // value and cross-field constraints
  for (const auto& v : c.grid.violations()) errors.push_back(v);
  for (const auto& v : c.oc.violations()) errors.push_back("oc: " + v);
  if (!(c.sigma > 0.0)) errors.push_back("initial.sigma must be > 0");
  if (c.d_bar.norm() > 1.0 + 1e-12) errors.push_back("initial.d must satisfy |d| <= 1");
  if (c.mode == EvolutionMode::uniform_field && !uniform)
    errors.push_back("evolution.mode = uniform-field requires constant magnetic and Rashba fields");
  if (!(c.hbar > 0.0)) errors.push_back("evolution.hbar must be > 0");
  if (c.dt < 0.0) errors.push_back("evolution.dt must be >= 0 (0 selects the CFL step)");
  if (!(c.cfl > 0.0 && c.cfl <= 1.0)) errors.push_back("evolution.cfl must be in (0, 1]");
  if (c.samples < 0) errors.push_back("evolution.samples must be >= 0");
  if (c.sweep_hbars.empty()) errors.push_back("sweep.hbar must list at least one value");
  for (double h : c.sweep_hbars)
    if (!(h > 0.0)) errors.push_back("sweep.hbar entries must be > 0 (got " + format_number(h) + ")");
  if (c.sweep_threads < 1) errors.push_back("sweep.threads must be >= 1");
  if (c.optimizer.max_iters < 0) errors.push_back("optimizer.max_iters must be >= 0");
  if (!(c.optimizer.tol > 0.0)) errors.push_back("optimizer.tol must be > 0");
  if (!(c.optimizer.backtrack > 0.0 && c.optimizer.backtrack < 1.0))
    errors.push_back("optimizer.backtrack must be in (0, 1)");
  if (!(c.optimizer.armijo > 0.0 && c.optimizer.armijo < 1.0)) errors.push_back("optimizer.armijo must be in (0, 1)");
  if (!(c.optimizer.initial_step > 0.0)) errors.push_back("optimizer.initial_step must be > 0");
  if (c.optimizer.memory < 1) errors.push_back("optimizer.memory must be >= 1");
  if (c.cutoff_radius < 0.0) errors.push_back("cutoff.radius must be >= 0 (0 selects the automatic radius)");
  if (!(c.cutoff_spreads > 0.0)) errors.push_back("cutoff.spreads must be > 0");
  const int dim = c.fields.control_dim();
  if (c.control.offset.size() > dim || c.control.amplitude.size() > dim)
    errors.push_back("control.offset/amplitude have more entries than fields.potential.controls (" +
                     std::to_string(dim) + ")");
  if (!c.control.csv_path.empty() && !std::filesystem::exists(c.control.csv_path))
    errors.push_back("control.csv: file " + c.control.csv_path + " does not exist");
  if (!errors.empty()) throw ConfigViolations(errors);

  // envelope-in-box for every hbar that any workflow may use
  std::set<double> hbars(c.sweep_hbars.begin(), c.sweep_hbars.end());
  hbars.insert(c.hbar);
  for (double h : hbars)
    for (const auto& v : coherent_envelope_violations(c.grid, h, c.x_bar, c.p_bar, c.sigma))
      errors.push_back("initial/grid: " + v);

  // CFL for a prescribed step, with the prescribed control's bound
  auto amax = [](const VecX& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; };
  const VecX u_bound = VecX::Constant(dim, amax(c.control.offset) + amax(c.control.amplitude));
  if (c.dt > 0.0 && c.control.csv_path.empty()) {
    for (double h : hbars) {
      WignerGenerator gen(c.fields, c.grid, h, c.oc.mass, c.mode);
      const double stable = gen.stable_step(u_bound, c.cfl);
      if (c.dt > stable) {
        errors.push_back("evolution.dt = " + format_number(c.dt) + " exceeds the CFL bound " +
                         format_number(stable) + " at hbar = " + format_number(h));
        break;
      }
    }
  }

  // cut-off radius against the classical trajectory of the prescribed control
  if (c.cutoff_radius > 0.0 && c.control.csv_path.empty()) {
    const ClassicalState init{Vec3(c.x_bar, 0, 0), Vec3(c.p_bar, 0, 0), c.d_bar};
    const auto traj = integrate_forward(c.fields, init, c.control.sample(c.oc.horizon, c.oc.steps, dim), c.oc);
    const double hmax = *std::max_element(hbars.begin(), hbars.end());
    try {
      require_cutoff_covers(traj, c.cutoff_radius, auto_cutoff_radius(traj, hmax, c.sigma, c.cutoff_spreads));
    } catch (const ConfigError& e) {
      errors.push_back(std::string("cutoff.radius: ") + e.what());
    }
  }
  if (!errors.empty()) throw ConfigViolations(errors);
  return c;
}

RunConfig load_config(const std::string& path, const ConfigOverrides& overrides) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open configuration file " + path);
  json doc;
  try {
    doc = json::parse(is, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(doc, overrides);
}

}  // namespace spinoc
