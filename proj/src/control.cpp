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
#include "spinoc/control.hpp"
#include "spinoc/descent.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace spinoc {

VecX ControlSignal::at_time(double t) const {
  const double s = std::clamp(t / dt(), 0.0, static_cast<double>(steps()));
  const int k = std::min(static_cast<int>(s), steps() - 1);
  const double w = s - k;
  return ((1.0 - w) * values_.row(k) + w * values_.row(k + 1)).transpose();
}

VecX ControlSignal::weights() const {
  VecX w = VecX::Constant(steps() + 1, dt());
  w(0) *= 0.5;
  w(steps()) *= 0.5;
  return w;
}

double inner(const ControlSignal& a, const ControlSignal& b) {
  return (a.weights().asDiagonal() * a.values()).cwiseProduct(b.values()).sum();
}

double l2_norm(const ControlSignal& a) { return std::sqrt(inner(a, a)); }

double max_abs(const ControlSignal& a) {
  return a.values().size() == 0 ? 0.0 : a.values().cwiseAbs().maxCoeff();
}

MatX second_derivative(const ControlSignal& u) {
  const int n = u.steps();
  const MatX& v = u.values();
  const double h2 = u.dt() * u.dt();
  MatX out(v.rows(), v.cols());
  out.row(0) = 2.0 * (v.row(1) - v.row(0)) / h2;
  out.row(n) = 2.0 * (v.row(n - 1) - v.row(n)) / h2;
  if (n > 1)
    out.middleRows(1, n - 1) = (v.topRows(n - 1) - 2.0 * v.middleRows(1, n - 1) + v.bottomRows(n - 1)) / h2;
  return out;
}

std::vector<std::string> OCConfig::violations() const {
  std::vector<std::string> out;
  auto nonneg = [&](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) out.push_back(std::string(name) + " must be finite and >= 0");
  };
  nonneg(nu_x, "nu_x");
  nonneg(nu_p, "nu_p");
  nonneg(nu_d, "nu_d");
  nonneg(gamma, "gamma");
  nonneg(gamma_prime, "gamma_prime");
  if (!(horizon > 0.0)) out.push_back("horizon T must be > 0");
  if (!(mass > 0.0)) out.push_back("mass m must be > 0");
  if (steps < 2) out.push_back("time steps N must be >= 2");
  if (!x_target.allFinite() || !p_target.allFinite() || !d_target.allFinite())
    out.push_back("targets must be finite");
  return out;
}

std::vector<std::string> OCConfig::warnings() const {
  std::vector<std::string> out;
  if (std::abs(d_target.norm() - 1.0) > 1e-12) {
    std::ostringstream s;
    s << "spin target has norm " << d_target.norm() << " (unit norm recommended)";
    out.push_back(s.str());
  }
  return out;
}

void OCConfig::validate() const {
  const auto v = violations();
  if (v.empty()) return;
  std::string msg = "invalid optimal-control configuration:";
  for (const auto& s : v) msg += "\n  - " + s;
  throw ConfigError(msg);
}

double cost_value(const ControlSignal& u, const OCConfig& cfg) {
  const MatX& v = u.values();
  const double mass = (u.weights().asDiagonal() * v.cwiseAbs2()).sum();
  double slope = 0.0;
  if (cfg.gamma_prime != 0.0) {
    const int n = u.steps();
    slope = (v.bottomRows(n) - v.topRows(n)).cwiseAbs2().sum() / u.dt();
  }
  return 0.5 * (cfg.gamma * mass + cfg.gamma_prime * slope);
}

MatX cost_gradient(const ControlSignal& u, const OCConfig& cfg) {
  MatX g = cfg.gamma * u.values();
  if (cfg.gamma_prime != 0.0) g -= cfg.gamma_prime * second_derivative(u);
  return g;
}

namespace {

/// Solves (c d^2/dt^2 - a) u = r with ghost-node natural closure.
VecX thomas(double a, double c, double h, const VecX& r) {
  const int n = static_cast<int>(r.size());
  const double off = c / (h * h);
  const double diag = -2.0 * off - a;
  VecX lower = VecX::Constant(n, off), upper = VecX::Constant(n, off);
  upper(0) = 2.0 * off;
  lower(n - 1) = 2.0 * off;
  VecX cp(n), dp(n);
  cp(0) = upper(0) / diag;
  dp(0) = r(0) / diag;
  for (int i = 1; i < n; ++i) {
    const double m = diag - lower(i) * cp(i - 1);
    cp(i) = upper(i) / m;
    dp(i) = (r(i) - lower(i) * dp(i - 1)) / m;
  }
  VecX x(n);
  x(n - 1) = dp(n - 1);
  for (int i = n - 2; i >= 0; --i) x(i) = dp(i) - cp(i) * x(i + 1);
  return x;
}

}  // namespace

ControlSignal solve_control_bvp(const MatX& rhs, const OCConfig& cfg) {
  if (cfg.gamma <= 0.0)
    throw DegenerateError(cfg.gamma_prime <= 0.0
                              ? "control problem is degenerate: gamma = gamma' = 0"
                              : "control problem is singular: gamma = 0 leaves constants undetermined");
  const int n = static_cast<int>(rhs.rows()) - 1;
  ControlSignal u(cfg.horizon, n, static_cast<int>(rhs.cols()));
  if (cfg.gamma_prime == 0.0) {
    u.values() = -rhs / cfg.gamma;
    return u;
  }
  for (int j = 0; j < rhs.cols(); ++j)
    u.values().col(j) = thomas(cfg.gamma, cfg.gamma_prime, u.dt(), rhs.col(j));
  return u;
}

ControlSignal precondition(const ControlSignal& g, const OCConfig& cfg) {
  if (cfg.gamma <= 0.0 && cfg.gamma_prime <= 0.0) return g;
  OCConfig shifted = cfg;
  shifted.horizon = g.horizon();
  if (shifted.gamma <= 0.0) shifted.gamma = cfg.gamma_prime / (g.horizon() * g.horizon());
  ControlSignal v = solve_control_bvp(-g.values(), shifted);
  return v;
}

StepRule parse_step_rule(const std::string& name) {
  if (name == "gradient" || name == "armijo") return StepRule::gradient;
  if (name == "bvp" || name == "sweep") return StepRule::bvp;
  if (name == "lbfgs") return StepRule::lbfgs;
  throw ConfigError("unknown step rule '" + name + "' (expected gradient, bvp or lbfgs)");
}

std::string to_string(StepRule rule) {
  switch (rule) {
    case StepRule::gradient: return "gradient";
    case StepRule::bvp: return "bvp";
    case StepRule::lbfgs: return "lbfgs";
  }
  return "bvp";
}

}  // namespace spinoc
