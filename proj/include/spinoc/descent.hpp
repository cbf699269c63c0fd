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

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <string>
#include <vector>

namespace spinoc {

enum class StepRule {
  gradient,  ///< u <- u - alpha g, Armijo backtracking
  bvp,       ///< relaxed BVP update u <- (1-w) u + w solve_control_bvp(forcing)
  lbfgs,     ///< limited-memory BFGS preconditioned by the BVP operator
};

StepRule parse_step_rule(const std::string& name);
std::string to_string(StepRule rule);

struct DescentOptions {
  int max_iters = 100;
  double tol = 1e-6;
  StepRule rule = StepRule::bvp;
  double initial_step = 1.0;
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 30;
  int memory = 6;
  /// Called after every accepted iterate (may be empty).
  std::function<void(int, const ControlSignal&)> on_iterate;
};

struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;
  double goal = 0.0;
  double cost = 0.0;
  double grad_inf = 0.0;
  double step = 0.0;
};

struct DescentReport {
  std::vector<IterationRecord> history;
  bool converged = false;
  bool stagnated = false;
  std::string message;
};

struct ObjectiveParts {
  double total = 0.0;
  double goal = 0.0;
  double cost = 0.0;
};

/// Applies A^{-1} with A = gamma - gamma' d^2/dt^2 (natural BCs). With a
/// degenerate cost (gamma = gamma' = 0) this is the identity.
ControlSignal precondition(const ControlSignal& g, const OCConfig& cfg);

/// Generic monotone descent loop shared by the classical and the quantum
/// problems. `Problem` provides
///   Forward forward(const ControlSignal&);          // may throw IntegrationError
///   ObjectiveParts parts(const Forward&, const ControlSignal&);
///   ControlSignal gradient(const ControlSignal&, const Forward&);
/// `u` is overwritten with the last accepted iterate.
template <class Problem>
DescentReport descend(Problem& problem, ControlSignal& u, const OCConfig& cfg,
                      const DescentOptions& opts) {
  using Forward = decltype(problem.forward(u));
  DescentReport report;

  Forward fwd = problem.forward(u);
  ObjectiveParts cur = problem.parts(fwd, u);
  ControlSignal g = problem.gradient(u, fwd);
  double last_step = 0.0;

  std::deque<std::pair<ControlSignal, ControlSignal>> pairs;  // (s, y)
  double alpha_hint = opts.initial_step;

  for (int it = 0;; ++it) {
    const double ginf = max_abs(g);
    report.history.push_back({it, cur.total, cur.goal, cur.cost, ginf, last_step});
    if (opts.on_iterate) opts.on_iterate(it, u);
    if (ginf < opts.tol) {
      report.converged = true;
      report.message = "gradient tolerance reached";
      break;
    }
    if (it >= opts.max_iters) {
      report.message = "iteration budget exhausted";
      break;
    }

    ControlSignal dir;
    switch (opts.rule) {
      case StepRule::gradient:
        dir = g;
        break;
      case StepRule::bvp:
        dir = precondition(g, cfg);
        break;
      case StepRule::lbfgs: {
        ControlSignal q = g;
        std::vector<double> a(pairs.size());
        for (int i = static_cast<int>(pairs.size()) - 1; i >= 0; --i) {
          const auto& [s, y] = pairs[i];
          a[i] = inner(s, q) / inner(y, s);
          q.values() -= a[i] * y.values();
        }
        dir = precondition(q, cfg);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
          const auto& [s, y] = pairs[i];
          const double b = inner(y, dir) / inner(y, s);
          dir.values() += (a[i] - b) * s.values();
        }
        if (inner(g, dir) <= 0.0) {
          pairs.clear();
          dir = precondition(g, cfg);
        }
        break;
      }
    }

    const double slope = inner(g, dir);
    double alpha = opts.rule == StepRule::gradient ? alpha_hint : 1.0;
    bool accepted = false;
    ControlSignal trial;
    Forward trial_fwd{};
    ObjectiveParts trial_parts;
    for (int bt = 0; bt <= opts.max_backtracks; ++bt, alpha *= opts.backtrack) {
      trial = u;
      trial.values() -= alpha * dir.values();
      try {
        trial_fwd = problem.forward(trial);
      } catch (const IntegrationError&) {
        continue;
      }
      trial_parts = problem.parts(trial_fwd, trial);
      if (std::isfinite(trial_parts.total) &&
          trial_parts.total <= cur.total - opts.armijo * alpha * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      report.stagnated = true;
      report.message = "line search failed; returning best iterate";
      break;
    }

    ControlSignal g_new = problem.gradient(trial, trial_fwd);
    if (opts.rule == StepRule::lbfgs) {
      ControlSignal s(u.horizon(), trial.values() - u.values());
      ControlSignal y(u.horizon(), g_new.values() - g.values());
      if (inner(y, s) > 1e-14 * l2_norm(s) * l2_norm(y)) {
        pairs.emplace_back(std::move(s), std::move(y));
        if (static_cast<int>(pairs.size()) > opts.memory) pairs.pop_front();
      }
    }
    if (opts.rule == StepRule::gradient) alpha_hint = std::min(2.0 * alpha, 1e6);
    last_step = alpha;
    u = std::move(trial);
    fwd = std::move(trial_fwd);
    cur = trial_parts;
    g = std::move(g_new);
  }
  return report;
}

}  // namespace spinoc
