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

#include <variant>
#include <vector>

namespace spinoc {

// Scalar shape catalog. Every entry is analytic with closed-form gradient and
// Hessian, so symbols can be evaluated at arbitrary (off-grid) points.

struct ConstantProfile {
  double value = 0.0;
};

/// g.x + offset
struct LinearProfile {
  Vec3 gradient = Vec3::Zero();
  double offset = 0.0;
};

/// (k/2) |x - c|^2
struct HarmonicProfile {
  double stiffness = 1.0;
  Vec3 center = Vec3::Zero();
};

/// A cos(q.x + phase)
struct CosineProfile {
  double amplitude = 1.0;
  Vec3 wavevector = Vec3::UnitX();
  double phase = 0.0;
};

/// A exp(-|x - c|^2 / (2 w^2))
struct GaussianProfile {
  double amplitude = 1.0;
  Vec3 center = Vec3::Zero();
  double width = 1.0;
};

using Profile = std::variant<ConstantProfile, LinearProfile, HarmonicProfile,
                             CosineProfile, GaussianProfile>;

double value(const Profile& f, const Vec3& x);
Vec3 gradient(const Profile& f, const Vec3& x);
Mat3 hessian(const Profile& f, const Vec3& x);
/// True for constant, linear and harmonic entries (terminating Taylor series).
bool is_polynomial(const Profile& f);

/// Sum of catalog profiles.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(std::initializer_list<Profile> terms) : terms_(terms) {}
  explicit ScalarField(std::vector<Profile> terms) : terms_(std::move(terms)) {}

  double operator()(const Vec3& x) const;
  Vec3 gradient(const Vec3& x) const;
  Mat3 hessian(const Vec3& x) const;

  /// Convenience for the 1D reduced model: evaluation at (x, 0, 0).
  double on_axis(double x) const { return (*this)(Vec3(x, 0.0, 0.0)); }
  bool empty() const { return terms_.empty(); }
  bool is_constant() const;
  const std::vector<Profile>& terms() const { return terms_; }
  void add(Profile p) { terms_.push_back(std::move(p)); }

 private:
  std::vector<Profile> terms_;
};

/// V(x) = sum_n direction_n * profile_n(x).
class VectorField {
 public:
  struct Term {
    Vec3 direction = Vec3::Zero();
    Profile profile = ConstantProfile{1.0};
  };

  VectorField() = default;
  explicit VectorField(std::vector<Term> terms) : terms_(std::move(terms)) {}
  static VectorField uniform(const Vec3& v) { return VectorField({Term{v, ConstantProfile{1.0}}}); }

  Vec3 operator()(const Vec3& x) const;
  /// J(i, j) = dV_i / dx_j
  Mat3 jacobian(const Vec3& x) const;
  double component(int i, const Vec3& x) const;
  bool is_uniform() const;
  bool empty() const { return terms_.empty(); }
  const std::vector<Term>& terms() const { return terms_; }
  void add(Term t) { terms_.push_back(std::move(t)); }

 private:
  std::vector<Term> terms_;
};

/// U(x, u) = U0(x) + sum_i u_i phi_i(x). Control enters affinely, so
/// dU/du_i = phi_i does not depend on u.
class ControlledPotential {
 public:
  ControlledPotential() = default;
  ControlledPotential(ScalarField base, std::vector<ScalarField> shapes)
      : base_(std::move(base)), shapes_(std::move(shapes)) {}

  int control_dim() const { return static_cast<int>(shapes_.size()); }
  const ScalarField& base() const { return base_; }
  const ScalarField& shape(int i) const { return shapes_.at(static_cast<std::size_t>(i)); }

  double operator()(const Vec3& x, const VecX& u) const;
  Vec3 gradient(const Vec3& x, const VecX& u) const;
  Mat3 hessian(const Vec3& x, const VecX& u) const;
  /// Throws ConfigError when u does not have control_dim() entries.
  void check(const VecX& u) const;

 private:
  ScalarField base_;
  std::vector<ScalarField> shapes_;
};

/// All externally prescribed fields. Immutable after construction.
///
/// Sign conventions used module-wide:
///   E = -grad_x U,
///   spin precession  d' = 2 (p ^ K - B) ^ d = -B_tot ^ d,  B_tot = 2 (B - p ^ K).
class FieldSet {
 public:
  FieldSet() = default;
  FieldSet(ControlledPotential potential, VectorField magnetic, VectorField rashba)
      : potential_(std::move(potential)), magnetic_(std::move(magnetic)), rashba_(std::move(rashba)) {}

  int control_dim() const { return potential_.control_dim(); }
  const ControlledPotential& potential_field() const { return potential_; }
  const VectorField& magnetic_field() const { return magnetic_; }
  const VectorField& rashba_field() const { return rashba_; }

  double potential(const Vec3& x, const VecX& u) const { return potential_(x, u); }
  Vec3 electric(const Vec3& x, const VecX& u) const { return -potential_.gradient(x, u); }
  /// dE_i/dx_j = -d^2U/dx_i dx_j
  Mat3 electric_jacobian(const Vec3& x, const VecX& u) const { return -potential_.hessian(x, u); }
  double control_shape(int i, const Vec3& x) const { return potential_.shape(i)(x); }
  /// dE/du_i = -grad phi_i
  Vec3 electric_control_derivative(int i, const Vec3& x) const { return -potential_.shape(i).gradient(x); }

  Vec3 magnetic(const Vec3& x) const { return magnetic_(x); }
  Mat3 magnetic_jacobian(const Vec3& x) const { return magnetic_.jacobian(x); }
  Vec3 rashba(const Vec3& x) const { return rashba_(x); }
  Mat3 rashba_jacobian(const Vec3& x) const { return rashba_.jacobian(x); }

  Vec3 total_precession_field(const Vec3& x, const Vec3& p) const {
    return 2.0 * (magnetic(x) - p.cross(rashba(x)));
  }

 private:
  ControlledPotential potential_;
  VectorField magnetic_;
  VectorField rashba_;
};

}  // namespace spinoc
