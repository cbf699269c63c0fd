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
#include "spinoc/fields.hpp"

#include <cmath>

namespace spinoc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

double value(const Profile& f, const Vec3& x) {
  return std::visit(
      overloaded{
          [](const ConstantProfile& c) { return c.value; },
          [&](const LinearProfile& l) { return l.gradient.dot(x) + l.offset; },
          [&](const HarmonicProfile& h) { return 0.5 * h.stiffness * (x - h.center).squaredNorm(); },
          [&](const CosineProfile& c) { return c.amplitude * std::cos(c.wavevector.dot(x) + c.phase); },
          [&](const GaussianProfile& g) {
            return g.amplitude * std::exp(-(x - g.center).squaredNorm() / (2.0 * g.width * g.width));
          },
      },
      f);
}

Vec3 gradient(const Profile& f, const Vec3& x) {
  return std::visit(
      overloaded{
          [](const ConstantProfile&) -> Vec3 { return Vec3::Zero(); },
          [](const LinearProfile& l) -> Vec3 { return l.gradient; },
          [&](const HarmonicProfile& h) -> Vec3 { return h.stiffness * (x - h.center); },
          [&](const CosineProfile& c) -> Vec3 {
            return -c.amplitude * std::sin(c.wavevector.dot(x) + c.phase) * c.wavevector;
          },
          [&](const GaussianProfile& g) -> Vec3 {
            const double w2 = g.width * g.width;
            const Vec3 r = x - g.center;
            return -g.amplitude * std::exp(-r.squaredNorm() / (2.0 * w2)) / w2 * r;
          },
      },
      f);
}

Mat3 hessian(const Profile& f, const Vec3& x) {
  return std::visit(
      overloaded{
          [](const ConstantProfile&) -> Mat3 { return Mat3::Zero(); },
          [](const LinearProfile&) -> Mat3 { return Mat3::Zero(); },
          [](const HarmonicProfile& h) -> Mat3 { return h.stiffness * Mat3::Identity(); },
          [&](const CosineProfile& c) -> Mat3 {
            return -c.amplitude * std::cos(c.wavevector.dot(x) + c.phase) * c.wavevector * c.wavevector.transpose();
          },
          [&](const GaussianProfile& g) -> Mat3 {
            const double w2 = g.width * g.width;
            const Vec3 r = x - g.center;
            const double e = g.amplitude * std::exp(-r.squaredNorm() / (2.0 * w2));
            return e / w2 * (r * r.transpose() / w2 - Mat3::Identity());
          },
      },
      f);
}

bool is_polynomial(const Profile& f) {
  return std::holds_alternative<ConstantProfile>(f) || std::holds_alternative<LinearProfile>(f) ||
         std::holds_alternative<HarmonicProfile>(f);
}

double ScalarField::operator()(const Vec3& x) const {
  double s = 0.0;
  for (const auto& t : terms_) s += value(t, x);
  return s;
}

Vec3 ScalarField::gradient(const Vec3& x) const {
  Vec3 g = Vec3::Zero();
  for (const auto& t : terms_) g += spinoc::gradient(t, x);
  return g;
}

Mat3 ScalarField::hessian(const Vec3& x) const {
  Mat3 h = Mat3::Zero();
  for (const auto& t : terms_) h += spinoc::hessian(t, x);
  return h;
}

bool ScalarField::is_constant() const {
  for (const auto& t : terms_)
    if (!std::holds_alternative<ConstantProfile>(t)) return false;
  return true;
}

Vec3 VectorField::operator()(const Vec3& x) const {
  Vec3 v = Vec3::Zero();
  for (const auto& t : terms_) v += t.direction * value(t.profile, x);
  return v;
}

Mat3 VectorField::jacobian(const Vec3& x) const {
  Mat3 j = Mat3::Zero();
  for (const auto& t : terms_) j += t.direction * spinoc::gradient(t.profile, x).transpose();
  return j;
}

double VectorField::component(int i, const Vec3& x) const {
  double s = 0.0;
  for (const auto& t : terms_) s += t.direction[i] * value(t.profile, x);
  return s;
}

bool VectorField::is_uniform() const {
  for (const auto& t : terms_)
    if (!std::holds_alternative<ConstantProfile>(t.profile) && !t.direction.isZero(0.0)) return false;
  return true;
}

void ControlledPotential::check(const VecX& u) const {
  if (u.size() != control_dim())
    throw ConfigError("control vector has length " + std::to_string(u.size()) + ", expected " +
                      std::to_string(control_dim()));
}

double ControlledPotential::operator()(const Vec3& x, const VecX& u) const {
  check(u);
  double s = base_(x);
  for (int i = 0; i < control_dim(); ++i) s += u[i] * shapes_[static_cast<std::size_t>(i)](x);
  return s;
}

Vec3 ControlledPotential::gradient(const Vec3& x, const VecX& u) const {
  check(u);
  Vec3 g = base_.gradient(x);
  for (int i = 0; i < control_dim(); ++i) g += u[i] * shapes_[static_cast<std::size_t>(i)].gradient(x);
  return g;
}

Mat3 ControlledPotential::hessian(const Vec3& x, const VecX& u) const {
  check(u);
  Mat3 h = base_.hessian(x);
  for (int i = 0; i < control_dim(); ++i) h += u[i] * shapes_[static_cast<std::size_t>(i)].hessian(x);
  return h;
}

}  // namespace spinoc
