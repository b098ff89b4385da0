// Copyright 2026 The alip Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "alip/pendulum.hpp"

#include <cmath>
#include <string>

namespace alip {

namespace detail {
void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw ValidationError(std::string(what) + " must be finite");
  }
}
}  // namespace detail

using detail::require_finite;

PendulumParams PendulumParams::make(double mass, double height,
                                    double gravity) {
  PendulumParams p;
  p.mass = mass;
  p.height = height;
  p.gravity = gravity;
  p.ell = std::sqrt(gravity / height);
  p.validate();
  return p;
}

void PendulumParams::validate() const {
  require_finite(mass, "mass");
  require_finite(height, "height");
  require_finite(gravity, "gravity");
  if (mass <= 0.0) throw ValidationError("mass must be positive");
  if (height <= 0.0) throw ValidationError("height must be positive");
  if (gravity <= 0.0) throw ValidationError("gravity must be positive");
  const double expected = std::sqrt(gravity / height);
  if (!(std::abs(ell - expected) <= 4.0 * 2.22e-16 * expected)) {
    throw ValidationError("ell is inconsistent with sqrt(gravity/height)");
  }
}

double wedge(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.y() * b.x() - a.x() * b.y();
}

AlipRates alip_derivative(const PendulumParams& params, const AlipState& s,
                          double ankle_torque) {
  require_finite(s.x_c, "x_c");
  require_finite(s.L, "L");
  require_finite(ankle_torque, "ankle torque");
  return {s.L / params.mh(), params.mass * params.gravity * s.x_c + ankle_torque};
}

Eigen::Matrix2d alip_transition_matrix(const PendulumParams& params,
                                       double dt) {
  if (!(dt >= 0.0)) throw ValidationError("dt must be non-negative");
  const double c = std::cosh(params.ell * dt);
  const double sh = std::sinh(params.ell * dt);
  const double k = params.mh() * params.ell;
  Eigen::Matrix2d A;
  A << c, sh / k, k * sh, c;
  return A;
}

Eigen::Matrix2d lip_transition_matrix(const PendulumParams& params,
                                      double dt) {
  if (!(dt >= 0.0)) throw ValidationError("dt must be non-negative");
  const double c = std::cosh(params.ell * dt);
  const double sh = std::sinh(params.ell * dt);
  Eigen::Matrix2d A;
  A << c, sh / params.ell, params.ell * sh, c;
  return A;
}

AlipState alip_transition(const PendulumParams& params, const AlipState& s,
                          double dt) {
  const Eigen::Vector2d next = alip_transition_matrix(params, dt) * s.vec();
  return {next(0), next(1), s.tau + dt};
}

LipState lip_transition(const PendulumParams& params, const LipState& s,
                        double dt) {
  const Eigen::Vector2d next = lip_transition_matrix(params, dt) * s.vec();
  return {next(0), next(1), s.tau + dt};
}

PolarRates polar_derivative(const PendulumParams& params,
                            const PolarPendulumState& s, double ankle_torque,
                            std::optional<double> linear_gain) {
  require_finite(s.theta, "theta");
  require_finite(s.L, "L");
  require_finite(ankle_torque, "ankle torque");
  if (!(s.R > 0.0)) throw ValidationError("pendulum length R must be positive");
  const double m = params.mass;
  const double shape = linear_gain ? *linear_gain * s.theta : std::sin(s.theta);
  return {s.L / (m * s.R * s.R), m * params.gravity * s.R * shape + ankle_torque};
}

double mean_matching_linear_gain(double theta_max) {
  if (!(theta_max > 0.0)) throw ValidationError("theta_max must be positive");
  // ∫ K·θ = K·θm²/2 and ∫ sin θ = 1 − cos θm.
  return (1.0 - std::cos(theta_max)) / (0.5 * theta_max * theta_max);
}

double transfer_angular_momentum(double L1, const Eigen::Vector2d& p_2to1,
                                 const Eigen::Vector2d& v_c, double mass) {
  return L1 + mass * wedge(p_2to1, v_c);
}

AlipState alip_reset(const AlipState& s_minus, double p_sw_x, double p_st_x,
                     double v_z, double mass) {
  // Old contact relative to new contact is (p_sw_x − p_st_x, 0); the wedge
  // with (v_x, v_z) leaves −(p_sw_x − p_st_x)·v_z.
  return {p_sw_x, s_minus.L - mass * v_z * (p_sw_x - p_st_x), 0.0};
}

}  // namespace alip
