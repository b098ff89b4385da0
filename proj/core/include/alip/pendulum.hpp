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

#pragma once

#include <optional>

#include <Eigen/Core>

#include "alip/errors.hpp"

namespace alip {

inline constexpr double kStandardGravity = 9.81;

/// Point-mass pendulum parameters. `ell` caches sqrt(g/H) and is rechecked
/// by validate() so a hand-edited instance cannot drift out of sync.
struct PendulumParams {
  double mass = 32.0;
  double height = 0.6;
  double gravity = kStandardGravity;
  double ell = 0.0;

  static PendulumParams make(double mass, double height,
                             double gravity = kStandardGravity);

  void validate() const;
  double mh() const { return mass * height; }
};

/// (x_c, L) with the in-step clock. x_c is measured from the contact point.
struct AlipState {
  double x_c = 0.0;
  double L = 0.0;
  double tau = 0.0;

  Eigen::Vector2d vec() const { return {x_c, L}; }
};

struct LipState {
  double x_c = 0.0;
  double v_c = 0.0;
  double tau = 0.0;

  Eigen::Vector2d vec() const { return {x_c, v_c}; }
};

/// Constant-length pendulum in polar form; theta is the CoM angle from vertical.
struct PolarPendulumState {
  double theta = 0.0;
  double L = 0.0;
  double R = 1.0;
};

struct AlipRates {
  double dx_c = 0.0;
  double dL = 0.0;
};

struct PolarRates {
  double dtheta = 0.0;
  double dL = 0.0;
};

// Planar vectors are stored as (x, z).
//
// a ∧ b is the y-component of (a_x, 0, a_z) × (b_x, 0, b_z), i.e.
// a_z·b_x − a_x·b_z. With this sign a CoM above the contact point moving
// forward has positive angular momentum, and gravity contributes +m·g·x_c.
double wedge(const Eigen::Vector2d& a, const Eigen::Vector2d& b);

AlipRates alip_derivative(const PendulumParams& params, const AlipState& s,
                          double ankle_torque = 0.0);

/// State-transition matrix of the torque-free ALIP over `dt`.
Eigen::Matrix2d alip_transition_matrix(const PendulumParams& params, double dt);
Eigen::Matrix2d lip_transition_matrix(const PendulumParams& params, double dt);

/// Exact zero-ankle-torque propagation. Throws ValidationError for dt < 0.
AlipState alip_transition(const PendulumParams& params, const AlipState& s,
                          double dt);
LipState lip_transition(const PendulumParams& params, const LipState& s,
                        double dt);

/// Constant-length pendulum with L_c dropped. When `linear_gain` is set the
/// gravity term uses K·θ in place of sin θ.
PolarRates polar_derivative(const PendulumParams& params,
                            const PolarPendulumState& s,
                            double ankle_torque = 0.0,
                            std::optional<double> linear_gain = std::nullopt);

/// Gain K making the mean of K·θ − sin θ over [0, theta_max] vanish.
double mean_matching_linear_gain(double theta_max);

/// Angular momentum about point 2 given its value about point 1.
/// `p_2to1` points from point 2 to point 1.
double transfer_angular_momentum(double L1, const Eigen::Vector2d& p_2to1,
                                 const Eigen::Vector2d& v_c, double mass);

/// Reset across a level-ground impact. p_sw_x and p_st_x are the horizontal
/// CoM positions relative to the swing (new) and stance (old) feet just
/// before impact; v_z is the CoM vertical velocity at that instant.
AlipState alip_reset(const AlipState& s_minus, double p_sw_x, double p_st_x,
                     double v_z, double mass);

}  // namespace alip
