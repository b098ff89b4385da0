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

#include <cstdint>
#include <vector>

#include "alip/pendulum.hpp"

namespace alip {

/// Scalar filter for L with A = B = C = 1 and u = (m·g·x_c + u_a)·dt.
struct KalmanState {
  double L_hat = 0.0;
  double P = 1.0;
  double Q = 1e-4;
  double R_meas = 1e-1;
  double dt = 1e-3;

  void validate() const;
};

KalmanState kf_predict(const KalmanState& ks, double x_c, double ankle_torque,
                       const PendulumParams& params);

KalmanState kf_correct(const KalmanState& ks, double L_obs);

/// Posterior variance at the fixed point of predict+correct:
/// P* = (P* + Q)·R / (P* + Q + R).
double steady_state_variance(double Q, double R_meas);

struct KalmanDemoRow {
  double t = 0.0;
  double L_true = 0.0;
  double L_obs = 0.0;
  double L_hat = 0.0;
};

struct KalmanDemoConfig {
  double L_des = 0.0;
  double T = 0.35;
  double sigma = 0.5;
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  AlipState start{};
};

/// Walks the ALIP with deadbeat placement, observes L with white Gaussian
/// noise of standard deviation sigma and filters it.
std::vector<KalmanDemoRow> kalman_demo(const PendulumParams& params,
                                       const KalmanState& initial,
                                       const KalmanDemoConfig& cfg);

}  // namespace alip
