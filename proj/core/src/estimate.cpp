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

#include "alip/estimate.hpp"

#include <cmath>
#include <random>

#include "alip/control.hpp"

namespace alip {

void KalmanState::validate() const {
  detail::require_finite(L_hat, "L_hat");
  detail::require_finite(P, "P");
  detail::require_finite(Q, "Q");
  detail::require_finite(R_meas, "R_meas");
  detail::require_finite(dt, "dt");
  if (P < 0.0) throw ValidationError("P must be non-negative");
  if (Q < 0.0) throw ValidationError("Q must be non-negative");
  if (R_meas <= 0.0) throw ValidationError("R_meas must be positive");
  if (dt <= 0.0) throw ValidationError("dt must be positive");
}

KalmanState kf_predict(const KalmanState& ks, double x_c, double ankle_torque,
                       const PendulumParams& params) {
  KalmanState next = ks;
  next.L_hat += (params.mass * params.gravity * x_c + ankle_torque) * ks.dt;
  next.P += ks.Q;
  return next;
}

KalmanState kf_correct(const KalmanState& ks, double L_obs) {
  KalmanState next = ks;
  const double K = ks.P / (ks.P + ks.R_meas);
  next.L_hat = (1.0 - K) * ks.L_hat + K * L_obs;
  next.P = (1.0 - K) * ks.P;
  return next;
}

double steady_state_variance(double Q, double R_meas) {
  // P² + Q·P − Q·R = 0, positive root.
  return 0.5 * (-Q + std::sqrt(Q * Q + 4.0 * Q * R_meas));
}

std::vector<KalmanDemoRow> kalman_demo(const PendulumParams& params,
                                       const KalmanState& initial,
                                       const KalmanDemoConfig& cfg) {
  initial.validate();
  if (!(cfg.sigma >= 0.0)) throw ValidationError("sigma must be non-negative");
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  std::vector<KalmanDemoRow> rows;
  rows.reserve(cfg.samples);
  KalmanState ks = initial;
  AlipState truth = cfg.start;
  truth.tau = 0.0;
  const double dt = initial.dt;
  double t = 0.0;
  for (std::size_t k = 0; k < cfg.samples; ++k) {
    if (truth.tau + 0.5 * dt >= cfg.T) {
      const double L_hat_end = predict_L_end(params, truth.x_c, truth.L, 0.0);
      const double p = foot_placement_deadbeat(params, L_hat_end, cfg.L_des, cfg.T);
      truth = {p, truth.L, 0.0};
    }
    truth = alip_transition(params, truth, dt);
    t += dt;
    const double L_obs = truth.L + cfg.sigma * noise(rng);
    ks = kf_correct(kf_predict(ks, truth.x_c, 0.0, params), L_obs);
    rows.push_back({t, truth.L, L_obs, ks.L_hat});
  }
  return rows;
}

}  // namespace alip
