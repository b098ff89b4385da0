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

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "alip/pendulum.hpp"

namespace alip {

/// A scalar signal sampled at strictly increasing times.
struct SampledSignal {
  std::vector<double> t;
  std::vector<double> value;

  void validate() const;
  double at(double time) const;
};

/// Prediction-error terms accumulated over [t1, t2], in m/s.
struct ErrorDecomp {
  double e1 = 0.0;
  double e2 = 0.0;
  double e3 = 0.0;
};

/// e1 (LIP velocity error), e2 (ALIP error, L_e/mH) and e3 from stored
/// L_c(t) and L̇_c(t) traces. The traces must share one time grid covering
/// [t1, t2]; integrals use the cubic Hermite interpolant built from both
/// traces and three-point Gauss-Legendre per sample interval.
ErrorDecomp error_terms(const SampledSignal& Lc, const SampledSignal& dLc,
                        const PendulumParams& params, double t1, double t2);

enum class ModelKind { kLip, kAlip };

/// Magnitude of the transfer function from L_c/(mH) to the prediction error
/// at s = jω: ALIP ℓ²/(ω²+ℓ²) (low-pass), LIP ω²/(ω²+ℓ²) (high-pass).
double error_transfer_magnitude(ModelKind kind, double omega,
                                const PendulumParams& params);

struct PoincareResult {
  Eigen::VectorXd fixed_point;
  Eigen::MatrixXd jacobian;
  Eigen::VectorXcd eigenvalues;
  double spectral_radius = 0.0;
  int steps_per_return = 1;
};

/// Closed-loop ALIP return map on the post-impact section:
/// z⁺ = A_cl·z + b·L_des with z = (x_c, L).
struct AlipReturnMap {
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  Eigen::Vector2d b = Eigen::Vector2d::Zero();
};

AlipReturnMap alip_return_map(const PendulumParams& params, double T,
                              double alpha);

PoincareResult alip_closed_loop_poincare(const PendulumParams& params,
                                         double T, double alpha, double L_des,
                                         int steps_per_return = 1);

using ReturnMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct FixedPointResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double residual = 0.0;
};

/// Damped iteration x ← x + β·(F(x) − x). Throws NumericalError with the
/// last residual if the tolerance is not met within max_iterations.
FixedPointResult find_fixed_point(const ReturnMap& map, Eigen::VectorXd x0,
                                  double tolerance = 1e-8,
                                  int max_iterations = 200,
                                  double damping = 1.0);

/// Symmetric-difference Jacobian (F(x*+δeᵢ) − F(x*−δeᵢ))/(2δ) and its
/// spectrum.
PoincareResult numeric_poincare_jacobian(const ReturnMap& map,
                                         const Eigen::VectorXd& x_star,
                                         double delta,
                                         int steps_per_return = 1);

std::vector<PoincareResult> numeric_poincare_jacobian(
    const ReturnMap& map, const Eigen::VectorXd& x_star,
    std::span<const double> deltas, int steps_per_return = 1);

/// One in-step sample used by the prediction analyses.
struct StepSample {
  double tau = 0.0;
  double x_c = 0.0;
  double L = 0.0;
  double v_c = 0.0;
};

/// Samples of one step, τ increasing, last sample just before impact.
using StepSamples = std::vector<StepSample>;

struct Flatness {
  double L = 0.0;  ///< RMS of (L̂_end − L_end)/(mH), m/s
  double v = 0.0;  ///< RMS of (v̂_end − v_end), m/s
};

/// How flat the running end-of-step predictions are. Each sample predicts
/// the value at the step's last sample with the ALIP (for L) and LIP (for
/// v_c) closed forms; a model-consistent trace gives zero.
Flatness prediction_fidelity(std::span<const StepSamples> steps,
                             const PendulumParams& params);

/// CoM height profile of one step as a function of τ: (z, ż).
using HeightProfile = std::function<Eigen::Vector2d(double tau)>;

/// L-branch flatness when the CoM height follows a known profile; the
/// prediction integrates ẋ = L/(m z) + (ż/z)·x, L̇ = m·g·x numerically.
double varying_height_prediction(std::span<const StepSamples> steps,
                                 const PendulumParams& params,
                                 const HeightProfile& profile,
                                 double rk4_step = 2e-4);

}  // namespace alip
