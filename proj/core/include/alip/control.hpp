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

#include <Eigen/Core>

#include "alip/biped.hpp"
#include "alip/pendulum.hpp"

namespace alip {

enum class Stance { kLeft, kRight };

/// Step-level command for the foot-placement controller.
struct GaitCommand {
  /// Desired angular momentum about the contact point at the end of the
  /// next step (sagittal).
  double L_des = 0.0;
  double T = 0.35;
  /// Step width for the lateral point-mass model.
  double W = 0.0;
  /// Error contraction per step; 0 is deadbeat.
  double alpha = 0.0;
  Stance next_stance = Stance::kLeft;
  /// Heading increment per step (rad).
  double delta_D = 0.0;

  void validate() const;
};

/// Planar virtual-constraint parameters. Output order is
/// (torso pitch, CoM height, swing-x to CoM, swing-z to CoM).
struct VirtualConstraintSpec {
  double H = 0.6;
  double z_cl = 0.1;
  Vector4d Kp = Vector4d::Constant(100.0);
  Vector4d Kd = Vector4d::Constant(20.0);
  /// CoM height oscillation amplitude A: z_ref = H + A·sin(2πs − π/2) + A.
  double height_amplitude = 0.0;

  void validate() const;
};

/// One-step-ahead estimate of L at the end of the current step.
double predict_L_end(const PendulumParams& params, double x_c, double L,
                     double time_remaining);

/// LIP counterpart for the horizontal CoM velocity.
double predict_v_end(const PendulumParams& params, double x_c, double v_c,
                     double time_remaining);

/// Desired CoM position relative to the swing foot at touchdown so that L at
/// the end of the next step equals L_des.
double foot_placement_deadbeat(const PendulumParams& params, double L_hat_end,
                               double L_des, double T);

/// Placement giving (L_des − L_{k+1}) = α·(L_des − L_k).
double foot_placement_asymptotic(const PendulumParams& params,
                                 double L_hat_end, double L_des, double T,
                                 double alpha);

/// Deadbeat placement that accounts for a non-zero CoM vertical velocity at
/// touchdown. `x_st` is the CoM position relative to the stance foot at
/// touchdown and `L_minus` the pre-impact L about the stance foot.
double foot_placement_vz_corrected(const PendulumParams& params,
                                   double L_minus, double x_st, double v_z,
                                   double L_des, double T);

/// Same law written for the LIP velocity state.
double foot_placement_lip(const PendulumParams& params, double v_hat_end,
                          double v_des, double T, double alpha = 0.0);

/// End-of-step lateral L^x target of a period-two LIP gait of width W;
/// positive when the next stance is the left leg.
double lateral_L_des(const PendulumParams& params, double W, double T,
                     Stance next_stance);

struct TurnUpdate {
  double heading = 0.0;
  /// (L^x, L^y) expressed in the world frame.
  Eigen::Vector2d L_des_world = Eigen::Vector2d::Zero();
};

/// Advances the heading and rotates the frame-local targets (L^x, L^y).
TurnUpdate turning_frame(double heading, double delta_D,
                         const Eigen::Vector2d& L_des_local);

/// h_d and its first two time derivatives.
struct OutputReference {
  Vector4d h = Vector4d::Zero();
  Vector4d dh = Vector4d::Zero();
  Vector4d ddh = Vector4d::Zero();
};

/// CoM height reference and its derivatives with respect to s.
Eigen::Vector3d height_profile(const VirtualConstraintSpec& spec, double s);

OutputReference virtual_constraint_reference(const VirtualConstraintSpec& spec,
                                             const GaitCommand& cmd, double s,
                                             const Vector4d& h0_start,
                                             double p_des);

/// Controlled outputs h0(q), their Jacobian and J̇·q̇.
struct OutputKinematics {
  Vector4d y0 = Vector4d::Zero();
  Eigen::Matrix<double, 4, 5> J = Eigen::Matrix<double, 4, 5>::Zero();
  Vector4d Jdot_dq = Vector4d::Zero();
};

OutputKinematics output_map(const PlanarBiped& model, const BipedState& state);

/// Torques giving ÿ + Kd·ẏ + Kp·y = 0 for y = h0(q) − h_d, treating the
/// ankle torque as a known signal.
Vector4d io_linearizing_torque(const PlanarBiped& model,
                               const BipedState& state,
                               const OutputReference& ref, const Vector4d& Kp,
                               const Vector4d& Kd, double ankle_torque = 0.0);

/// Body-joint dynamics with the passive stance angle eliminated:
/// D̄·q̈_b + H̄ = B̄·u, and C̄ = ½·d/dt(D̄) so that d/dt(D̄) = C̄ + C̄ᵀ.
struct ReducedBodyDynamics {
  Matrix4d D_bar = Matrix4d::Zero();
  Matrix4d C_bar = Matrix4d::Zero();
  Vector4d H_bar = Vector4d::Zero();
  Matrix4d B_bar = Matrix4d::Identity();
};

ReducedBodyDynamics reduced_body_dynamics(const PlanarBiped& model,
                                          const BipedState& state,
                                          double ankle_torque = 0.0);

/// Passivity-based joint tracking of the body coordinates q1..q4:
/// D̄·ÿ + (C̄ + kd)·ẏ + kp·y = 0.
Vector4d passivity_tracking_torque(const PlanarBiped& model,
                                   const BipedState& state,
                                   const Vector4d& q_r, const Vector4d& dq_r,
                                   const Vector4d& ddq_r, const Vector4d& kp,
                                   const Vector4d& kd,
                                   double ankle_torque = 0.0);

/// Finds a state with y = 0 and ẏ = 0 at phase s whose CoM sits at x_c with
/// horizontal velocity v_c. Newton iteration from `q_guess`.
BipedState state_on_constraints(const PlanarBiped& model,
                                const VirtualConstraintSpec& spec,
                                const GaitCommand& cmd, double s,
                                double swing_x_start, double p_des, double x_c,
                                double v_c, const Vector5d& q_guess);

/// Knees-forward standing posture used to seed state_on_constraints.
Vector5d nominal_posture_guess();

enum class PlacementModel { kAlip, kLip };

/// Per-rollout controller context for the five-link biped: holds the outputs
/// at the start of the current step and recomputes the foot placement
/// continuously from the measured (x_c, L) or (x_c, v_c).
class WalkingController {
 public:
  WalkingController(const PlanarBiped& model, const VirtualConstraintSpec& spec,
                    const GaitCommand& cmd,
                    PlacementModel placement = PlacementModel::kAlip);

  void begin_step(const BipedState& state, double t);
  /// Continues a step that started at t_start with outputs h0_start.
  void resume_step(double t_start, const Vector4d& h0_start);
  Vector4d torque(const BipedState& state, double t);

  /// Phase s = (t − t_start)/T, clamped to [0, 1].
  double phase(double t) const;
  double placement(const BipedState& state, double t) const;
  OutputReference reference(const BipedState& state, double t) const;

  void set_command(const GaitCommand& cmd);
  const GaitCommand& command() const { return cmd_; }
  const VirtualConstraintSpec& spec() const { return spec_; }
  const PendulumParams& pendulum() const { return pendulum_; }
  PlacementModel placement_model() const { return placement_; }
  double step_start_time() const { return t_start_; }
  double last_placement() const { return last_placement_; }
  const Vector4d& step_start_outputs() const { return h0_start_; }

 private:
  OutputReference clamped_reference(double t, double p_des) const;

  PlanarBiped model_;
  VirtualConstraintSpec spec_;
  GaitCommand cmd_;
  PlacementModel placement_;
  PendulumParams pendulum_;
  Vector4d h0_start_ = Vector4d::Zero();
  double t_start_ = 0.0;
  double last_placement_ = 0.0;
};

}  // namespace alip
