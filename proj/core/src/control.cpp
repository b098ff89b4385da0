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

#include "alip/control.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/LU>

namespace alip {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive_T(double T) {
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw ValidationError("step duration T must be positive");
  }
}

}  // namespace

void GaitCommand::validate() const {
  detail::require_finite(L_des, "L_des");
  detail::require_finite(W, "W");
  detail::require_finite(alpha, "alpha");
  detail::require_finite(delta_D, "delta_D");
  require_positive_T(T);
  if (alpha < 0.0 || alpha >= 1.0) {
    throw ValidationError("alpha must lie in [0, 1)");
  }
  if (W < 0.0) throw ValidationError("W must be non-negative");
}

void VirtualConstraintSpec::validate() const {
  detail::require_finite(H, "H");
  detail::require_finite(z_cl, "z_cl");
  detail::require_finite(height_amplitude, "height_amplitude");
  if (H <= 0.0) throw ValidationError("H must be positive");
  if (z_cl <= 0.0 || z_cl >= H) {
    throw ValidationError("z_cl must lie in (0, H)");
  }
  if ((Kp.array() <= 0.0).any() || (Kd.array() <= 0.0).any() ||
      !Kp.allFinite() || !Kd.allFinite()) {
    throw ValidationError("tracking gains Kp and Kd must be positive");
  }
  if (height_amplitude < 0.0) {
    throw ValidationError("height_amplitude must be non-negative");
  }
}

double predict_L_end(const PendulumParams& params, double x_c, double L,
                     double time_remaining) {
  if (!(time_remaining >= 0.0)) {
    throw ValidationError("time_remaining must be non-negative");
  }
  const double a = params.ell * time_remaining;
  return params.mh() * params.ell * std::sinh(a) * x_c + std::cosh(a) * L;
}

double predict_v_end(const PendulumParams& params, double x_c, double v_c,
                     double time_remaining) {
  if (!(time_remaining >= 0.0)) {
    throw ValidationError("time_remaining must be non-negative");
  }
  const double a = params.ell * time_remaining;
  return params.ell * std::sinh(a) * x_c + std::cosh(a) * v_c;
}

double foot_placement_deadbeat(const PendulumParams& params, double L_hat_end,
                               double L_des, double T) {
  return foot_placement_asymptotic(params, L_hat_end, L_des, T, 0.0);
}

double foot_placement_asymptotic(const PendulumParams& params,
                                 double L_hat_end, double L_des, double T,
                                 double alpha) {
  require_positive_T(T);
  if (alpha < 0.0 || alpha >= 1.0) {
    throw ValidationError("alpha must lie in [0, 1)");
  }
  const double a = params.ell * T;
  const double k = params.mh() * params.ell * std::sinh(a);
  return ((1.0 - alpha) * L_des + (alpha - std::cosh(a)) * L_hat_end) / k;
}

double foot_placement_vz_corrected(const PendulumParams& params,
                                   double L_minus, double x_st, double v_z,
                                   double L_des, double T) {
  require_positive_T(T);
  const double a = params.ell * T;
  const double c = std::cosh(a);
  const double k = params.mh() * params.ell * std::sinh(a);
  const double m = params.mass;
  // L_des = k·p + c·(L⁻ − m·v_z·(p − x_st)), solved for p.
  const double denom = k - m * v_z * c;
  if (std::abs(denom) < 1e-9 * std::max(1.0, k)) {
    std::ostringstream msg;
    msg << "v_z-corrected placement is singular (denominator " << denom << ")";
    throw NumericalError(msg.str());
  }
  return (L_des - c * (L_minus + m * v_z * x_st)) / denom;
}

double foot_placement_lip(const PendulumParams& params, double v_hat_end,
                          double v_des, double T, double alpha) {
  require_positive_T(T);
  if (alpha < 0.0 || alpha >= 1.0) {
    throw ValidationError("alpha must lie in [0, 1)");
  }
  const double a = params.ell * T;
  return ((1.0 - alpha) * v_des + (alpha - std::cosh(a)) * v_hat_end) /
         (params.ell * std::sinh(a));
}

double lateral_L_des(const PendulumParams& params, double W, double T,
                     Stance next_stance) {
  if (!(W >= 0.0)) throw ValidationError("W must be non-negative");
  require_positive_T(T);
  const double a = params.ell * T;
  const double magnitude = 0.5 * params.mh() * W * params.ell * std::sinh(a) /
                           (1.0 + std::cosh(a));
  return next_stance == Stance::kLeft ? magnitude : -magnitude;
}

TurnUpdate turning_frame(double heading, double delta_D,
                         const Eigen::Vector2d& L_des_local) {
  TurnUpdate out;
  out.heading = heading + delta_D;
  const double c = std::cos(out.heading);
  const double s = std::sin(out.heading);
  Eigen::Matrix2d R;
  R << c, -s, s, c;
  out.L_des_world = R * L_des_local;
  return out;
}

Eigen::Vector3d height_profile(const VirtualConstraintSpec& spec, double s) {
  const double A = spec.height_amplitude;
  const double w = 2.0 * kPi;
  return {spec.H + A * (1.0 - std::cos(w * s)), A * w * std::sin(w * s),
          A * w * w * std::cos(w * s)};
}

OutputReference virtual_constraint_reference(const VirtualConstraintSpec& spec,
                                             const GaitCommand& cmd, double s,
                                             const Vector4d& h0_start,
                                             double p_des) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw ValidationError("phase s must lie in [0, 1]");
  }
  require_positive_T(cmd.T);
  const Eigen::Vector3d z = height_profile(spec, s);
  const double a = h0_start(2);
  const double c = std::cos(kPi * s);
  const double sn = std::sin(kPi * s);
  const double zc = spec.z_cl;

  // Derivatives with respect to s first.
  Vector4d h;
  Vector4d dh;
  Vector4d ddh;
  h << 0.0, z(0), 0.5 * ((1.0 + c) * a + (1.0 - c) * p_des),
      z(0) - zc + 4.0 * zc * (s - 0.5) * (s - 0.5);
  dh << 0.0, z(1), -0.5 * kPi * sn * (a - p_des), z(1) + 8.0 * zc * (s - 0.5);
  ddh << 0.0, z(2), -0.5 * kPi * kPi * c * (a - p_des), z(2) + 8.0 * zc;

  const double rate = 1.0 / cmd.T;
  return {h, dh * rate, ddh * rate * rate};
}

OutputKinematics output_map(const PlanarBiped& model, const BipedState& state) {
  const PointKinematics c = model.com(state);
  const PointKinematics f = model.swing_foot(state);
  OutputKinematics out;
  out.y0 << state.q(0) + state.q(1) + state.q(2), c.p.y(), c.p.x() - f.p.x(),
      c.p.y() - f.p.y();
  out.J.row(0) << 1.0, 1.0, 1.0, 0.0, 0.0;
  out.J.row(1) = c.J.row(1);
  out.J.row(2) = c.J.row(0) - f.J.row(0);
  out.J.row(3) = c.J.row(1) - f.J.row(1);
  out.Jdot_dq << 0.0, c.Jdot_dq.y(), c.Jdot_dq.x() - f.Jdot_dq.x(),
      c.Jdot_dq.y() - f.Jdot_dq.y();
  return out;
}

Vector4d io_linearizing_torque(const PlanarBiped& model,
                               const BipedState& state,
                               const OutputReference& ref, const Vector4d& Kp,
                               const Vector4d& Kd, double ankle_torque) {
  const DynamicsTerms t = model.dynamics_terms(state);
  const OutputKinematics out = output_map(model, state);
  const Eigen::LLT<Matrix5d> llt(t.D);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("mass matrix is not positive definite");
  }
  const Vector5d drift = llt.solve(PlanarBiped::ankle_map() * ankle_torque -
                                   t.C * state.dq - t.G);
  const Eigen::Matrix<double, 5, 4> DinvB =
      llt.solve(PlanarBiped::torque_map());
  const Matrix4d decoupling = out.J * DinvB;

  const Vector4d y = out.y0 - ref.h;
  const Vector4d dy = out.J * state.dq - ref.dh;
  const Vector4d v = -Kp.cwiseProduct(y) - Kd.cwiseProduct(dy);
  const Vector4d rhs = v + ref.ddh - out.Jdot_dq - out.J * drift;

  const Eigen::PartialPivLU<Matrix4d> lu(decoupling);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-10)) {
    std::ostringstream msg;
    msg << "decoupling matrix is singular (rcond estimate " << rcond << ")";
    throw NumericalError(msg.str());
  }
  return lu.solve(rhs);
}

ReducedBodyDynamics reduced_body_dynamics(const PlanarBiped& model,
                                          const BipedState& state,
                                          double ankle_torque) {
  const DynamicsTerms t = model.dynamics_terms(state);
  const Matrix5d Ddot = t.C + t.C.transpose();
  const Vector5d H = t.C * state.dq + t.G -
                     PlanarBiped::ankle_map() * ankle_torque;

  const Matrix4d D11 = t.D.bottomRightCorner<4, 4>();
  const Vector4d D12 = t.D.block<4, 1>(1, 0);
  const double D22 = t.D(0, 0);
  const Matrix4d Ddot11 = Ddot.bottomRightCorner<4, 4>();
  const Vector4d Ddot12 = Ddot.block<4, 1>(1, 0);
  const double Ddot22 = Ddot(0, 0);

  ReducedBodyDynamics r;
  r.D_bar = D11 - D12 * D12.transpose() / D22;
  r.H_bar = H.tail<4>() - D12 * H(0) / D22;
  r.B_bar.setIdentity();
  const Matrix4d Dbar_dot = Ddot11 -
                            (Ddot12 * D12.transpose() +
                             D12 * Ddot12.transpose()) / D22 +
                            D12 * D12.transpose() * Ddot22 / (D22 * D22);
  r.C_bar = 0.5 * Dbar_dot;
  return r;
}

Vector4d passivity_tracking_torque(const PlanarBiped& model,
                                   const BipedState& state,
                                   const Vector4d& q_r, const Vector4d& dq_r,
                                   const Vector4d& ddq_r, const Vector4d& kp,
                                   const Vector4d& kd, double ankle_torque) {
  const ReducedBodyDynamics r =
      reduced_body_dynamics(model, state, ankle_torque);
  const Eigen::PartialPivLU<Matrix4d> lu(r.B_bar);
  if (!(lu.rcond() > 1e-12)) {
    throw NumericalError("reduced torque map B̄ is singular");
  }
  const Vector4d y = state.q.tail<4>() - q_r;
  const Vector4d dy = state.dq.tail<4>() - dq_r;
  const Vector4d feedforward = r.D_bar * ddq_r + r.H_bar;
  const Vector4d feedback = kp.cwiseProduct(y) + r.C_bar * dy +
                            kd.cwiseProduct(dy);
  return lu.solve(feedforward - feedback);
}

Vector5d nominal_posture_guess() {
  // Stance shin forward, thigh back, torso upright, swing knee bent.
  const Vector5d phi = (Vector5d() << 0.3, -0.3, 0.0, -0.2, 0.2).finished();
  return PlanarBiped::chain_matrix().inverse() * phi;
}

BipedState state_on_constraints(const PlanarBiped& model,
                                const VirtualConstraintSpec& spec,
                                const GaitCommand& cmd, double s,
                                double swing_x_start, double p_des, double x_c,
                                double v_c, const Vector5d& q_guess) {
  Vector4d h0_start = Vector4d::Zero();
  h0_start(2) = swing_x_start;
  const OutputReference ref =
      virtual_constraint_reference(spec, cmd, s, h0_start, p_des);

  Vector5d target;
  target << ref.h, x_c;
  BipedState state{q_guess, Vector5d::Zero()};
  Eigen::Matrix<double, 5, 5> M;
  for (int iter = 0; iter < 100; ++iter) {
    const OutputKinematics out = output_map(model, state);
    const PointKinematics c = model.com(state);
    Vector5d value;
    value << out.y0, c.p.x();
    const Vector5d residual = target - value;
    M << out.J, c.J.row(0);
    if (residual.norm() < 1e-13) break;
    Vector5d step = M.fullPivLu().solve(residual);
    const double n = step.norm();
    if (n > 0.3) step *= 0.3 / n;
    state.q += step;
    if (iter == 99) {
      throw NumericalError("state_on_constraints: Newton did not converge");
    }
  }
  const OutputKinematics out = output_map(model, state);
  const PointKinematics c = model.com(state);
  M << out.J, c.J.row(0);
  Vector5d rates;
  rates << ref.dh, v_c;
  const Eigen::FullPivLU<Matrix5d> lu(M);
  if (!lu.isInvertible()) {
    throw NumericalError("state_on_constraints: outputs are not independent");
  }
  state.dq = lu.solve(rates);
  return state;
}

WalkingController::WalkingController(const PlanarBiped& model,
                                     const VirtualConstraintSpec& spec,
                                     const GaitCommand& cmd,
                                     PlacementModel placement)
    : model_(model),
      spec_(spec),
      cmd_(cmd),
      placement_(placement),
      pendulum_(PendulumParams::make(model.total_mass(), spec.H,
                                     model.gravity())) {
  spec_.validate();
  cmd_.validate();
}

void WalkingController::set_command(const GaitCommand& cmd) {
  cmd.validate();
  cmd_ = cmd;
}

void WalkingController::begin_step(const BipedState& state, double t) {
  h0_start_ = output_map(model_, state).y0;
  t_start_ = t;
}

void WalkingController::resume_step(double t_start, const Vector4d& h0_start) {
  detail::require_finite(t_start, "t_start");
  if (!h0_start.allFinite()) throw ValidationError("h0_start must be finite");
  h0_start_ = h0_start;
  t_start_ = t_start;
}

double WalkingController::phase(double t) const {
  return std::clamp((t - t_start_) / cmd_.T, 0.0, 1.0);
}

double WalkingController::placement(const BipedState& state, double t) const {
  const CentroidalState c = centroidal(model_, state);
  const double remaining = cmd_.T * (1.0 - phase(t));
  if (placement_ == PlacementModel::kAlip) {
    const double L_hat = predict_L_end(pendulum_, c.p_c.x(), c.L, remaining);
    return foot_placement_asymptotic(pendulum_, L_hat, cmd_.L_des, cmd_.T,
                                     cmd_.alpha);
  }
  const double v_hat = predict_v_end(pendulum_, c.p_c.x(), c.v_c.x(), remaining);
  return foot_placement_lip(pendulum_, v_hat, cmd_.L_des / pendulum_.mh(),
                            cmd_.T, cmd_.alpha);
}

OutputReference WalkingController::reference(const BipedState& state,
                                             double t) const {
  return clamped_reference(t, placement(state, t));
}

OutputReference WalkingController::clamped_reference(double t,
                                                     double p_des) const {
  OutputReference ref = virtual_constraint_reference(spec_, cmd_, phase(t),
                                                     h0_start_, p_des);
  // Late touchdown: hold the final reference.
  if (t - t_start_ > cmd_.T) {
    ref.dh.setZero();
    ref.ddh.setZero();
  }
  return ref;
}

Vector4d WalkingController::torque(const BipedState& state, double t) {
  last_placement_ = placement(state, t);
  return io_linearizing_torque(model_, state,
                               clamped_reference(t, last_placement_),
                               spec_.Kp, spec_.Kd);
}

}  // namespace alip
