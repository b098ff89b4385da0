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

#include <array>
#include <string>

#include <Eigen/Core>

#include "alip/errors.hpp"
#include "alip/pendulum.hpp"

namespace alip {

using Vector4d = Eigen::Matrix<double, 4, 1>;
using Vector5d = Eigen::Matrix<double, 5, 1>;
using Vector10d = Eigen::Matrix<double, 10, 1>;
using Matrix4d = Eigen::Matrix<double, 4, 4>;
using Matrix5d = Eigen::Matrix<double, 5, 5>;
using Matrix25d = Eigen::Matrix<double, 2, 5>;
using Matrix54d = Eigen::Matrix<double, 5, 4>;

struct LinkParams {
  double mass = 0.0;
  double length = 0.0;
  /// Distance from the proximal joint to the link CoM along the link.
  double com_offset = 0.0;
  /// Inertia about the link CoM.
  double inertia = 0.0;

  void validate(const std::string& name) const;
};

enum class Link : int {
  kTorso = 0,
  kStanceThigh = 1,
  kStanceShin = 2,
  kSwingThigh = 3,
  kSwingShin = 4,
};

/// Generalized coordinates of the pinned model:
///   q0 = stance shin angle from vertical (absolute, cyclic),
///   q1 = stance knee, q2 = stance hip (torso relative to stance thigh),
///   q3 = swing hip (swing thigh relative to torso), q4 = swing knee.
/// Every leg link angle is the direction of the link pointing away from the
/// foot, measured clockwise from vertical, so +angle leans toward +x.
struct BipedState {
  Vector5d q = Vector5d::Zero();
  Vector5d dq = Vector5d::Zero();

  Vector10d vec() const;
  static BipedState from_vec(const Vector10d& x);
};

/// CoM quantities relative to the stance contact point.
struct CentroidalState {
  Eigen::Vector2d p_c = Eigen::Vector2d::Zero();
  Eigen::Vector2d v_c = Eigen::Vector2d::Zero();
  double L = 0.0;
  double L_c = 0.0;
};

/// Position, Jacobian in q, and the velocity-product term J̇·q̇ of a point.
struct PointKinematics {
  Eigen::Vector2d p = Eigen::Vector2d::Zero();
  Matrix25d J = Matrix25d::Zero();
  Eigen::Vector2d Jdot_dq = Eigen::Vector2d::Zero();

  Eigen::Vector2d velocity(const Vector5d& dq) const { return J * dq; }
};

/// D(q_b), the Coriolis matrix C(q, q̇) with Ḋ = C + Cᵀ, and G(q).
struct DynamicsTerms {
  Matrix5d D = Matrix5d::Zero();
  Matrix5d C = Matrix5d::Zero();
  Vector5d G = Vector5d::Zero();
};

struct ImpactResult {
  BipedState post;
  /// Impulse applied by the ground at the new contact (x, z).
  Eigen::Vector2d impulse = Eigen::Vector2d::Zero();
  /// Old stance-foot velocity right after impact, before relabeling.
  Eigen::Vector2d trailing_foot_velocity = Eigen::Vector2d::Zero();
};

/// Five-link planar biped pinned at the stance foot: torso, two thighs, two
/// shins, four actuated body joints and an optional stance-ankle torque.
class PlanarBiped {
 public:
  static constexpr int kDof = 5;
  static constexpr int kActuators = 4;

  explicit PlanarBiped(const std::array<LinkParams, 5>& links,
                       double gravity = kStandardGravity);

  /// 32 kg: torso 12 kg, thighs 6.8 kg, shins 3.2 kg; thigh and shin 0.4 m,
  /// torso 0.625 m, CoM at mid-link, slender-rod inertias.
  static PlanarBiped default_model();

  const std::array<LinkParams, 5>& links() const { return links_; }
  const LinkParams& link(Link which) const {
    return links_[static_cast<int>(which)];
  }
  double gravity() const { return gravity_; }
  double total_mass() const { return total_mass_; }
  bool symmetric() const;

  /// B = [0; I₄] and B_a = e₀ in the coordinates above.
  static Matrix54d torque_map();
  static Vector5d ankle_map();

  /// Absolute angles in chain order (stance shin, stance thigh, torso,
  /// swing thigh, swing shin); φ = A·q.
  static Vector5d absolute_angles(const Vector5d& q);
  static const Matrix5d& chain_matrix();

  /// Swaps stance and swing legs. Linear and involutive.
  static const Matrix5d& relabel_matrix();
  static BipedState relabel(const BipedState& state);

  Matrix5d mass_matrix(const Vector5d& q) const;
  DynamicsTerms dynamics_terms(const BipedState& state) const;

  PointKinematics com(const BipedState& state) const;
  PointKinematics hip(const BipedState& state) const;
  PointKinematics swing_foot(const BipedState& state) const;
  PointKinematics link_com(Link which, const BipedState& state) const;

  double kinetic_energy(const BipedState& state) const;
  double potential_energy(const BipedState& state) const;

  /// Row r with L = r·q̇ (angular momentum about the stance contact).
  Eigen::Matrix<double, 1, 5> angular_momentum_row(const Vector5d& q) const;
  /// Angular momentum about an arbitrary point, by summing over links.
  double angular_momentum_about(const BipedState& state,
                                const Eigen::Vector2d& point) const;

 private:
  PointKinematics point(const Vector5d& coeffs, const BipedState& state) const;
  static int absolute_index(Link which);

  std::array<LinkParams, 5> links_;
  double gravity_;
  double total_mass_ = 0.0;
  // Row i: coefficients of link i's CoM on the unit vectors u(φ_k).
  Eigen::Matrix<double, 5, 5> com_coeffs_;
  Vector5d hip_coeffs_;
  Vector5d swing_foot_coeffs_;
  // Σ_i m_i c_ij c_ik and Σ_i m_i c_ik.
  Matrix5d mass_products_;
  Vector5d mass_moments_;
  Vector5d link_inertia_by_angle_;
};

/// q̈ = D⁻¹(B·u + B_a·u_a − C·q̇ − G).
Vector5d forward_dynamics(const PlanarBiped& model, const BipedState& state,
                          const Vector4d& u, double ankle_torque = 0.0);

CentroidalState centroidal(const PlanarBiped& model, const BipedState& state);

/// Rigid plastic impact of the swing foot followed by leg relabeling.
ImpactResult impact(const PlanarBiped& model, const BipedState& state_minus);
BipedState impact_map(const PlanarBiped& model, const BipedState& state_minus);

/// Swing foot at or below ground and moving down.
bool guard(const PlanarBiped& model, const BipedState& state);

}  // namespace alip
