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

#include "alip/biped.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/LU>

namespace alip {

namespace {

constexpr int kStanceShinAngle = 0;
constexpr int kStanceThighAngle = 1;
constexpr int kTorsoAngle = 2;
constexpr int kSwingThighAngle = 3;
constexpr int kSwingShinAngle = 4;

Matrix5d make_chain_matrix() {
  Matrix5d A = Matrix5d::Zero();
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j <= i; ++j) A(i, j) = 1.0;
  }
  return A;
}

Matrix5d make_relabel_matrix() {
  const Matrix5d A = make_chain_matrix();
  // Chain order reversed: stance shin <-> swing shin, stance thigh <-> swing
  // thigh, torso fixed.
  Matrix5d R = Matrix5d::Zero();
  for (int i = 0; i < 5; ++i) R(i, 4 - i) = 1.0;
  return A.inverse() * R * A;
}

}  // namespace

void LinkParams::validate(const std::string& name) const {
  detail::require_finite(mass, "link mass");
  detail::require_finite(length, "link length");
  detail::require_finite(com_offset, "link com_offset");
  detail::require_finite(inertia, "link inertia");
  if (mass < 0.0) throw ValidationError(name + ".mass must be >= 0");
  if (length <= 0.0) throw ValidationError(name + ".length must be > 0");
  if (com_offset < 0.0 || com_offset > length) {
    throw ValidationError(name + ".com_offset must lie in [0, length]");
  }
  if (inertia < 0.0) throw ValidationError(name + ".inertia must be >= 0");
}

Vector10d BipedState::vec() const {
  Vector10d x;
  x << q, dq;
  return x;
}

BipedState BipedState::from_vec(const Vector10d& x) {
  return {x.head<5>(), x.tail<5>()};
}

PlanarBiped::PlanarBiped(const std::array<LinkParams, 5>& links,
                         double gravity)
    : links_(links), gravity_(gravity) {
  static const char* kNames[] = {"torso", "stance_thigh", "stance_shin",
                                 "swing_thigh", "swing_shin"};
  for (int i = 0; i < 5; ++i) links_[i].validate(kNames[i]);
  detail::require_finite(gravity, "gravity");
  if (gravity < 0.0) throw ValidationError("gravity must be >= 0");

  const LinkParams& torso = link(Link::kTorso);
  const LinkParams& st_thigh = link(Link::kStanceThigh);
  const LinkParams& st_shin = link(Link::kStanceShin);
  const LinkParams& sw_thigh = link(Link::kSwingThigh);
  const LinkParams& sw_shin = link(Link::kSwingShin);

  hip_coeffs_ << st_shin.length, st_thigh.length, 0.0, 0.0, 0.0;
  swing_foot_coeffs_ = hip_coeffs_;
  swing_foot_coeffs_(kSwingThighAngle) = -sw_thigh.length;
  swing_foot_coeffs_(kSwingShinAngle) = -sw_shin.length;

  com_coeffs_.setZero();
  auto row = [&](Link which) {
    return com_coeffs_.row(static_cast<int>(which));
  };
  row(Link::kStanceShin)(kStanceShinAngle) = st_shin.length - st_shin.com_offset;
  row(Link::kStanceThigh)(kStanceShinAngle) = st_shin.length;
  row(Link::kStanceThigh)(kStanceThighAngle) =
      st_thigh.length - st_thigh.com_offset;
  row(Link::kTorso) = hip_coeffs_.transpose();
  row(Link::kTorso)(kTorsoAngle) = torso.com_offset;
  row(Link::kSwingThigh) = hip_coeffs_.transpose();
  row(Link::kSwingThigh)(kSwingThighAngle) = -sw_thigh.com_offset;
  row(Link::kSwingShin) = hip_coeffs_.transpose();
  row(Link::kSwingShin)(kSwingThighAngle) = -sw_thigh.length;
  row(Link::kSwingShin)(kSwingShinAngle) = -sw_shin.com_offset;

  mass_products_.setZero();
  mass_moments_.setZero();
  link_inertia_by_angle_.setZero();
  total_mass_ = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double m = links_[i].mass;
    const Vector5d c = com_coeffs_.row(i).transpose();
    mass_products_ += m * c * c.transpose();
    mass_moments_ += m * c;
    link_inertia_by_angle_(absolute_index(static_cast<Link>(i))) +=
        links_[i].inertia;
    total_mass_ += m;
  }
  if (!(total_mass_ > 0.0)) throw ValidationError("total mass must be positive");
}

PlanarBiped PlanarBiped::default_model() {
  auto rod = [](double mass, double length) {
    return LinkParams{mass, length, 0.5 * length, mass * length * length / 12.0};
  };
  const LinkParams torso = rod(12.0, 0.625);
  const LinkParams thigh = rod(6.8, 0.4);
  const LinkParams shin = rod(3.2, 0.4);
  return PlanarBiped({torso, thigh, shin, thigh, shin});
}

bool PlanarBiped::symmetric() const {
  auto same = [](const LinkParams& a, const LinkParams& b) {
    return a.mass == b.mass && a.length == b.length &&
           a.com_offset == b.com_offset && a.inertia == b.inertia;
  };
  return same(link(Link::kStanceThigh), link(Link::kSwingThigh)) &&
         same(link(Link::kStanceShin), link(Link::kSwingShin));
}

int PlanarBiped::absolute_index(Link which) {
  switch (which) {
    case Link::kTorso: return kTorsoAngle;
    case Link::kStanceThigh: return kStanceThighAngle;
    case Link::kStanceShin: return kStanceShinAngle;
    case Link::kSwingThigh: return kSwingThighAngle;
    case Link::kSwingShin: return kSwingShinAngle;
  }
  return 0;
}

Matrix54d PlanarBiped::torque_map() {
  Matrix54d B = Matrix54d::Zero();
  B.bottomRows<4>().setIdentity();
  return B;
}

Vector5d PlanarBiped::ankle_map() { return Vector5d::Unit(0); }

const Matrix5d& PlanarBiped::chain_matrix() {
  static const Matrix5d A = make_chain_matrix();
  return A;
}

const Matrix5d& PlanarBiped::relabel_matrix() {
  static const Matrix5d R = make_relabel_matrix();
  return R;
}

Vector5d PlanarBiped::absolute_angles(const Vector5d& q) {
  return chain_matrix() * q;
}

BipedState PlanarBiped::relabel(const BipedState& state) {
  const Matrix5d& R = relabel_matrix();
  return {R * state.q, R * state.dq};
}

Matrix5d PlanarBiped::mass_matrix(const Vector5d& q) const {
  const Vector5d phi = absolute_angles(q);
  Matrix5d Dphi;
  for (int j = 0; j < 5; ++j) {
    for (int k = 0; k < 5; ++k) {
      Dphi(j, k) = mass_products_(j, k) * std::cos(phi(j) - phi(k));
    }
  }
  Dphi.diagonal() += link_inertia_by_angle_;
  const Matrix5d& A = chain_matrix();
  return A.transpose() * Dphi * A;
}

DynamicsTerms PlanarBiped::dynamics_terms(const BipedState& state) const {
  const Vector5d phi = absolute_angles(state.q);
  const Vector5d dphi = chain_matrix() * state.dq;
  Matrix5d Dphi;
  Matrix5d Cphi;
  for (int j = 0; j < 5; ++j) {
    for (int k = 0; k < 5; ++k) {
      const double d = phi(j) - phi(k);
      Dphi(j, k) = mass_products_(j, k) * std::cos(d);
      Cphi(j, k) = mass_products_(j, k) * std::sin(d) * dphi(k);
    }
  }
  Dphi.diagonal() += link_inertia_by_angle_;
  Vector5d Gphi;
  for (int k = 0; k < 5; ++k) {
    Gphi(k) = -gravity_ * mass_moments_(k) * std::sin(phi(k));
  }
  const Matrix5d& A = chain_matrix();
  DynamicsTerms terms;
  terms.D = A.transpose() * Dphi * A;
  terms.C = A.transpose() * Cphi * A;
  terms.G = A.transpose() * Gphi;
  return terms;
}

PointKinematics PlanarBiped::point(const Vector5d& coeffs,
                                   const BipedState& state) const {
  const Vector5d phi = absolute_angles(state.q);
  const Vector5d dphi = chain_matrix() * state.dq;
  PointKinematics pk;
  Matrix25d Jphi;
  for (int k = 0; k < 5; ++k) {
    const double s = std::sin(phi(k));
    const double c = std::cos(phi(k));
    pk.p += coeffs(k) * Eigen::Vector2d(s, c);
    Jphi.col(k) = coeffs(k) * Eigen::Vector2d(c, -s);
    pk.Jdot_dq -= coeffs(k) * dphi(k) * dphi(k) * Eigen::Vector2d(s, c);
  }
  pk.J = Jphi * chain_matrix();
  return pk;
}

PointKinematics PlanarBiped::com(const BipedState& state) const {
  return point(mass_moments_ / total_mass_, state);
}

PointKinematics PlanarBiped::hip(const BipedState& state) const {
  return point(hip_coeffs_, state);
}

PointKinematics PlanarBiped::swing_foot(const BipedState& state) const {
  return point(swing_foot_coeffs_, state);
}

PointKinematics PlanarBiped::link_com(Link which,
                                      const BipedState& state) const {
  return point(com_coeffs_.row(static_cast<int>(which)).transpose(), state);
}

double PlanarBiped::kinetic_energy(const BipedState& state) const {
  return 0.5 * state.dq.dot(mass_matrix(state.q) * state.dq);
}

double PlanarBiped::potential_energy(const BipedState& state) const {
  const Vector5d phi = absolute_angles(state.q);
  double v = 0.0;
  for (int k = 0; k < 5; ++k) v += mass_moments_(k) * std::cos(phi(k));
  return gravity_ * v;
}

Eigen::Matrix<double, 1, 5> PlanarBiped::angular_momentum_row(
    const Vector5d& q) const {
  // L is the momentum conjugate to the cyclic coordinate q0.
  return mass_matrix(q).row(0);
}

double PlanarBiped::angular_momentum_about(const BipedState& state,
                                           const Eigen::Vector2d& point) const {
  const Vector5d dphi = chain_matrix() * state.dq;
  double L = 0.0;
  for (int i = 0; i < 5; ++i) {
    const Link which = static_cast<Link>(i);
    const PointKinematics pk = link_com(which, state);
    L += links_[i].mass * wedge(pk.p - point, pk.velocity(state.dq)) +
         links_[i].inertia * dphi(absolute_index(which));
  }
  return L;
}

Vector5d forward_dynamics(const PlanarBiped& model, const BipedState& state,
                          const Vector4d& u, double ankle_torque) {
  const DynamicsTerms t = model.dynamics_terms(state);
  const Vector5d rhs = PlanarBiped::torque_map() * u +
                       PlanarBiped::ankle_map() * ankle_torque -
                       t.C * state.dq - t.G;
  const Eigen::LLT<Matrix5d> llt(t.D);
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-13) {
    std::ostringstream msg;
    msg << "mass matrix is singular (rcond estimate " << llt.rcond() << ")";
    throw NumericalError(msg.str());
  }
  return llt.solve(rhs);
}

CentroidalState centroidal(const PlanarBiped& model, const BipedState& state) {
  const double m = model.total_mass();
  CentroidalState out;
  std::array<Eigen::Vector2d, 5> p;
  std::array<Eigen::Vector2d, 5> v;
  for (int i = 0; i < 5; ++i) {
    const PointKinematics pk = model.link_com(static_cast<Link>(i), state);
    p[i] = pk.p;
    v[i] = pk.velocity(state.dq);
    const double mi = model.links()[i].mass;
    out.p_c += mi * p[i] / m;
    out.v_c += mi * v[i] / m;
  }
  const Vector5d dphi = PlanarBiped::chain_matrix() * state.dq;
  // Link rotation rates in Link order.
  const std::array<double, 5> omega = {dphi(2), dphi(1), dphi(0), dphi(3),
                                       dphi(4)};
  for (int i = 0; i < 5; ++i) {
    const LinkParams& lp = model.links()[i];
    const double spin = lp.inertia * omega[i];
    out.L += lp.mass * wedge(p[i], v[i]) + spin;
    out.L_c += lp.mass * wedge(p[i] - out.p_c, v[i] - out.v_c) + spin;
  }
  return out;
}

ImpactResult impact(const PlanarBiped& model, const BipedState& state_minus) {
  if (!model.symmetric()) {
    throw ValidationError("impact relabeling requires identical legs");
  }
  const double m = model.total_mass();
  const Matrix5d D = model.mass_matrix(state_minus.q);
  const PointKinematics c = model.com(state_minus);
  const PointKinematics foot = model.swing_foot(state_minus);

  // Floating-base coordinates (q, stance-foot position); unknowns are the
  // post-impact velocities and the contact impulse at the swing foot.
  Eigen::Matrix<double, 9, 9> K = Eigen::Matrix<double, 9, 9>::Zero();
  K.topLeftCorner<5, 5>() = D;
  K.block<5, 2>(0, 5) = m * c.J.transpose();
  K.block<2, 5>(5, 0) = m * c.J;
  K.block<2, 2>(5, 5) = m * Eigen::Matrix2d::Identity();
  K.block<5, 2>(0, 7) = -foot.J.transpose();
  K.block<2, 2>(5, 7) = -Eigen::Matrix2d::Identity();
  K.block<2, 5>(7, 0) = foot.J;
  K.block<2, 2>(7, 5) = Eigen::Matrix2d::Identity();

  Eigen::Matrix<double, 9, 1> rhs = Eigen::Matrix<double, 9, 1>::Zero();
  rhs.head<5>() = D * state_minus.dq;
  rhs.segment<2>(5) = m * c.J * state_minus.dq;

  const Eigen::FullPivLU<Eigen::Matrix<double, 9, 9>> lu(K);
  if (!lu.isInvertible()) {
    throw NumericalError("impact system is singular");
  }
  const Eigen::Matrix<double, 9, 1> sol = lu.solve(rhs);

  ImpactResult out;
  out.impulse = sol.segment<2>(7);
  out.trailing_foot_velocity = sol.segment<2>(5);
  const double scale = std::max(1.0, out.impulse.norm());
  if (out.impulse.y() < -1e-12 * scale) {
    std::ostringstream msg;
    msg << "infeasible impact: vertical impulse " << out.impulse.y() << " < 0";
    throw NumericalError(msg.str());
  }
  out.post = PlanarBiped::relabel({state_minus.q, sol.head<5>()});
  return out;
}

BipedState impact_map(const PlanarBiped& model, const BipedState& state_minus) {
  return impact(model, state_minus).post;
}

bool guard(const PlanarBiped& model, const BipedState& state) {
  const PointKinematics foot = model.swing_foot(state);
  return foot.p.y() <= 0.0 && foot.velocity(state.dq).y() < 0.0;
}

}  // namespace alip
