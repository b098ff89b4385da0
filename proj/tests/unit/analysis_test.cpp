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


#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <gtest/gtest.h>

#include "alip/analysis.hpp"
#include "alip/control.hpp"
#include "oracles.hpp"

namespace alip {
namespace {

using Vec2 = Eigen::Vector2d;

const PendulumParams kParams = PendulumParams::make(32.0, 0.6);
constexpr double kT = 0.35;

struct Sinusoid {
  double amplitude, omega, phase, offset;
  double value(double t) const {
    return offset + amplitude * std::sin(omega * t + phase);
  }
  double rate(double t) const {
    return amplitude * omega * std::cos(omega * t + phase);
  }
};

void sample(const Sinusoid& f, double t0, double t1, double h,
            SampledSignal& v, SampledSignal& dv) {
  const int n = static_cast<int>(std::round((t1 - t0) / h));
  for (int i = 0; i <= n; ++i) {
    const double t = t0 + i * h;
    v.t.push_back(t);
    dv.t.push_back(t);
    v.value.push_back(f.value(t));
    dv.value.push_back(f.rate(t));
  }
}

TEST(ErrorTerms, ZeroSignal) {
  SampledSignal v, dv;
  sample({0.0, 1.0, 0.0, 0.0}, 0.0, 0.4, 1e-3, v, dv);
  const ErrorDecomp e = error_terms(v, dv, kParams, 0.0, 0.4);
  EXPECT_EQ(e.e1, 0.0);
  EXPECT_EQ(e.e2, 0.0);
  EXPECT_EQ(e.e3, 0.0);
}

TEST(ErrorTerms, ConstantSignalClosedForm) {
  const double c = 0.8, dt = 0.3;
  SampledSignal v, dv;
  sample({0.0, 1.0, 0.0, c}, 0.0, dt, 1e-3, v, dv);
  const ErrorDecomp e = error_terms(v, dv, kParams, 0.0, dt);
  const double k = c / kParams.mh() * (std::cosh(kParams.ell * dt) - 1.0);
  EXPECT_NEAR(e.e1, 0.0, 1e-14);
  EXPECT_NEAR(e.e2, -k, 1e-12);
  EXPECT_NEAR(e.e3, k, 1e-12);
}

TEST(ErrorTerms, SinusoidMatchesErrorDynamics) {
  const double m = kParams.mass, H = kParams.height, g = kParams.gravity;
  const double mh = m * H, l2 = g / H;
  for (const Sinusoid f : {Sinusoid{2.0, 18.0, 0.3, 0.0},
                           Sinusoid{0.7, 5.0, -1.0, 0.4},
                           Sinusoid{3.0, 40.0, 2.0, -0.2}}) {
    const double t1 = 0.1, t2 = 0.45;
    SampledSignal v, dv;
    sample(f, 0.0, 0.5, 1e-3, v, dv);
    const ErrorDecomp e = error_terms(v, dv, kParams, t1, t2);
    // LIP: ẍ_e = ℓ²x_e − L̇_c/(mH).
    // ALIP: ẋ_e = (L_e − L_c)/(mH), L̇_e = m·g·x_e.
    const Vec2 lip = oracle::rk4<2>(
        [&](double s, const Vec2& x) {
          return Vec2(x[1], l2 * x[0] - f.rate(t1 + s) / mh);
        },
        Vec2::Zero(), t2 - t1, 1e-5);
    const Vec2 alip = oracle::rk4<2>(
        [&](double s, const Vec2& x) {
          return Vec2((x[1] - f.value(t1 + s)) / mh, m * g * x[0]);
        },
        Vec2::Zero(), t2 - t1, 1e-5);
    EXPECT_NEAR(e.e1, lip[1], 1e-5);
    EXPECT_NEAR(e.e2, alip[1] / mh, 1e-5);
    EXPECT_NEAR(e.e2 + e.e3, lip[1], 1e-5);
    const double scale = std::max({1.0, std::abs(e.e1), std::abs(e.e2),
                                   std::abs(e.e3)});
    EXPECT_LE(std::abs(e.e1 - e.e2 - e.e3), 1e-6 * scale);
  }
}

TEST(ErrorTerms, RejectsShortTrace) {
  SampledSignal v, dv;
  sample({1.0, 3.0, 0.0, 0.0}, 0.0, 0.2, 1e-3, v, dv);
  EXPECT_THROW(error_terms(v, dv, kParams, 0.0, 0.3), ValidationError);
  EXPECT_THROW(error_terms(v, dv, kParams, 0.1, 0.05), ValidationError);
  SampledSignal bad = v;
  bad.t[5] = bad.t[4];
  EXPECT_THROW(error_terms(bad, dv, kParams, 0.0, 0.1), ValidationError);
}

TEST(Bode, Limits) {
  const double l = kParams.ell;
  EXPECT_DOUBLE_EQ(error_transfer_magnitude(ModelKind::kAlip, 0.0, kParams), 1.0);
  EXPECT_DOUBLE_EQ(error_transfer_magnitude(ModelKind::kLip, 0.0, kParams), 0.0);
  EXPECT_NEAR(error_transfer_magnitude(ModelKind::kAlip, 100 * l, kParams),
              1e-4, 1e-7);
  EXPECT_NEAR(error_transfer_magnitude(ModelKind::kLip, 100 * l, kParams),
              0.9999, 1e-7);
  EXPECT_LT(error_transfer_magnitude(ModelKind::kAlip, 1e6, kParams), 1e-9);
  EXPECT_GT(error_transfer_magnitude(ModelKind::kLip, 1e6, kParams), 1 - 1e-9);
  // Complementary halves of one split of L_c.
  for (double w : {0.1, 1.0, l, 30.0}) {
    EXPECT_NEAR(error_transfer_magnitude(ModelKind::kAlip, w, kParams) +
                    error_transfer_magnitude(ModelKind::kLip, w, kParams),
                1.0, 1e-14);
  }
  EXPECT_THROW(error_transfer_magnitude(ModelKind::kLip, -1.0, kParams),
               ValidationError);
}

TEST(Poincare, EigenvaluesAreAlphaAndZero) {
  const double L_des = kParams.mh() * 0.5;
  for (int k = 0; k <= 9; ++k) {
    const double alpha = 0.1 * k;
    const PoincareResult one =
        alip_closed_loop_poincare(kParams, kT, alpha, L_des);
    ASSERT_EQ(one.eigenvalues.size(), 2);
    std::vector<double> re{one.eigenvalues[0].real(), one.eigenvalues[1].real()};
    std::sort(re.begin(), re.end());
    EXPECT_NEAR(re[0], 0.0, 1e-12);
    EXPECT_NEAR(re[1], alpha, 1e-12);
    EXPECT_NEAR(one.spectral_radius, alpha, 1e-12);
    const PoincareResult two =
        alip_closed_loop_poincare(kParams, kT, alpha, L_des, 2);
    EXPECT_NEAR(two.spectral_radius, alpha * alpha, 1e-12);
    EXPECT_EQ(two.steps_per_return, 2);
  }
}

TEST(Poincare, FixedPointIndependentOfAlpha) {
  const double L_des = 9.6, l = kParams.ell;
  const PoincareResult a = alip_closed_loop_poincare(kParams, kT, 0.3, L_des);
  const PoincareResult b = alip_closed_loop_poincare(kParams, kT, 0.7, L_des);
  EXPECT_LE((a.fixed_point - b.fixed_point).norm(), 1e-12);
  EXPECT_NEAR(a.fixed_point[0],
              (1 - std::cosh(l * kT)) / (kParams.mh() * l * std::sinh(l * kT)) *
                  L_des,
              1e-12);
  EXPECT_NEAR(a.fixed_point[1], L_des, 1e-12);
  EXPECT_THROW(alip_closed_loop_poincare(kParams, kT, 1.0, L_des),
               ValidationError);
}

ReturnMap closed_loop_map(double alpha, double L_des) {
  return [=](const Eigen::VectorXd& z) {
    const double l = kParams.ell, mh = kParams.mh();
    const double L_end =
        mh * l * std::sinh(l * kT) * z[0] + std::cosh(l * kT) * z[1];
    const double p =
        foot_placement_asymptotic(kParams, L_end, L_des, kT, alpha);
    Eigen::VectorXd out(2);
    out << p, L_end;
    return out;
  };
}

TEST(Poincare, NumericJacobianRecoversSpectrum) {
  const double L_des = 9.6;
  for (double alpha : {0.0, 0.35, 0.8}) {
    const ReturnMap map = closed_loop_map(alpha, L_des);
    Eigen::VectorXd x0(2);
    x0 << 0.0, 0.0;
    const FixedPointResult fp = find_fixed_point(map, x0, 1e-12, 500);
    const PoincareResult ref =
        alip_closed_loop_poincare(kParams, kT, alpha, L_des);
    EXPECT_LE((fp.x - ref.fixed_point).norm(), 1e-9);
    for (double delta : {0.05, 0.1, 0.2}) {
      const PoincareResult num = numeric_poincare_jacobian(map, fp.x, delta);
      EXPECT_NEAR(num.spectral_radius, alpha, 1e-6);
      EXPECT_LE((num.jacobian - ref.jacobian).cwiseAbs().maxCoeff(), 1e-6);
    }
  }
}

TEST(Poincare, DivergentIterationReportsResidual) {
  const ReturnMap grow = [](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(2 * x.array() + 1.0);
  };
  try {
    find_fixed_point(grow, Eigen::VectorXd::Zero(2), 1e-8, 30);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& err) {
    EXPECT_NE(std::string(err.what()).find("residual"), std::string::npos);
  }
}

// Model-consistent per-step samples; placements from deadbeat control.
std::vector<StepSamples> alip_steps(int steps) {
  std::vector<StepSamples> out;
  Vec2 x(-0.08, 8.0);
  const double l = kParams.ell, mh = kParams.mh();
  for (int k = 0; k < steps; ++k) {
    StepSamples s;
    for (int i = 0; i <= 70; ++i) {
      const double tau = kT * i / 70.0;
      const double c = std::cosh(l * tau), sh = std::sinh(l * tau);
      const double xc = c * x[0] + sh / (mh * l) * x[1];
      const double L = mh * l * sh * x[0] + c * x[1];
      s.push_back({tau, xc, L, L / mh});
    }
    const StepSample& end = s.back();
    x = Vec2(foot_placement_deadbeat(kParams, end.L, 9.6, kT), end.L);
    out.push_back(s);
  }
  return out;
}

TEST(Fidelity, ModelConsistentTracesAreFlat) {
  const std::vector<StepSamples> steps = alip_steps(4);
  const Flatness f = prediction_fidelity(steps, kParams);
  EXPECT_LT(f.L, 1e-12);
  // For the point mass v_c = L/(mH), so the LIP branch is flat too.
  EXPECT_LT(f.v, 1e-12);
}

TEST(Fidelity, CentroidalMomentumSeparatesTheBranches) {
  // Same CoM motion, but v_c carries an oscillating L_c/(mH) offset.
  std::vector<StepSamples> steps = alip_steps(3);
  for (auto& step : steps) {
    for (auto& s : step) s.v_c -= 0.05 * std::sin(40.0 * s.tau);
  }
  const Flatness f = prediction_fidelity(steps, kParams);
  EXPECT_LT(f.L, 1e-12);
  EXPECT_GT(f.v, 1e-3);
}

TEST(Fidelity, ConstantHeightProfileMatches) {
  const std::vector<StepSamples> steps = alip_steps(3);
  const double H = kParams.height;
  const double flat = varying_height_prediction(
      steps, kParams, [H](double) { return Eigen::Vector2d(H, 0.0); });
  EXPECT_LT(flat, 1e-6);
  std::vector<StepSamples> bumped = steps;
  for (auto& step : bumped) {
    for (auto& s : step) s.L += 0.2 * std::sin(25.0 * s.tau);
  }
  const double ref = prediction_fidelity(bumped, kParams).L;
  std::vector<double> gaps;
  for (double A : {1e-3, 1e-5, 1e-7}) {
    const double varying = varying_height_prediction(
        bumped, kParams, [H, A](double tau) {
          const double w = 2 * M_PI / kT;
          return Eigen::Vector2d(H + A * std::sin(w * tau - M_PI / 2) + A,
                                 A * w * std::cos(w * tau - M_PI / 2));
        });
    gaps.push_back(std::abs(varying - ref));
  }
  EXPECT_LT(gaps[1], gaps[0]);
  EXPECT_LE(gaps[2], 1e-6);
}

}  // namespace
}  // namespace alip
