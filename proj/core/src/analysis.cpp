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

#include "alip/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "alip/control.hpp"
#include "alip/errors.hpp"

namespace alip {

void SampledSignal::validate() const {
  if (t.size() != value.size()) {
    throw ValidationError("sampled signal: time and value sizes differ");
  }
  if (t.size() < 2) {
    throw ValidationError("sampled signal: need at least two samples");
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    detail::require_finite(t[i], "sampled signal time");
    detail::require_finite(value[i], "sampled signal value");
    if (i > 0 && !(t[i] > t[i - 1])) {
      throw ValidationError("sampled signal: times must strictly increase");
    }
  }
}

double SampledSignal::at(double time) const {
  if (time <= t.front()) return value.front();
  if (time >= t.back()) return value.back();
  const auto it = std::upper_bound(t.begin(), t.end(), time);
  const std::size_t i = static_cast<std::size_t>(it - t.begin());
  const double w = (time - t[i - 1]) / (t[i] - t[i - 1]);
  return (1.0 - w) * value[i - 1] + w * value[i];
}

namespace {

struct Hermite {
  double a, h, p0, p1, m0, m1;

  double value(double tau) const {
    const double u = (tau - a) / h;
    const double u2 = u * u;
    const double u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * p0 + (u3 - 2 * u2 + u) * h * m0 +
           (-2 * u3 + 3 * u2) * p1 + (u3 - u2) * h * m1;
  }

  double slope(double tau) const {
    const double u = (tau - a) / h;
    const double u2 = u * u;
    return ((6 * u2 - 6 * u) * p0 + (3 * u2 - 4 * u + 1) * h * m0 +
            (-6 * u2 + 6 * u) * p1 + (3 * u2 - 2 * u) * h * m1) /
           h;
  }
};

Hermite segment(const SampledSignal& Lc, const SampledSignal& dLc,
                std::size_t i) {
  return {Lc.t[i],        Lc.t[i + 1] - Lc.t[i], Lc.value[i],
          Lc.value[i + 1], dLc.value[i],          dLc.value[i + 1]};
}

std::size_t segment_index(const std::vector<double>& t, double time) {
  const auto it = std::upper_bound(t.begin(), t.end(), time);
  const std::ptrdiff_t i = (it - t.begin()) - 1;
  return static_cast<std::size_t>(
      std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(t.size()) - 2));
}

}  // namespace

ErrorDecomp error_terms(const SampledSignal& Lc, const SampledSignal& dLc,
                        const PendulumParams& params, double t1, double t2) {
  params.validate();
  Lc.validate();
  dLc.validate();
  if (Lc.t != dLc.t) {
    throw ValidationError("error_terms: L_c and dL_c must share a time grid");
  }
  detail::require_finite(t1, "t1");
  detail::require_finite(t2, "t2");
  if (!(t2 >= t1)) throw ValidationError("error_terms: need t2 >= t1");
  const double slack = 1e-12 * std::max(1.0, std::abs(t2));
  if (Lc.t.front() > t1 + slack || Lc.t.back() < t2 - slack) {
    throw ValidationError("error_terms: trace does not cover [" +
                          std::to_string(t1) + ", " + std::to_string(t2) +
                          "]");
  }

  const double ell = params.ell;
  static constexpr double kNode = 0.7745966692414834;  // sqrt(3/5)
  static constexpr double kU[3] = {0.5 * (1 - kNode), 0.5, 0.5 * (1 + kNode)};
  static constexpr double kW[3] = {5.0 / 18, 8.0 / 18, 5.0 / 18};

  double int_cosh_dLc = 0.0;
  double int_sinh_Lc = 0.0;
  const std::size_t first = segment_index(Lc.t, t1);
  const std::size_t last = segment_index(Lc.t, t2);
  for (std::size_t i = first; i <= last; ++i) {
    const Hermite seg = segment(Lc, dLc, i);
    const double start = (i == first) ? t1 : Lc.t[i];
    const double stop = (i == last) ? t2 : Lc.t[i + 1];
    const double width = stop - start;
    if (width <= 0.0) continue;
    for (int k = 0; k < 3; ++k) {
      const double tau = start + kU[k] * width;
      const double arg = ell * (t2 - tau);
      int_cosh_dLc += kW[k] * width * std::cosh(arg) * seg.slope(tau);
      int_sinh_Lc += kW[k] * width * ell * std::sinh(arg) * seg.value(tau);
    }
  }

  const double mh = params.mh();
  const double Lc_t1 = segment(Lc, dLc, first).value(t1);
  const double Lc_t2 = segment(Lc, dLc, last).value(t2);
  ErrorDecomp out;
  out.e1 = -int_cosh_dLc / mh;
  out.e2 = -int_sinh_Lc / mh;
  out.e3 = -(Lc_t2 - std::cosh(ell * (t2 - t1)) * Lc_t1) / mh;
  return out;
}

double error_transfer_magnitude(ModelKind kind, double omega,
                                const PendulumParams& params) {
  params.validate();
  detail::require_finite(omega, "omega");
  if (omega < 0.0) throw ValidationError("omega must be non-negative");
  const double l2 = params.ell * params.ell;
  const double w2 = omega * omega;
  return kind == ModelKind::kAlip ? l2 / (w2 + l2) : w2 / (w2 + l2);
}

AlipReturnMap alip_return_map(const PendulumParams& params, double T,
                              double alpha) {
  params.validate();
  detail::require_finite(T, "T");
  detail::require_finite(alpha, "alpha");
  if (!(T > 0.0)) throw ValidationError("T must be positive");
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw ValidationError("alpha must lie in [0, 1)");
  }
  const double c = std::cosh(params.ell * T);
  const double k = params.mh() * params.ell * std::sinh(params.ell * T);
  // Pre-impact state after T from (x_c, L): A(T)·z. The swing foot is placed
  // so the new x_c = p, which is an affine function of the predicted L̂ = L⁻.
  const Eigen::Matrix2d A_T = alip_transition_matrix(params, T);
  // p = [(1−α)·L_des + (α − c)·L̂]/k, L⁺ = L⁻.
  Eigen::Matrix2d P;
  P << 0.0, (alpha - c) / k, 0.0, 1.0;
  AlipReturnMap out;
  out.A = P * A_T;
  out.b = Eigen::Vector2d((1.0 - alpha) / k, 0.0);
  return out;
}

namespace {

PoincareResult spectrum_of(Eigen::VectorXd fixed_point, Eigen::MatrixXd J,
                           int steps_per_return) {
  PoincareResult out;
  out.fixed_point = std::move(fixed_point);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(J, false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigen decomposition of the return-map Jacobian failed");
  }
  out.eigenvalues = solver.eigenvalues();
  out.spectral_radius = out.eigenvalues.cwiseAbs().maxCoeff();
  out.jacobian = std::move(J);
  out.steps_per_return = steps_per_return;
  return out;
}

}  // namespace

PoincareResult alip_closed_loop_poincare(const PendulumParams& params,
                                         double T, double alpha, double L_des,
                                         int steps_per_return) {
  detail::require_finite(L_des, "L_des");
  if (steps_per_return < 1) {
    throw ValidationError("steps_per_return must be at least 1");
  }
  const AlipReturnMap map = alip_return_map(params, T, alpha);
  const double c = std::cosh(params.ell * T);
  const double k = params.mh() * params.ell * std::sinh(params.ell * T);
  Eigen::VectorXd fixed(2);
  fixed << (1.0 - c) / k * L_des, L_des;
  Eigen::MatrixXd J = Eigen::MatrixXd::Identity(2, 2);
  for (int i = 0; i < steps_per_return; ++i) J = map.A * J;
  return spectrum_of(std::move(fixed), std::move(J), steps_per_return);
}

FixedPointResult find_fixed_point(const ReturnMap& map, Eigen::VectorXd x0,
                                  double tolerance, int max_iterations,
                                  double damping) {
  if (!(tolerance > 0.0)) throw ValidationError("tolerance must be positive");
  if (max_iterations < 1) throw ValidationError("max_iterations must be >= 1");
  if (!(damping > 0.0 && damping <= 1.0)) {
    throw ValidationError("damping must be in (0, 1]");
  }
  FixedPointResult out;
  out.x = std::move(x0);
  for (int it = 1; it <= max_iterations; ++it) {
    const Eigen::VectorXd fx = map(out.x);
    if (!fx.allFinite()) throw NumericalError("return map produced non-finite state");
    const Eigen::VectorXd step = fx - out.x;
    out.residual = step.norm();
    out.iterations = it;
    if (out.residual < tolerance) {
      out.x = fx;
      return out;
    }
    out.x += damping * step;
  }
  throw NumericalError("fixed point not found after " +
                       std::to_string(max_iterations) +
                       " iterations (residual " +
                       std::to_string(out.residual) + ")");
}

PoincareResult numeric_poincare_jacobian(const ReturnMap& map,
                                         const Eigen::VectorXd& x_star,
                                         double delta, int steps_per_return) {
  detail::require_finite(delta, "delta");
  if (!(delta > 0.0)) throw ValidationError("delta must be positive");
  const Eigen::Index n = x_star.size();
  Eigen::MatrixXd J(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd xp = x_star;
    Eigen::VectorXd xm = x_star;
    xp[i] += delta;
    xm[i] -= delta;
    J.col(i) = (map(xp) - map(xm)) / (2.0 * delta);
  }
  if (!J.allFinite()) throw NumericalError("non-finite return-map Jacobian");
  return spectrum_of(x_star, std::move(J), steps_per_return);
}

std::vector<PoincareResult> numeric_poincare_jacobian(
    const ReturnMap& map, const Eigen::VectorXd& x_star,
    std::span<const double> deltas, int steps_per_return) {
  std::vector<PoincareResult> out;
  out.reserve(deltas.size());
  for (double d : deltas) {
    out.push_back(numeric_poincare_jacobian(map, x_star, d, steps_per_return));
  }
  return out;
}

namespace {

void check_steps(std::span<const StepSamples> steps) {
  if (steps.empty()) throw ValidationError("no steps to analyse");
  for (const auto& step : steps) {
    if (step.size() < 2) throw ValidationError("step with fewer than two samples");
    for (std::size_t i = 0; i < step.size(); ++i) {
      detail::require_finite(step[i].tau, "sample tau");
      detail::require_finite(step[i].x_c, "sample x_c");
      detail::require_finite(step[i].L, "sample L");
      detail::require_finite(step[i].v_c, "sample v_c");
      if (i > 0 && !(step[i].tau > step[i - 1].tau)) {
        throw ValidationError("step samples must have increasing tau");
      }
    }
  }
}

}  // namespace

Flatness prediction_fidelity(std::span<const StepSamples> steps,
                             const PendulumParams& params) {
  params.validate();
  check_steps(steps);
  double sum_L = 0.0;
  double sum_v = 0.0;
  std::size_t count = 0;
  for (const auto& step : steps) {
    const StepSample& end = step.back();
    for (const auto& s : step) {
      const double remaining = end.tau - s.tau;
      const double dL = predict_L_end(params, s.x_c, s.L, remaining) - end.L;
      const double dv = predict_v_end(params, s.x_c, s.v_c, remaining) - end.v_c;
      sum_L += dL * dL;
      sum_v += dv * dv;
      ++count;
    }
  }
  const double n = static_cast<double>(count);
  return {std::sqrt(sum_L / n) / params.mh(), std::sqrt(sum_v / n)};
}

double varying_height_prediction(std::span<const StepSamples> steps,
                                 const PendulumParams& params,
                                 const HeightProfile& profile,
                                 double rk4_step) {
  params.validate();
  check_steps(steps);
  if (!profile) throw ValidationError("height profile is empty");
  if (!(rk4_step > 0.0)) throw ValidationError("rk4_step must be positive");
  const double m = params.mass;
  const double g = params.gravity;
  auto rate = [&](double tau, const Eigen::Vector2d& s) {
    const Eigen::Vector2d z = profile(tau);
    if (!(z[0] > 0.0)) throw NumericalError("height profile is not positive");
    return Eigen::Vector2d(s[1] / (m * z[0]) + z[1] / z[0] * s[0],
                           m * g * s[0]);
  };

  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& step : steps) {
    const StepSample& end = step.back();
    for (const auto& smp : step) {
      const double span = end.tau - smp.tau;
      const int n = std::max(1, static_cast<int>(std::ceil(span / rk4_step)));
      const double h = span / n;
      Eigen::Vector2d s(smp.x_c, smp.L);
      double tau = smp.tau;
      for (int i = 0; i < n && span > 0.0; ++i) {
        const Eigen::Vector2d k1 = rate(tau, s);
        const Eigen::Vector2d k2 = rate(tau + 0.5 * h, s + 0.5 * h * k1);
        const Eigen::Vector2d k3 = rate(tau + 0.5 * h, s + 0.5 * h * k2);
        const Eigen::Vector2d k4 = rate(tau + h, s + h * k3);
        s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        tau += h;
      }
      const double d = s[1] - end.L;
      sum += d * d;
      ++count;
    }
  }
  return std::sqrt(sum / static_cast<double>(count)) / params.mh();
}

}  // namespace alip
