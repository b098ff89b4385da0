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


// Acceptance suite: one PASS/FAIL line per criterion. Every tolerance is
// pinned below; the process exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "alip/analysis.hpp"
#include "alip/biped.hpp"
#include "alip/control.hpp"
#include "alip/estimate.hpp"
#include "alip/pendulum.hpp"
#include "alip/simlab.hpp"
#include "oracles.hpp"

namespace {

using alip::PendulumParams;
using Vec2 = Eigen::Vector2d;

// 1: closed-form propagation
constexpr int kTransitionStates = 50;
constexpr double kTransitionHorizon = 0.4;
constexpr double kTransitionRk4Step = 1e-5;
constexpr double kTransitionTol = 1e-8;
constexpr double kTransitionBudget = 5.0;
// 2: reduced return map
constexpr double kEigenTol = 1e-12;
// 3: deadbeat
constexpr int kDeadbeatStates = 100;
constexpr double kDeadbeatTol = 1e-9;
// 4: five-link return map
constexpr double kFullEigenGap = 0.1;
constexpr double kFullDeltaSpread = 0.02;
constexpr double kFullBudget = 300.0;
// 5: prediction fidelity
// End-of-step L/(mH) target; the in-step mean CoM speed is then about 2 m/s.
constexpr double kFidelityCommand = 2.5;
constexpr double kFidelityMinSpeed = 1.8;
constexpr double kFidelityMaxSpeed = 2.2;
constexpr double kFidelityRatio = 0.5;
constexpr double kFidelityBudget = 60.0;
// 6: error decomposition
constexpr double kIdentityTol = 1e-6;
constexpr double kErrorOdeTol = 1e-5;
// 7: transfer limits
constexpr double kBodeSmall = 2e-4;
constexpr double kBodeLarge = 0.999;
// 8: impacts
constexpr int kImpactSteps = 20;
constexpr double kImpactTol = 1e-9;
constexpr double kHeightAmplitude = 0.05;
constexpr double kMovingVz = 0.1;
// 9: Kalman filter
constexpr double kKalmanSigma = 0.5;
constexpr std::size_t kKalmanSamples = 10000;
constexpr double kKalmanVarianceFraction = 0.5;
constexpr double kRiccatiTol = 1e-10;
// 10: placement comparison
constexpr double kCompareSpeed = 0.5;
constexpr int kCompareSteps = 10;
constexpr double kCompareKp = 400.0;
constexpr double kCompareKd = 40.0;
constexpr double kPointMassTol = 1e-10;

constexpr double kT = 0.35;

const alip::PlanarBiped kModel = alip::PlanarBiped::default_model();
const PendulumParams kParams =
    PendulumParams::make(kModel.total_mass(), 0.6, kModel.gravity());

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

Outcome closed_form_transition() {
  const auto t0 = std::chrono::steady_clock::now();
  const double m = kParams.mass, H = kParams.height, g = kParams.gravity;
  oracle::Sampler rng(101);
  double worst = 0.0;
  for (int i = 0; i < kTransitionStates; ++i) {
    const double x = rng.uniform(-0.2, 0.2), L = rng.uniform(-15, 15);
    const Vec2 ref_alip = oracle::rk4<2>(
        [&](double, const Vec2& s) { return Vec2(s[1] / (m * H), m * g * s[0]); },
        Vec2(x, L), kTransitionHorizon, kTransitionRk4Step);
    const alip::AlipState a =
        alip::alip_transition(kParams, {x, L, 0.0}, kTransitionHorizon);
    worst = std::max({worst, std::abs(a.x_c - ref_alip[0]),
                      std::abs(a.L - ref_alip[1])});
    const double v = L / (m * H);
    const Vec2 ref_lip = oracle::rk4<2>(
        [&](double, const Vec2& s) { return Vec2(s[1], g / H * s[0]); },
        Vec2(x, v), kTransitionHorizon, kTransitionRk4Step);
    const alip::LipState l =
        alip::lip_transition(kParams, {x, v, 0.0}, kTransitionHorizon);
    worst = std::max({worst, std::abs(l.x_c - ref_lip[0]),
                      std::abs(l.v_c - ref_lip[1])});
  }
  const double elapsed = seconds_since(t0);
  return {worst <= kTransitionTol && elapsed < kTransitionBudget,
          "max |closed form - RK4| " + fmt("%.2e", worst) + ", " +
              fmt("%.2f", elapsed) + " s"};
}

Outcome reduced_return_map() {
  double worst = 0.0;
  std::ostringstream table;
  table << "two-step:";
  const double expected[10] = {0.00, 0.01, 0.04, 0.09, 0.16,
                               0.25, 0.36, 0.49, 0.64, 0.81};
  for (int k = 0; k <= 9; ++k) {
    const double alpha = 0.1 * k;
    const auto one = alip::alip_closed_loop_poincare(kParams, kT, alpha,
                                                     kParams.mh() * 0.5);
    std::vector<double> re = {one.eigenvalues[0].real(),
                              one.eigenvalues[1].real()};
    std::sort(re.begin(), re.end());
    worst = std::max({worst, std::abs(re[0]), std::abs(re[1] - alpha),
                      std::abs(one.eigenvalues[0].imag()),
                      std::abs(one.eigenvalues[1].imag())});
    const auto two = alip::alip_closed_loop_poincare(kParams, kT, alpha,
                                                     kParams.mh() * 0.5, 2);
    worst = std::max(worst, std::abs(two.spectral_radius - expected[k]));
    table << ' ' << fmt("%.2f", two.spectral_radius);
  }
  return {worst <= kEigenTol,
          "max eigenvalue error " + fmt("%.1e", worst) + "; " + table.str()};
}

Outcome deadbeat() {
  oracle::Sampler rng(103);
  double worst = 0.0;
  for (int i = 0; i < kDeadbeatStates; ++i) {
    alip::GaitCommand cmd;
    cmd.T = kT;
    cmd.L_des = rng.uniform(-20, 20);
    alip::ReducedRolloutOptions opts;
    opts.steps = 2;
    opts.record_samples = false;
    const alip::HybridTrace tr = alip::simulate_reduced(
        alip::PlantKind::kAlip, kParams, cmd,
        {rng.uniform(-0.2, 0.2), rng.uniform(-20, 20), 0.0}, opts);
    worst = std::max(worst, std::abs(tr.per_step[1].L_minus - cmd.L_des));
  }
  return {worst <= kDeadbeatTol,
          "max |L(end of next step) - L_des| " + fmt("%.2e", worst)};
}

Outcome five_link_return_map() {
  const auto t0 = std::chrono::steady_clock::now();
  alip::EigenStudyConfig cfg;
  cfg.T = kT;
  const std::vector<alip::EigenStudyRow> rows = alip::five_link_eigen_study(cfg);
  bool ok = rows.size() == cfg.alphas.size();
  double worst_gap = 0.0, worst_spread = 0.0;
  std::ostringstream detail;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const auto [lo, hi] = std::minmax_element(r.full.begin(), r.full.end());
    worst_spread = std::max(worst_spread, *hi - *lo);
    for (std::size_t d = 0; d < r.full.size(); ++d) {
      const double lambda = r.full[d];
      worst_gap = std::max(worst_gap, std::abs(lambda - r.alpha * r.alpha));
      if (!(lambda < 1.0)) ok = false;
      if (i > 0 && !(lambda > rows[i - 1].full[d])) ok = false;
    }
    detail << (i ? ", " : "") << fmt("%.1f", r.alpha) << ':'
           << fmt("%.3f", r.full[0]);
  }
  const double elapsed = seconds_since(t0);
  ok = ok && worst_gap <= kFullEigenGap && worst_spread < kFullDeltaSpread &&
       elapsed < kFullBudget;
  return {ok, "lambda(alpha) " + detail.str() + "; max |lambda - alpha^2| " +
                  fmt("%.3f", worst_gap) + ", delta spread " +
                  fmt("%.3f", worst_spread) + ", " + fmt("%.0f", elapsed) +
                  " s"};
}

alip::ScenarioConfig walking(double speed, int steps) {
  alip::ScenarioConfig cfg;
  cfg.plant = alip::PlantKind::kFiveLink;
  cfg.gait.T = kT;
  cfg.gait.L_des = kParams.mh() * speed;
  cfg.initial_velocity = speed;
  cfg.duration = steps;
  return cfg;
}

Outcome prediction_fidelity() {
  const auto t0 = std::chrono::steady_clock::now();
  const alip::HybridTrace tr = alip::run_scenario(walking(kFidelityCommand, 12));
  const auto all = alip::step_samples(tr);
  // Skip the first steps while the gait settles onto its orbit.
  const std::vector<alip::StepSamples> steps(all.begin() + 4, all.end());
  const alip::Flatness f = alip::prediction_fidelity(steps, kParams);
  double mean_v = 0.0;
  for (std::size_t k = 4; k < tr.per_step.size(); ++k) mean_v += tr.per_step[k].mean_v_c;
  mean_v /= static_cast<double>(tr.per_step.size() - 4);
  const double elapsed = seconds_since(t0);
  const double ratio = f.L / f.v;
  return {ratio <= kFidelityRatio && elapsed < kFidelityBudget &&
              mean_v >= kFidelityMinSpeed && mean_v <= kFidelityMaxSpeed,
          "mean speed " + fmt("%.2f", mean_v) + " m/s, flatness L/mH " +
              fmt("%.4f", f.L) + " vs v_c " + fmt("%.4f", f.v) + ", ratio " +
              fmt("%.3f", ratio) + ", " + fmt("%.1f", elapsed) + " s"};
}

// RK4 on the error dynamics driven by sampled L_c and L̇_c. The step is two
// sample intervals so every stage lands on a sample.
struct ErrorOdeResult {
  double lip_v = 0.0;
  double alip_L_over_mh = 0.0;
};

ErrorOdeResult integrate_error_odes(const alip::SampledSignal& Lc,
                                    const alip::SampledSignal& dLc,
                                    std::size_t first, std::size_t last) {
  const double m = kParams.mass, mh = kParams.mh(), g = kParams.gravity;
  const double l2 = g / kParams.height;
  Vec2 lip = Vec2::Zero(), alip_e = Vec2::Zero();
  for (std::size_t i = first; i + 2 <= last; i += 2) {
    const double h = Lc.t[i + 2] - Lc.t[i];
    auto lip_rate = [&](std::size_t j, const Vec2& x) {
      return Vec2(x[1], l2 * x[0] - dLc.value[j] / mh);
    };
    auto alip_rate = [&](std::size_t j, const Vec2& x) {
      return Vec2((x[1] - Lc.value[j]) / mh, m * g * x[0]);
    };
    auto stage = [&](auto&& f, const Vec2& x) {
      const Vec2 k1 = f(i, x);
      const Vec2 k2 = f(i + 1, x + 0.5 * h * k1);
      const Vec2 k3 = f(i + 1, x + 0.5 * h * k2);
      const Vec2 k4 = f(i + 2, x + h * k3);
      return Vec2(x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4));
    };
    lip = stage(lip_rate, lip);
    alip_e = stage(alip_rate, alip_e);
  }
  return {lip[1], alip_e[1] / mh};
}

Outcome error_decomposition() {
  double worst_identity = 0.0, worst_ode = 0.0;
  int traces = 0;
  for (double speed : {0.5, 1.0, 2.0}) {
    alip::ScenarioConfig cfg = walking(speed, 6);
    cfg.integrator.sample_stride = 1;
    const alip::HybridTrace tr = alip::run_scenario(cfg);
    for (const auto& ev : tr.events) {
      alip::SampledSignal Lc, dLc;
      std::size_t in_window = 0;
      for (const auto& s : tr.samples) {
        if (s.step != ev.step) continue;
        Lc.t.push_back(s.t);
        Lc.value.push_back(s.L_c);
        dLc.value.push_back(s.dL_c);
        if (s.tau < kT) in_window = Lc.t.size();
      }
      Lc.t.push_back(ev.t);
      Lc.value.push_back(ev.pre.L_c);
      dLc.value.push_back(ev.pre.dL_c);
      dLc.t = Lc.t;
      double scale = 0.0;
      for (double v : Lc.value) scale = std::max(scale, std::abs(v) / kParams.mh());

      // Identity over the whole step, up to the impact.
      const alip::ErrorDecomp whole =
          alip::error_terms(Lc, dLc, kParams, Lc.t.front(), Lc.t.back());
      worst_identity = std::max(
          worst_identity, std::abs(whole.e1 - whole.e2 - whole.e3) /
                              std::max({scale, std::abs(whole.e1),
                                        std::abs(whole.e2), std::abs(whole.e3)}));

      // ODE comparison on the grid samples with phase below one: a step that
      // overruns T clamps the references, which puts a kink in L_c there.
      // An even number of intervals for the ODE integrator.
      const std::size_t last = (in_window - 1) / 2 * 2;
      const alip::ErrorDecomp e =
          alip::error_terms(Lc, dLc, kParams, Lc.t.front(), Lc.t[last]);
      const ErrorOdeResult ode = integrate_error_odes(Lc, dLc, 0, last);
      worst_ode = std::max({worst_ode, std::abs(e.e2 - ode.alip_L_over_mh),
                            std::abs(e.e2 + e.e3 - ode.lip_v)});
      ++traces;
    }
  }
  return {worst_identity <= kIdentityTol && worst_ode <= kErrorOdeTol,
          std::to_string(traces) + " step traces; max |e1-(e2+e3)|/scale " +
              fmt("%.1e", worst_identity) + ", max ODE mismatch " +
              fmt("%.1e", worst_ode) + " m/s"};
}

Outcome transfer_limits() {
  using alip::ModelKind;
  const double l = kParams.ell;
  const double ah = alip::error_transfer_magnitude(ModelKind::kAlip, 100 * l, kParams);
  const double lh = alip::error_transfer_magnitude(ModelKind::kLip, 100 * l, kParams);
  const double al = alip::error_transfer_magnitude(ModelKind::kAlip, l / 100, kParams);
  const double ll = alip::error_transfer_magnitude(ModelKind::kLip, l / 100, kParams);
  return {ah <= kBodeSmall && lh >= kBodeLarge && al >= kBodeLarge &&
              ll <= kBodeSmall,
          "at 100*ell ALIP " + fmt("%.3e", ah) + " LIP " + fmt("%.6f", lh) +
              "; at ell/100 ALIP " + fmt("%.6f", al) + " LIP " +
              fmt("%.3e", ll)};
}

// L about the new contact after each impact, recomputed from the recorded
// pre/post states: |measured - expected| per event.
double impact_mismatch(const alip::HybridTrace& tr, bool flat) {
  double worst = 0.0;
  for (const auto& ev : tr.events) {
    const alip::BipedState pre{ev.pre.q, ev.pre.dq};
    const alip::BipedState post{ev.post.q, ev.post.dq};
    const alip::CentroidalState c = alip::centroidal(kModel, pre);
    const double L_plus = alip::centroidal(kModel, post).L;
    const double expected =
        flat ? c.L
             : alip::transfer_angular_momentum(
                   c.L, -kModel.swing_foot(pre).p, c.v_c, kModel.total_mass());
    worst = std::max(worst, std::abs(L_plus - expected));
  }
  return worst;
}

Outcome impact_invariants() {
  alip::ScenarioConfig flat = walking(0.5, kImpactSteps);
  flat.zero_vertical_velocity_at_impact = true;
  flat.outputs = {"events"};
  const alip::HybridTrace a = alip::run_scenario(flat);
  double max_vz_flat = 0.0;
  for (const auto& ev : a.events) {
    max_vz_flat = std::max(max_vz_flat, std::abs(
        alip::centroidal(kModel, {ev.pre.q, ev.pre.dq}).v_c.y()));
  }
  const double flat_err = impact_mismatch(a, true);

  alip::ScenarioConfig moving = walking(0.5, kImpactSteps);
  moving.constraints.height_amplitude = kHeightAmplitude;
  const alip::HybridTrace b = alip::run_scenario(moving);
  const double transfer_err = impact_mismatch(b, false);
  // The first step starts from a constant-height state and lands flat; the
  // rest touch down while the CoM is still descending.
  int moving_events = 0;
  for (const auto& ev : b.events) {
    const double vz = alip::centroidal(kModel, {ev.pre.q, ev.pre.dq}).v_c.y();
    if (std::abs(vz) >= kMovingVz) ++moving_events;
  }
  const bool ok = a.events.size() == kImpactSteps &&
                  b.events.size() == kImpactSteps && flat_err <= kImpactTol &&
                  transfer_err <= kImpactTol &&
                  moving_events >= kImpactSteps - 1;
  return {ok, "flat: max |L+ - L-| " + fmt("%.1e", flat_err) + " (|vz| <= " +
                  fmt("%.0e", max_vz_flat) + "); moving (" +
                  std::to_string(moving_events) + " impacts with |vz| >= " +
                  fmt("%.2f", kMovingVz) + " m/s): max transfer mismatch " +
                  fmt("%.1e", transfer_err)};
}

Outcome kalman_filter() {
  const double R = kKalmanSigma * kKalmanSigma;
  alip::KalmanState init;
  init.R_meas = R;
  alip::KalmanDemoConfig cfg;
  cfg.sigma = kKalmanSigma;
  cfg.L_des = kParams.mh() * 0.5;
  cfg.start = {-0.05, cfg.L_des, 0.0};
  cfg.seed = 7;
  // Burn-in of 1000 samples, then 10^4 steady-state samples.
  cfg.samples = kKalmanSamples + 1000;
  init.L_hat = 0.0;
  const auto rows = alip::kalman_demo(kParams, init, cfg);
  double acc = 0.0;
  for (std::size_t i = 1000; i < rows.size(); ++i) {
    const double e = rows[i].L_hat - rows[i].L_true;
    acc += e * e;
  }
  const double variance = acc / static_cast<double>(kKalmanSamples);

  alip::KalmanState ks = init;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ks = alip::kf_correct(alip::kf_predict(ks, 0.0, 0.0, kParams), 0.0);
  }
  double P = init.P;  // independent fixed-point iteration of the Riccati map
  for (int i = 0; i < 100000; ++i) P = (P + init.Q) * R / (P + init.Q + R);
  const double riccati_gap = std::abs(ks.P - P);
  return {variance < kKalmanVarianceFraction * R && riccati_gap <= kRiccatiTol,
          "error variance " + fmt("%.2e", variance) + " vs sigma^2 " +
              fmt("%.2f", R) + "; |P - P*| " + fmt("%.1e", riccati_gap)};
}

alip::ScenarioConfig comparison_config() {
  alip::ScenarioConfig cfg = walking(kCompareSpeed, kCompareSteps);
  cfg.gait.L_des = 0.0;
  // Hip centered over the contact point in mid-step, moving forward.
  cfg.initial_anchor = alip::InitialAnchor::kHipMidStep;
  return cfg;
}

Outcome placement_comparison() {
  alip::ScenarioConfig cfg = comparison_config();
  cfg.constraints.Kp.setConstant(kCompareKp);
  cfg.constraints.Kd.setConstant(kCompareKd);
  const alip::ComparisonSummary s = alip::lip_vs_alip_comparison(cfg);
  const double v_alip = std::abs(s.mean_v_alip.back());
  const double v_lip = std::abs(s.mean_v_lip.back());

  alip::ScenarioConfig point = cfg;
  point.plant = alip::PlantKind::kAlip;
  point.initial_anchor = alip::InitialAnchor::kCom;
  const alip::ComparisonSummary p = alip::lip_vs_alip_comparison(point);
  double gap = 0.0;
  for (std::size_t k = 0; k < p.placement_alip.size(); ++k) {
    gap = std::max(gap, std::abs(p.placement_alip[k] - p.placement_lip[k]));
  }
  return {v_alip < v_lip && gap <= kPointMassTol,
          "gains Kp " + fmt("%.0f", kCompareKp) + " Kd " +
              fmt("%.0f", kCompareKd) + ": |mean v_c| after " +
              std::to_string(kCompareSteps) + " steps ALIP " +
              fmt("%.4f", v_alip) + " vs LIP " + fmt("%.4f", v_lip) +
              " m/s; point-mass placement gap " + fmt("%.1e", gap)};
}

std::string default_gain_comparison() {
  const alip::ComparisonSummary s =
      alip::lip_vs_alip_comparison(comparison_config());
  return "default gains Kp 100 Kd 20: |mean v_c| ALIP " +
         fmt("%.4f", std::abs(s.mean_v_alip.back())) + " vs LIP " +
         fmt("%.4f", std::abs(s.mean_v_lip.back())) + " m/s";
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Entry> criteria = {
      {"closed-form transitions match RK4", closed_form_transition},
      {"reduced return-map eigenvalues", reduced_return_map},
      {"deadbeat regulation", deadbeat},
      {"five-link return-map eigenvalues", five_link_return_map},
      {"prediction fidelity at speed", prediction_fidelity},
      {"error decomposition", error_decomposition},
      {"transfer-function limits", transfer_limits},
      {"impact invariants", impact_invariants},
      {"Kalman filter", kalman_filter},
      {"LIP vs ALIP placement", placement_comparison},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].name, o.detail.c_str());
    std::fflush(stdout);
    if (i + 1 == criteria.size()) {
      try {
        std::printf("[INFO] 10 %s\n", default_gain_comparison().c_str());
      } catch (const std::exception& e) {
        std::printf("[INFO] 10 default gains: exception: %s\n", e.what());
      }
    }
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
