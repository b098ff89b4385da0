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
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "alip/analysis.hpp"
#include "alip/biped.hpp"
#include "alip/control.hpp"
#include "alip/pendulum.hpp"

namespace alip {

/// Classical fourth-order Runge-Kutta step of ẋ = f(t, x).
template <class Vec, class Rate>
Vec rk4_step(Rate&& f, double t, const Vec& x, double h) {
  const Vec k1 = f(t, x);
  const Vec k2 = f(t + 0.5 * h, Vec(x + 0.5 * h * k1));
  const Vec k3 = f(t + 0.5 * h, Vec(x + 0.5 * h * k2));
  const Vec k4 = f(t + h, Vec(x + h * k3));
  return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

enum class PlantKind { kAlip, kLip, kFiveLink };

struct IntegratorConfig {
  double step_size = 1e-4;
  double event_tolerance = 1e-9;
  /// Record every n-th integration step.
  int sample_stride = 10;

  void validate() const;
};

/// One recorded instant. Joint fields stay zero for the reduced plants.
struct TraceSample {
  double t = 0.0;
  double tau = 0.0;
  int step = 0;
  double x_c = 0.0;
  double z_c = 0.0;
  double v_c = 0.0;
  double vz_c = 0.0;
  double L = 0.0;
  double L_c = 0.0;
  double dL_c = 0.0;
  Vector5d q = Vector5d::Zero();
  Vector5d dq = Vector5d::Zero();
  Vector4d y = Vector4d::Zero();
  Vector4d u = Vector4d::Zero();
  double p_des = 0.0;
};

struct ImpactEvent {
  int step = 0;
  double t = 0.0;
  TraceSample pre;
  TraceSample post;
};

struct StepRecord {
  int index = 0;
  /// Duration of the step.
  double T_k = 0.0;
  double t_impact = 0.0;
  double L_minus = 0.0;
  double L_plus = 0.0;
  /// L⁻ carried to the new contact point with the transfer formula.
  double L_transfer = 0.0;
  /// CoM position relative to the new contact at touchdown.
  double placement = 0.0;
  double x_c_minus = 0.0;
  double x_c_plus = 0.0;
  double vz_minus = 0.0;
  double mean_v_c = 0.0;
};

struct HybridTrace {
  std::vector<TraceSample> samples;
  std::vector<ImpactEvent> events;
  std::vector<StepRecord> per_step;
};

/// Per-step sample groups for the prediction analyses; each group ends with
/// the pre-impact state of its step.
std::vector<StepSamples> step_samples(const HybridTrace& trace);

struct StepOutcome {
  BipedState pre_impact;
  double t_impact = 0.0;
};

using SampleSink = std::function<void(double t, const BipedState& state)>;

/// Integrates the closed loop from `start` at time t0 until the swing foot
/// crosses the ground. The guard is armed once the phase reaches 0.5.
/// Throws NumericalError when no impact occurs within 2T.
StepOutcome integrate_step(const PlanarBiped& model, WalkingController& ctrl,
                           const BipedState& start, double t0,
                           const IntegratorConfig& cfg,
                           const SampleSink& sink = {});

struct FiveLinkRolloutOptions {
  int steps = 10;
  IntegratorConfig integrator;
  /// Removes the CoM vertical velocity from q̇⁻ (minimum-norm correction)
  /// before each impact.
  bool zero_vertical_velocity_at_impact = false;
  bool record_samples = true;
  /// Phase at which the first step starts; the first step then began at
  /// t = -initial_phase·T with outputs initial_step_start_outputs.
  double initial_phase = 0.0;
  Vector4d initial_step_start_outputs = Vector4d::Zero();
  /// Called before each step; may change the command.
  std::function<void(int step, WalkingController& ctrl)> before_step;
};

HybridTrace simulate_five_link(const PlanarBiped& model,
                               WalkingController& ctrl, const BipedState& x0,
                               const FiveLinkRolloutOptions& options);

struct ReducedRolloutOptions {
  int steps = 10;
  IntegratorConfig integrator;
  PlacementModel placement = PlacementModel::kAlip;
  bool record_samples = true;
  std::function<void(int step, GaitCommand& cmd)> before_step;
};

/// ALIP or LIP plant switching on the clock at τ = T. `start` gives (x_c, L);
/// the LIP plant starts from v_c = L/(mH).
HybridTrace simulate_reduced(PlantKind plant, const PendulumParams& params,
                             const GaitCommand& cmd, const AlipState& start,
                             const ReducedRolloutOptions& options);

/// Post-impact state after `steps_per_return` closed-loop steps of the
/// five-link model.
ReturnMap five_link_return_map(const PlanarBiped& model,
                               const VirtualConstraintSpec& spec,
                               const GaitCommand& cmd, int steps_per_return,
                               const IntegratorConfig& cfg);

struct EigenStudyConfig {
  VirtualConstraintSpec spec;
  /// Walking speed of the orbit; L_des = mH·speed.
  double speed = 0.5;
  double T = 0.35;
  std::vector<double> alphas = {0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> deltas = {0.05, 0.1, 0.2};
  int steps_per_return = 2;
  IntegratorConfig integrator;
  double fixed_point_tolerance = 1e-8;
  int max_iterations = 200;
  std::optional<PlanarBiped> model;
};

struct EigenStudyRow {
  double alpha = 0.0;
  /// Dominant modulus of the closed-form ALIP map.
  double reduced = 0.0;
  /// Dominant modulus of the five-link map, one entry per delta.
  std::vector<double> full;
  int iterations = 0;
  double residual = 0.0;
  Eigen::VectorXd fixed_point;
};

/// For each alpha: periodic orbit of the five-link closed loop by fixed-point
/// iteration, then symmetric-difference Jacobians of the return map.
std::vector<EigenStudyRow> five_link_eigen_study(const EigenStudyConfig& cfg);

/// A post-impact state on the constraint surface for walking at the command's
/// periodic speed, placed at the ALIP fixed point.
BipedState nominal_initial_state(const PlanarBiped& model,
                                 const VirtualConstraintSpec& spec,
                                 const GaitCommand& cmd, double v_c);

struct MidStepState {
  BipedState state;
  double phase = 0.0;
  Vector4d step_start_outputs = Vector4d::Zero();
};

/// A state at `phase` on the constraint surface with the hip at hip_x from
/// the contact point moving at hip_v. The swing-foot target is the
/// controller's own placement for that state, so the rollout starts with
/// zero output error.
MidStepState mid_step_state(const PlanarBiped& model,
                            const VirtualConstraintSpec& spec,
                            const GaitCommand& cmd, PlacementModel placement,
                            double hip_x, double hip_v, double phase = 0.5);

enum class InitialAnchor { kCom, kHipMidStep };

struct ScenarioConfig {
  PlantKind plant = PlantKind::kAlip;
  PlacementModel placement = PlacementModel::kAlip;
  GaitCommand gait;
  VirtualConstraintSpec constraints;
  /// Number of steps.
  int duration = 10;
  IntegratorConfig integrator;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs = {"trace", "steps", "events"};
  /// kCom: start of a step with the CoM at initial_x_c (default: the ALIP
  /// fixed point for initial_velocity). kHipMidStep (five-link only): middle
  /// of a step with the hip at initial_x_c (default 0) from the contact point.
  InitialAnchor initial_anchor = InitialAnchor::kCom;
  /// Initial horizontal velocity of the anchor point.
  double initial_velocity = 0.0;
  std::optional<double> initial_x_c;
  /// Standard deviation of a Gaussian perturbation added to the initial
  /// velocity, drawn from the seeded generator.
  double initial_velocity_noise = 0.0;
  /// Linear ramp of L_des from gait.L_des to this value over ramp_steps.
  std::optional<double> ramp_L_des_to;
  int ramp_steps = 0;
  bool zero_vertical_velocity_at_impact = false;
  std::optional<PlanarBiped> model;

  void validate() const;
  PlanarBiped biped() const;
};

/// Runs the scenario and, when out_dir is given, writes the requested
/// artifacts there plus a JSON sidecar.
HybridTrace run_scenario(const ScenarioConfig& config,
                         const std::optional<std::filesystem::path>& out_dir =
                             std::nullopt);

/// Writes trace.csv, steps.csv and events.csv as requested by `outputs`,
/// and manifest.json. Returns the written file names.
std::vector<std::string> write_artifacts(const HybridTrace& trace,
                                         const ScenarioConfig& config,
                                         const std::filesystem::path& out_dir);

/// Formats a double with 17 significant digits.
std::string format_double(double v);

/// FNV-1a 64-bit digest of a file's bytes, as 16 hex digits.
std::string file_checksum(const std::filesystem::path& path);

struct ComparisonSummary {
  std::vector<double> mean_v_alip;
  std::vector<double> mean_v_lip;
  std::vector<double> L_end_alip;
  std::vector<double> L_end_lip;
  std::vector<double> placement_alip;
  std::vector<double> placement_lip;
};

/// Twin rollouts of `config` with ALIP- and LIP-based placement.
ComparisonSummary lip_vs_alip_comparison(const ScenarioConfig& config);

}  // namespace alip
