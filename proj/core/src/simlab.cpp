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

#include "alip/simlab.hpp"

#include <algorithm>
#include <array>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "alip/config_io.hpp"
#include "alip/errors.hpp"
#include "json_bridge.hpp"

namespace alip {

void IntegratorConfig::validate() const {
  detail::require_finite(step_size, "integrator.step_size");
  detail::require_finite(event_tolerance, "integrator.event_tolerance");
  if (!(step_size > 0.0)) {
    throw ValidationError("integrator.step_size must be positive");
  }
  if (!(event_tolerance > 0.0 && event_tolerance < step_size)) {
    throw ValidationError(
        "integrator.event_tolerance must be positive and below step_size");
  }
  if (sample_stride < 1) {
    throw ValidationError("integrator.sample_stride must be at least 1");
  }
}

std::vector<StepSamples> step_samples(const HybridTrace& trace) {
  std::vector<StepSamples> out(trace.per_step.size());
  auto to_step_sample = [](const TraceSample& s) {
    return StepSample{s.tau, s.x_c, s.L, s.v_c};
  };
  for (const TraceSample& s : trace.samples) {
    if (s.step >= 0 && static_cast<std::size_t>(s.step) < out.size()) {
      out[static_cast<std::size_t>(s.step)].push_back(to_step_sample(s));
    }
  }
  for (const ImpactEvent& e : trace.events) {
    auto& group = out.at(static_cast<std::size_t>(e.step));
    if (group.empty() || group.back().tau < e.pre.tau) {
      group.push_back(to_step_sample(e.pre));
    }
  }
  return out;
}

namespace {

Vector10d closed_loop_rate(const PlanarBiped& model, WalkingController& ctrl,
                           double t, const Vector10d& x) {
  const BipedState s = BipedState::from_vec(x);
  const Vector4d u = ctrl.torque(s, t);
  Vector10d r;
  r << s.dq, forward_dynamics(model, s, u);
  return r;
}

double swing_height(const PlanarBiped& model, const Vector10d& x) {
  return model.swing_foot(BipedState::from_vec(x)).p.y();
}

TraceSample five_link_sample(const PlanarBiped& model, WalkingController& ctrl,
                             const BipedState& s, double t, int step) {
  TraceSample out;
  out.t = t;
  out.tau = t - ctrl.step_start_time();
  out.step = step;
  const CentroidalState c = centroidal(model, s);
  out.x_c = c.p_c.x();
  out.z_c = c.p_c.y();
  out.v_c = c.v_c.x();
  out.vz_c = c.v_c.y();
  out.L = c.L;
  out.L_c = c.L_c;
  out.q = s.q;
  out.dq = s.dq;
  out.u = ctrl.torque(s, t);
  out.p_des = ctrl.last_placement();
  const OutputReference ref = ctrl.reference(s, t);
  out.y = output_map(model, s).y0 - ref.h;

  const Vector5d ddq = forward_dynamics(model, s, out.u);
  const PointKinematics com = model.com(s);
  const Eigen::Vector2d a_c = com.J * ddq + com.Jdot_dq;
  const double m = model.total_mass();
  out.dL_c = m * model.gravity() * c.p_c.x() - m * wedge(c.p_c, a_c);
  return out;
}

}  // namespace

StepOutcome integrate_step(const PlanarBiped& model, WalkingController& ctrl,
                           const BipedState& start, double t0,
                           const IntegratorConfig& cfg,
                           const SampleSink& sink) {
  cfg.validate();
  const double T = ctrl.command().T;
  auto rate = [&](double t, const Vector10d& x) {
    return closed_loop_rate(model, ctrl, t, x);
  };
  const double h = cfg.step_size;
  const long max_steps = static_cast<long>(std::ceil(2.0 * T / h));

  Vector10d x = start.vec();
  double t = t0;
  double z = swing_height(model, x);
  if (sink) sink(t, start);
  for (long i = 0; i < max_steps; ++i) {
    const Vector10d xn = rk4_step(rate, t, x, h);
    if (!xn.allFinite()) throw NumericalError("state became non-finite");
    const double tn = t0 + static_cast<double>(i + 1) * h;
    const double zn = swing_height(model, xn);
    if (zn <= 0.0 && ctrl.phase(tn) >= 0.5) {
      if (z <= 0.0) {
        throw NumericalError("gait failure: swing foot below ground at mid-step");
      }
      auto foot = [&](double dt) { return swing_height(model, rk4_step(rate, t, x, dt)); };
      double lo = 0.0;
      double hi = h;
      double f_lo = z;
      double f_hi = zn;
      while (hi - lo > cfg.event_tolerance) {
        const double mid = 0.5 * (lo + hi);
        const double fm = foot(mid);
        if (fm <= 0.0) {
          hi = mid;
          f_hi = fm;
        } else {
          lo = mid;
          f_lo = fm;
        }
      }
      // Secant polish inside the bracket so the foot sits on the ground to
      // rounding level.
      double best = hi;
      double f_best = f_hi;
      double a = lo, fa = f_lo, b = hi, fb = f_hi;
      for (int k = 0; k < 4 && f_best != 0.0 && fa != fb; ++k) {
        const double c = b - fb * (b - a) / (fb - fa);
        if (!(c >= lo && c <= hi)) break;
        const double fc = foot(c);
        if (std::abs(fc) < std::abs(f_best)) {
          best = c;
          f_best = fc;
        }
        a = b;
        fa = fb;
        b = c;
        fb = fc;
      }
      StepOutcome out;
      out.pre_impact = BipedState::from_vec(rk4_step(rate, t, x, best));
      out.t_impact = t + best;
      return out;
    }
    x = xn;
    t = tn;
    z = zn;
    if (sink) sink(t, BipedState::from_vec(x));
  }
  throw NumericalError("gait failure: no impact within 2T");
}

HybridTrace simulate_five_link(const PlanarBiped& model,
                               WalkingController& ctrl, const BipedState& x0,
                               const FiveLinkRolloutOptions& options) {
  options.integrator.validate();
  if (options.steps < 0) throw ValidationError("steps must be non-negative");
  if (!(options.initial_phase >= 0.0 && options.initial_phase < 1.0)) {
    throw ValidationError("initial_phase must lie in [0, 1)");
  }
  const double m = model.total_mass();
  const int stride = options.integrator.sample_stride;

  HybridTrace out;
  BipedState state = x0;
  double t = 0.0;
  for (int k = 0; k < options.steps; ++k) {
    if (options.before_step) options.before_step(k, ctrl);
    if (k == 0 && options.initial_phase > 0.0) {
      ctrl.resume_step(t - options.initial_phase * ctrl.command().T,
                       options.initial_step_start_outputs);
    } else {
      ctrl.begin_step(state, t);
    }

    long index = 0;
    double sum_v = 0.0;
    long count = 0;
    const SampleSink sink = [&](double ts, const BipedState& s) {
      if (index++ % stride != 0) return;
      if (options.record_samples) {
        out.samples.push_back(five_link_sample(model, ctrl, s, ts, k));
        sum_v += out.samples.back().v_c;
      } else {
        sum_v += model.com(s).velocity(s.dq).x();
      }
      ++count;
    };
    const StepOutcome step =
        integrate_step(model, ctrl, state, t, options.integrator, sink);

    BipedState pre = step.pre_impact;
    if (options.zero_vertical_velocity_at_impact) {
      const Eigen::Matrix<double, 1, 5> Jz = model.com(pre).J.row(1);
      pre.dq -= Jz.transpose() * (Jz.dot(pre.dq) / Jz.squaredNorm());
    }
    const CentroidalState c_pre = centroidal(model, pre);
    const double p_des = ctrl.placement(pre, step.t_impact);
    const Eigen::Vector2d swing_foot = model.swing_foot(pre).p;
    const ImpactResult hit = impact(model, pre);
    const CentroidalState c_post = centroidal(model, hit.post);

    ImpactEvent event;
    event.step = k;
    event.t = step.t_impact;
    event.pre = five_link_sample(model, ctrl, pre, step.t_impact, k);
    ctrl.begin_step(hit.post, step.t_impact);
    event.post = five_link_sample(model, ctrl, hit.post, step.t_impact, k + 1);
    out.events.push_back(event);

    StepRecord rec;
    rec.index = k;
    rec.T_k = step.t_impact - t;
    rec.t_impact = step.t_impact;
    rec.L_minus = c_pre.L;
    rec.L_plus = c_post.L;
    rec.L_transfer =
        transfer_angular_momentum(c_pre.L, -swing_foot, c_pre.v_c, m);
    rec.placement = p_des;
    rec.x_c_minus = c_pre.p_c.x();
    rec.x_c_plus = c_post.p_c.x();
    rec.vz_minus = c_pre.v_c.y();
    rec.mean_v_c = count > 0 ? sum_v / static_cast<double>(count) : 0.0;
    out.per_step.push_back(rec);

    state = hit.post;
    t = step.t_impact;
  }
  return out;
}

HybridTrace simulate_reduced(PlantKind plant, const PendulumParams& params,
                             const GaitCommand& initial_cmd,
                             const AlipState& start,
                             const ReducedRolloutOptions& options) {
  if (plant == PlantKind::kFiveLink) {
    throw ValidationError("simulate_reduced needs the ALIP or LIP plant");
  }
  params.validate();
  options.integrator.validate();
  if (options.steps < 0) throw ValidationError("steps must be non-negative");
  const double m = params.mass;
  const double mh = params.mh();
  const double g = params.gravity;
  const bool lip = plant == PlantKind::kLip;

  // Plant coordinates: (x_c, L) for the ALIP, (x_c, v_c) for the LIP.
  auto rate = [&](double, const Eigen::Vector2d& s) -> Eigen::Vector2d {
    if (lip) return {s[1], params.ell * params.ell * s[0]};
    return {s[1] / mh, m * g * s[0]};
  };
  auto momentum = [&](const Eigen::Vector2d& s) { return lip ? mh * s[1] : s[1]; };

  GaitCommand cmd = initial_cmd;
  auto placement = [&](const Eigen::Vector2d& s, double remaining) {
    if (options.placement == PlacementModel::kAlip) {
      const double L_hat = predict_L_end(params, s[0], momentum(s), remaining);
      return foot_placement_asymptotic(params, L_hat, cmd.L_des, cmd.T,
                                       cmd.alpha);
    }
    const double v_hat = predict_v_end(params, s[0], momentum(s) / mh, remaining);
    return foot_placement_lip(params, v_hat, cmd.L_des / mh, cmd.T, cmd.alpha);
  };
  auto make_sample = [&](const Eigen::Vector2d& s, double t, double tau,
                         int step) {
    TraceSample out;
    out.t = t;
    out.tau = tau;
    out.step = step;
    out.x_c = s[0];
    out.z_c = params.height;
    out.L = momentum(s);
    out.v_c = out.L / mh;
    out.p_des = placement(s, std::max(0.0, cmd.T - tau));
    return out;
  };

  HybridTrace out;
  Eigen::Vector2d s(start.x_c, lip ? start.L / mh : start.L);
  double t = 0.0;
  for (int k = 0; k < options.steps; ++k) {
    if (options.before_step) options.before_step(k, cmd);
    cmd.validate();
    const long n = std::max(1L, std::lround(cmd.T / options.integrator.step_size));
    const double h = cmd.T / static_cast<double>(n);
    double sum_v = 0.0;
    long count = 0;
    for (long j = 0; j < n; ++j) {
      if (j % options.integrator.sample_stride == 0) {
        const TraceSample smp = make_sample(s, t + j * h, j * h, k);
        if (options.record_samples) out.samples.push_back(smp);
        sum_v += smp.v_c;
        ++count;
      }
      s = rk4_step(rate, j * h, s, h);
    }
    if (!s.allFinite()) throw NumericalError("reduced plant state became non-finite");
    const double t_impact = t + cmd.T;

    ImpactEvent event;
    event.step = k;
    event.t = t_impact;
    event.pre = make_sample(s, t_impact, cmd.T, k);

    const double p = placement(s, 0.0);
    const double L_minus = momentum(s);
    const double x_minus = s[0];
    s[0] = p;
    event.post = make_sample(s, t_impact, 0.0, k + 1);
    out.events.push_back(event);

    StepRecord rec;
    rec.index = k;
    rec.T_k = cmd.T;
    rec.t_impact = t_impact;
    rec.L_minus = L_minus;
    rec.L_plus = momentum(s);
    rec.L_transfer = transfer_angular_momentum(
        L_minus, Eigen::Vector2d(p - x_minus, 0.0),
        Eigen::Vector2d(L_minus / mh, 0.0), m);
    rec.placement = p;
    rec.x_c_minus = x_minus;
    rec.x_c_plus = p;
    rec.vz_minus = 0.0;
    rec.mean_v_c = sum_v / static_cast<double>(count);
    out.per_step.push_back(rec);
    t = t_impact;
  }
  return out;
}

ReturnMap five_link_return_map(const PlanarBiped& model,
                               const VirtualConstraintSpec& spec,
                               const GaitCommand& cmd, int steps_per_return,
                               const IntegratorConfig& cfg) {
  if (steps_per_return < 1) {
    throw ValidationError("steps_per_return must be at least 1");
  }
  cfg.validate();
  return [model, spec, cmd, steps_per_return, cfg](const Eigen::VectorXd& x) {
    if (x.size() != 10) throw ValidationError("return map expects a 10-vector");
    WalkingController ctrl(model, spec, cmd);
    BipedState state = BipedState::from_vec(x);
    double t = 0.0;
    for (int k = 0; k < steps_per_return; ++k) {
      ctrl.begin_step(state, t);
      const StepOutcome step = integrate_step(model, ctrl, state, t, cfg);
      state = impact_map(model, step.pre_impact);
      t = step.t_impact;
    }
    return Eigen::VectorXd(state.vec());
  };
}

namespace {

double fixed_point_x_c(const PendulumParams& p, double T, double L) {
  const double c = std::cosh(p.ell * T);
  const double k = p.mh() * p.ell * std::sinh(p.ell * T);
  return (1.0 - c) / k * L;
}

BipedState initial_on_constraints(const PlanarBiped& model,
                                  const VirtualConstraintSpec& spec,
                                  const GaitCommand& cmd, double x_c,
                                  double v_c) {
  // Trailing foot on the ground, as if the previous step ended with the CoM
  // at -x_c from it.
  return state_on_constraints(model, spec, cmd, 0.0, -x_c, -x_c, x_c, v_c,
                              nominal_posture_guess());
}

}  // namespace

MidStepState mid_step_state(const PlanarBiped& model,
                            const VirtualConstraintSpec& spec,
                            const GaitCommand& cmd, PlacementModel placement,
                            double hip_x, double hip_v, double phase) {
  detail::require_finite(hip_x, "hip_x");
  detail::require_finite(hip_v, "hip_v");
  if (!(phase > 0.0 && phase < 1.0)) {
    throw ValidationError("phase must lie in (0, 1)");
  }
  WalkingController ctrl(model, spec, cmd, placement);
  const double t_start = -phase * cmd.T;
  Vector5d guess = nominal_posture_guess();
  double p = 0.0;
  MidStepState out;
  out.phase = phase;
  for (int outer = 0; outer < 50; ++outer) {
    // Swing foot travels symmetrically from -p to p relative to the CoM.
    const double a = -p;
    auto solve = [&](double x_c, double v_c) {
      return state_on_constraints(model, spec, cmd, phase, a, p, x_c, v_c, guess);
    };
    double x_c = hip_x;
    BipedState s;
    for (int it = 0; it < 50; ++it) {
      s = solve(x_c, 0.0);
      const double err = model.hip(s).p.x() - hip_x;
      x_c -= err;  // the hip and the CoM move together to first order
      if (std::abs(err) < 1e-13) break;
    }
    guess = s.q;
    const BipedState s0 = solve(x_c, 0.0);
    const BipedState s1 = solve(x_c, 1.0);
    const double h0 = model.hip(s0).velocity(s0.dq).x();
    const double h1 = model.hip(s1).velocity(s1.dq).x();
    const double v_c = (hip_v - h0) / (h1 - h0);
    out.state = solve(x_c, v_c);
    out.step_start_outputs = Vector4d::Zero();
    out.step_start_outputs(2) = a;
    ctrl.resume_step(t_start, out.step_start_outputs);
    const double p_next = ctrl.placement(out.state, 0.0);
    if (std::abs(p_next - p) < 1e-12) return out;
    p = p_next;
  }
  throw NumericalError("mid_step_state: placement iteration did not converge");
}

BipedState nominal_initial_state(const PlanarBiped& model,
                                 const VirtualConstraintSpec& spec,
                                 const GaitCommand& cmd, double v_c) {
  const PendulumParams p =
      PendulumParams::make(model.total_mass(), spec.H, model.gravity());
  const double x_c = fixed_point_x_c(p, cmd.T, p.mh() * v_c);
  return initial_on_constraints(model, spec, cmd, x_c, v_c);
}

std::vector<EigenStudyRow> five_link_eigen_study(const EigenStudyConfig& cfg) {
  cfg.spec.validate();
  cfg.integrator.validate();
  detail::require_finite(cfg.speed, "speed");
  if (cfg.alphas.empty()) throw ValidationError("alphas must not be empty");
  if (cfg.deltas.empty()) throw ValidationError("deltas must not be empty");
  const PlanarBiped model = cfg.model ? *cfg.model : PlanarBiped::default_model();
  const PendulumParams params =
      PendulumParams::make(model.total_mass(), cfg.spec.H, model.gravity());

  GaitCommand cmd;
  cmd.T = cfg.T;
  cmd.L_des = params.mh() * cfg.speed;
  cmd.alpha = 0.0;
  cmd.validate();
  // The deadbeat orbit is a cheap seed for every alpha.
  const ReturnMap deadbeat =
      five_link_return_map(model, cfg.spec, cmd, cfg.steps_per_return, cfg.integrator);
  const FixedPointResult seed = find_fixed_point(
      deadbeat, nominal_initial_state(model, cfg.spec, cmd, cfg.speed).vec(),
      cfg.fixed_point_tolerance, cfg.max_iterations);

  std::vector<EigenStudyRow> rows;
  for (double alpha : cfg.alphas) {
    cmd.alpha = alpha;
    cmd.validate();
    const ReturnMap map =
        five_link_return_map(model, cfg.spec, cmd, cfg.steps_per_return, cfg.integrator);
    const FixedPointResult fp = find_fixed_point(
        map, seed.x, cfg.fixed_point_tolerance, cfg.max_iterations);
    EigenStudyRow row;
    row.alpha = alpha;
    row.reduced = alip_closed_loop_poincare(params, cfg.T, alpha, cmd.L_des,
                                            cfg.steps_per_return)
                      .spectral_radius;
    for (const PoincareResult& r : numeric_poincare_jacobian(
             map, fp.x, cfg.deltas, cfg.steps_per_return)) {
      row.full.push_back(r.spectral_radius);
    }
    row.iterations = fp.iterations;
    row.residual = fp.residual;
    row.fixed_point = fp.x;
    rows.push_back(std::move(row));
  }
  return rows;
}

void ScenarioConfig::validate() const {
  try {
    gait.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("gait: ") + e.what());
  }
  try {
    constraints.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("constraints: ") + e.what());
  }
  integrator.validate();
  if (duration < 0) throw ValidationError("duration must be non-negative");
  static const std::set<std::string> known = {"trace", "steps", "events"};
  for (const auto& name : outputs) {
    if (!known.count(name)) {
      throw ValidationError("outputs: unknown artifact '" + name +
                            "' (expected trace, steps or events)");
    }
  }
  detail::require_finite(initial_velocity, "initial_velocity");
  if (initial_x_c) detail::require_finite(*initial_x_c, "initial_x_c");
  detail::require_finite(initial_velocity_noise, "initial_velocity_noise");
  if (initial_velocity_noise < 0.0) {
    throw ValidationError("initial_velocity_noise must be non-negative");
  }
  if (ramp_L_des_to) {
    detail::require_finite(*ramp_L_des_to, "ramp.L_des_to");
    if (ramp_steps < 1) throw ValidationError("ramp.steps must be at least 1");
  }
  if (plant != PlantKind::kFiveLink &&
      initial_anchor == InitialAnchor::kHipMidStep) {
    throw ValidationError("initial.anchor hip_mid_step applies to the FIVE_LINK plant only");
  }
  if (plant != PlantKind::kFiveLink && zero_vertical_velocity_at_impact) {
    throw ValidationError(
        "zero_vertical_velocity_at_impact applies to the FIVE_LINK plant only");
  }
  if (model) {
    for (int i = 0; i < 5; ++i) {
      model->links()[static_cast<std::size_t>(i)].validate(
          std::string("model.links.") + link_key(static_cast<Link>(i)));
    }
  }
}

PlanarBiped ScenarioConfig::biped() const {
  return model ? *model : PlanarBiped::default_model();
}

HybridTrace run_scenario(const ScenarioConfig& config,
                         const std::optional<std::filesystem::path>& out_dir) {
  config.validate();
  const PlanarBiped model = config.biped();
  const PendulumParams params =
      PendulumParams::make(model.total_mass(), config.constraints.H,
                           model.gravity());

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double v0 = config.initial_velocity;
  if (config.initial_velocity_noise > 0.0) {
    v0 += config.initial_velocity_noise * normal(rng);
  }
  const bool mid_step = config.initial_anchor == InitialAnchor::kHipMidStep;
  const double x0 = config.initial_x_c.value_or(
      mid_step ? 0.0
               : fixed_point_x_c(params, config.gait.T, params.mh() * v0));

  const double L_start = config.gait.L_des;
  auto ramp_value = [&](int step) {
    if (!config.ramp_L_des_to) return L_start;
    const double f =
        std::min(1.0, static_cast<double>(step + 1) / config.ramp_steps);
    return L_start + f * (*config.ramp_L_des_to - L_start);
  };

  HybridTrace trace;
  if (config.plant == PlantKind::kFiveLink) {
    WalkingController ctrl(model, config.constraints, config.gait,
                           config.placement);
    FiveLinkRolloutOptions opts;
    opts.steps = config.duration;
    opts.integrator = config.integrator;
    opts.zero_vertical_velocity_at_impact =
        config.zero_vertical_velocity_at_impact;
    opts.before_step = [&](int k, WalkingController& c) {
      GaitCommand cmd = c.command();
      cmd.L_des = ramp_value(k);
      c.set_command(cmd);
    };
    BipedState start;
    if (config.duration > 0 && mid_step) {
      const MidStepState ms = mid_step_state(model, config.constraints, config.gait,
                                             config.placement, x0, v0);
      start = ms.state;
      opts.initial_phase = ms.phase;
      opts.initial_step_start_outputs = ms.step_start_outputs;
    } else if (config.duration > 0) {
      start = initial_on_constraints(model, config.constraints, config.gait, x0, v0);
    }
    trace = simulate_five_link(model, ctrl, start, opts);
  } else {
    ReducedRolloutOptions opts;
    opts.steps = config.duration;
    opts.integrator = config.integrator;
    opts.placement = config.placement;
    opts.before_step = [&](int k, GaitCommand& cmd) { cmd.L_des = ramp_value(k); };
    trace = simulate_reduced(config.plant, params, config.gait,
                             AlipState{x0, params.mh() * v0, 0.0}, opts);
  }
  if (out_dir) write_artifacts(trace, config, *out_dir);
  return trace;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char ch;
  while (in.get(ch)) {
    hash ^= static_cast<unsigned char>(ch);
    hash *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, hash);
  return buf;
}

namespace {

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path,
            const std::vector<std::string>& header)
      : out_(path) {
    if (!out_) throw ValidationError("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) {
      out_ << (i ? "," : "") << header[i];
    }
    out_ << '\n';
  }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      out_ << (i ? "," : "") << format_double(values[i]);
    }
    out_ << '\n';
    ++rows_;
  }

  std::size_t rows() const { return rows_; }

 private:
  std::ofstream out_;
  std::size_t rows_ = 0;
};

std::vector<std::string> indexed(const std::string& stem, int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

std::vector<std::string> concat(std::vector<std::vector<std::string>> parts) {
  std::vector<std::string> out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

void append(std::vector<double>& row, const Eigen::VectorXd& v) {
  row.insert(row.end(), v.data(), v.data() + v.size());
}

std::vector<double> sample_row(const TraceSample& s) {
  std::vector<double> row = {s.t,   s.tau, static_cast<double>(s.step),
                             s.x_c, s.z_c, s.v_c,
                             s.vz_c, s.L,  s.L_c,
                             s.dL_c};
  append(row, s.q);
  append(row, s.dq);
  append(row, s.y);
  append(row, s.u);
  row.push_back(s.p_des);
  return row;
}

const std::vector<std::string>& sample_header() {
  static const std::vector<std::string> header = concat(
      {{"t", "tau", "step", "x_c", "z_c", "v_c", "vz_c", "L", "L_c", "dL_c"},
       indexed("q", 5),
       indexed("dq", 5),
       indexed("y", 4),
       indexed("u", 4),
       {"p_des"}});
  return header;
}

}  // namespace

std::vector<std::string> write_artifacts(const HybridTrace& trace,
                                         const ScenarioConfig& config,
                                         const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw ValidationError("cannot create output directory " + out_dir.string() +
                          ": " + ec.message());
  }
  std::vector<std::pair<std::string, std::size_t>> written;
  auto wants = [&](const std::string& name) {
    return std::find(config.outputs.begin(), config.outputs.end(), name) !=
           config.outputs.end();
  };

  if (wants("trace")) {
    CsvWriter csv(out_dir / "trace.csv", sample_header());
    for (const auto& s : trace.samples) csv.row(sample_row(s));
    written.emplace_back("trace.csv", csv.rows());
  }
  if (wants("steps")) {
    CsvWriter csv(out_dir / "steps.csv",
                  {"step", "T_k", "t_impact", "L_minus", "L_plus",
                   "L_transfer", "placement", "x_c_minus", "x_c_plus",
                   "vz_minus", "mean_v_c"});
    for (const auto& r : trace.per_step) {
      csv.row({static_cast<double>(r.index), r.T_k, r.t_impact, r.L_minus,
               r.L_plus, r.L_transfer, r.placement, r.x_c_minus, r.x_c_plus,
               r.vz_minus, r.mean_v_c});
    }
    written.emplace_back("steps.csv", csv.rows());
  }
  if (wants("events")) {
    std::vector<std::string> header = {"step", "t"};
    for (const char* side : {"pre_", "post_"}) {
      for (const auto& col : sample_header()) {
        if (col != "t") header.push_back(side + col);
      }
    }
    CsvWriter csv(out_dir / "events.csv", header);
    for (const auto& e : trace.events) {
      std::vector<double> row = {static_cast<double>(e.step), e.t};
      for (const TraceSample* s : {&e.pre, &e.post}) {
        const std::vector<double> r = sample_row(*s);
        row.insert(row.end(), r.begin() + 1, r.end());
      }
      csv.row(row);
    }
    written.emplace_back("events.csv", csv.rows());
  }

  nlohmann::json files = nlohmann::json::array();
  std::vector<std::string> names;
  for (const auto& [name, rows] : written) {
    files.push_back({{"name", name},
                     {"rows", rows},
                     {"fnv1a64", file_checksum(out_dir / name)}});
    names.push_back(name);
  }
  nlohmann::json manifest = {{"format", "alip-scenario/1"},
                             {"config", detail::scenario_json(config)},
                             {"files", files}};
  std::ofstream side(out_dir / "manifest.json");
  if (!side) throw ValidationError("cannot write manifest.json");
  side << manifest.dump(2) << '\n';
  names.push_back("manifest.json");
  return names;
}

ComparisonSummary lip_vs_alip_comparison(const ScenarioConfig& config) {
  config.validate();
  ComparisonSummary out;
  for (PlacementModel which : {PlacementModel::kAlip, PlacementModel::kLip}) {
    ScenarioConfig cfg = config;
    cfg.placement = which;
    const HybridTrace trace = run_scenario(cfg);
    const bool alip = which == PlacementModel::kAlip;
    auto& mean_v = alip ? out.mean_v_alip : out.mean_v_lip;
    auto& L_end = alip ? out.L_end_alip : out.L_end_lip;
    auto& placement = alip ? out.placement_alip : out.placement_lip;
    for (const auto& r : trace.per_step) {
      mean_v.push_back(r.mean_v_c);
      L_end.push_back(r.L_minus);
      placement.push_back(r.placement);
    }
  }
  return out;
}

}  // namespace alip
