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

// alipsim: command-line front end for the simulation and analysis library.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "alip/analysis.hpp"
#include "alip/config_io.hpp"
#include "alip/errors.hpp"
#include "alip/estimate.hpp"
#include "alip/simlab.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<double> row) {
    if (row.size() != header_.size()) {
      throw alip::NumericalError("internal: table row width mismatch");
    }
    rows_.push_back(std::move(row));
  }

  std::size_t size() const { return rows_.size(); }

  void write(const fs::path& path) const {
    std::ofstream out(path);
    if (!out) throw alip::ValidationError("cannot write " + path.string());
    for (std::size_t i = 0; i < header_.size(); ++i) {
      out << (i ? "," : "") << header_[i];
    }
    out << '\n';
    for (const auto& row : rows_) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        out << (i ? "," : "") << alip::format_double(row[i]);
      }
      out << '\n';
    }
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

// Collects the files of one command and writes manifest.json next to them.
class Output {
 public:
  Output(fs::path dir, std::string command)
      : dir_(std::move(dir)), command_(std::move(command)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) {
      throw alip::ValidationError("cannot create output directory " +
                                  dir_.string() + ": " + ec.message());
    }
  }

  void table(const std::string& name, const Table& t) {
    t.write(dir_ / name);
    files_.push_back({{"name", name},
                      {"rows", t.size()},
                      {"fnv1a64", alip::file_checksum(dir_ / name)}});
  }

  void finish(json args, json summary) {
    const json manifest = {{"format", "alipsim/1"},
                           {"command", command_},
                           {"config", std::move(args)},
                           {"summary", std::move(summary)},
                           {"files", files_}};
    std::ofstream out(dir_ / "manifest.json");
    if (!out) throw alip::ValidationError("cannot write manifest.json");
    out << manifest.dump(2) << '\n';
  }

  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::string command_;
  json files_ = json::array();
};

struct Common {
  std::string out = "alipsim-out";
  std::optional<std::uint64_t> seed;
};

alip::PendulumParams default_pendulum(double H) {
  const alip::PlanarBiped model = alip::PlanarBiped::default_model();
  return alip::PendulumParams::make(model.total_mass(), H, model.gravity());
}

alip::ScenarioConfig walking_scenario(double speed, double T, int steps) {
  alip::ScenarioConfig cfg;
  cfg.plant = alip::PlantKind::kFiveLink;
  cfg.gait.T = T;
  cfg.duration = steps;
  const alip::PendulumParams p = default_pendulum(cfg.constraints.H);
  cfg.gait.L_des = p.mh() * speed;
  cfg.initial_velocity = speed;
  return cfg;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string config;
};

int run_simulate(const SimulateArgs& a, const Common& c) {
  alip::ScenarioConfig cfg = alip::load_scenario(a.config);
  if (c.seed) cfg.seed = *c.seed;
  const alip::HybridTrace trace = alip::run_scenario(cfg, fs::path(c.out));
  std::cout << "steps " << trace.per_step.size() << ", samples "
            << trace.samples.size() << ", artifacts in " << c.out << '\n';
  if (!trace.per_step.empty()) {
    const auto& last = trace.per_step.back();
    std::cout << "last step: T_k " << last.T_k << " s, L- " << last.L_minus
              << ", mean v_c " << last.mean_v_c << " m/s\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- poincare

struct PoincareArgs {
  std::vector<double> alphas = {0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> deltas = {0.05, 0.1, 0.2};
  double speed = 0.5;
  double T = 0.35;
  bool reduced_only = false;
};

int run_poincare(const PoincareArgs& a, const Common& c) {
  Output out(c.out, "poincare");
  const alip::PendulumParams p = default_pendulum(0.6);
  std::vector<alip::EigenStudyRow> rows;
  if (!a.reduced_only) {
    alip::EigenStudyConfig study;
    study.alphas = a.alphas;
    study.deltas = a.deltas;
    study.speed = a.speed;
    study.T = a.T;
    rows = alip::five_link_eigen_study(study);
  }

  std::vector<std::string> header = {"alpha", "alip_two_step"};
  if (!a.reduced_only) header.push_back("five_link_two_step");
  Table dominant(header);
  std::vector<std::string> delta_header = {"alpha"};
  for (double d : a.deltas) delta_header.push_back("delta_" + alip::format_double(d));
  Table sensitivity(delta_header);

  const std::size_t mid = a.deltas.size() / 2;
  for (std::size_t i = 0; i < a.alphas.size(); ++i) {
    const double alip_rho =
        alip::alip_closed_loop_poincare(p, a.T, a.alphas[i], p.mh() * a.speed, 2)
            .spectral_radius;
    std::vector<double> row = {a.alphas[i], alip_rho};
    std::cout << "alpha " << a.alphas[i] << ": ALIP " << alip_rho;
    if (!a.reduced_only) {
      row.push_back(rows[i].full[mid]);
      std::vector<double> srow = {a.alphas[i]};
      srow.insert(srow.end(), rows[i].full.begin(), rows[i].full.end());
      sensitivity.add(srow);
      std::cout << ", five-link " << rows[i].full[mid];
    }
    std::cout << '\n';
    dominant.add(row);
  }
  out.table("dominant_eigenvalues.csv", dominant);
  if (!a.reduced_only) out.table("delta_sensitivity.csv", sensitivity);
  out.finish({{"alphas", a.alphas},
              {"deltas", a.deltas},
              {"speed", a.speed},
              {"T", a.T},
              {"reduced_only", a.reduced_only}},
             json::object());
  return kExitOk;
}

// -------------------------------------------------------- predict-fidelity

struct FidelityArgs {
  double speed = 2.0;
  double T = 0.35;
  int steps = 12;
  int warmup = 4;
  double height_amplitude = 0.0;
};

int run_fidelity(const FidelityArgs& a, const Common& c) {
  if (a.warmup < 0 || a.warmup >= a.steps) {
    throw alip::ValidationError("--warmup must be in [0, steps)");
  }
  Output out(c.out, "predict-fidelity");
  alip::ScenarioConfig cfg = walking_scenario(a.speed, a.T, a.steps);
  cfg.constraints.height_amplitude = a.height_amplitude;
  const alip::HybridTrace trace = alip::run_scenario(cfg);
  const alip::PendulumParams p = default_pendulum(cfg.constraints.H);
  const std::vector<alip::StepSamples> all = alip::step_samples(trace);
  const std::vector<alip::StepSamples> steps(all.begin() + a.warmup, all.end());

  Table plot({"step", "tau", "L_over_mH", "L_end_pred_over_mH", "v_c", "v_end_pred"});
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const auto& step = steps[k];
    for (const auto& s : step) {
      const double remaining = step.back().tau - s.tau;
      plot.add({static_cast<double>(k + static_cast<std::size_t>(a.warmup)), s.tau,
                s.L / p.mh(),
                alip::predict_L_end(p, s.x_c, s.L, remaining) / p.mh(), s.v_c,
                alip::predict_v_end(p, s.x_c, s.v_c, remaining)});
    }
  }
  const alip::Flatness f = alip::prediction_fidelity(steps, p);
  json summary = {{"flatness_L", f.L}, {"flatness_v", f.v}, {"ratio", f.L / f.v}};
  std::cout << "flatness L/mH " << f.L << " m/s, v_c " << f.v
            << " m/s, ratio " << f.L / f.v << '\n';
  if (a.height_amplitude != 0.0) {
    const alip::VirtualConstraintSpec spec = cfg.constraints;
    const double T = a.T;
    const double varying = alip::varying_height_prediction(
        steps, p, [spec, T](double tau) {
          const Eigen::Vector3d z = alip::height_profile(spec, std::min(1.0, tau / T));
          return Eigen::Vector2d(z[0], tau < T ? z[1] / T : 0.0);
        });
    summary["flatness_L_varying_height"] = varying;
    std::cout << "flatness L/mH with height profile " << varying << " m/s\n";
  }
  out.table("prediction.csv", plot);
  out.finish(json::parse(alip::scenario_to_json(cfg)), summary);
  return kExitOk;
}

// ------------------------------------------------------------ error-decomp

struct ErrorDecompArgs {
  double speed = 1.0;
  double T = 0.35;
  int steps = 8;
};

int run_error_decomp(const ErrorDecompArgs& a, const Common& c) {
  Output out(c.out, "error-decomp");
  alip::ScenarioConfig cfg = walking_scenario(a.speed, a.T, a.steps);
  const alip::HybridTrace trace = alip::run_scenario(cfg);
  const alip::PendulumParams p = default_pendulum(cfg.constraints.H);

  Table terms({"step", "t1", "t2", "e1", "e2", "e3", "identity_residual"});
  Table series({"t", "step", "L_c", "dL_c"});
  for (const auto& event : trace.events) {
    alip::SampledSignal Lc;
    alip::SampledSignal dLc;
    for (const auto& s : trace.samples) {
      if (s.step != event.step) continue;
      Lc.t.push_back(s.t);
      Lc.value.push_back(s.L_c);
      dLc.value.push_back(s.dL_c);
      series.add({s.t, static_cast<double>(s.step), s.L_c, s.dL_c});
    }
    Lc.t.push_back(event.t);
    Lc.value.push_back(event.pre.L_c);
    dLc.value.push_back(event.pre.dL_c);
    dLc.t = Lc.t;
    const double t1 = Lc.t.front();
    const double t2 = Lc.t.back();
    const alip::ErrorDecomp e = alip::error_terms(Lc, dLc, p, t1, t2);
    terms.add({static_cast<double>(event.step), t1, t2, e.e1, e.e2, e.e3,
               e.e1 - (e.e2 + e.e3)});
    std::cout << "step " << event.step << ": e1 " << e.e1 << ", e2 " << e.e2
              << ", e3 " << e.e3 << '\n';
  }
  out.table("error_terms.csv", terms);
  out.table("centroidal_momentum.csv", series);
  out.finish(json::parse(alip::scenario_to_json(cfg)), json::object());
  return kExitOk;
}

// -------------------------------------------------------------------- bode

struct BodeArgs {
  double omega_min = 0.0;
  double omega_max = 0.0;
  int points = 200;
  double height = 0.6;
};

int run_bode(const BodeArgs& a, const Common& c) {
  const alip::PendulumParams p = default_pendulum(a.height);
  const double lo = a.omega_min > 0.0 ? a.omega_min : p.ell / 100.0;
  const double hi = a.omega_max > 0.0 ? a.omega_max : p.ell * 100.0;
  if (!(hi > lo) || a.points < 2) {
    throw alip::ValidationError("need omega_max > omega_min and points >= 2");
  }
  Output out(c.out, "bode");
  Table t({"omega", "alip_gain", "lip_gain", "alip_gain_db", "lip_gain_db"});
  for (int i = 0; i < a.points; ++i) {
    const double w = lo * std::pow(hi / lo, static_cast<double>(i) / (a.points - 1));
    const double ga = alip::error_transfer_magnitude(alip::ModelKind::kAlip, w, p);
    const double gl = alip::error_transfer_magnitude(alip::ModelKind::kLip, w, p);
    t.add({w, ga, gl, 20.0 * std::log10(ga), 20.0 * std::log10(gl)});
  }
  out.table("bode.csv", t);
  out.finish({{"omega_min", lo}, {"omega_max", hi}, {"points", a.points},
              {"height", a.height}, {"ell", p.ell}},
             json::object());
  std::cout << "corner frequency " << p.ell << " rad/s, " << a.points
            << " points in " << c.out << '\n';
  return kExitOk;
}

// ------------------------------------------------------------- kalman-demo

struct KalmanArgs {
  double sigma = 0.5;
  double Q = 1e-4;
  double speed = 0.5;
  std::size_t samples = 10000;
};

int run_kalman(const KalmanArgs& a, const Common& c) {
  Output out(c.out, "kalman-demo");
  const alip::PendulumParams p = default_pendulum(0.6);
  alip::KalmanState ks;
  ks.Q = a.Q;
  ks.R_meas = a.sigma * a.sigma;
  alip::KalmanDemoConfig cfg;
  cfg.sigma = a.sigma;
  cfg.samples = a.samples;
  cfg.seed = c.seed.value_or(1);
  cfg.L_des = p.mh() * a.speed;
  cfg.start = {0.0, cfg.L_des, 0.0};
  ks.L_hat = cfg.L_des;
  const auto rows = alip::kalman_demo(p, ks, cfg);

  Table t({"t", "L_true", "L_obs", "L_hat"});
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    t.add({r.t, r.L_true, r.L_obs, r.L_hat});
    if (i >= rows.size() / 2) {
      const double e = r.L_hat - r.L_true;
      sum += e * e;
      ++n;
    }
  }
  out.table("kalman.csv", t);
  const double var = n ? sum / static_cast<double>(n) : 0.0;
  out.finish({{"sigma", a.sigma}, {"Q", a.Q}, {"speed", a.speed},
              {"samples", a.samples}, {"seed", cfg.seed}},
             {{"estimate_error_variance", var},
              {"steady_state_P", alip::steady_state_variance(ks.Q, ks.R_meas)}});
  std::cout << "estimate error variance " << var << " (measurement "
            << a.sigma * a.sigma << ")\n";
  return kExitOk;
}

// -------------------------------------------------------- compare-lip-alip

struct CompareArgs {
  double speed = 0.5;
  double T = 0.35;
  int steps = 10;
  std::string plant = "FIVE_LINK";
  std::optional<double> Kp;
  std::optional<double> Kd;
};

int run_compare(const CompareArgs& a, const Common& c) {
  alip::ScenarioConfig cfg = walking_scenario(a.speed, a.T, a.steps);
  cfg.gait.L_des = 0.0;
  if (a.Kp) cfg.constraints.Kp.setConstant(*a.Kp);
  if (a.Kd) cfg.constraints.Kd.setConstant(*a.Kd);
  if (a.plant == "ALIP") {
    cfg.plant = alip::PlantKind::kAlip;
  } else if (a.plant == "FIVE_LINK") {
    // Hip centered over the contact point in mid-step.
    cfg.initial_anchor = alip::InitialAnchor::kHipMidStep;
  } else {
    throw alip::ValidationError("--plant must be FIVE_LINK or ALIP");
  }
  Output out(c.out, "compare-lip-alip");
  const alip::ComparisonSummary s = alip::lip_vs_alip_comparison(cfg);
  Table t({"step", "mean_v_alip", "mean_v_lip", "L_end_alip", "L_end_lip",
           "placement_alip", "placement_lip"});
  for (std::size_t k = 0; k < s.mean_v_alip.size(); ++k) {
    t.add({static_cast<double>(k), s.mean_v_alip[k], s.mean_v_lip[k],
           s.L_end_alip[k], s.L_end_lip[k], s.placement_alip[k],
           s.placement_lip[k]});
  }
  out.table("comparison.csv", t);
  json summary = json::object();
  if (!s.mean_v_alip.empty()) {
    summary = {{"final_mean_v_alip", s.mean_v_alip.back()},
               {"final_mean_v_lip", s.mean_v_lip.back()}};
    std::cout << "after " << s.mean_v_alip.size() << " steps: mean v_c "
              << s.mean_v_alip.back() << " m/s (ALIP placement), "
              << s.mean_v_lip.back() << " m/s (LIP placement)\n";
  }
  out.finish(json::parse(alip::scenario_to_json(cfg)), summary);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Angular-momentum pendulum walking: simulation and analysis"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--out", common.out, "Output directory")->capture_default_str();
  app.add_option("--seed", common.seed, "Random seed");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario from a JSON config");
  simulate->add_option("config", sim.config, "Scenario JSON")->required()->check(CLI::ExistingFile);

  PoincareArgs pc;
  auto* poincare = app.add_subcommand("poincare", "Dominant return-map eigenvalues versus alpha");
  poincare->add_option("--alpha-grid", pc.alphas, "Comma-separated alphas")->delimiter(',');
  poincare->add_option("--deltas", pc.deltas, "Comma-separated perturbation sizes")->delimiter(',');
  poincare->add_option("--speed", pc.speed, "Orbit speed (m/s)");
  poincare->add_option("--step-time", pc.T, "Step duration (s)");
  poincare->add_flag("--reduced-only", pc.reduced_only, "Skip the five-link model");

  FidelityArgs fa;
  auto* fidelity = app.add_subcommand("predict-fidelity", "Flatness of end-of-step predictions");
  fidelity->add_option("--speed", fa.speed, "Walking speed (m/s)");
  fidelity->add_option("--step-time", fa.T, "Step duration (s)");
  fidelity->add_option("--steps", fa.steps, "Steps to simulate");
  fidelity->add_option("--warmup", fa.warmup, "Initial steps excluded from the metric");
  fidelity->add_option("--height-amplitude", fa.height_amplitude, "CoM height oscillation (m)");

  ErrorDecompArgs ea;
  auto* errors = app.add_subcommand("error-decomp", "Per-step prediction error terms");
  errors->add_option("--speed", ea.speed, "Walking speed (m/s)");
  errors->add_option("--step-time", ea.T, "Step duration (s)");
  errors->add_option("--steps", ea.steps, "Steps to simulate");

  BodeArgs ba;
  auto* bode = app.add_subcommand("bode", "Error transfer-function magnitudes");
  bode->add_option("--omega-min", ba.omega_min, "Lowest frequency (rad/s)");
  bode->add_option("--omega-max", ba.omega_max, "Highest frequency (rad/s)");
  bode->add_option("--points", ba.points, "Number of log-spaced points");
  bode->add_option("--height", ba.height, "Pendulum height (m)");

  KalmanArgs ka;
  auto* kalman = app.add_subcommand("kalman-demo", "Filter noisy angular momentum");
  kalman->add_option("--sigma", ka.sigma, "Measurement noise std (kg m^2/s)");
  kalman->add_option("--Q", ka.Q, "Process noise variance");
  kalman->add_option("--speed", ka.speed, "Walking speed (m/s)");
  kalman->add_option("--samples", ka.samples, "Number of samples");

  CompareArgs ca;
  auto* compare = app.add_subcommand("compare-lip-alip", "LIP- versus ALIP-based placement");
  compare->add_option("--speed", ca.speed, "Initial speed (m/s)");
  compare->add_option("--step-time", ca.T, "Step duration (s)");
  compare->add_option("--steps", ca.steps, "Steps to simulate");
  compare->add_option("--plant", ca.plant, "FIVE_LINK or ALIP");
  compare->add_option("--kp", ca.Kp, "Output tracking stiffness (1/s^2)");
  compare->add_option("--kd", ca.Kd, "Output tracking damping (1/s)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*simulate) return run_simulate(sim, common);
    if (*poincare) return run_poincare(pc, common);
    if (*fidelity) return run_fidelity(fa, common);
    if (*errors) return run_error_decomp(ea, common);
    if (*bode) return run_bode(ba, common);
    if (*kalman) return run_kalman(ka, common);
    if (*compare) return run_compare(ca, common);
  } catch (const alip::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const alip::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}
