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


#include <benchmark/benchmark.h>

#include "alip/biped.hpp"
#include "alip/control.hpp"
#include "alip/simlab.hpp"

namespace {

alip::BipedState sample_state() {
  alip::BipedState s;
  s.q = alip::nominal_posture_guess();
  s.dq << 0.9, -0.3, 0.2, 0.5, -0.4;
  return s;
}

void BM_DynamicsTerms(benchmark::State& state) {
  const alip::PlanarBiped model = alip::PlanarBiped::default_model();
  const alip::BipedState s = sample_state();
  for (auto _ : state) benchmark::DoNotOptimize(model.dynamics_terms(s));
}
BENCHMARK(BM_DynamicsTerms);

void BM_ForwardDynamics(benchmark::State& state) {
  const alip::PlanarBiped model = alip::PlanarBiped::default_model();
  const alip::BipedState s = sample_state();
  const alip::Vector4d u(1.0, -2.0, 3.0, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(alip::forward_dynamics(model, s, u));
  }
}
BENCHMARK(BM_ForwardDynamics);

void BM_ControllerTorque(benchmark::State& state) {
  const alip::PlanarBiped model = alip::PlanarBiped::default_model();
  alip::VirtualConstraintSpec spec;
  alip::GaitCommand cmd;
  cmd.L_des = 9.6;
  alip::WalkingController ctrl(model, spec, cmd);
  const alip::BipedState s = alip::nominal_initial_state(model, spec, cmd, 0.5);
  ctrl.begin_step(s, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(ctrl.torque(s, 0.1));
}
BENCHMARK(BM_ControllerTorque);

void BM_ImpactMap(benchmark::State& state) {
  const alip::PlanarBiped model = alip::PlanarBiped::default_model();
  const alip::BipedState s = sample_state();
  for (auto _ : state) benchmark::DoNotOptimize(alip::impact(model, s));
}
BENCHMARK(BM_ImpactMap);

void BM_FiveLinkStep(benchmark::State& state) {
  const alip::PlanarBiped model = alip::PlanarBiped::default_model();
  alip::VirtualConstraintSpec spec;
  alip::GaitCommand cmd;
  cmd.L_des = 9.6;
  const alip::BipedState s = alip::nominal_initial_state(model, spec, cmd, 0.5);
  alip::IntegratorConfig cfg;
  for (auto _ : state) {
    alip::WalkingController ctrl(model, spec, cmd);
    ctrl.begin_step(s, 0.0);
    benchmark::DoNotOptimize(alip::integrate_step(model, ctrl, s, 0.0, cfg));
  }
}
BENCHMARK(BM_FiveLinkStep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
