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

#include "alip/config_io.hpp"

#include <array>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "alip/errors.hpp"
#include "json_bridge.hpp"

namespace alip {

using nlohmann::json;

namespace {

constexpr std::array<const char*, 5> kLinkKeys = {
    "torso", "stance_thigh", "stance_shin", "swing_thigh", "swing_shin"};

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

// Walks one JSON object, remembering which keys were consumed.
class Reader {
 public:
  Reader(const json& node, std::string path)
      : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) {
      throw ValidationError((path_.empty() ? "document" : path_) +
                            " must be a JSON object");
    }
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  double number(const std::string& key, double fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number()) throw type_error(key, "a number");
    return v->get<double>();
  }

  std::optional<double> optional_number(const std::string& key) {
    const json* v = find(key);
    if (!v || v->is_null()) return std::nullopt;
    if (!v->is_number()) throw type_error(key, "a number");
    return v->get<double>();
  }

  long long integer(const std::string& key, long long fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) throw type_error(key, "an integer");
    return v->get<long long>();
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number_unsigned()) throw type_error(key, "a non-negative integer");
    return v->get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw type_error(key, "a boolean");
    return v->get<bool>();
  }

  std::optional<std::string> string(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) throw type_error(key, "a string");
    return v->get<std::string>();
  }

  Vector4d vector4(const std::string& key, const Vector4d& fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (v->is_number()) return Vector4d::Constant(v->get<double>());
    if (!v->is_array() || v->size() != 4) {
      throw type_error(key, "a number or an array of four numbers");
    }
    Vector4d out;
    for (int i = 0; i < 4; ++i) {
      const json& e = (*v)[static_cast<std::size_t>(i)];
      if (!e.is_number()) throw type_error(key, "an array of four numbers");
      out[i] = e.get<double>();
    }
    return out;
  }

  std::optional<Reader> object(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    return Reader(*v, field(key));
  }

  std::string field(const std::string& key) const { return join(path_, key); }

  void finish() const {
    for (const auto& item : node_.items()) {
      if (!seen_.count(item.key())) {
        throw ValidationError("unknown field '" + field(item.key()) + "'");
      }
    }
  }

 private:
  ValidationError type_error(const std::string& key, const char* expected) const {
    return ValidationError("field '" + field(key) + "' must be " + expected);
  }

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("invalid JSON: ") + e.what());
  }
}

// Rewrites a validation message so it names the field under `prefix`.
template <class F>
void with_prefix(const std::string& prefix, F&& f) {
  try {
    f();
  } catch (const ValidationError& e) {
    throw ValidationError(prefix + ": " + e.what());
  }
}

PlanarBiped read_biped(Reader& r) {
  const double gravity = r.number("gravity", kStandardGravity);
  auto links_reader = r.object("links");
  if (!links_reader) {
    throw ValidationError("field '" + r.field("links") + "' is required");
  }
  std::array<LinkParams, 5> links{};
  for (std::size_t i = 0; i < links.size(); ++i) {
    auto lr = links_reader->object(kLinkKeys[i]);
    if (!lr) {
      throw ValidationError("field '" + links_reader->field(kLinkKeys[i]) +
                            "' is required");
    }
    LinkParams& link = links[i];
    link.mass = lr->number("mass", 0.0);
    link.length = lr->number("length", 0.0);
    link.com_offset = lr->number("com_offset", 0.5 * link.length);
    link.inertia = lr->number("inertia", link.mass * link.length * link.length / 12.0);
    lr->finish();
    link.validate(links_reader->field(kLinkKeys[i]));
  }
  links_reader->finish();
  r.finish();
  detail::require_finite(gravity, "gravity");
  if (!(gravity > 0.0)) throw ValidationError("field 'gravity' must be positive");
  return PlanarBiped(links, gravity);
}

json biped_json(const PlanarBiped& model) {
  json links = json::object();
  for (std::size_t i = 0; i < kLinkKeys.size(); ++i) {
    const LinkParams& l = model.links()[i];
    links[kLinkKeys[i]] = {{"mass", l.mass},
                           {"length", l.length},
                           {"com_offset", l.com_offset},
                           {"inertia", l.inertia}};
  }
  return {{"gravity", model.gravity()}, {"links", links}};
}

GaitCommand read_gait(Reader& r) {
  GaitCommand cmd;
  cmd.L_des = r.number("L_des", cmd.L_des);
  cmd.T = r.number("T", cmd.T);
  cmd.W = r.number("W", cmd.W);
  cmd.alpha = r.number("alpha", cmd.alpha);
  cmd.delta_D = r.number("delta_D", cmd.delta_D);
  if (auto stance = r.string("next_stance")) {
    if (*stance == "left") {
      cmd.next_stance = Stance::kLeft;
    } else if (*stance == "right") {
      cmd.next_stance = Stance::kRight;
    } else {
      throw ValidationError("field '" + r.field("next_stance") +
                            "' must be \"left\" or \"right\"");
    }
  }
  r.finish();
  return cmd;
}

json gait_json(const GaitCommand& cmd) {
  return {{"L_des", cmd.L_des},
          {"T", cmd.T},
          {"W", cmd.W},
          {"alpha", cmd.alpha},
          {"next_stance", cmd.next_stance == Stance::kLeft ? "left" : "right"},
          {"delta_D", cmd.delta_D}};
}

VirtualConstraintSpec read_spec(Reader& r) {
  VirtualConstraintSpec spec;
  spec.H = r.number("H", spec.H);
  spec.z_cl = r.number("z_cl", spec.z_cl);
  spec.Kp = r.vector4("Kp", spec.Kp);
  spec.Kd = r.vector4("Kd", spec.Kd);
  spec.height_amplitude = r.number("height_amplitude", spec.height_amplitude);
  r.finish();
  return spec;
}

json vec_json(const Vector4d& v) { return json::array({v[0], v[1], v[2], v[3]}); }

json spec_json(const VirtualConstraintSpec& spec) {
  return {{"H", spec.H},
          {"z_cl", spec.z_cl},
          {"Kp", vec_json(spec.Kp)},
          {"Kd", vec_json(spec.Kd)},
          {"height_amplitude", spec.height_amplitude}};
}

const char* plant_name(PlantKind p) {
  switch (p) {
    case PlantKind::kAlip: return "ALIP";
    case PlantKind::kLip: return "LIP";
    case PlantKind::kFiveLink: return "FIVE_LINK";
  }
  return "ALIP";
}

}  // namespace

const char* link_key(Link which) {
  return kLinkKeys[static_cast<std::size_t>(which)];
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PlanarBiped biped_from_json(const std::string& text) {
  const json doc = parse(text);
  Reader r(doc, "");
  return read_biped(r);
}

std::string biped_to_json(const PlanarBiped& model) {
  return biped_json(model).dump(2);
}

PlanarBiped load_biped(const std::filesystem::path& path) {
  return biped_from_json(read_text_file(path));
}

GaitCommand gait_command_from_json(const std::string& text) {
  const json doc = parse(text);
  Reader r(doc, "");
  GaitCommand cmd = read_gait(r);
  cmd.validate();
  return cmd;
}

std::string gait_command_to_json(const GaitCommand& cmd) {
  return gait_json(cmd).dump(2);
}

VirtualConstraintSpec constraint_spec_from_json(const std::string& text) {
  const json doc = parse(text);
  Reader r(doc, "");
  VirtualConstraintSpec spec = read_spec(r);
  spec.validate();
  return spec;
}

std::string constraint_spec_to_json(const VirtualConstraintSpec& spec) {
  return spec_json(spec).dump(2);
}

ScenarioConfig scenario_from_json(const std::string& text,
                                  const std::filesystem::path& base_dir) {
  const json doc = parse(text);
  Reader r(doc, "");
  ScenarioConfig cfg;
  if (auto plant = r.string("plant")) {
    if (*plant == "ALIP") {
      cfg.plant = PlantKind::kAlip;
    } else if (*plant == "LIP") {
      cfg.plant = PlantKind::kLip;
    } else if (*plant == "FIVE_LINK") {
      cfg.plant = PlantKind::kFiveLink;
    } else {
      throw ValidationError("field 'plant' must be ALIP, LIP or FIVE_LINK");
    }
  }
  if (auto placement = r.string("placement")) {
    if (*placement == "ALIP") {
      cfg.placement = PlacementModel::kAlip;
    } else if (*placement == "LIP") {
      cfg.placement = PlacementModel::kLip;
    } else {
      throw ValidationError("field 'placement' must be ALIP or LIP");
    }
  }
  if (auto g = r.object("gait")) cfg.gait = read_gait(*g);
  if (auto c = r.object("constraints")) cfg.constraints = read_spec(*c);
  const long long duration = r.integer("duration", cfg.duration);
  if (duration < 0 || duration > 1000000) {
    throw ValidationError("field 'duration' must be in [0, 1000000]");
  }
  cfg.duration = static_cast<int>(duration);
  if (auto integ = r.object("integrator")) {
    cfg.integrator.step_size = integ->number("step_size", cfg.integrator.step_size);
    cfg.integrator.event_tolerance =
        integ->number("event_tolerance", cfg.integrator.event_tolerance);
    const long long stride = integ->integer("sample_stride", cfg.integrator.sample_stride);
    if (stride < 1 || stride > 1000000) {
      throw ValidationError("field 'integrator.sample_stride' must be in [1, 1000000]");
    }
    cfg.integrator.sample_stride = static_cast<int>(stride);
    integ->finish();
  }
  cfg.seed = r.unsigned_integer("seed", cfg.seed);
  if (const json* outputs = r.find("outputs")) {
    if (!outputs->is_array()) {
      throw ValidationError("field 'outputs' must be an array of strings");
    }
    cfg.outputs.clear();
    for (const auto& item : *outputs) {
      if (!item.is_string()) {
        throw ValidationError("field 'outputs' must be an array of strings");
      }
      cfg.outputs.push_back(item.get<std::string>());
    }
  }
  if (auto init = r.object("initial")) {
    if (auto anchor = init->string("anchor")) {
      if (*anchor == "com") {
        cfg.initial_anchor = InitialAnchor::kCom;
      } else if (*anchor == "hip_mid_step") {
        cfg.initial_anchor = InitialAnchor::kHipMidStep;
      } else {
        throw ValidationError(
            "field 'initial.anchor' must be \"com\" or \"hip_mid_step\"");
      }
    }
    cfg.initial_velocity = init->number("velocity", cfg.initial_velocity);
    cfg.initial_x_c = init->optional_number("x_c");
    cfg.initial_velocity_noise =
        init->number("velocity_noise", cfg.initial_velocity_noise);
    init->finish();
  }
  if (auto ramp = r.object("ramp")) {
    cfg.ramp_L_des_to = ramp->optional_number("L_des_to");
    if (!cfg.ramp_L_des_to) {
      throw ValidationError("field 'ramp.L_des_to' is required");
    }
    const long long steps = ramp->integer("steps", 0);
    if (steps < 1 || steps > 1000000) {
      throw ValidationError("field 'ramp.steps' must be in [1, 1000000]");
    }
    cfg.ramp_steps = static_cast<int>(steps);
    ramp->finish();
  }
  cfg.zero_vertical_velocity_at_impact = r.boolean(
      "zero_vertical_velocity_at_impact", cfg.zero_vertical_velocity_at_impact);
  if (auto m = r.object("model")) {
    with_prefix("model", [&] { cfg.model = read_biped(*m); });
  }
  if (auto file = r.string("model_file")) {
    if (cfg.model) {
      throw ValidationError("fields 'model' and 'model_file' are exclusive");
    }
    std::filesystem::path p(*file);
    if (p.is_relative()) p = base_dir / p;
    with_prefix("model_file", [&] { cfg.model = load_biped(p); });
  }
  r.finish();
  cfg.validate();
  return cfg;
}

std::string scenario_to_json(const ScenarioConfig& config) {
  return detail::scenario_json(config).dump(2);
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(read_text_file(path), path.parent_path());
}

namespace detail {

json scenario_json(const ScenarioConfig& config) {
  json initial = {{"anchor", config.initial_anchor == InitialAnchor::kCom
                                 ? "com"
                                 : "hip_mid_step"},
                  {"velocity", config.initial_velocity},
                  {"velocity_noise", config.initial_velocity_noise}};
  if (config.initial_x_c) initial["x_c"] = *config.initial_x_c;
  json out = {
      {"plant", plant_name(config.plant)},
      {"placement", config.placement == PlacementModel::kAlip ? "ALIP" : "LIP"},
      {"gait", gait_json(config.gait)},
      {"constraints", spec_json(config.constraints)},
      {"duration", config.duration},
      {"integrator",
       {{"step_size", config.integrator.step_size},
        {"event_tolerance", config.integrator.event_tolerance},
        {"sample_stride", config.integrator.sample_stride}}},
      {"seed", config.seed},
      {"outputs", config.outputs},
      {"initial", initial},
      {"zero_vertical_velocity_at_impact",
       config.zero_vertical_velocity_at_impact},
  };
  if (config.ramp_L_des_to) {
    out["ramp"] = {{"L_des_to", *config.ramp_L_des_to},
                   {"steps", config.ramp_steps}};
  }
  if (config.model) out["model"] = biped_json(*config.model);
  return out;
}

}  // namespace detail

}  // namespace alip
