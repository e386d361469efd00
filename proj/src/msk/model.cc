// Copyright 2026 The MyoDyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "myodyn/msk/model.h"

#include <fstream>
#include <numbers>
#include <sstream>
#include <utility>

#include <yaml-cpp/yaml.h>

#include "myodyn/error.h"

namespace myodyn {
namespace {

using UnitTable = std::vector<std::pair<std::string, double>>;

const UnitTable kAngle = {{"rad", 1.0}, {"deg", std::numbers::pi / 180.0}};

[[noreturn]] void ConfigError(const std::string& where,
                              const std::string& what) {
  Fail(ErrorKind::kConfig, where + ": " + what);
}

double UnitScale(const std::string& where, const std::string& unit,
                 const UnitTable& units) {
  for (const auto& [name, scale] : units) {
    if (name == unit) return scale;
  }
  std::string expected;
  for (const auto& u : units) expected += (expected.empty() ? "" : ", ") + u.first;
  ConfigError(where, "unit '" + unit + "' not accepted (expected " + expected +
                         ")");
}

// Reads {value: X, unit: U} and converts to SI.
double Quantity(const YAML::Node& parent, const std::string& key,
                const std::string& where, const UnitTable& units) {
  const YAML::Node node = parent[key];
  if (!node) ConfigError(where, "missing field '" + key + "'");
  if (!node.IsMap() || !node["value"] || !node["unit"]) {
    ConfigError(where + "." + key, "expected {value: X, unit: U}");
  }
  const double scale =
      UnitScale(where + "." + key, node["unit"].as<std::string>(), units);
  return node["value"].as<double>() * scale;
}

double Quantity(const YAML::Node& parent, const std::string& key,
                const std::string& where, const std::string& unit) {
  return Quantity(parent, key, where, UnitTable{{unit, 1.0}});
}

JointModel ParseJoint(const YAML::Node& node) {
  if (!node || !node.IsMap()) ConfigError("joint", "missing joint section");
  JointModel j;
  j.name = node["name"] ? node["name"].as<std::string>() : "joint";
  const std::string where = "joint '" + j.name + "'";
  j.inertia = Quantity(node, "inertia", where, "kg*m^2");
  j.mass = Quantity(node, "mass", where, "kg");
  j.com_dist = Quantity(node, "com_dist", where, "m");
  j.gravity_sign = node["gravity_sign"] ? node["gravity_sign"].as<double>() : 1.0;
  j.damping = node["damping"] ? Quantity(node, "damping", where, "N*m*s/rad")
                              : 0.0;
  const YAML::Node range = node["range"];
  if (!range || !range["min"] || !range["max"] || !range["unit"]) {
    ConfigError(where, "range needs {min, max, unit}");
  }
  const double scale =
      UnitScale(where + ".range", range["unit"].as<std::string>(), kAngle);
  j.q_min = range["min"].as<double>() * scale;
  j.q_max = range["max"].as<double>() * scale;
  j.Validate();
  return j;
}

MuscleParams ParseMuscle(const YAML::Node& node, const JointModel& joint) {
  MuscleParams m;
  if (!node["name"]) ConfigError("muscles", "muscle entry without a name");
  m.name = node["name"].as<std::string>();
  const std::string where = "muscle '" + m.name + "'";
  m.f_o = Quantity(node, "f_o", where, "N");
  m.l_o = Quantity(node, "l_o", where, "m");
  m.phi_o = Quantity(node, "phi_o", where, kAngle);
  m.l_ts = Quantity(node, "l_ts", where, "m");
  m.v_o = Quantity(node, "v_o", where, "l_o/s");
  const YAML::Node path = node["path"];
  if (!path || !path["coeffs"] || !path["coeffs"].IsSequence()) {
    ConfigError(where, "path needs a coeffs list");
  }
  if (!path["unit"] || path["unit"].as<std::string>() != "m") {
    ConfigError(where + ".path", "path unit must be 'm'");
  }
  m.path.coeffs = path["coeffs"].as<std::vector<double>>();
  m.path.q_min = joint.q_min;
  m.path.q_max = joint.q_max;
  m.Validate();
  return m;
}

}  // namespace

std::vector<std::string> MusculoskeletalModel::muscle_names() const {
  std::vector<std::string> names;
  names.reserve(muscles.size());
  for (const MuscleParams& m : muscles) names.push_back(m.name);
  return names;
}

MusculoskeletalModel ParseModel(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    Fail(ErrorKind::kConfig, std::string("model document: ") + e.what());
  }
  try {
    MusculoskeletalModel model;
    model.joint = ParseJoint(root["joint"]);
    const YAML::Node muscles = root["muscles"];
    if (!muscles || !muscles.IsSequence() || muscles.size() == 0) {
      ConfigError("muscles", "expected a non-empty list");
    }
    for (const YAML::Node& m : muscles) {
      model.muscles.push_back(ParseMuscle(m, model.joint));
    }
    return model;
  } catch (const YAML::Exception& e) {
    Fail(ErrorKind::kConfig, std::string("model document: ") + e.what());
  }
}

MusculoskeletalModel LoadModel(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kIo, "cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseModel(ss.str());
}

}  // namespace myodyn
