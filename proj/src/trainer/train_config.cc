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

#include "myodyn/trainer/train_config.h"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "myodyn/error.h"
#include "myodyn/harness/io.h"

namespace myodyn {

LossMode ParseLossMode(std::string_view name) {
  if (name == "knowledge") return LossMode::kKnowledge;
  if (name == "supervised") return LossMode::kSupervised;
  Fail(ErrorKind::kConfig, "unknown loss_mode '" + std::string(name) +
                               "' (expected knowledge|supervised)");
}

const char* LossModeName(LossMode mode) {
  return mode == LossMode::kKnowledge ? "knowledge" : "supervised";
}

void TrainConfig::Validate() const {
  auto bad = [](const std::string& what) { Fail(ErrorKind::kConfig, what); };
  if (!(lr > 0.0)) bad("lr must be > 0");
  if (batch_size < 1) bad("batch_size must be >= 1");
  if (max_iters < 1) bad("max_iters must be >= 1");
  if (!(omega >= 0.0)) bad("omega must be >= 0");
  if (!(beta > 0.0)) bad("beta must be > 0");
  if (window < 2) bad("window must be >= 2");
  if (stride < 1) bad("stride must be >= 1");
  if (!(split > 0.0 && split < 1.0)) bad("split must lie strictly between 0 and 1");
  if (eval_every < 1) bad("eval_every must be >= 1");
  network.Validate();
}

std::string TrainConfig::ToYaml() const {
  std::ostringstream os;
  os << "lr: " << FormatNumber(lr) << "\n"
     << "batch_size: " << batch_size << "\n"
     << "max_iters: " << max_iters << "\n"
     << "omega: " << FormatNumber(omega) << "\n"
     << "beta: " << FormatNumber(beta) << "\n"
     << "window: " << window << "\n"
     << "stride: " << stride << "\n"
     << "split: " << FormatNumber(split) << "\n"
     << "seed: " << seed << "\n"
     << "loss_mode: " << LossModeName(loss_mode) << "\n"
     << "enabled_losses: \"" << enabled_losses.ToString() << "\"\n"
     << "eval_every: " << eval_every << "\n"
     << "network:\n"
     << "  hidden: " << network.hidden << "\n"
     << "  layers: " << network.layers << "\n"
     << "  fc: " << network.fc << "\n"
     << "  dropout: " << FormatNumber(network.dropout) << "\n";
  return os.str();
}

std::uint64_t TrainConfig::Hash() const {
  // FNV-1a
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : ToYaml()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

TrainConfig ParseTrainConfig(const std::string& text) {
  TrainConfig c;
  try {
    const YAML::Node root = YAML::Load(text);
    if (!root || root.IsNull()) return c;
    if (!root.IsMap()) Fail(ErrorKind::kConfig, "train config must be a mapping");
    static const std::set<std::string> kKeys = {
        "lr", "batch_size", "max_iters", "omega", "beta", "window", "stride",
        "split", "seed", "loss_mode", "enabled_losses", "eval_every", "network"};
    for (const auto& kv : root) {
      const auto key = kv.first.as<std::string>();
      if (!kKeys.count(key)) Fail(ErrorKind::kConfig, "unknown train config key '" + key + "'");
    }
    auto get = [&](const char* key, auto& dst) {
      if (root[key]) dst = root[key].as<std::decay_t<decltype(dst)>>();
    };
    get("lr", c.lr);
    get("batch_size", c.batch_size);
    get("max_iters", c.max_iters);
    get("omega", c.omega);
    get("beta", c.beta);
    get("window", c.window);
    get("stride", c.stride);
    get("split", c.split);
    get("seed", c.seed);
    get("eval_every", c.eval_every);
    if (root["loss_mode"]) c.loss_mode = ParseLossMode(root["loss_mode"].as<std::string>());
    if (const YAML::Node e = root["enabled_losses"]) {
      if (e.IsSequence()) {
        std::string letters;
        for (const auto& item : e) letters += item.as<std::string>();
        c.enabled_losses = LossMask::Parse(letters);
      } else {
        c.enabled_losses = LossMask::Parse(e.as<std::string>());
      }
    }
    if (const YAML::Node n = root["network"]) {
      if (!n.IsMap()) Fail(ErrorKind::kConfig, "train config 'network' must be a mapping");
      static const std::set<std::string> kNetworkKeys = {"hidden", "layers", "fc", "dropout"};
      for (const auto& kv : n) {
        const auto key = kv.first.as<std::string>();
        if (!kNetworkKeys.count(key)) {
          Fail(ErrorKind::kConfig, "unknown train config key 'network." + key + "'");
        }
      }
      if (n["hidden"]) c.network.hidden = n["hidden"].as<int>();
      if (n["layers"]) c.network.layers = n["layers"].as<int>();
      if (n["fc"]) c.network.fc = n["fc"].as<int>();
      if (n["dropout"]) c.network.dropout = n["dropout"].as<double>();
    }
  } catch (const YAML::Exception& e) {
    Fail(ErrorKind::kConfig, std::string("train config: ") + e.what());
  }
  c.Validate();
  return c;
}

TrainConfig LoadTrainConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kIo, "cannot open train config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseTrainConfig(ss.str());
}

bool ApplySeedOverride(TrainConfig& config) {
  const char* env = std::getenv("MYODYN_SEED");
  if (env == nullptr || *env == '\0') return false;
  std::uint64_t seed = 0;
  const std::string_view s(env);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    Fail(ErrorKind::kConfig, "MYODYN_SEED is not an unsigned integer: '" +
                                 std::string(s) + "'");
  }
  config.seed = seed;
  return true;
}

}  // namespace myodyn
