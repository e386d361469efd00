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

#include "myodyn/harness/trajectory.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "myodyn/error.h"

namespace myodyn {
namespace {

constexpr int kNoiseComponents = 3;
constexpr double kNoiseMinHz = 0.5;
constexpr double kNoiseMaxHz = 1.5;

}  // namespace

void KinematicSeries::Validate() const {
  const std::size_t n = q.size();
  if (time.size() != n || qdot.size() != n || qddot.size() != n) {
    std::ostringstream os;
    os << "trajectory " << trajectory_id << ": column lengths time=" << time.size()
       << " q=" << n << " qdot=" << qdot.size() << " qddot=" << qddot.size();
    Fail(ErrorKind::kDimension, os.str());
  }
  if (!(rate_hz > 0.0)) {
    Fail(ErrorKind::kContract, "trajectory sample rate must be positive");
  }
  const double dt = 1.0 / rate_hz;
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(time[i] - time[i - 1] - dt) > 1e-6 * std::max(1.0, dt) + 1e-9) {
      std::ostringstream os;
      os << "trajectory " << trajectory_id << ": non-uniform sampling at row "
         << i;
      Fail(ErrorKind::kContract, os.str());
    }
  }
}

Protocol ParseProtocol(std::string_view name) {
  if (name == "knee") return Protocol::kKnee;
  if (name == "elbow") return Protocol::kElbow;
  Fail(ErrorKind::kConfig,
       "unknown protocol '" + std::string(name) + "' (expected knee|elbow)");
}

const char* ProtocolName(Protocol protocol) {
  return protocol == Protocol::kKnee ? "knee" : "elbow";
}

double ProtocolAngle(Protocol protocol, double frequency_hz, double t) {
  const double c = 1.0 - std::cos(2.0 * std::numbers::pi * frequency_hz * t);
  if (protocol == Protocol::kKnee) return 0.25 * std::numbers::pi * c;
  return 0.2 + 1.1 * c;
}

std::pair<double, double> ProtocolFrequencyRange(Protocol protocol) {
  if (protocol == Protocol::kKnee) return {0.28, 0.38};
  return {0.4, 0.6};
}

KinematicDataset GenerateTrajectories(const TrajectoryOptions& options) {
  if (options.trials < 1) Fail(ErrorKind::kConfig, "trials must be >= 1");
  if (!(options.rate_hz > 0.0) || !(options.duration_s > 0.0)) {
    Fail(ErrorKind::kConfig, "duration and rate must be positive");
  }
  if (!(options.noise_rms_deg >= 0.0)) {
    Fail(ErrorKind::kConfig, "noise_rms_deg must be >= 0");
  }
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto [f_lo, f_hi] = ProtocolFrequencyRange(options.protocol);
  const auto samples =
      static_cast<std::size_t>(std::llround(options.duration_s * options.rate_hz));
  const double noise_rms = options.noise_rms_deg * std::numbers::pi / 180.0;

  KinematicDataset out;
  for (int trial = 0; trial < options.trials; ++trial) {
    const double f = f_lo + (f_hi - f_lo) * unit(rng);
    double amp[kNoiseComponents], freq[kNoiseComponents];
    double power = 0.0;
    for (int k = 0; k < kNoiseComponents; ++k) {
      amp[k] = 0.5 + unit(rng);
      freq[k] = kNoiseMinHz + (kNoiseMaxHz - kNoiseMinHz) * unit(rng);
      power += 0.5 * amp[k] * amp[k];
    }
    const double gain = power > 0.0 ? noise_rms / std::sqrt(power) : 0.0;

    KinematicSeries s;
    s.trajectory_id = trial;
    s.rate_hz = options.rate_hz;
    s.time.resize(samples);
    s.q.resize(samples);
    for (std::size_t i = 0; i < samples; ++i) {
      const double t = static_cast<double>(i) / options.rate_hz;
      double noise = 0.0;
      for (int k = 0; k < kNoiseComponents; ++k) {
        noise += amp[k] * std::sin(2.0 * std::numbers::pi * freq[k] * t);
      }
      s.time[i] = t;
      s.q[i] = ProtocolAngle(options.protocol, f, t) + gain * noise;
    }
    Derivatives d = Differentiate(s.q, options.rate_hz);
    s.qdot = std::move(d.qdot);
    s.qddot = std::move(d.qddot);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<double> SmoothMovingAverage(std::span<const double> q) {
  const auto n = static_cast<std::ptrdiff_t>(q.size());
  std::vector<double> s(q.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t half = std::min<std::ptrdiff_t>({2, i, n - 1 - i});
    double acc = 0.0;
    for (std::ptrdiff_t j = i - half; j <= i + half; ++j) acc += q[j];
    s[i] = acc / static_cast<double>(2 * half + 1);
  }
  return s;
}

Derivatives Differentiate(std::span<const double> q, double rate_hz) {
  if (q.size() < 5) {
    std::ostringstream os;
    os << "differentiation needs at least 5 samples, got " << q.size();
    Fail(ErrorKind::kDimension, os.str());
  }
  const std::vector<double> s = SmoothMovingAverage(q);
  const std::size_t n = s.size();
  const double h = 1.0 / rate_hz;
  Derivatives d;
  d.qdot.resize(n);
  d.qddot.resize(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    d.qdot[i] = (s[i + 1] - s[i - 1]) / (2.0 * h);
    d.qddot[i] = (s[i + 1] - 2.0 * s[i] + s[i - 1]) / (h * h);
  }
  d.qdot[0] = (-3.0 * s[0] + 4.0 * s[1] - s[2]) / (2.0 * h);
  d.qdot[n - 1] = (3.0 * s[n - 1] - 4.0 * s[n - 2] + s[n - 3]) / (2.0 * h);
  d.qddot[0] = (2.0 * s[0] - 5.0 * s[1] + 4.0 * s[2] - s[3]) / (h * h);
  d.qddot[n - 1] =
      (2.0 * s[n - 1] - 5.0 * s[n - 2] + 4.0 * s[n - 3] - s[n - 4]) / (h * h);
  return d;
}

}  // namespace myodyn
