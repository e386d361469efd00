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

#include "myodyn/so/static_optimization.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "myodyn/error.h"
#include "myodyn/msk/joint.h"
#include "myodyn/msk/muscle.h"

namespace myodyn {

const char* SoStatusName(SoStatus status) {
  switch (status) {
    case SoStatus::kOptimal:
      return "optimal";
    case SoStatus::kClamped:
      return "clamped";
    case SoStatus::kInfeasible:
      return "infeasible";
  }
  return "unknown";
}

SoProblem BuildProblem(const MusculoskeletalModel& model, double q,
                       double qdot, double qddot) {
  SoProblem p;
  const std::size_t n = model.muscle_count();
  p.c.reserve(n);
  p.d.reserve(n);
  p.r.reserve(n);
  for (const MuscleParams& m : model.muscles) {
    const MuscleState s = ResolveState(m, q, qdot);
    const HillCoefficients h = HillDecomposition(m, s);
    p.c.push_back(h.active);
    p.d.push_back(h.passive);
    p.r.push_back(MomentArm(m.path, q));
  }
  p.tau_req = InverseDynamicsTorque(model.joint, q, qdot, qddot);
  return p;
}

SoSolution SolveTimestep(const SoProblem& p) {
  const std::size_t n = p.size();
  if (p.d.size() != n || p.r.size() != n) {
    std::ostringstream os;
    os << "SO problem: c/d/r lengths " << p.c.size() << "/" << p.d.size()
       << "/" << p.r.size();
    Fail(ErrorKind::kDimension, os.str());
  }
  if (!(p.lower < p.upper)) {
    Fail(ErrorKind::kContract, "SO problem: lower bound must be < upper bound");
  }

  std::vector<double> k(n);
  double passive_torque = 0.0;
  double k_abs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    k[i] = p.c[i] * p.r[i];
    passive_torque += p.d[i] * p.r[i];
    k_abs += std::abs(k[i]);
  }
  const double target = p.tau_req - passive_torque;

  auto activation = [&](double lambda, std::size_t i) {
    if (k[i] == 0.0) return p.lower;
    return std::clamp(0.5 * lambda * k[i], p.lower, p.upper);
  };
  auto active_torque = [&](double lambda) {
    double g = 0.0;
    for (std::size_t i = 0; i < n; ++i) g += k[i] * activation(lambda, i);
    return g;
  };

  // Reachable active torque over the box.
  double g_lo = 0.0, g_hi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    g_lo += k[i] * (k[i] > 0.0 ? p.lower : p.upper);
    g_hi += k[i] * (k[i] > 0.0 ? p.upper : p.lower);
  }
  const double tol = 1e-12 * std::max({1.0, std::abs(target), k_abs});

  SoSolution sol;
  sol.a.assign(n, p.lower);
  if (target > g_hi + tol || target < g_lo - tol) {
    const bool up = target > g_hi;
    for (std::size_t i = 0; i < n; ++i) {
      if (k[i] == 0.0) continue;
      sol.a[i] = ((k[i] > 0.0) == up) ? p.upper : p.lower;
    }
    sol.status = SoStatus::kInfeasible;
  } else {
    // g(lambda) is nondecreasing and piecewise linear with kinks where a
    // coordinate enters or leaves a bound. Walk the kinks to the segment that
    // brackets the target, then re-solve the equality on its free set.
    std::vector<double> kinks;
    for (std::size_t i = 0; i < n; ++i) {
      if (k[i] == 0.0) continue;
      kinks.push_back(2.0 * p.lower / k[i]);
      kinks.push_back(2.0 * p.upper / k[i]);
    }
    std::sort(kinks.begin(), kinks.end());
    double lambda = 0.0;
    if (!kinks.empty()) {
      lambda = kinks.back();
      double prev_lambda = kinks.front();
      double prev_g = active_torque(prev_lambda);
      if (prev_g >= target) {
        lambda = prev_lambda;
      } else {
        for (std::size_t j = 1; j < kinks.size(); ++j) {
          const double g = active_torque(kinks[j]);
          if (g >= target) {
            lambda = g > prev_g ? prev_lambda + (target - prev_g) *
                                                    (kinks[j] - prev_lambda) /
                                                    (g - prev_g)
                                : kinks[j];
            break;
          }
          prev_lambda = kinks[j];
          prev_g = g;
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) sol.a[i] = activation(lambda, i);

    double fixed_torque = 0.0, free_k2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (sol.a[i] > p.lower && sol.a[i] < p.upper) {
        free_k2 += k[i] * k[i];
      } else {
        fixed_torque += k[i] * sol.a[i];
      }
    }
    if (free_k2 > 0.0) {
      lambda = 2.0 * (target - fixed_torque) / free_k2;
      for (std::size_t i = 0; i < n; ++i) {
        if (sol.a[i] > p.lower && sol.a[i] < p.upper) {
          sol.a[i] = std::clamp(0.5 * lambda * k[i], p.lower, p.upper);
        }
      }
    }
    sol.lambda = lambda;
    sol.status = SoStatus::kOptimal;
    for (std::size_t i = 0; i < n; ++i) {
      const double stationarity = 2.0 * sol.a[i] - lambda * k[i];
      double violation;
      if (sol.a[i] <= p.lower) {
        sol.status = SoStatus::kClamped;
        violation = std::max(0.0, -stationarity);
      } else if (sol.a[i] >= p.upper) {
        sol.status = SoStatus::kClamped;
        violation = std::max(0.0, stationarity);
      } else {
        violation = std::abs(stationarity);
      }
      sol.kkt_residual = std::max(sol.kkt_residual, violation);
    }
  }

  sol.forces.resize(n);
  double tau = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sol.forces[i] = p.c[i] * sol.a[i] + p.d[i];
    tau += sol.forces[i] * p.r[i];
  }
  sol.torque_residual = p.tau_req - tau;
  return sol;
}

SoTrajectory SolveTrajectory(const MusculoskeletalModel& model,
                             const KinematicSeries& series) {
  series.Validate();
  SoTrajectory out;
  out.steps.reserve(series.size());
  for (std::size_t t = 0; t < series.size(); ++t) {
    const SoProblem p =
        BuildProblem(model, series.q[t], series.qdot[t], series.qddot[t]);
    out.steps.push_back(SolveTimestep(p));
    if (out.steps.back().status == SoStatus::kInfeasible) ++out.infeasible;
  }
  return out;
}

}  // namespace myodyn
