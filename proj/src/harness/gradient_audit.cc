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

#include "myodyn/harness/gradient_audit.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "myodyn/losses/losses.h"
#include "myodyn/network/network.h"
#include "myodyn/so/static_optimization.h"

namespace myodyn {
namespace {

using ad::Matrix;
using ad::Tape;
using ad::Var;

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  Matrix Uniform(Eigen::Index r, Eigen::Index c, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = u(rng_);
    return m;
  }
  // Uniform on [-hi, -lo] U [lo, hi].
  Matrix AwayFromZero(Eigen::Index r, Eigen::Index c, double lo, double hi) {
    Matrix m = Uniform(r, c, lo, hi);
    std::bernoulli_distribution flip(0.5);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      if (flip(rng_)) m(i) = -m(i);
    }
    return m;
  }
  std::uint64_t Next() { return rng_(); }

 private:
  std::mt19937_64 rng_;
};

// Contracts an op's output with fixed random weights so every output entry
// enters the scalar with its own coefficient.
Var Contract(Tape& tape, const Var& out, std::uint64_t seed) {
  Sampler s(seed);
  return ad::Sum(out * tape.Constant(s.Uniform(out.rows(), out.cols(), 0.5, 1.5)));
}

// Hill tendon force of one muscle built from tape ops, on the lengthening
// branch of the force-velocity curve (v >= 0) and above optimal length, so
// both the active and passive curves are smooth at the sample point.
Var HillTendonForce(Tape& tape, const MuscleParams& p, const Var& a,
                    const Var& l_mt, const Var& v_norm) {
  const double h = p.l_o * std::sin(p.phi_o);
  const Var l_m = ad::Sqrt(ad::Square(l_mt - p.l_ts) + h * h);
  const Var phi = ad::Asin(ad::Div(tape.Constant(h), l_m));
  const Var l_norm = l_m * (1.0 / p.l_o);
  const Var f_a = ad::Exp(ad::Square(l_norm - 1.0) * (-1.0 / 0.45));
  const Var f_v = ad::Div(v_norm * 1.4 + 0.0375, v_norm + 0.0375);
  const Var f_p = (ad::Exp((ad::MaxWithConst(l_norm, 1.0) - 1.0) * (5.0 / 0.6)) - 1.0) *
                  (1.0 / (std::exp(5.0) - 1.0));
  return (a * f_v * f_a + f_p) * ad::Cos(phi) * p.f_o;
}

NetworkParams ToyNetwork(std::uint64_t seed, int muscles) {
  NetworkConfig c;
  c.hidden = 4;
  c.layers = 2;
  c.fc = 8;
  c.muscles = muscles;
  c.dropout = 0.3;
  NetworkParams p = InitParams(c, seed, Eigen::RowVectorXd::Constant(muscles, 1.0));
  // Nonzero biases so their gradients are exercised at a generic point.
  Sampler s(seed ^ 0x9e3779b97f4a7c15ull);
  VisitTensors(p.weights, [&](const std::string& name, Matrix& m) {
    if (name.back() == 'b' || name.find(".b_") != std::string::npos) {
      m = s.Uniform(m.rows(), m.cols(), -0.3, 0.3);
    }
  });
  return p;
}

std::vector<Matrix> Flatten(const NetworkParams& p) {
  std::vector<Matrix> out;
  VisitTensors(p.weights, [&](const std::string&, const Matrix& m) { out.push_back(m); });
  return out;
}

// Rebinds `leaves` (in VisitTensors order) as the weights of `shape`.
NetworkWeights<Var> AsWeights(const NetworkParams& shape, std::span<const Var> leaves) {
  NetworkWeights<Var> w;
  w.gru.resize(shape.weights.gru.size());
  std::size_t k = 0;
  VisitTensors(w, [&](const std::string&, Var& v) { v = leaves[k++]; });
  return w;
}

}  // namespace

bool AuditResult::ok() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const AuditEntry& e) { return e.report.ok; });
}

double AuditResult::max_rel_err() const {
  double m = 0.0;
  for (const auto& e : entries) m = std::max(m, e.report.max_rel_err);
  return m;
}

MusculoskeletalModel TwoMuscleToyModel() {
  MusculoskeletalModel model;
  model.joint.name = "toy_knee";
  model.joint.inertia = 0.35;
  model.joint.mass = 4.2;
  model.joint.com_dist = 0.27;
  model.joint.damping = 0.5;
  model.joint.q_min = -0.2;
  model.joint.q_max = 2.0;
  MuscleParams a;
  a.name = "flexor_long";
  a.f_o = 900.0;
  a.l_o = 0.11;
  a.phi_o = 0.1;
  a.l_ts = 0.34;
  a.path = {{0.455, -0.028, -0.003}, -0.2, 2.0};
  MuscleParams b;
  b.name = "flexor_short";
  b.f_o = 800.0;
  b.l_o = 0.17;
  b.phi_o = 0.4;
  b.l_ts = 0.09;
  b.path = {{0.258, -0.022, -0.004}, -0.2, 2.0};
  model.muscles = {a, b};
  return model;
}

AuditResult RunGradientAudit(std::uint64_t seed, double h, double tol) {
  const auto start = std::chrono::steady_clock::now();
  AuditResult result;
  result.h = h;
  result.tol = tol;
  Sampler s(seed);
  auto check = [&](const std::string& name, const ad::ScalarFunction& f,
                   const std::vector<Matrix>& point) {
    result.entries.push_back({name, ad::GradCheck(f, point, h, tol)});
  };

  // Elementwise unary ops with their safe sampling domains.
  struct Unary {
    const char* name;
    Var (*op)(const Var&);
    double lo, hi;
    bool symmetric;  // sample on [-hi, -lo] U [lo, hi]
  };
  const Unary unary[] = {
      {"neg", ad::Neg, -2.0, 2.0, false},
      {"sum", ad::Sum, -2.0, 2.0, false},
      {"mean", ad::Mean, -2.0, 2.0, false},
      {"row_sum", ad::RowSum, -2.0, 2.0, false},
      {"square", ad::Square, -2.0, 2.0, false},
      {"exp", ad::Exp, -2.0, 2.0, false},
      {"sqrt", ad::Sqrt, 0.2, 3.0, false},
      {"sin", ad::Sin, -3.0, 3.0, false},
      {"cos", ad::Cos, -3.0, 3.0, false},
      {"asin", ad::Asin, -0.9, 0.9, false},
      {"tanh", ad::Tanh, -2.0, 2.0, false},
      {"sigmoid", ad::Sigmoid, -4.0, 4.0, false},
      {"relu", ad::Relu, 0.05, 2.0, true},
  };
  for (const Unary& u : unary) {
    const std::uint64_t w = s.Next();
    const Matrix x = u.symmetric ? s.AwayFromZero(3, 4, u.lo, u.hi)
                                 : s.Uniform(3, 4, u.lo, u.hi);
    check(u.name, [&, w](Tape& t, std::span<const Var> in) {
      return Contract(t, u.op(in[0]), w);
    }, {x});
  }
  {
    const std::uint64_t w = s.Next();
    check("add_scalar", [w](Tape& t, std::span<const Var> in) {
      return Contract(t, in[0] + 0.7, w);
    }, {s.Uniform(3, 4, -2, 2)});
    check("scale", [w](Tape& t, std::span<const Var> in) {
      return Contract(t, in[0] * -1.3, w);
    }, {s.Uniform(3, 4, -2, 2)});
    check("pow_const", [w](Tape& t, std::span<const Var> in) {
      return Contract(t, ad::PowConst(in[0], 2.5), w);
    }, {s.Uniform(3, 4, 0.2, 2.0)});
    check("pow_const_square", [w](Tape& t, std::span<const Var> in) {
      return Contract(t, ad::PowConst(in[0], 2.0), w);
    }, {s.Uniform(3, 4, -2.0, 2.0)});
    // Offsets from the threshold keep the sample away from the kink.
    Matrix x = s.AwayFromZero(3, 4, 0.05, 1.0).array() + 0.01;
    check("max_with_const", [w](Tape& t, std::span<const Var> in) {
      return Contract(t, ad::MaxWithConst(in[0], 0.01), w);
    }, {x});
  }

  // Binary ops in every broadcasting form.
  struct Binary {
    const char* name;
    Var (*op)(const Var&, const Var&);
    bool positive_rhs;
  };
  const Binary binary[] = {{"add", ad::Add, false},
                           {"sub", ad::Sub, false},
                           {"mul", ad::Mul, false},
                           {"div", ad::Div, true}};
  const std::pair<const char*, std::pair<int, int>> shapes[] = {
      {"", {3, 4}}, {"_bcast_1x1", {1, 1}}, {"_bcast_row", {1, 4}},
      {"_bcast_col", {3, 1}}};
  for (const Binary& b : binary) {
    for (const auto& [suffix, rc] : shapes) {
      const std::uint64_t w = s.Next();
      const Matrix lhs = s.Uniform(3, 4, -2.0, 2.0);
      const Matrix rhs = b.positive_rhs ? s.Uniform(rc.first, rc.second, 0.5, 2.0)
                                        : s.Uniform(rc.first, rc.second, -2.0, 2.0);
      check(std::string(b.name) + suffix, [&b, w](Tape& t, std::span<const Var> in) {
        return Contract(t, b.op(in[0], in[1]), w);
      }, {lhs, rhs});
      if (rc.first * rc.second != 12) {
        // Broadcast operand on the left as well.
        const std::uint64_t w2 = s.Next();
        check(std::string(b.name) + suffix + "_lhs",
              [&b, w2](Tape& t, std::span<const Var> in) {
                return Contract(t, b.op(in[1], in[0]), w2);
              },
              {b.positive_rhs ? s.Uniform(3, 4, 0.5, 2.0) : s.Uniform(3, 4, -2, 2),
               s.Uniform(rc.first, rc.second, -2.0, 2.0)});
      }
    }
  }
  {
    const std::uint64_t w = s.Next();
    check("matmul", [w](Tape& t, std::span<const Var> in) {
      return Contract(t, ad::MatMul(in[0], in[1]), w);
    }, {s.Uniform(3, 5, -1, 1), s.Uniform(5, 2, -1, 1)});
    check("concat_rows", [w](Tape& t, std::span<const Var> in) {
      return Contract(t, ad::Concat(std::vector<Var>{in[0], in[1]}, ad::Axis::kRows), w);
    }, {s.Uniform(2, 3, -1, 1), s.Uniform(4, 3, -1, 1)});
    check("concat_cols", [w](Tape& t, std::span<const Var> in) {
      return Contract(t, ad::Concat(std::vector<Var>{in[0], in[1], in[0]}, ad::Axis::kCols), w);
    }, {s.Uniform(3, 2, -1, 1), s.Uniform(3, 1, -1, 1)});
    check("slice", [w](Tape& t, std::span<const Var> in) {
      return Contract(t, ad::Slice(in[0], 1, 2, 3, 2), w) +
             Contract(t, ad::Slice(in[0], 0, 0, 2, 5), w + 1);
    }, {s.Uniform(5, 5, -1, 1)});
  }

  // Hill tendon force from kinematic inputs.
  {
    const MuscleParams p = TwoMuscleToyModel().muscles[1];
    const double hgt = p.l_o * std::sin(p.phi_o);
    const double l_norm = s.Uniform(1, 1, 1.05, 1.3)(0);
    const double l_m = l_norm * p.l_o;
    const double l_mt = p.l_ts + std::sqrt(l_m * l_m - hgt * hgt);
    check("hill_tendon_force", [p](Tape& t, std::span<const Var> in) {
      return HillTendonForce(t, p, in[0], in[1], in[2]);
    }, {s.Uniform(1, 1, 0.1, 0.9), Matrix::Constant(1, 1, l_mt),
        s.Uniform(1, 1, 0.1, 1.0)});
  }

  // Recurrent and full-network compositions on a toy BiGRU (hidden 4,
  // window 5, batch 2).
  constexpr int kSteps = 5;
  constexpr int kBatch = 2;
  const NetworkParams net = ToyNetwork(seed, 2);
  const Matrix inputs = s.Uniform(kSteps * kBatch, 3, -1.5, 1.5);
  {
    const std::uint64_t w = s.Next();
    std::vector<Matrix> point;
    const auto& d = net.weights.gru[0].fwd;
    for (const Matrix* m : {&d.w_z, &d.w_r, &d.w_h, &d.u_z, &d.u_r, &d.u_h,
                            &d.b_z, &d.b_r, &d.b_h}) {
      point.push_back(*m);
    }
    point.push_back(s.Uniform(kBatch, 3, -1, 1));
    point.push_back(s.Uniform(kBatch, 4, -0.8, 0.8));
    check("gru_cell", [w](Tape& t, std::span<const Var> in) {
      GruDirection<Var> g{in[0], in[1], in[2], in[3], in[4], in[5], in[6], in[7], in[8]};
      return Contract(t, GruCellStep(g, in[9], in[10]), w);
    }, point);
    point.pop_back();
    point.back() = inputs;
    check("gru_direction_reverse", [w](Tape& t, std::span<const Var> in) {
      GruDirection<Var> g{in[0], in[1], in[2], in[3], in[4], in[5], in[6], in[7], in[8]};
      return Contract(t, RunGruDirection(g, in[9], kSteps, kBatch, true), w);
    }, point);
  }
  for (const Mode mode : {Mode::kEval, Mode::kTrain}) {
    const std::uint64_t w = s.Next();
    const std::uint64_t mask_seed = s.Next();
    check(mode == Mode::kEval ? "bigru_network" : "bigru_network_dropout",
          [&, w, mask_seed, mode](Tape& t, std::span<const Var> in) {
            std::mt19937_64 rng(mask_seed);  // same mask at every evaluation
            const auto y = NetworkForward(t, net, AsWeights(net, in), inputs, kSteps,
                                          mode, &rng);
            return Contract(t, y.activations, w) + Contract(t, y.forces, w + 1);
          },
          Flatten(net));
  }

  // Knowledge loss on the two-muscle model, through the network.
  {
    const MusculoskeletalModel model = TwoMuscleToyModel();
    PhysicsBatch physics;
    const int rows = kSteps * kBatch;
    physics.c.resize(rows, 2);
    physics.d.resize(rows, 2);
    physics.r.resize(rows, 2);
    physics.tau_req.resize(rows, 1);
    const Matrix kin = s.Uniform(rows, 3, 0.0, 1.0);
    for (int i = 0; i < rows; ++i) {
      const double q = 0.2 + 1.4 * kin(i, 0);
      const SoProblem p = BuildProblem(model, q, -1.5 + 3.0 * kin(i, 1), -3.0 + 6.0 * kin(i, 2));
      for (int m = 0; m < 2; ++m) {
        physics.c(i, m) = p.c[m];
        physics.d(i, m) = p.d[m];
        physics.r(i, m) = p.r[m];
      }
      physics.tau_req(i, 0) = p.tau_req;
    }
    NetworkParams scaled = net;
    scaled.force_scale << model.muscles[0].f_o, model.muscles[1].f_o;
    check("loss_total_network", [&](Tape& t, std::span<const Var> in) {
      std::mt19937_64 rng(seed);
      const auto y = NetworkForward(t, scaled, AsWeights(scaled, in), inputs, kSteps,
                                    Mode::kTrain, &rng);
      return LossTotal(y.activations, y.forces, physics, 100.0, 2.0).total;
    }, Flatten(scaled));
    // Direct inputs straddling both activation bounds.
    Matrix a = s.Uniform(rows, 2, -0.2, 1.2);
    check("loss_total_direct", [&](Tape&, std::span<const Var> in) {
      return LossTotal(in[0], in[1], physics, 100.0, 2.0).total;
    }, {a, s.Uniform(rows, 2, 0.0, 600.0)});
    const Matrix label_a = s.Uniform(rows, 2, 0.01, 1.0);
    const Matrix label_f = s.Uniform(rows, 2, 0.0, 600.0);
    check("loss_supervised_direct", [&](Tape&, std::span<const Var> in) {
      return LossSupervisedMse(in[0], in[1], label_a, label_f).total;
    }, {a, s.Uniform(rows, 2, 0.0, 600.0)});
  }

  result.seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start).count();
  return result;
}

std::string FormatAudit(const AuditResult& result) {
  std::ostringstream os;
  char line[256];
  for (const AuditEntry& e : result.entries) {
    std::snprintf(line, sizeof line, "%-28s %6zu coords  max rel err %.3e  %s\n",
                  e.name.c_str(), e.report.coordinates, e.report.max_rel_err,
                  e.report.ok ? "ok" : "FAIL");
    os << line;
    if (!e.report.ok) {
      std::snprintf(line, sizeof line,
                    "    worst at input %zu (%ld, %ld): ad %.9g fd %.9g %s\n",
                    e.report.input, static_cast<long>(e.report.row),
                    static_cast<long>(e.report.col), e.report.ad_value,
                    e.report.fd_value, e.report.diagnostic.c_str());
      os << line;
    }
  }
  std::snprintf(line, sizeof line,
                "%zu checks, max rel err %.3e (tol %.1e, h %.1e), %.2f s: %s\n",
                result.entries.size(), result.max_rel_err(), result.tol, result.h,
                result.seconds, result.ok() ? "PASS" : "FAIL");
  os << line;
  return os.str();
}

}  // namespace myodyn
