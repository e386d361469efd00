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


#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "myodyn/autodiff/grad_check.h"
#include "myodyn/autodiff/tape.h"
#include "test_util.h"

namespace myodyn::ad {
namespace {

Matrix Random(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed,
              double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

TEST(TapeTest, LeafAndConstantValues) {
  Tape tape;
  Var x = tape.Leaf(2.5);
  Var c = tape.Constant(Matrix::Ones(2, 3));
  EXPECT_DOUBLE_EQ(x.scalar(), 2.5);
  EXPECT_EQ(c.rows(), 2);
  EXPECT_EQ(c.cols(), 3);
  EXPECT_TRUE(tape.requires_grad(x.id()));
  EXPECT_FALSE(tape.requires_grad(c.id()));
  EXPECT_EQ(tape.size(), 2u);
}

TEST(TapeTest, ScalarOfMatrixIsDimensionError) {
  Tape tape;
  Var x = tape.Leaf(Matrix::Zero(2, 2));
  EXPECT_ERROR_KIND(x.scalar(), ErrorKind::kDimension);
  EXPECT_ERROR_KIND(tape.Backward(x), ErrorKind::kContract);
}

TEST(TapeTest, MixingTapesIsContractError) {
  Tape a, b;
  Var x = a.Leaf(1.0), y = b.Leaf(2.0);
  EXPECT_ERROR_KIND(Add(x, y), ErrorKind::kContract);
  Var unbound;
  EXPECT_ERROR_KIND(Exp(unbound), ErrorKind::kContract);
}

TEST(TapeTest, UnreachableAndConstantGradientsAreZero) {
  Tape tape;
  Var x = tape.Leaf(Matrix::Constant(2, 2, 3.0));
  Var unused = tape.Leaf(Matrix::Ones(3, 1));
  Var c = tape.Constant(Matrix::Constant(2, 2, 4.0));
  Var loss = Sum(x * c);
  Gradients g = tape.Backward(loss);
  EXPECT_TRUE(g[x].isApprox(Matrix::Constant(2, 2, 4.0)));
  EXPECT_EQ(g[unused], Matrix::Zero(3, 1));
  EXPECT_EQ(g[c], Matrix::Zero(2, 2));
}

TEST(TapeTest, FanOutAccumulates) {
  Tape tape;
  Var x = tape.Leaf(3.0);
  // f = x*x + 2x + exp(0*x) -> f' = 2x + 2
  Var f = x * x + 2.0 * x + Exp(x * 0.0);
  EXPECT_DOUBLE_EQ(f.scalar(), 9.0 + 6.0 + 1.0);
  EXPECT_DOUBLE_EQ(tape.Backward(f)[x](0, 0), 8.0);
}

TEST(TapeTest, ReverseSweepIsRepeatable) {
  Tape tape;
  Var x = tape.Leaf(Random(3, 4, 1));
  Var loss = Sum(Tanh(x) * Sigmoid(x));
  const Matrix g1 = tape.Backward(loss)[x];
  const Matrix g2 = tape.Backward(loss)[x];
  EXPECT_EQ(g1, g2);
}

struct UnaryCase {
  const char* name;
  Var (*op)(const Var&);
  double (*f)(double);
  double (*df)(double);
  double lo, hi;
};

double Sig(double x) { return 1 / (1 + std::exp(-x)); }

const UnaryCase kUnary[] = {
    {"exp", Exp, [](double x) { return std::exp(x); }, [](double x) { return std::exp(x); }, -2, 2},
    {"sqrt", Sqrt, [](double x) { return std::sqrt(x); }, [](double x) { return 0.5 / std::sqrt(x); }, 0.2, 3},
    {"sin", Sin, [](double x) { return std::sin(x); }, [](double x) { return std::cos(x); }, -3, 3},
    {"cos", Cos, [](double x) { return std::cos(x); }, [](double x) { return -std::sin(x); }, -3, 3},
    {"asin", Asin, [](double x) { return std::asin(x); }, [](double x) { return 1 / std::sqrt(1 - x * x); }, -0.9, 0.9},
    {"tanh", Tanh, [](double x) { return std::tanh(x); }, [](double x) { return 1 - std::tanh(x) * std::tanh(x); }, -4, 4},
    {"sigmoid", Sigmoid, Sig, [](double x) { return Sig(x) * (1 - Sig(x)); }, -6, 6},
    {"square", Square, [](double x) { return x * x; }, [](double x) { return 2 * x; }, -2, 2},
    {"neg", Neg, [](double x) { return -x; }, [](double) { return -1.0; }, -2, 2},
    {"relu", Relu, [](double x) { return x > 0 ? x : 0.0; }, [](double x) { return x > 0 ? 1.0 : 0.0; }, -2, 2},
};

TEST(OpsTest, UnaryValuesAndGradients) {
  for (const UnaryCase& c : kUnary) {
    Tape tape;
    const Matrix x0 = Random(4, 3, 5, c.lo, c.hi);
    Var x = tape.Leaf(x0);
    Var y = c.op(x);
    // Weighted sum so every entry has a distinct upstream adjoint.
    const Matrix w = Random(4, 3, 6);
    Var loss = Sum(y * tape.Constant(w));
    const Matrix g = tape.Backward(loss)[x];
    for (Eigen::Index i = 0; i < x0.size(); ++i) {
      const double v = x0.data()[i];
      EXPECT_NEAR(y.value().data()[i], c.f(v), 1e-12 * (1 + std::abs(c.f(v)))) << c.name;
      EXPECT_NEAR(g.data()[i], w.data()[i] * c.df(v), 1e-11 * (1 + std::abs(c.df(v))))
          << c.name;
    }
  }
}

TEST(OpsTest, TanhAndSigmoidSaturateCleanly) {
  Tape tape;
  Matrix big(1, 4);
  big << -800, -40, 40, 800;
  Var x = tape.Leaf(big);
  Var t = Tanh(x), s = Sigmoid(x);
  EXPECT_TRUE(t.value().allFinite());
  EXPECT_TRUE(s.value().allFinite());
  EXPECT_DOUBLE_EQ(t.value()(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(t.value()(0, 3), 1.0);
  EXPECT_DOUBLE_EQ(s.value()(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(s.value()(0, 3), 1.0);
  EXPECT_TRUE(tape.Backward(Sum(t + s))[x].allFinite());
}

TEST(OpsTest, AsinClampsNearUnity) {
  Tape tape;
  Var x = tape.Leaf(1.0);
  Var y = Asin(x);
  EXPECT_NEAR(y.scalar(), std::asin(1.0), 1e-5);
  EXPECT_TRUE(std::isfinite(tape.Backward(y)[x](0, 0)));
}

TEST(OpsTest, PowConstAndScalars) {
  Tape tape;
  Var x = tape.Leaf(Random(2, 2, 9, 0.5, 2.0));
  Var y = Sum(PowConst(x, 3.0) + AddScalar(Scale(x, 2.0), 1.0));
  const Matrix g = tape.Backward(y)[x];
  const Matrix expected = 3.0 * x.value().array().square().matrix() + Matrix::Constant(2, 2, 2.0);
  EXPECT_TRUE(g.isApprox(expected, 1e-12));
}

TEST(OpsTest, MaxWithConstTieGoesToInput) {
  Tape tape;
  Matrix v(1, 3);
  v << -1.0, 0.5, 2.0;
  Var x = tape.Leaf(v);
  Var y = MaxWithConst(x, 0.5);
  EXPECT_EQ(y.value(), (Matrix(1, 3) << 0.5, 0.5, 2.0).finished());
  EXPECT_EQ(tape.Backward(Sum(y))[x], (Matrix(1, 3) << 0.0, 1.0, 1.0).finished());
}

TEST(OpsTest, ReductionsAndMatMul) {
  Tape tape;
  const Matrix a0 = Random(3, 4, 2), b0 = Random(4, 2, 3);
  Var a = tape.Leaf(a0), b = tape.Leaf(b0);
  Var p = MatMul(a, b);
  EXPECT_TRUE(p.value().isApprox(a0 * b0, 1e-14));
  Var rs = RowSum(a);
  EXPECT_TRUE(rs.value().isApprox(a0.rowwise().sum(), 1e-14));
  EXPECT_NEAR(Mean(a).scalar(), a0.mean(), 1e-15);
  Var loss = Sum(p);
  Gradients g = tape.Backward(loss);
  // d sum(AB)/dA = 1 B^T, d/dB = A^T 1
  EXPECT_TRUE(g[a].isApprox(Matrix::Ones(3, 2) * b0.transpose(), 1e-14));
  EXPECT_TRUE(g[b].isApprox(a0.transpose() * Matrix::Ones(3, 2), 1e-14));
  EXPECT_ERROR_KIND(MatMul(a, a), ErrorKind::kDimension);
}

TEST(OpsTest, BroadcastForms) {
  Tape tape;
  const Matrix m0 = Random(3, 4, 21), row0 = Random(1, 4, 22), col0 = Random(3, 1, 23);
  Var m = tape.Leaf(m0), row = tape.Leaf(row0), col = tape.Leaf(col0);
  Var s = tape.Leaf(0.7);
  Var y = Sum(m * row + col - s);
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) {
      EXPECT_NEAR((m * row).value()(i, j), m0(i, j) * row0(0, j), 1e-15);
    }
  }
  Gradients g = tape.Backward(y);
  EXPECT_TRUE(g[m].isApprox(row0.replicate(3, 1), 1e-14));
  EXPECT_TRUE(g[row].isApprox(m0.colwise().sum(), 1e-14));
  EXPECT_TRUE(g[col].isApprox(Matrix::Constant(3, 1, 4.0), 1e-14));
  EXPECT_DOUBLE_EQ(g[s](0, 0), -12.0);
  // Broadcast operand on the left.
  Var z = Sum(row / m);
  EXPECT_TRUE(tape.Backward(z)[row].isApprox(m0.cwiseInverse().colwise().sum(), 1e-12));
  Var bad = tape.Leaf(Matrix::Ones(2, 4));
  EXPECT_ERROR_KIND(m + bad, ErrorKind::kDimension);
}

TEST(OpsTest, ConcatAndSlice) {
  Tape tape;
  const Matrix a0 = Random(2, 3, 31), b0 = Random(2, 2, 32);
  Var a = tape.Leaf(a0), b = tape.Leaf(b0);
  std::vector<Var> parts = {a, b};
  Var cat = Concat(parts, Axis::kCols);
  ASSERT_EQ(cat.cols(), 5);
  EXPECT_EQ(cat.value().leftCols(3), a0);
  EXPECT_EQ(cat.value().rightCols(2), b0);
  Var sl = Slice(cat, 1, 2, 1, 2);
  EXPECT_EQ(sl.value()(0, 0), a0(1, 2));
  EXPECT_EQ(sl.value()(0, 1), b0(1, 0));
  Gradients g = tape.Backward(Sum(sl));
  Matrix ga = Matrix::Zero(2, 3), gb = Matrix::Zero(2, 2);
  ga(1, 2) = 1.0;
  gb(1, 0) = 1.0;
  EXPECT_EQ(g[a], ga);
  EXPECT_EQ(g[b], gb);
  std::vector<Var> rows = {a, tape.Leaf(Random(1, 3, 33))};
  EXPECT_EQ(Concat(rows, Axis::kRows).rows(), 3);
  EXPECT_ERROR_KIND(Concat(parts, Axis::kRows), ErrorKind::kDimension);
  EXPECT_ERROR_KIND(Slice(a, 1, 1, 2, 1), ErrorKind::kDimension);
}

TEST(GradCheckTest, RelativeErrorDefinition) {
  EXPECT_DOUBLE_EQ(RelativeError(1e-9, 0.0), 1e-9);
  EXPECT_DOUBLE_EQ(RelativeError(200.0, 202.0), 2.0 / 202.0);
}

TEST(GradCheckTest, AcceptsCorrectComposition) {
  ScalarFunction f = [](Tape& tape, std::span<const Var> in) {
    Var h = Tanh(MatMul(in[0], in[1]) + in[2]);
    return Mean(Square(h)) + Sum(Sigmoid(in[2])) * tape.Constant(0.5);
  };
  const std::vector<Matrix> point = {Random(3, 4, 41), Random(4, 2, 42), Random(1, 2, 43)};
  const GradCheckReport r = GradCheck(f, point);
  EXPECT_TRUE(r.ok) << r.max_rel_err;
  EXPECT_LT(r.max_rel_err, 1e-6);
  EXPECT_EQ(r.coordinates, 12u + 8u + 2u);
}

// A deliberately wrong op: value x^2, recorded gradient x.
Var BrokenSquare(const Var& x) {
  Tape& tape = *x.tape();
  return tape.Record("broken_square", x.value().array().square().matrix(), {x.id()},
                     [](const Tape& t, std::size_t self, const Matrix& adj,
                        Tape::Adjoints& adjoints) {
                       const std::size_t in = t.inputs(self)[0];
                       t.Accumulate(adjoints, in, adj.cwiseProduct(t.value(in)));
                     });
}

TEST(GradCheckTest, DetectsWrongGradient) {
  ScalarFunction f = [](Tape&, std::span<const Var> in) { return Sum(BrokenSquare(in[0])); };
  const std::vector<Matrix> point = {Random(2, 2, 44, 0.5, 1.5)};
  const GradCheckReport r = GradCheck(f, point);
  EXPECT_FALSE(r.ok);
  EXPECT_GT(r.max_rel_err, 0.1);
  EXPECT_NEAR(r.fd_value, 2.0 * point[0](r.row, r.col), 1e-6);
  EXPECT_NEAR(r.ad_value, point[0](r.row, r.col), 1e-12);
}

TEST(GradCheckTest, ReportsNonFiniteValue) {
  ScalarFunction f = [](Tape&, std::span<const Var> in) { return Sum(Sqrt(in[0])); };
  const std::vector<Matrix> point = {Matrix::Constant(1, 1, -1.0)};
  const GradCheckReport r = GradCheck(f, point);
  EXPECT_FALSE(r.ok);
  EXPECT_FALSE(r.diagnostic.empty());
}

}  // namespace
}  // namespace myodyn::ad
