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

#include "myodyn/autodiff/tape.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "myodyn/error.h"

namespace myodyn::ad {
namespace {

constexpr double kAsinLimit = 1.0 - 1e-12;

// Result shape of a broadcasting binary op.
std::pair<Eigen::Index, Eigen::Index> BroadcastShape(const Matrix& a,
                                                     const Matrix& b,
                                                     const char* op) {
  auto dim = [&](Eigen::Index x, Eigen::Index y) -> Eigen::Index {
    if (x == y) return x;
    if (x == 1) return y;
    if (y == 1) return x;
    Fail(ErrorKind::kDimension, std::string(op) + ": incompatible shapes " +
                                    ShapeString(a) + " and " + ShapeString(b));
  };
  return {dim(a.rows(), b.rows()), dim(a.cols(), b.cols())};
}

Matrix Expand(const Matrix& m, Eigen::Index rows, Eigen::Index cols) {
  return m.replicate(rows / m.rows(), cols / m.cols());
}

// Applies `f` to the two operands, materializing a broadcast copy only for an
// operand whose shape differs from the result.
template <typename F>
Matrix Broadcast(const Matrix& a, const Matrix& b, Eigen::Index rows,
                 Eigen::Index cols, F f) {
  const bool full_a = a.rows() == rows && a.cols() == cols;
  const bool full_b = b.rows() == rows && b.cols() == cols;
  if (full_a && full_b) return f(a.array(), b.array());
  if (full_a) return f(a.array(), Expand(b, rows, cols).array());
  if (full_b) return f(Expand(a, rows, cols).array(), b.array());
  return f(Expand(a, rows, cols).array(), Expand(b, rows, cols).array());
}

// Adds a gradient taken at the broadcast shape into an operand's adjoint,
// summing over the broadcast dimensions.
void AccumulateReduced(const Tape& t, Tape::Adjoints& adjoints, std::size_t id,
                       const Matrix& g) {
  if (!t.requires_grad(id)) return;
  const Matrix& v = t.value(id);
  if (g.rows() == v.rows() && g.cols() == v.cols()) {
    t.Accumulate(adjoints, id, g);
  } else if (v.rows() == 1 && v.cols() == 1) {
    t.Accumulate(adjoints, id, Matrix::Constant(1, 1, g.sum()));
  } else if (v.rows() == 1) {
    t.Accumulate(adjoints, id, g.colwise().sum());
  } else {
    t.Accumulate(adjoints, id, g.rowwise().sum());
  }
}

Tape& TapeOf(const Var& a) {
  if (!a.valid()) Fail(ErrorKind::kContract, "operation on an unbound Var");
  return *a.tape();
}

Tape& TapeOf(const Var& a, const Var& b) {
  Tape& t = TapeOf(a);
  if (&t != &TapeOf(b)) {
    Fail(ErrorKind::kContract, "operands live on different tapes");
  }
  return t;
}

// Elementwise unary op whose derivative is a function of (input, output).
template <typename Forward, typename Derivative>
Var Unary(const char* name, const Var& a, Forward forward,
          Derivative derivative) {
  Tape& tape = TapeOf(a);
  Matrix out = a.value().unaryExpr(forward);
  const std::size_t in = a.id();
  return tape.Record(
      name, std::move(out), {in},
      [in, derivative](const Tape& t, std::size_t self, const Matrix& adj,
                       Tape::Adjoints& adjoints) {
        const Matrix& x = t.value(in);
        const Matrix& y = t.value(self);
        Matrix g(x.rows(), x.cols());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
          g(i) = adj(i) * derivative(x(i), y(i));
        }
        t.Accumulate(adjoints, in, g);
      });
}

}  // namespace

std::string ShapeString(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

const Matrix& Var::value() const {
  if (!valid()) Fail(ErrorKind::kContract, "value() of an unbound Var");
  return tape_->value(id_);
}

double Var::scalar() const {
  const Matrix& v = value();
  if (v.size() != 1) {
    Fail(ErrorKind::kDimension, "scalar() on a " + ShapeString(v) + " value");
  }
  return v(0, 0);
}

Matrix Gradients::operator[](const Var& v) const {
  if (v.tape() != tape_) {
    Fail(ErrorKind::kContract, "gradient requested for a foreign Var");
  }
  const Matrix& adj = adjoints_[v.id()];
  if (adj.size() == 0) return Matrix::Zero(v.rows(), v.cols());
  return adj;
}

Var Tape::Leaf(Matrix value) {
  nodes_.push_back({"leaf", std::move(value), {}, nullptr, true});
  return Var(this, nodes_.size() - 1);
}

Var Tape::Leaf(double value) { return Leaf(Matrix::Constant(1, 1, value)); }

Var Tape::Constant(Matrix value) {
  nodes_.push_back({"const", std::move(value), {}, nullptr, false});
  return Var(this, nodes_.size() - 1);
}

Var Tape::Constant(double value) {
  return Constant(Matrix::Constant(1, 1, value));
}

Var Tape::Record(const char* op, Matrix value, std::vector<std::size_t> inputs,
                 BackwardFn backward) {
  bool requires_grad = false;
  for (std::size_t in : inputs) requires_grad |= nodes_[in].requires_grad;
  if (!requires_grad) backward = nullptr;
  nodes_.push_back(
      {op, std::move(value), std::move(inputs), std::move(backward),
       requires_grad});
  return Var(this, nodes_.size() - 1);
}

void Tape::Accumulate(Adjoints& adjoints, std::size_t id,
                      const Matrix& contribution) const {
  if (!nodes_[id].requires_grad) return;
  Matrix& dst = adjoints[id];
  if (dst.size() == 0) {
    dst = contribution;
  } else {
    dst += contribution;
  }
}

void Tape::AccumulateBlock(Adjoints& adjoints, std::size_t id,
                           Eigen::Index row, Eigen::Index col,
                           const Matrix& contribution) const {
  if (!nodes_[id].requires_grad) return;
  Matrix& dst = adjoints[id];
  if (dst.size() == 0) dst = Matrix::Zero(value(id).rows(), value(id).cols());
  dst.block(row, col, contribution.rows(), contribution.cols()) +=
      contribution;
}

Gradients Tape::Backward(const Var& root) const {
  if (root.tape() != this) {
    Fail(ErrorKind::kContract, "backward root belongs to another tape");
  }
  if (root.value().size() != 1) {
    Fail(ErrorKind::kContract,
         "backward root must be scalar, got " + ShapeString(root.value()));
  }
  Adjoints adjoints(nodes_.size());
  adjoints[root.id()] = Matrix::Ones(1, 1);
  for (std::size_t id = root.id() + 1; id-- > 0;) {
    const Node& node = nodes_[id];
    if (!node.backward || adjoints[id].size() == 0) continue;
    node.backward(*this, id, adjoints[id], adjoints);
  }
  return Gradients(this, std::move(adjoints));
}

// ---------------------------------------------------------------------------

Var Add(const Var& a, const Var& b) {
  Tape& tape = TapeOf(a, b);
  auto [rows, cols] = BroadcastShape(a.value(), b.value(), "add");
  Matrix out = Broadcast(a.value(), b.value(), rows, cols,
                         [](const auto& x, const auto& y) { return (x + y).matrix(); });
  const std::size_t ia = a.id(), ib = b.id();
  return tape.Record("add", std::move(out), {ia, ib},
                     [ia, ib](const Tape& t, std::size_t, const Matrix& adj,
                              Tape::Adjoints& adjoints) {
                       AccumulateReduced(t, adjoints, ia, adj);
                       AccumulateReduced(t, adjoints, ib, adj);
                     });
}

Var Sub(const Var& a, const Var& b) {
  Tape& tape = TapeOf(a, b);
  auto [rows, cols] = BroadcastShape(a.value(), b.value(), "sub");
  Matrix out = Broadcast(a.value(), b.value(), rows, cols,
                         [](const auto& x, const auto& y) { return (x - y).matrix(); });
  const std::size_t ia = a.id(), ib = b.id();
  return tape.Record("sub", std::move(out), {ia, ib},
                     [ia, ib](const Tape& t, std::size_t, const Matrix& adj,
                              Tape::Adjoints& adjoints) {
                       AccumulateReduced(t, adjoints, ia, adj);
                       if (t.requires_grad(ib)) {
                         AccumulateReduced(t, adjoints, ib, -adj);
                       }
                     });
}

Var Mul(const Var& a, const Var& b) {
  Tape& tape = TapeOf(a, b);
  auto [rows, cols] = BroadcastShape(a.value(), b.value(), "mul");
  Matrix out = Broadcast(a.value(), b.value(), rows, cols,
                         [](const auto& x, const auto& y) { return (x * y).matrix(); });
  const std::size_t ia = a.id(), ib = b.id();
  return tape.Record(
      "mul", std::move(out), {ia, ib},
      [ia, ib](const Tape& t, std::size_t, const Matrix& adj,
               Tape::Adjoints& adjoints) {
        const auto rows = adj.rows(), cols = adj.cols();
        auto prod = [](const auto& x, const auto& y) { return (x * y).matrix(); };
        if (t.requires_grad(ia)) {
          AccumulateReduced(t, adjoints, ia,
                            Broadcast(adj, t.value(ib), rows, cols, prod));
        }
        if (t.requires_grad(ib)) {
          AccumulateReduced(t, adjoints, ib,
                            Broadcast(adj, t.value(ia), rows, cols, prod));
        }
      });
}

Var Div(const Var& a, const Var& b) {
  Tape& tape = TapeOf(a, b);
  auto [rows, cols] = BroadcastShape(a.value(), b.value(), "div");
  Matrix out = Broadcast(a.value(), b.value(), rows, cols,
                         [](const auto& x, const auto& y) { return (x / y).matrix(); });
  const std::size_t ia = a.id(), ib = b.id();
  return tape.Record(
      "div", std::move(out), {ia, ib},
      [ia, ib](const Tape& t, std::size_t self, const Matrix& adj,
               Tape::Adjoints& adjoints) {
        const auto rows = adj.rows(), cols = adj.cols();
        auto quot = [](const auto& x, const auto& y) { return (x / y).matrix(); };
        if (t.requires_grad(ia)) {
          AccumulateReduced(t, adjoints, ia,
                            Broadcast(adj, t.value(ib), rows, cols, quot));
        }
        if (t.requires_grad(ib)) {
          // d(a/b)/db = -(a/b)/b
          const Matrix num = -adj.cwiseProduct(t.value(self));
          AccumulateReduced(t, adjoints, ib,
                            Broadcast(num, t.value(ib), rows, cols, quot));
        }
      });
}

Var MatMul(const Var& a, const Var& b) {
  Tape& tape = TapeOf(a, b);
  if (a.cols() != b.rows()) {
    Fail(ErrorKind::kDimension, "matmul: incompatible shapes " +
                                    ShapeString(a.value()) + " and " +
                                    ShapeString(b.value()));
  }
  Matrix out(a.rows(), b.cols());
  out.noalias() = a.value() * b.value();
  const std::size_t ia = a.id(), ib = b.id();
  return tape.Record("matmul", std::move(out), {ia, ib},
                     [ia, ib](const Tape& t, std::size_t, const Matrix& adj,
                              Tape::Adjoints& adjoints) {
                       if (t.requires_grad(ia)) {
                         Matrix g(adj.rows(), t.value(ib).rows());
                         g.noalias() = adj * t.value(ib).transpose();
                         t.Accumulate(adjoints, ia, g);
                       }
                       if (t.requires_grad(ib)) {
                         Matrix g(t.value(ia).cols(), adj.cols());
                         g.noalias() = t.value(ia).transpose() * adj;
                         t.Accumulate(adjoints, ib, g);
                       }
                     });
}

Var AddScalar(const Var& a, double c) {
  Tape& tape = TapeOf(a);
  Matrix out = a.value().array() + c;
  const std::size_t ia = a.id();
  return tape.Record("add_scalar", std::move(out), {ia},
                     [ia](const Tape& t, std::size_t, const Matrix& adj,
                          Tape::Adjoints& adjoints) {
                       t.Accumulate(adjoints, ia, adj);
                     });
}

Var Scale(const Var& a, double c) {
  Tape& tape = TapeOf(a);
  Matrix out = a.value() * c;
  const std::size_t ia = a.id();
  return tape.Record("scale", std::move(out), {ia},
                     [ia, c](const Tape& t, std::size_t, const Matrix& adj,
                             Tape::Adjoints& adjoints) {
                       t.Accumulate(adjoints, ia, adj * c);
                     });
}

Var Neg(const Var& a) { return Scale(a, -1.0); }

Var Sum(const Var& a) {
  Tape& tape = TapeOf(a);
  const std::size_t ia = a.id();
  return tape.Record("sum", Matrix::Constant(1, 1, a.value().sum()), {ia},
                     [ia](const Tape& t, std::size_t, const Matrix& adj,
                          Tape::Adjoints& adjoints) {
                       const Matrix& v = t.value(ia);
                       t.Accumulate(adjoints, ia,
                                    Matrix::Constant(v.rows(), v.cols(),
                                                     adj(0, 0)));
                     });
}

Var Mean(const Var& a) {
  if (a.value().size() == 0) {
    Fail(ErrorKind::kDimension, "mean of an empty value");
  }
  return Scale(Sum(a), 1.0 / static_cast<double>(a.value().size()));
}

Var RowSum(const Var& a) {
  Tape& tape = TapeOf(a);
  Matrix out = a.value().rowwise().sum();
  const std::size_t ia = a.id();
  return tape.Record("row_sum", std::move(out), {ia},
                     [ia](const Tape& t, std::size_t, const Matrix& adj,
                          Tape::Adjoints& adjoints) {
                       t.Accumulate(adjoints, ia,
                                    adj.replicate(1, t.value(ia).cols()));
                     });
}

Var Square(const Var& a) {
  return Unary(
      "square", a, [](double x) { return x * x; },
      [](double x, double) { return 2.0 * x; });
}

Var PowConst(const Var& a, double exponent) {
  if (exponent == 2.0) return Square(a);
  return Unary(
      "pow", a, [exponent](double x) { return std::pow(x, exponent); },
      [exponent](double x, double) {
        return exponent * std::pow(x, exponent - 1.0);
      });
}

Var Exp(const Var& a) {
  Tape& tape = TapeOf(a);
  Matrix out = a.value().array().exp().matrix();
  const std::size_t in = a.id();
  return tape.Record("exp", std::move(out), {in},
                     [in](const Tape& t, std::size_t self, const Matrix& adj,
                          Tape::Adjoints& adjoints) {
                       t.Accumulate(adjoints, in, adj.cwiseProduct(t.value(self)));
                     });
}

Var Sqrt(const Var& a) {
  return Unary(
      "sqrt", a, [](double x) { return std::sqrt(x); },
      [](double, double y) { return 0.5 / y; });
}

Var Sin(const Var& a) {
  return Unary(
      "sin", a, [](double x) { return std::sin(x); },
      [](double x, double) { return std::cos(x); });
}

Var Cos(const Var& a) {
  return Unary(
      "cos", a, [](double x) { return std::cos(x); },
      [](double x, double) { return -std::sin(x); });
}

Var Asin(const Var& a) {
  return Unary(
      "asin", a,
      [](double x) {
        return std::asin(std::clamp(x, -kAsinLimit, kAsinLimit));
      },
      [](double x, double) {
        const double c = std::clamp(x, -kAsinLimit, kAsinLimit);
        return 1.0 / std::sqrt(1.0 - c * c);
      });
}

Var Tanh(const Var& a) {
  Tape& tape = TapeOf(a);
  // 1 - 2 / (1 + e^2x): vectorizes through exp and saturates cleanly.
  Matrix out = (1.0 - 2.0 / ((2.0 * a.value().array()).exp() + 1.0)).matrix();
  const std::size_t in = a.id();
  return tape.Record("tanh", std::move(out), {in},
                     [in](const Tape& t, std::size_t self, const Matrix& adj,
                          Tape::Adjoints& adjoints) {
                       const auto y = t.value(self).array();
                       t.Accumulate(adjoints, in, (adj.array() * (1.0 - y * y)).matrix());
                     });
}

Var Sigmoid(const Var& a) {
  Tape& tape = TapeOf(a);
  Matrix out = ((-a.value().array()).exp() + 1.0).inverse().matrix();
  const std::size_t in = a.id();
  return tape.Record("sigmoid", std::move(out), {in},
                     [in](const Tape& t, std::size_t self, const Matrix& adj,
                          Tape::Adjoints& adjoints) {
                       const auto y = t.value(self).array();
                       t.Accumulate(adjoints, in,
                                    (adj.array() * y * (1.0 - y)).matrix());
                     });
}

Var Relu(const Var& a) {
  return Unary(
      "relu", a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var MaxWithConst(const Var& a, double c) {
  return Unary(
      "max_const", a, [c](double x) { return x >= c ? x : c; },
      [c](double x, double) { return x >= c ? 1.0 : 0.0; });
}

Var Concat(std::span<const Var> parts, Axis axis) {
  if (parts.empty()) Fail(ErrorKind::kDimension, "concat of zero operands");
  Tape& tape = TapeOf(parts.front());
  Eigen::Index rows = 0, cols = 0;
  std::vector<std::size_t> ids;
  ids.reserve(parts.size());
  for (const Var& p : parts) {
    if (&TapeOf(p) != &tape) {
      Fail(ErrorKind::kContract, "concat operands live on different tapes");
    }
    if (axis == Axis::kRows) {
      if (cols == 0) cols = p.cols();
      if (p.cols() != cols) {
        Fail(ErrorKind::kDimension,
             "concat(rows): column mismatch " + ShapeString(parts[0].value()) +
                 " vs " + ShapeString(p.value()));
      }
      rows += p.rows();
    } else {
      if (rows == 0) rows = p.rows();
      if (p.rows() != rows) {
        Fail(ErrorKind::kDimension,
             "concat(cols): row mismatch " + ShapeString(parts[0].value()) +
                 " vs " + ShapeString(p.value()));
      }
      cols += p.cols();
    }
    ids.push_back(p.id());
  }
  Matrix out(rows, cols);
  Eigen::Index offset = 0;
  for (const Var& p : parts) {
    if (axis == Axis::kRows) {
      out.middleRows(offset, p.rows()) = p.value();
      offset += p.rows();
    } else {
      out.middleCols(offset, p.cols()) = p.value();
      offset += p.cols();
    }
  }
  std::vector<std::size_t> inputs = ids;
  return tape.Record(
      "concat", std::move(out), std::move(inputs),
      [ids, axis](const Tape& t, std::size_t, const Matrix& adj,
                  Tape::Adjoints& adjoints) {
        Eigen::Index off = 0;
        for (std::size_t id : ids) {
          const Matrix& v = t.value(id);
          if (axis == Axis::kRows) {
            t.Accumulate(adjoints, id, adj.middleRows(off, v.rows()));
            off += v.rows();
          } else {
            t.Accumulate(adjoints, id, adj.middleCols(off, v.cols()));
            off += v.cols();
          }
        }
      });
}

Var Slice(const Var& a, Eigen::Index row, Eigen::Index col, Eigen::Index rows,
          Eigen::Index cols) {
  Tape& tape = TapeOf(a);
  if (row < 0 || col < 0 || rows < 0 || cols < 0 ||
      row + rows > a.rows() || col + cols > a.cols()) {
    std::ostringstream os;
    os << "slice [" << row << "+" << rows << ", " << col << "+" << cols
       << "] out of bounds for " << ShapeString(a.value());
    Fail(ErrorKind::kDimension, os.str());
  }
  Matrix out = a.value().block(row, col, rows, cols);
  const std::size_t ia = a.id();
  return tape.Record("slice", std::move(out), {ia},
                     [ia, row, col](const Tape& t, std::size_t,
                                    const Matrix& adj,
                                    Tape::Adjoints& adjoints) {
                       t.AccumulateBlock(adjoints, ia, row, col, adj);
                     });
}

}  // namespace myodyn::ad
