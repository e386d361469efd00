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

#ifndef MYODYN_AUTODIFF_TAPE_H_
#define MYODYN_AUTODIFF_TAPE_H_

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace myodyn::ad {

using Matrix = Eigen::MatrixXd;

class Tape;

// Handle to a node on a Tape. Cheap to copy; the tape owns the value.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  // Value of a 1x1 node.
  double scalar() const;

  std::size_t id() const { return id_; }
  Tape* tape() const { return tape_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Adjoint storage for one reverse sweep. Empty matrices stand for zero.
class Gradients {
 public:
  Gradients(const Tape* tape, std::vector<Matrix> adjoints)
      : tape_(tape), adjoints_(std::move(adjoints)) {}

  // Gradient of the root with respect to `v`; exact zeros when `v` was not
  // reachable from the root.
  Matrix operator[](const Var& v) const;

 private:
  const Tape* tape_;
  std::vector<Matrix> adjoints_;
};

// Eagerly evaluated, append-only computation record. Node ids are assigned in
// creation order, so every node's inputs precede it.
class Tape {
 public:
  using Adjoints = std::vector<Matrix>;
  // Propagates `adjoint` (of node `self`) into the adjoints of its inputs.
  using BackwardFn = std::function<void(const Tape& tape, std::size_t self,
                                        const Matrix& adjoint,
                                        Adjoints& adjoints)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Differentiable input.
  Var Leaf(Matrix value);
  Var Leaf(double value);
  // Input that never receives a gradient.
  Var Constant(Matrix value);
  Var Constant(double value);

  // Low-level node constructor used by the op library. Exposed so that tests
  // and extensions can register custom ops.
  Var Record(const char* op, Matrix value, std::vector<std::size_t> inputs,
             BackwardFn backward);

  // Reverse sweep from a 1x1 root.
  Gradients Backward(const Var& root) const;

  const Matrix& value(std::size_t id) const { return nodes_[id].value; }
  const std::vector<std::size_t>& inputs(std::size_t id) const {
    return nodes_[id].inputs;
  }
  const char* op(std::size_t id) const { return nodes_[id].op; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  std::size_t size() const { return nodes_.size(); }

  // Adds `contribution` into adjoints[id] if that node takes gradients.
  void Accumulate(Adjoints& adjoints, std::size_t id,
                  const Matrix& contribution) const;
  // Adds `contribution` into a block of adjoints[id].
  void AccumulateBlock(Adjoints& adjoints, std::size_t id, Eigen::Index row,
                       Eigen::Index col, const Matrix& contribution) const;

 private:
  struct Node {
    const char* op;
    Matrix value;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    bool requires_grad;
  };

  std::vector<Node> nodes_;
};

// ---------------------------------------------------------------------------
// Op library. Binary elementwise ops broadcast when one operand is 1x1, 1xC or
// Rx1 against an RxC operand.

Var Add(const Var& a, const Var& b);
Var Sub(const Var& a, const Var& b);
Var Mul(const Var& a, const Var& b);
Var Div(const Var& a, const Var& b);
Var MatMul(const Var& a, const Var& b);

Var AddScalar(const Var& a, double c);
Var Scale(const Var& a, double c);
Var Neg(const Var& a);

Var Sum(const Var& a);
Var Mean(const Var& a);
// Sum over columns; RxC -> Rx1.
Var RowSum(const Var& a);

Var Square(const Var& a);
Var PowConst(const Var& a, double exponent);
Var Exp(const Var& a);
Var Sqrt(const Var& a);
Var Sin(const Var& a);
Var Cos(const Var& a);
// Input clamped to [-1 + 1e-12, 1 - 1e-12]; the derivative is taken at the
// clamped point.
Var Asin(const Var& a);
Var Tanh(const Var& a);
Var Sigmoid(const Var& a);
Var Relu(const Var& a);
// Elementwise max(a, c). Ties send the gradient to `a`.
Var MaxWithConst(const Var& a, double c);

enum class Axis { kRows, kCols };
// Stacks vertically (kRows) or side by side (kCols).
Var Concat(std::span<const Var> parts, Axis axis);
Var Slice(const Var& a, Eigen::Index row, Eigen::Index col, Eigen::Index rows,
          Eigen::Index cols);

inline Var operator+(const Var& a, const Var& b) { return Add(a, b); }
inline Var operator-(const Var& a, const Var& b) { return Sub(a, b); }
inline Var operator*(const Var& a, const Var& b) { return Mul(a, b); }
inline Var operator/(const Var& a, const Var& b) { return Div(a, b); }
inline Var operator-(const Var& a) { return Neg(a); }
inline Var operator+(const Var& a, double c) { return AddScalar(a, c); }
inline Var operator+(double c, const Var& a) { return AddScalar(a, c); }
inline Var operator-(const Var& a, double c) { return AddScalar(a, -c); }
inline Var operator-(double c, const Var& a) { return AddScalar(Neg(a), c); }
inline Var operator*(const Var& a, double c) { return Scale(a, c); }
inline Var operator*(double c, const Var& a) { return Scale(a, c); }

std::string ShapeString(const Matrix& m);

}  // namespace myodyn::ad

#endif  // MYODYN_AUTODIFF_TAPE_H_
