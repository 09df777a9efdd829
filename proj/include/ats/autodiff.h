// Copyright (c) 2026 The ATS Authors. All Rights Reserved.
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

// Reverse-mode automatic differentiation over dense double matrices.
//
// A Graph is a tape: every op appends a node holding its value and, when any
// input is differentiable, a closure that pushes the output gradient back to
// its inputs. Sequences are laid out as [frames x features].

#ifndef ATS_AUTODIFF_H_
#define ATS_AUTODIFF_H_

#include <functional>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ats::ad {

using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

class Graph;

class Var {
 public:
  Var() = default;

  bool valid() const { return graph_ != nullptr; }
  Graph* graph() const { return graph_; }
  int id() const { return id_; }
  const Matrix& value() const;
  Index rows() const { return value().rows(); }
  Index cols() const { return value().cols(); }

 private:
  friend class Graph;
  Var(Graph* graph, int id) : graph_(graph), id_(id) {}

  Graph* graph_ = nullptr;
  int id_ = -1;
};

class Graph {
 public:
  using Backprop = std::function<void(Graph&, const Matrix&)>;

  // With record_gradients = false no backward closures are kept and
  // Variable() behaves like Constant().
  explicit Graph(bool record_gradients = true) : record_(record_gradients) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var Constant(Matrix value);
  Var Variable(Matrix value);

  const Matrix& value(Var v) const { return nodes_[v.id()].value; }
  bool needs_grad(Var v) const { return nodes_[v.id()].needs_grad; }
  bool recording() const { return record_; }
  size_t size() const { return nodes_.size(); }

  // Runs backpropagation from a 1x1 node. Gradients from a previous call
  // are discarded.
  void Backward(Var scalar);
  // Gradient w.r.t. v from the last Backward(); zeros if v was not reached.
  Matrix grad(Var v) const;

  // Op plumbing.
  Var Emit(Matrix value, std::span<const Var> inputs, Backprop backprop);
  Var Emit(Matrix value, std::initializer_list<Var> inputs, Backprop backprop) {
    return Emit(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
                std::move(backprop));
  }
  void Accumulate(Var v, const Matrix& delta);

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool needs_grad = false;
    Backprop backprop;
  };

  bool record_;
  std::vector<Node> nodes_;
};

inline const Matrix& Var::value() const { return graph_->value(*this); }

Var MatMul(Var a, Var b);
// a * b^T.
Var MatMulNT(Var a, Var b);
Var Add(Var a, Var b);
Var Sub(Var a, Var b);
// Adds a 1 x n row to every row of x.
Var AddRow(Var x, Var row);
Var AddConstant(Var x, const Matrix& c);
Var Mul(Var a, Var b);
Var Scale(Var a, double s);
Var Relu(Var a);
Var Sigmoid(Var a);
Var Tanh(Var a);
Var SoftmaxRows(Var a);
Var SliceCols(Var a, Index start, Index count);
Var ConcatCols(std::span<const Var> parts);
Var ConcatCols(std::initializer_list<Var> parts);

// Same-padded 1-D convolution over frames.
// x: [T x in], weight: [out x (in * kernel)] holding w(o, i, j) at column
// i * kernel + j, bias: [1 x out]. Output frame t reads input frames
// t + j - (kernel - 1) / 2, zero outside the sequence.
Var Conv1dSame(Var x, Var weight, Var bias, int kernel);

// Per-row layer normalization with affine [1 x n] gamma and beta.
Var LayerNorm(Var x, Var gamma, Var beta, double eps = 1e-5);

// Unidirectional GRU from a zero initial state, gates ordered (reset,
// update, new) as in PyTorch:
//   r = sigmoid(Wir x + bir + Whr h + bhr)
//   z = sigmoid(Wiz x + biz + Whz h + bhz)
//   n = tanh(Win x + bin + r * (Whn h + bhn))
//   h' = (1 - z) * n + z * h
// x: [T x in], w_ih: [3H x in], w_hh: [3H x H], biases: [1 x 3H].
Var Gru(Var x, Var w_ih, Var w_hh, Var b_ih, Var b_hh);

// Inverted dropout; identity when rate == 0.
Var Dropout(Var x, double rate, std::mt19937_64& rng);

// Mean absolute difference against a fixed target, as a 1x1 node.
Var MeanAbsError(Var pred, const Matrix& target);
// sum(x .* weights) as a 1x1 node.
Var Dot(Var x, const Matrix& weights);

}  // namespace ats::ad

#endif  // ATS_AUTODIFF_H_
