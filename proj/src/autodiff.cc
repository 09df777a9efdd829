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

#include "ats/autodiff.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ats::ad {

namespace {

using RowVector = Eigen::RowVectorXd;

void Require(bool ok, const char* op, const std::string& detail) {
  if (!ok) throw std::invalid_argument(std::string(op) + ": " + detail);
}

std::string Shape(const Matrix& m) {
  return "[" + std::to_string(m.rows()) + " x " + std::to_string(m.cols()) +
         "]";
}

Matrix SigmoidOf(const Matrix& a) {
  return (1.0 + (-a.array()).exp()).inverse().matrix();
}

}  // namespace

Var Graph::Constant(Matrix value) {
  nodes_.push_back(Node{std::move(value), Matrix(), false, nullptr});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Graph::Variable(Matrix value) {
  nodes_.push_back(Node{std::move(value), Matrix(), record_, nullptr});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Graph::Emit(Matrix value, std::span<const Var> inputs,
                Backprop backprop) {
  bool needs = false;
  if (record_) {
    for (const Var& in : inputs) {
      if (in.graph() != this) {
        throw std::invalid_argument("op mixes variables from different graphs");
      }
      needs = needs || nodes_[in.id()].needs_grad;
    }
  }
  nodes_.push_back(
      Node{std::move(value), Matrix(), needs, needs ? std::move(backprop)
                                                    : Backprop()});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

void Graph::Accumulate(Var v, const Matrix& delta) {
  Node& node = nodes_[v.id()];
  if (!node.needs_grad) return;
  if (node.grad.size() == 0) {
    node.grad = delta;
  } else {
    node.grad += delta;
  }
}

void Graph::Backward(Var scalar) {
  if (scalar.graph() != this) {
    throw std::invalid_argument("Backward: variable from another graph");
  }
  const Matrix& out = nodes_[scalar.id()].value;
  if (out.rows() != 1 || out.cols() != 1) {
    throw std::invalid_argument("Backward: target must be 1x1, got " +
                                Shape(out));
  }
  for (auto& n : nodes_) n.grad.resize(0, 0);
  if (!nodes_[scalar.id()].needs_grad) return;
  nodes_[scalar.id()].grad = Matrix::Ones(1, 1);
  for (int id = scalar.id(); id >= 0; --id) {
    Node& n = nodes_[id];
    if (n.backprop && n.grad.size() != 0) {
      n.backprop(*this, n.grad);
    }
  }
}

Matrix Graph::grad(Var v) const {
  const Node& n = nodes_[v.id()];
  if (n.grad.size() == 0) return Matrix::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

Var MatMul(Var a, Var b) {
  Require(a.cols() == b.rows(), "MatMul",
          Shape(a.value()) + " * " + Shape(b.value()));
  Graph& g = *a.graph();
  return g.Emit(a.value() * b.value(), {a, b},
                [a, b](Graph& g, const Matrix& dy) {
                  if (g.needs_grad(a)) g.Accumulate(a, dy * b.value().transpose());
                  if (g.needs_grad(b)) g.Accumulate(b, a.value().transpose() * dy);
                });
}

Var MatMulNT(Var a, Var b) {
  Require(a.cols() == b.cols(), "MatMulNT",
          Shape(a.value()) + " * " + Shape(b.value()) + "^T");
  Graph& g = *a.graph();
  return g.Emit(a.value() * b.value().transpose(), {a, b},
                [a, b](Graph& g, const Matrix& dy) {
                  if (g.needs_grad(a)) g.Accumulate(a, dy * b.value());
                  if (g.needs_grad(b)) g.Accumulate(b, dy.transpose() * a.value());
                });
}

Var Add(Var a, Var b) {
  Require(a.rows() == b.rows() && a.cols() == b.cols(), "Add",
          Shape(a.value()) + " + " + Shape(b.value()));
  Graph& g = *a.graph();
  return g.Emit(a.value() + b.value(), {a, b},
                [a, b](Graph& g, const Matrix& dy) {
                  g.Accumulate(a, dy);
                  g.Accumulate(b, dy);
                });
}

Var Sub(Var a, Var b) {
  Require(a.rows() == b.rows() && a.cols() == b.cols(), "Sub",
          Shape(a.value()) + " - " + Shape(b.value()));
  Graph& g = *a.graph();
  return g.Emit(a.value() - b.value(), {a, b},
                [a, b](Graph& g, const Matrix& dy) {
                  g.Accumulate(a, dy);
                  if (g.needs_grad(b)) g.Accumulate(b, -dy);
                });
}

Var AddRow(Var x, Var row) {
  Require(row.rows() == 1 && row.cols() == x.cols(), "AddRow",
          Shape(x.value()) + " + " + Shape(row.value()));
  Graph& g = *x.graph();
  Matrix y = x.value();
  y.rowwise() += row.value().row(0);
  return g.Emit(std::move(y), {x, row}, [x, row](Graph& g, const Matrix& dy) {
    g.Accumulate(x, dy);
    if (g.needs_grad(row)) g.Accumulate(row, dy.colwise().sum());
  });
}

Var AddConstant(Var x, const Matrix& c) {
  Require(c.rows() == x.rows() && c.cols() == x.cols(), "AddConstant",
          Shape(x.value()) + " + " + Shape(c));
  Graph& g = *x.graph();
  return g.Emit(x.value() + c, {x},
                [x](Graph& g, const Matrix& dy) { g.Accumulate(x, dy); });
}

Var Mul(Var a, Var b) {
  Require(a.rows() == b.rows() && a.cols() == b.cols(), "Mul",
          Shape(a.value()) + " .* " + Shape(b.value()));
  Graph& g = *a.graph();
  return g.Emit(a.value().cwiseProduct(b.value()), {a, b},
                [a, b](Graph& g, const Matrix& dy) {
                  if (g.needs_grad(a)) g.Accumulate(a, dy.cwiseProduct(b.value()));
                  if (g.needs_grad(b)) g.Accumulate(b, dy.cwiseProduct(a.value()));
                });
}

Var Scale(Var a, double s) {
  Graph& g = *a.graph();
  return g.Emit(a.value() * s, {a},
                [a, s](Graph& g, const Matrix& dy) { g.Accumulate(a, dy * s); });
}

Var Relu(Var a) {
  Graph& g = *a.graph();
  return g.Emit(a.value().cwiseMax(0.0), {a}, [a](Graph& g, const Matrix& dy) {
    g.Accumulate(a, (a.value().array() > 0.0).select(dy, 0.0));
  });
}

Var Sigmoid(Var a) {
  Graph& g = *a.graph();
  Matrix y = SigmoidOf(a.value());
  return g.Emit(y, {a}, [a, y](Graph& g, const Matrix& dy) {
    g.Accumulate(a, (dy.array() * y.array() * (1.0 - y.array())).matrix());
  });
}

Var Tanh(Var a) {
  Graph& g = *a.graph();
  Matrix y = a.value().array().tanh().matrix();
  return g.Emit(y, {a}, [a, y](Graph& g, const Matrix& dy) {
    g.Accumulate(a, (dy.array() * (1.0 - y.array().square())).matrix());
  });
}

Var SoftmaxRows(Var a) {
  Graph& g = *a.graph();
  Matrix y = a.value();
  for (Index r = 0; r < y.rows(); ++r) {
    const double m = y.row(r).maxCoeff();
    y.row(r) = (y.row(r).array() - m).exp().matrix();
    y.row(r) /= y.row(r).sum();
  }
  return g.Emit(y, {a}, [a, y](Graph& g, const Matrix& dy) {
    const Eigen::VectorXd inner = dy.cwiseProduct(y).rowwise().sum();
    Matrix dx = dy;
    dx.colwise() -= inner;
    g.Accumulate(a, dx.cwiseProduct(y));
  });
}

Var SliceCols(Var a, Index start, Index count) {
  Require(start >= 0 && count >= 0 && start + count <= a.cols(), "SliceCols",
          "range [" + std::to_string(start) + ", " +
              std::to_string(start + count) + ") of " + Shape(a.value()));
  Graph& g = *a.graph();
  return g.Emit(a.value().middleCols(start, count), {a},
                [a, start, count](Graph& g, const Matrix& dy) {
                  Matrix dx = Matrix::Zero(a.rows(), a.cols());
                  dx.middleCols(start, count) = dy;
                  g.Accumulate(a, dx);
                });
}

Var ConcatCols(std::span<const Var> parts) {
  Require(!parts.empty(), "ConcatCols", "no inputs");
  Graph& g = *parts[0].graph();
  const Index rows = parts[0].rows();
  Index cols = 0;
  for (const Var& p : parts) {
    Require(p.rows() == rows, "ConcatCols", "row count mismatch");
    cols += p.cols();
  }
  Matrix y(rows, cols);
  Index at = 0;
  for (const Var& p : parts) {
    y.middleCols(at, p.cols()) = p.value();
    at += p.cols();
  }
  std::vector<Var> kept(parts.begin(), parts.end());
  return g.Emit(std::move(y), parts, [kept](Graph& g, const Matrix& dy) {
    Index at = 0;
    for (const Var& p : kept) {
      if (g.needs_grad(p)) g.Accumulate(p, dy.middleCols(at, p.cols()));
      at += p.cols();
    }
  });
}

Var ConcatCols(std::initializer_list<Var> parts) {
  return ConcatCols(std::span<const Var>(parts.begin(), parts.size()));
}

Var Conv1dSame(Var x, Var weight, Var bias, int kernel) {
  const Index frames = x.rows();
  const Index in = x.cols();
  const Index out = weight.rows();
  Require(kernel >= 1, "Conv1dSame", "kernel must be positive");
  Require(weight.cols() == in * kernel, "Conv1dSame",
          "weight " + Shape(weight.value()) + " vs input width " +
              std::to_string(in) + " and kernel " + std::to_string(kernel));
  Require(bias.rows() == 1 && bias.cols() == out, "Conv1dSame",
          "bias " + Shape(bias.value()));
  const Index pad = (kernel - 1) / 2;

  // Unfold: column i * kernel + j holds input channel i shifted by j - pad.
  Matrix cols = Matrix::Zero(frames, in * kernel);
  for (Index i = 0; i < in; ++i) {
    for (Index j = 0; j < kernel; ++j) {
      const Index shift = j - pad;
      const Index lo = std::max<Index>(0, -shift);
      const Index hi = std::min<Index>(frames, frames - shift);
      if (hi > lo) {
        cols.col(i * kernel + j).segment(lo, hi - lo) =
            x.value().col(i).segment(lo + shift, hi - lo);
      }
    }
  }
  Matrix y = cols * weight.value().transpose();
  y.rowwise() += bias.value().row(0);

  Graph& g = *x.graph();
  return g.Emit(
      std::move(y), {x, weight, bias},
      [x, weight, bias, cols, kernel, pad](Graph& g, const Matrix& dy) {
        if (g.needs_grad(weight)) g.Accumulate(weight, dy.transpose() * cols);
        if (g.needs_grad(bias)) g.Accumulate(bias, dy.colwise().sum());
        if (!g.needs_grad(x)) return;
        const Matrix dcols = dy * weight.value();
        const Index frames = x.rows();
        Matrix dx = Matrix::Zero(frames, x.cols());
        for (Index i = 0; i < x.cols(); ++i) {
          for (Index j = 0; j < kernel; ++j) {
            const Index shift = j - pad;
            const Index lo = std::max<Index>(0, -shift);
            const Index hi = std::min<Index>(frames, frames - shift);
            if (hi > lo) {
              dx.col(i).segment(lo + shift, hi - lo) +=
                  dcols.col(i * kernel + j).segment(lo, hi - lo);
            }
          }
        }
        g.Accumulate(x, dx);
      });
}

Var LayerNorm(Var x, Var gamma, Var beta, double eps) {
  const Index n = x.cols();
  Require(gamma.rows() == 1 && gamma.cols() == n && beta.rows() == 1 &&
              beta.cols() == n,
          "LayerNorm", "affine parameters must be [1 x " + std::to_string(n) + "]");
  const Eigen::VectorXd mean = x.value().rowwise().mean();
  Matrix centered = x.value();
  centered.colwise() -= mean;
  const Eigen::VectorXd inv_std =
      ((centered.array().square().rowwise().sum() / static_cast<double>(n)) + eps)
          .rsqrt()
          .matrix();
  Matrix xhat = centered.array().colwise() * inv_std.array();
  Matrix y = xhat.array().rowwise() * gamma.value().row(0).array();
  y.rowwise() += beta.value().row(0);

  Graph& g = *x.graph();
  return g.Emit(std::move(y), {x, gamma, beta},
                [x, gamma, beta, xhat, inv_std](Graph& g, const Matrix& dy) {
                  if (g.needs_grad(gamma)) {
                    g.Accumulate(gamma, dy.cwiseProduct(xhat).colwise().sum());
                  }
                  if (g.needs_grad(beta)) g.Accumulate(beta, dy.colwise().sum());
                  if (!g.needs_grad(x)) return;
                  const Matrix dxhat =
                      dy.array().rowwise() * gamma.value().row(0).array();
                  const Eigen::VectorXd m1 = dxhat.rowwise().mean();
                  const Eigen::VectorXd m2 =
                      dxhat.cwiseProduct(xhat).rowwise().mean();
                  Matrix dx = dxhat;
                  dx.colwise() -= m1;
                  dx -= (xhat.array().colwise() * m2.array()).matrix();
                  dx = dx.array().colwise() * inv_std.array();
                  g.Accumulate(x, dx);
                });
}

Var Gru(Var x, Var w_ih, Var w_hh, Var b_ih, Var b_hh) {
  const Index frames = x.rows();
  const Index hidden = w_hh.cols();
  Require(w_ih.rows() == 3 * hidden && w_ih.cols() == x.cols(), "Gru",
          "w_ih " + Shape(w_ih.value()) + " vs input " + Shape(x.value()));
  Require(w_hh.rows() == 3 * hidden, "Gru", "w_hh " + Shape(w_hh.value()));
  Require(b_ih.rows() == 1 && b_ih.cols() == 3 * hidden && b_hh.rows() == 1 &&
              b_hh.cols() == 3 * hidden,
          "Gru", "biases must be [1 x 3H]");

  Matrix gi = x.value() * w_ih.value().transpose();
  gi.rowwise() += b_ih.value().row(0);

  // Per-frame caches for backpropagation through time.
  Matrix h_all(frames, hidden), r_all(frames, hidden), z_all(frames, hidden),
      n_all(frames, hidden), ghn_all(frames, hidden);
  RowVector h = RowVector::Zero(hidden);
  for (Index t = 0; t < frames; ++t) {
    RowVector gh = h * w_hh.value().transpose() + b_hh.value().row(0);
    RowVector r = SigmoidOf(gi.row(t).segment(0, hidden) + gh.segment(0, hidden));
    RowVector z = SigmoidOf(gi.row(t).segment(hidden, hidden) +
                            gh.segment(hidden, hidden));
    RowVector ghn = gh.segment(2 * hidden, hidden);
    RowVector n = (gi.row(t).segment(2 * hidden, hidden).array() +
                   r.array() * ghn.array())
                      .tanh()
                      .matrix();
    h = ((1.0 - z.array()) * n.array() + z.array() * h.array()).matrix();
    r_all.row(t) = r;
    z_all.row(t) = z;
    n_all.row(t) = n;
    ghn_all.row(t) = ghn;
    h_all.row(t) = h;
  }

  Graph& g = *x.graph();
  return g.Emit(
      h_all, {x, w_ih, w_hh, b_ih, b_hh},
      [x, w_ih, w_hh, b_ih, b_hh, h_all, r_all, z_all, n_all, ghn_all](
          Graph& g, const Matrix& dy) {
        const Index frames = h_all.rows();
        const Index hidden = h_all.cols();
        Matrix dgi(frames, 3 * hidden);
        Matrix dw_hh = Matrix::Zero(3 * hidden, hidden);
        RowVector db_hh = RowVector::Zero(3 * hidden);
        RowVector carry = RowVector::Zero(hidden);
        for (Index t = frames - 1; t >= 0; --t) {
          const RowVector h_prev =
              t > 0 ? RowVector(h_all.row(t - 1)) : RowVector::Zero(hidden);
          const auto r = r_all.row(t).array();
          const auto z = z_all.row(t).array();
          const auto n = n_all.row(t).array();
          const RowVector dh = dy.row(t) + carry;
          const auto dha = dh.array();
          const RowVector dn_pre = (dha * (1.0 - z) * (1.0 - n.square())).matrix();
          const RowVector dz_pre =
              (dha * (h_prev.array() - n) * z * (1.0 - z)).matrix();
          const RowVector dr_pre =
              (dn_pre.array() * ghn_all.row(t).array() * r * (1.0 - r)).matrix();
          RowVector dgh(3 * hidden);
          dgh << dr_pre, dz_pre, (dn_pre.array() * r).matrix();
          dgi.row(t) << dr_pre, dz_pre, dn_pre;
          dw_hh += dgh.transpose() * h_prev;
          db_hh += dgh;
          carry = (dha * z).matrix() + dgh * w_hh.value();
        }
        if (g.needs_grad(w_hh)) g.Accumulate(w_hh, dw_hh);
        if (g.needs_grad(b_hh)) g.Accumulate(b_hh, db_hh);
        if (g.needs_grad(w_ih)) g.Accumulate(w_ih, dgi.transpose() * x.value());
        if (g.needs_grad(b_ih)) g.Accumulate(b_ih, dgi.colwise().sum());
        if (g.needs_grad(x)) g.Accumulate(x, dgi * w_ih.value());
      });
}

Var Dropout(Var x, double rate, std::mt19937_64& rng) {
  if (rate <= 0.0) return x;
  Require(rate < 1.0, "Dropout", "rate must be below 1");
  std::bernoulli_distribution keep(1.0 - rate);
  Matrix mask(x.rows(), x.cols());
  for (Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = keep(rng) ? 1.0 / (1.0 - rate) : 0.0;
  }
  Graph& g = *x.graph();
  return g.Emit(x.value().cwiseProduct(mask), {x},
                [x, mask](Graph& g, const Matrix& dy) {
                  g.Accumulate(x, dy.cwiseProduct(mask));
                });
}

Var MeanAbsError(Var pred, const Matrix& target) {
  Require(pred.rows() == target.rows() && pred.cols() == target.cols(),
          "MeanAbsError", Shape(pred.value()) + " vs " + Shape(target));
  Require(target.size() > 0, "MeanAbsError", "empty operands");
  const Matrix diff = pred.value() - target;
  const double n = static_cast<double>(diff.size());
  Matrix out(1, 1);
  out(0, 0) = diff.cwiseAbs().sum() / n;
  Graph& g = *pred.graph();
  return g.Emit(std::move(out), {pred},
                [pred, diff, n](Graph& g, const Matrix& dy) {
                  g.Accumulate(pred, diff.array().sign().matrix() * (dy(0, 0) / n));
                });
}

Var Dot(Var x, const Matrix& weights) {
  Require(x.rows() == weights.rows() && x.cols() == weights.cols(), "Dot",
          Shape(x.value()) + " vs " + Shape(weights));
  Matrix out(1, 1);
  out(0, 0) = x.value().cwiseProduct(weights).sum();
  Graph& g = *x.graph();
  return g.Emit(std::move(out), {x}, [x, weights](Graph& g, const Matrix& dy) {
    g.Accumulate(x, weights * dy(0, 0));
  });
}

}  // namespace ats::ad
