// Copyright 2026 The advvc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "advvc/autodiff/ops.h"

#include <cmath>
#include <sstream>
#include <utility>

#include "advvc/base/errors.h"

namespace advvc::ad {
namespace {

using Backprop = std::function<void(Node&)>;

std::string ShapeOf(const Tensor& t) {
  std::ostringstream os;
  os << "(" << t.rows() << "x" << t.cols() << ")";
  return os.str();
}

void RequireSameShape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + ShapeOf(a) +
                         " vs " + ShapeOf(b));
  }
}

// Wraps a forward value into a graph node. The parents and the backward
// closure are only kept when some parent needs a gradient.
Tensor MakeResult(const char* op, Matrix value,
                  std::vector<std::shared_ptr<Node>> parents,
                  Backprop backward) {
  if (!value.allFinite()) {
    throw NumericalError(std::string("non-finite value produced by op '") + op +
                         "'");
  }
  auto node = std::make_shared<Node>();
  node->op = op;
  node->value = std::move(value);
  for (const auto& p : parents) node->requires_grad |= p->requires_grad;
  if (node->requires_grad) {
    node->parents = std::move(parents);
    node->backward = std::move(backward);
  }
  return Tensor::FromNode(std::move(node));
}

inline void Accumulate(Node& parent, const auto& contribution) {
  if (parent.requires_grad) parent.grad += contribution;
}

}  // namespace

Tensor MatMul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: inner dimensions differ " + ShapeOf(a) +
                         " * " + ShapeOf(b));
  }
  return MakeResult("matmul", a.value() * b.value(), {a.node(), b.node()},
                    [](Node& self) {
                      Node& pa = *self.parents[0];
                      Node& pb = *self.parents[1];
                      if (pa.requires_grad)
                        pa.grad.noalias() += self.grad * pb.value.transpose();
                      if (pb.requires_grad)
                        pb.grad.noalias() += pa.value.transpose() * self.grad;
                    });
}

Tensor Add(const Tensor& a, const Tensor& b) {
  RequireSameShape("add", a, b);
  return MakeResult("add", a.value() + b.value(), {a.node(), b.node()},
                    [](Node& self) {
                      Accumulate(*self.parents[0], self.grad);
                      Accumulate(*self.parents[1], self.grad);
                    });
}

Tensor Sub(const Tensor& a, const Tensor& b) {
  RequireSameShape("sub", a, b);
  return MakeResult("sub", a.value() - b.value(), {a.node(), b.node()},
                    [](Node& self) {
                      Accumulate(*self.parents[0], self.grad);
                      Accumulate(*self.parents[1], -self.grad);
                    });
}

Tensor Mul(const Tensor& a, const Tensor& b) {
  RequireSameShape("mul", a, b);
  return MakeResult(
      "mul", a.value().cwiseProduct(b.value()), {a.node(), b.node()},
      [](Node& self) {
        Node& pa = *self.parents[0];
        Node& pb = *self.parents[1];
        Accumulate(pa, self.grad.cwiseProduct(pb.value));
        Accumulate(pb, self.grad.cwiseProduct(pa.value));
      });
}

Tensor Scale(const Tensor& a, double factor) {
  return MakeResult("scale", a.value() * factor, {a.node()},
                    [factor](Node& self) {
                      Accumulate(*self.parents[0], self.grad * factor);
                    });
}

Tensor Affine(const Tensor& a, double scale, double shift) {
  return MakeResult("affine", (a.value().array() * scale + shift).matrix(),
                    {a.node()}, [scale](Node& self) {
                      Accumulate(*self.parents[0], self.grad * scale);
                    });
}

Tensor BroadcastAdd(const Tensor& a, const Tensor& bias) {
  if (bias.cols() != 1 || bias.rows() != a.rows()) {
    throw DimensionError("broadcast_add: bias " + ShapeOf(bias) +
                         " does not fit " + ShapeOf(a));
  }
  Matrix out = a.value();
  out.colwise() += bias.value().col(0);
  return MakeResult("broadcast_add", std::move(out), {a.node(), bias.node()},
                    [](Node& self) {
                      Accumulate(*self.parents[0], self.grad);
                      Accumulate(*self.parents[1], self.grad.rowwise().sum());
                    });
}

Tensor RepeatCols(const Tensor& column, Eigen::Index cols) {
  if (column.cols() != 1) {
    throw DimensionError("repeat_cols: expected a column, got " +
                         ShapeOf(column));
  }
  if (cols < 1) throw DimensionError("repeat_cols: cols must be >= 1");
  return MakeResult("repeat_cols", column.value().replicate(1, cols),
                    {column.node()}, [](Node& self) {
                      Accumulate(*self.parents[0], self.grad.rowwise().sum());
                    });
}

Tensor ConcatRows(const Tensor& top, const Tensor& bottom) {
  if (top.cols() != bottom.cols()) {
    throw DimensionError("concat_rows: column counts differ " + ShapeOf(top) +
                         " vs " + ShapeOf(bottom));
  }
  Matrix out(top.rows() + bottom.rows(), top.cols());
  out << top.value(), bottom.value();
  const Eigen::Index split = top.rows();
  return MakeResult("concat_rows", std::move(out), {top.node(), bottom.node()},
                    [split](Node& self) {
                      const Eigen::Index rest = self.grad.rows() - split;
                      Accumulate(*self.parents[0], self.grad.topRows(split));
                      Accumulate(*self.parents[1], self.grad.bottomRows(rest));
                    });
}

Tensor Tanh(const Tensor& a) {
  Matrix out = a.value().array().tanh().matrix();
  return MakeResult("tanh", std::move(out), {a.node()}, [](Node& self) {
    Accumulate(*self.parents[0],
               (self.grad.array() * (1.0 - self.value.array().square()))
                   .matrix());
  });
}

Tensor Relu(const Tensor& a) {
  return MakeResult("relu", a.value().cwiseMax(0.0), {a.node()},
                    [](Node& self) {
                      Node& p = *self.parents[0];
                      Accumulate(p, (p.value.array() > 0.0)
                                        .select(self.grad.array(), 0.0)
                                        .matrix());
                    });
}

Tensor MeanOverCols(const Tensor& a) {
  if (a.cols() < 1) throw DimensionError("mean_over_cols: no columns");
  const double inv = 1.0 / static_cast<double>(a.cols());
  return MakeResult("mean_over_cols", a.value().rowwise().mean(), {a.node()},
                    [inv](Node& self) {
                      Node& p = *self.parents[0];
                      if (!p.requires_grad) return;
                      p.grad.colwise() += self.grad.col(0) * inv;
                    });
}

Tensor Sum(const Tensor& a) {
  return MakeResult("sum", Matrix::Constant(1, 1, a.value().sum()), {a.node()},
                    [](Node& self) {
                      Node& p = *self.parents[0];
                      if (p.requires_grad) p.grad.array() += self.grad(0, 0);
                    });
}

Tensor L2Distance(const Tensor& a, const Tensor& b) {
  RequireSameShape("l2_distance", a, b);
  const double dist =
      std::sqrt((a.value() - b.value()).squaredNorm() + kL2Stabilizer);
  return MakeResult("l2_distance", Matrix::Constant(1, 1, dist),
                    {a.node(), b.node()}, [](Node& self) {
                      Node& pa = *self.parents[0];
                      Node& pb = *self.parents[1];
                      const double scale = self.grad(0, 0) / self.value(0, 0);
                      Matrix diff = (pa.value - pb.value) * scale;
                      Accumulate(pa, diff);
                      Accumulate(pb, -diff);
                    });
}

Tensor MeanSquaredError(const Tensor& a, const Tensor& b) {
  RequireSameShape("mse", a, b);
  const double n = static_cast<double>(a.size());
  const double mse = (a.value() - b.value()).squaredNorm() / n;
  return MakeResult("mse", Matrix::Constant(1, 1, mse), {a.node(), b.node()},
                    [n](Node& self) {
                      Node& pa = *self.parents[0];
                      Node& pb = *self.parents[1];
                      Matrix diff =
                          (pa.value - pb.value) * (2.0 * self.grad(0, 0) / n);
                      Accumulate(pa, diff);
                      Accumulate(pb, -diff);
                    });
}

Tensor Normalize(const Tensor& column) {
  if (column.cols() != 1) {
    throw DimensionError("normalize: expected a column, got " +
                         ShapeOf(column));
  }
  const double norm = column.value().norm();
  if (!(norm > 0.0)) throw NumericalError("normalize: zero-norm vector");
  return MakeResult("normalize", column.value() / norm, {column.node()},
                    [norm](Node& self) {
                      Node& p = *self.parents[0];
                      if (!p.requires_grad) return;
                      const double proj = self.value.col(0).dot(self.grad.col(0));
                      p.grad += (self.grad - self.value * proj) / norm;
                    });
}

Tensor SoftmaxCrossEntropy(const Tensor& logits, int label) {
  if (logits.cols() != 1) {
    throw DimensionError("softmax_cross_entropy: logits must be a column");
  }
  if (label < 0 || label >= logits.rows()) {
    throw ContractError("softmax_cross_entropy: label out of range");
  }
  const Eigen::VectorXd z = logits.value().col(0);
  const double zmax = z.maxCoeff();
  Eigen::VectorXd prob = (z.array() - zmax).exp();
  const double total = prob.sum();
  prob /= total;
  const double loss = -(z(label) - zmax - std::log(total));
  return MakeResult("softmax_cross_entropy", Matrix::Constant(1, 1, loss),
                    {logits.node()},
                    [prob = std::move(prob), label](Node& self) {
                      Node& p = *self.parents[0];
                      if (!p.requires_grad) return;
                      Eigen::VectorXd g = prob;
                      g(label) -= 1.0;
                      p.grad.col(0) += g * self.grad(0, 0);
                    });
}

}  // namespace advvc::ad
