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

#ifndef ADVVC_AUTODIFF_TENSOR_H_
#define ADVVC_AUTODIFF_TENSOR_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace advvc::ad {

using Matrix = Eigen::MatrixXd;

// One vertex of the define-by-run graph. Every op allocates a fresh Node
// holding its forward value and a closure that scatters the upstream
// gradient into its parents. Vectors are stored as (n x 1) columns.
struct Node {
  Matrix value;
  Matrix grad;  // sized like value iff requires_grad
  bool requires_grad = false;
  std::string op = "leaf";
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;
};

// Cheap, copyable handle to a Node. Copies alias the same node, the way a
// framework tensor handle does.
class Tensor {
 public:
  Tensor() = default;

  // Leaf that never receives a gradient.
  static Tensor Constant(Matrix value);
  // Leaf that accumulates gradient across Backward() calls until zeroed.
  static Tensor Parameter(Matrix value);
  static Tensor Scalar(double value);

  bool defined() const { return node_ != nullptr; }
  bool requires_grad() const { return node_->requires_grad; }
  bool is_leaf() const { return node_->parents.empty(); }
  const std::string& op() const { return node_->op; }

  Eigen::Index rows() const { return node_->value.rows(); }
  Eigen::Index cols() const { return node_->value.cols(); }
  Eigen::Index size() const { return node_->value.size(); }

  const Matrix& value() const { return node_->value; }
  // Leaves only; used by optimizers and for in-place initialisation.
  Matrix& mutable_value();
  const Matrix& grad() const;
  void ZeroGrad();

  // Value of a 1 x 1 tensor.
  double item() const;

  // Constant leaf with a copy of this value; cuts the graph.
  Tensor Detach() const;

  const std::shared_ptr<Node>& node() const { return node_; }

  // Used by ops to create non-leaf results.
  static Tensor FromNode(std::shared_ptr<Node> node);

 private:
  std::shared_ptr<Node> node_;
};

struct BackwardStats {
  std::size_t nodes_visited = 0;
};

// Reverse-mode sweep from a scalar loss. Gradients of requires_grad leaves
// are accumulated (+=); intermediate gradients are reset on every call.
// Throws ContractError for a non-scalar loss and NumericalError, naming the
// offending op, if any propagated gradient is non-finite.
BackwardStats Backward(const Tensor& loss);

// Op names of every node reachable from `root`, each node listed once.
std::vector<std::string> GraphOps(const Tensor& root);

}  // namespace advvc::ad

#endif  // ADVVC_AUTODIFF_TENSOR_H_
