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

#include "advvc/autodiff/tensor.h"

#include <unordered_set>
#include <utility>

#include "advvc/base/errors.h"

namespace advvc::ad {

Tensor Tensor::Constant(Matrix value) {
  if (!value.allFinite()) throw NumericalError("constant tensor holds NaN/Inf");
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  Tensor t;
  t.node_ = std::move(node);
  return t;
}

Tensor Tensor::Parameter(Matrix value) {
  if (!value.allFinite()) {
    throw NumericalError("parameter tensor holds NaN/Inf");
  }
  auto node = std::make_shared<Node>();
  node->grad = Matrix::Zero(value.rows(), value.cols());
  node->value = std::move(value);
  node->requires_grad = true;
  Tensor t;
  t.node_ = std::move(node);
  return t;
}

Tensor Tensor::Scalar(double value) {
  return Constant(Matrix::Constant(1, 1, value));
}

Tensor Tensor::FromNode(std::shared_ptr<Node> node) {
  Tensor t;
  t.node_ = std::move(node);
  return t;
}

Matrix& Tensor::mutable_value() {
  if (!is_leaf()) throw ContractError("only leaf tensors can be mutated");
  return node_->value;
}

const Matrix& Tensor::grad() const {
  if (!node_->requires_grad) {
    throw ContractError("tensor does not require grad");
  }
  return node_->grad;
}

void Tensor::ZeroGrad() {
  if (node_->requires_grad) node_->grad.setZero();
}

double Tensor::item() const {
  if (rows() != 1 || cols() != 1) {
    throw ContractError("item() needs a 1x1 tensor");
  }
  return node_->value(0, 0);
}

Tensor Tensor::Detach() const { return Constant(node_->value); }

namespace {

// Post-order over the grad-requiring subgraph: parents precede children.
std::vector<Node*> TopologicalOrder(Node* root) {
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(root, 0);
  seen.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* parent = node->parents[next++].get();
      if (parent->requires_grad && seen.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  return order;
}

}  // namespace

BackwardStats Backward(const Tensor& loss) {
  if (!loss.defined() || loss.rows() != 1 || loss.cols() != 1) {
    throw ContractError("Backward() needs a scalar (1x1) loss");
  }
  BackwardStats stats;
  Node* root = loss.node().get();
  if (!root->requires_grad) return stats;

  std::vector<Node*> order = TopologicalOrder(root);
  for (Node* n : order) {
    if (!n->parents.empty()) n->grad.setZero(n->value.rows(), n->value.cols());
  }
  root->grad(0, 0) += 1.0;

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    ++stats.nodes_visited;
    if (!n->backward) continue;
    n->backward(*n);
    for (const auto& p : n->parents) {
      if (p->requires_grad && !p->grad.allFinite()) {
        throw NumericalError("non-finite gradient produced by op '" + n->op +
                             "'");
      }
    }
  }
  return stats;
}

std::vector<std::string> GraphOps(const Tensor& root) {
  std::vector<std::string> ops;
  std::unordered_set<const Node*> seen;
  std::vector<const Node*> stack{root.node().get()};
  seen.insert(root.node().get());
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    ops.push_back(n->op);
    for (const auto& p : n->parents) {
      if (seen.insert(p.get()).second) stack.push_back(p.get());
    }
  }
  return ops;
}

}  // namespace advvc::ad
