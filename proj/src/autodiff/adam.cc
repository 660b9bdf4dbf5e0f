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

#include "advvc/autodiff/adam.h"

#include <cmath>
#include <utility>

#include "advvc/base/errors.h"

namespace advvc::ad {

void AdamStep(Tensor& param, AdamState& state) {
  if (!param.defined() || !param.requires_grad()) {
    throw ContractError("adam: parameter has no gradient");
  }
  if (!param.is_leaf()) throw ContractError("adam: parameter must be a leaf");
  if (state.m.rows() != param.rows() || state.m.cols() != param.cols()) {
    throw DimensionError("adam: state does not match parameter shape");
  }
  const AdamOptions& o = state.options;
  const Matrix& g = param.grad();

  ++state.step;
  state.m = o.beta1 * state.m + (1.0 - o.beta1) * g;
  state.v = o.beta2 * state.v + (1.0 - o.beta2) * g.cwiseAbs2();
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(o.beta1, t);
  const double correction2 = 1.0 - std::pow(o.beta2, t);

  Matrix& p = param.mutable_value();
  p.array() -= o.lr * (state.m.array() / correction1) /
               ((state.v.array() / correction2).sqrt() + o.eps_hat);
  if (!p.allFinite()) throw NumericalError("adam: update produced NaN/Inf");
  param.ZeroGrad();
}

Adam::Adam(std::vector<Tensor> params, const AdamOptions& options)
    : params_(std::move(params)) {
  states_.reserve(params_.size());
  for (const Tensor& p : params_) {
    states_.emplace_back(options, p.rows(), p.cols());
  }
}

void Adam::Step() {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    AdamStep(params_[i], states_[i]);
  }
}

void Adam::ZeroGrad() {
  for (Tensor& p : params_) p.ZeroGrad();
}

}  // namespace advvc::ad
