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

#ifndef ADVVC_AUTODIFF_ADAM_H_
#define ADVVC_AUTODIFF_ADAM_H_

#include <cstdint>
#include <vector>

#include "advvc/autodiff/tensor.h"

namespace advvc::ad {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;
};

// Moment estimates for one parameter tensor.
struct AdamState {
  AdamOptions options;
  Matrix m;
  Matrix v;
  std::int64_t step = 0;

  AdamState() = default;
  AdamState(const AdamOptions& opts, Eigen::Index rows, Eigen::Index cols)
      : options(opts),
        m(Matrix::Zero(rows, cols)),
        v(Matrix::Zero(rows, cols)) {}
};

// One bias-corrected Adam update of `param` from its accumulated gradient,
// which is zeroed afterwards. Throws ContractError if `param` carries no
// gradient and DimensionError if the state was sized for another tensor.
void AdamStep(Tensor& param, AdamState& state);

// Convenience wrapper owning one AdamState per parameter.
class Adam {
 public:
  Adam(std::vector<Tensor> params, const AdamOptions& options);

  void Step();
  void ZeroGrad();
  const std::vector<Tensor>& params() const { return params_; }

 private:
  std::vector<Tensor> params_;
  std::vector<AdamState> states_;
};

}  // namespace advvc::ad

#endif  // ADVVC_AUTODIFF_ADAM_H_
