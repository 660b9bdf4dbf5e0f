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

#ifndef ADVVC_AUTODIFF_OPS_H_
#define ADVVC_AUTODIFF_OPS_H_

#include "advvc/autodiff/tensor.h"

namespace advvc::ad {

// Stabiliser inside the square root of L2Distance; keeps the gradient finite
// when both arguments coincide.
inline constexpr double kL2Stabilizer = 1e-12;

// Linear algebra and elementwise arithmetic. Shape mismatches throw
// DimensionError.
Tensor MatMul(const Tensor& a, const Tensor& b);
Tensor Add(const Tensor& a, const Tensor& b);
Tensor Sub(const Tensor& a, const Tensor& b);
Tensor Mul(const Tensor& a, const Tensor& b);  // Hadamard product
Tensor Scale(const Tensor& a, double factor);
// a * scale + shift, elementwise.
Tensor Affine(const Tensor& a, double scale, double shift);

// Adds the column vector `bias` (rows x 1) to every column of `a`. With
// frames stored as columns this is the per-frame bias of a dense layer.
Tensor BroadcastAdd(const Tensor& a, const Tensor& bias);
// Tiles a column vector into `cols` identical columns.
Tensor RepeatCols(const Tensor& column, Eigen::Index cols);
// Stacks `top` above `bottom`; column counts must agree.
Tensor ConcatRows(const Tensor& top, const Tensor& bottom);

Tensor Tanh(const Tensor& a);
Tensor Relu(const Tensor& a);

// Reductions.
Tensor MeanOverCols(const Tensor& a);  // (r x c) -> (r x 1)
Tensor Sum(const Tensor& a);           // -> 1 x 1
// sqrt(sum((a - b)^2) + kL2Stabilizer) -> 1 x 1
Tensor L2Distance(const Tensor& a, const Tensor& b);
// mean((a - b)^2) -> 1 x 1
Tensor MeanSquaredError(const Tensor& a, const Tensor& b);

// Scales a column vector to unit l2 norm.
Tensor Normalize(const Tensor& column);
// Cross-entropy of softmax(logits) against class `label`; logits is k x 1.
Tensor SoftmaxCrossEntropy(const Tensor& logits, int label);

}  // namespace advvc::ad

#endif  // ADVVC_AUTODIFF_OPS_H_
