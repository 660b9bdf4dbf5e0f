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

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "advvc/autodiff/adam.h"
#include "advvc/autodiff/ops.h"
#include "advvc/autodiff/tensor.h"
#include "advvc/base/errors.h"
#include "support/oracles.h"

namespace advvc::ad {
namespace {

using advvc::testing::CompareGradients;
using advvc::testing::UniformMatrix;
using advvc::testing::WeightedSum;

TEST(Ops, IdentityMatmulAndAllOnes) {
  std::mt19937_64 rng(1);
  const Matrix a = UniformMatrix(3, 3, rng);
  EXPECT_EQ(MatMul(Tensor::Constant(Matrix::Identity(3, 3)),
                   Tensor::Constant(a)).value(), a);
  const Tensor r = MatMul(Tensor::Constant(Matrix::Ones(2, 3)),
                          Tensor::Constant(Matrix::Ones(3, 1)));
  ASSERT_EQ(r.rows(), 2);
  ASSERT_EQ(r.cols(), 1);
  EXPECT_EQ(r.value()(0, 0), 3.0);
  EXPECT_EQ(r.value()(1, 0), 3.0);
}

TEST(Ops, MatmulGradientIsUpstreamTimesTranspose) {
  std::mt19937_64 rng(2);
  const Matrix a0 = UniformMatrix(3, 3, rng);
  const Matrix b = UniformMatrix(3, 3, rng);
  const Matrix up = UniformMatrix(3, 3, rng);
  Tensor a = Tensor::Parameter(a0);
  Backward(Sum(Mul(MatMul(a, Tensor::Constant(b)), Tensor::Constant(up))));
  EXPECT_LT((a.grad() - up * b.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  const auto cmp = CompareGradients(
      [&](const Tensor& p) {
        return Sum(Mul(MatMul(p, Tensor::Constant(b)), Tensor::Constant(up)));
      },
      a0);
  EXPECT_LT(cmp.relative_error, 1e-4);
}

TEST(Ops, ShapeMismatchIsADimensionError) {
  const Tensor a = Tensor::Constant(Matrix::Zero(2, 3));
  const Tensor b = Tensor::Constant(Matrix::Zero(3, 2));
  EXPECT_THROW(Add(a, b), DimensionError);
  EXPECT_THROW(Sub(a, b), DimensionError);
  EXPECT_THROW(Mul(a, b), DimensionError);
  EXPECT_THROW(MatMul(a, a), DimensionError);
  EXPECT_THROW(L2Distance(a, b), DimensionError);
  EXPECT_THROW(BroadcastAdd(a, Tensor::Constant(Matrix::Zero(3, 1))),
               DimensionError);
  EXPECT_THROW(ConcatRows(a, b), DimensionError);
  EXPECT_THROW(RepeatCols(a, 2), DimensionError);
}

TEST(Ops, TanhAtZero) {
  Tensor x = Tensor::Parameter(Matrix::Zero(1, 1));
  Tensor y = Tanh(x);
  EXPECT_EQ(y.item(), 0.0);
  Backward(y);
  EXPECT_EQ(x.grad()(0, 0), 1.0);
}

TEST(Ops, L2DistanceOfCoincidentPointsIsStabilised) {
  std::mt19937_64 rng(3);
  const Matrix v = UniformMatrix(4, 5, rng);
  Tensor a = Tensor::Parameter(v);
  Tensor d = L2Distance(a, Tensor::Constant(v));
  EXPECT_DOUBLE_EQ(d.item(), std::sqrt(kL2Stabilizer));
  Backward(d);
  EXPECT_TRUE(a.grad().allFinite());
  EXPECT_LT(a.grad().cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Ops, NonFiniteValuesAreRejected) {
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(Tensor::Constant(bad), NumericalError);
  bad(0, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(Tensor::Parameter(bad), NumericalError);
  const Tensor big = Tensor::Constant(Matrix::Constant(1, 1, 1e200));
  EXPECT_THROW(Mul(big, big), NumericalError);
}

TEST(Ops, EveryOperatorMatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    const Matrix a = UniformMatrix(4, 5, rng);
    const Matrix b = UniformMatrix(4, 5, rng);
    const Matrix r = UniformMatrix(5, 2, rng);
    const Matrix col = UniformMatrix(4, 1, rng);
    Matrix away = a;
    for (Eigen::Index i = 0; i < away.size(); ++i) {
      if (std::abs(away(i)) < 1e-2) away(i) = -0.3;
    }
    auto C = [](const Matrix& m) { return Tensor::Constant(m); };
    const std::vector<std::pair<std::function<Tensor(const Tensor&)>, Matrix>>
        cases = {
            {[&](const Tensor& p) { return WeightedSum(MatMul(p, C(r)), seed); }, a},
            {[&](const Tensor& p) { return WeightedSum(MatMul(C(a), p), seed); }, r},
            {[&](const Tensor& p) { return WeightedSum(Add(p, C(b)), seed); }, a},
            {[&](const Tensor& p) { return WeightedSum(Sub(C(b), p), seed); }, a},
            {[&](const Tensor& p) { return WeightedSum(Mul(p, p), seed); }, a},
            {[&](const Tensor& p) { return WeightedSum(Scale(p, 0.7), seed); }, a},
            {[&](const Tensor& p) { return WeightedSum(Affine(p, -2.0, 1.0), seed); }, a},
            {[&](const Tensor& p) { return WeightedSum(BroadcastAdd(C(a), p), seed); }, col},
            {[&](const Tensor& p) { return WeightedSum(RepeatCols(p, 5), seed); }, col},
            {[&](const Tensor& p) { return WeightedSum(ConcatRows(p, C(b)), seed); }, a},
            {[&](const Tensor& p) { return WeightedSum(Tanh(p), seed); }, a},
            {[&](const Tensor& p) { return WeightedSum(Relu(p), seed); }, away},
            {[&](const Tensor& p) { return WeightedSum(MeanOverCols(p), seed); }, a},
            {[&](const Tensor& p) { return L2Distance(p, C(b)); }, a},
            {[&](const Tensor& p) { return MeanSquaredError(p, C(b)); }, a},
            {[&](const Tensor& p) { return WeightedSum(Normalize(p), seed); }, col},
            {[&](const Tensor& p) { return SoftmaxCrossEntropy(p, 2); }, col},
        };
    for (std::size_t k = 0; k < cases.size(); ++k) {
      EXPECT_LT(CompareGradients(cases[k].first, cases[k].second).relative_error,
                1e-3)
          << "case " << k << " seed " << seed;
    }
  }
}

TEST(Backward, SumGivesOnesAndFanOutAccumulates) {
  Tensor x = Tensor::Parameter(Matrix::Constant(2, 2, 0.3));
  Backward(Sum(x));
  EXPECT_EQ(x.grad(), Matrix::Ones(2, 2));
  x.ZeroGrad();
  Backward(Sum(Add(x, x)));
  EXPECT_EQ(x.grad(), Matrix::Constant(2, 2, 2.0));
}

TEST(Backward, NonScalarLossIsAContractError) {
  Tensor x = Tensor::Parameter(Matrix::Ones(2, 2));
  EXPECT_THROW(Backward(Tanh(x)), ContractError);
}

TEST(Backward, VisitsEachNodeOnce) {
  Tensor x = Tensor::Parameter(Matrix::Ones(3, 1));
  // Diamond: x feeds two branches that rejoin.
  Tensor a = Tanh(x);
  Tensor b = Scale(x, 2.0);
  Tensor c = Add(a, b);
  Tensor loss = Sum(Mul(c, a));
  const BackwardStats stats = Backward(loss);
  // x, a, b, c, mul, sum
  EXPECT_EQ(stats.nodes_visited, 6u);
}

TEST(Backward, ConstantsAreNeverTouched) {
  Tensor w = Tensor::Constant(Matrix::Ones(2, 2));
  Tensor x = Tensor::Parameter(Matrix::Ones(2, 1));
  Backward(Sum(MatMul(w, x)));
  EXPECT_FALSE(w.requires_grad());
  EXPECT_THROW(w.grad(), ContractError);
}

TEST(Backward, ThreeLayerTanhMlpMatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(seed);
    const Matrix w1 = UniformMatrix(6, 4, rng, -1, 1);
    const Matrix w2 = UniformMatrix(5, 6, rng, -1, 1);
    const Matrix w3 = UniformMatrix(1, 5, rng, -1, 1);
    const Matrix x0 = UniformMatrix(4, 3, rng);
    auto f = [&](const Tensor& x) {
      Tensor h = Tanh(MatMul(Tensor::Constant(w1), x));
      h = Tanh(MatMul(Tensor::Constant(w2), h));
      return Sum(Tanh(MatMul(Tensor::Constant(w3), h)));
    };
    EXPECT_LT(CompareGradients(f, x0).relative_error, 1e-3);
  }
}

TEST(Adam, ZeroGradientLeavesParameterUnchanged) {
  Tensor p = Tensor::Parameter(Matrix::Constant(2, 3, 0.25));
  AdamState s({}, 2, 3);
  AdamStep(p, s);
  EXPECT_EQ(p.value(), Matrix::Constant(2, 3, 0.25));
  EXPECT_EQ(s.step, 1);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  // t = 1: m_hat = g and v_hat = g^2, so the update is lr * g / (|g| + eps).
  Tensor p = Tensor::Parameter(Matrix::Zero(1, 1));
  AdamState s({.lr = 1e-3}, 1, 1);
  Backward(Scale(p, 4.0));
  AdamStep(p, s);
  EXPECT_NEAR(p.value()(0, 0), -1e-3 * 4.0 / (4.0 + 1e-8), 1e-15);
  EXPECT_EQ(p.grad()(0, 0), 0.0);
}

TEST(Adam, ConstantGradientSettlesAtLearningRate) {
  Tensor p = Tensor::Parameter(Matrix::Zero(1, 1));
  AdamState s({.lr = 1e-3}, 1, 1);
  double previous = 0.0, last_step = 0.0;
  for (int i = 0; i < 100; ++i) {
    Backward(Scale(p, 2.5));
    AdamStep(p, s);
    last_step = std::abs(p.value()(0, 0) - previous);
    previous = p.value()(0, 0);
  }
  EXPECT_NEAR(last_step, 1e-3, 0.05e-3);
}

TEST(Adam, RejectsParametersWithoutGradients) {
  Tensor c = Tensor::Constant(Matrix::Zero(1, 1));
  AdamState s({}, 1, 1);
  EXPECT_THROW(AdamStep(c, s), ContractError);
  Tensor p = Tensor::Parameter(Matrix::Zero(2, 1));
  EXPECT_THROW(AdamStep(p, s), DimensionError);
}

TEST(Adam, StaysFiniteOnLargeGradients) {
  Tensor p = Tensor::Parameter(Matrix::Constant(3, 1, 1.0));
  AdamState s({.lr = 1e-3}, 3, 1);
  for (int i = 0; i < 20; ++i) {
    Backward(Sum(Scale(p, 1e100)));
    AdamStep(p, s);
    EXPECT_TRUE(p.value().allFinite());
  }
}

}  // namespace
}  // namespace advvc::ad
