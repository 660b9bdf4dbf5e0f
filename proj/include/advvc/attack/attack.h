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

#ifndef ADVVC_ATTACK_ATTACK_H_
#define ADVVC_ATTACK_ATTACK_H_

#include <cstdint>
#include <string>
#include <vector>

#include "advvc/audio/corpus.h"
#include "advvc/autodiff/tensor.h"
#include "advvc/model/vc_model.h"

namespace advvc {

enum class AttackMethod {
  kUntargetedEndToEnd,
  kTargetedEndToEnd,
  kEmbedding,
  kFeedback,
};

// "untargeted_e2e", "targeted_e2e", "embedding", "feedback".
std::string MethodName(AttackMethod method);
// Inverse of MethodName; throws ConfigError for unknown names.
AttackMethod ParseMethod(const std::string& name);
bool IsTargeted(AttackMethod method);

struct AttackConfig {
  AttackMethod method = AttackMethod::kEmbedding;
  double epsilon = 0.8;  // absolute, in log-mel units
  double lambda = 0.1;
  double lr = 1e-3;
  int iterations = 1500;
  std::uint64_t seed = 0;

  // Throws ConfigError.
  void Validate() const;
};

struct AttackResult {
  Eigen::MatrixXd w;
  Eigen::MatrixXd delta;  // epsilon * tanh(w)
  MelSpectrogram adversarial_input;
  // loss_trace[i] is the loss after i optimizer steps, so the trace holds
  // iterations + 1 values.
  std::vector<double> loss_trace;
  // Operators on the loss graph of the first iteration.
  std::vector<std::string> graph_ops;
  AttackConfig config;
};

// delta = epsilon * tanh(w).
ad::Tensor Reparameterize(const ad::Tensor& w, double epsilon);

// L(probe, target_ref) - lambda * L(probe, source_ref), with L the l2
// distance. Every targeted attack is this function applied to spectrograms
// or embeddings.
ad::Tensor TwoTermLoss(const ad::Tensor& probe, const ad::Tensor& target_ref,
                       const ad::Tensor& source_ref, double lambda);

// A loss of w with the attack's reference terms precomputed as constants.
class AttackObjective {
 public:
  // `t` is ignored by the embedding attack; `y` must be null exactly when
  // the method is untargeted. Throws ConfigError or DimensionError.
  AttackObjective(const VcModel& model, AttackMethod method,
                  const ad::Tensor& t, const ad::Tensor& x,
                  const ad::Tensor* y, double epsilon, double lambda);

  // x + epsilon * tanh(w).
  ad::Tensor Perturbed(const ad::Tensor& w) const;
  // Scalar to minimise. The untargeted attack returns the negated distance.
  ad::Tensor Loss(const ad::Tensor& w) const;

 private:
  const VcModel& model_;
  AttackMethod method_;
  double epsilon_;
  double lambda_;
  ad::Tensor x_;
  ad::Tensor content_code_;
  ad::Tensor target_ref_;
  ad::Tensor source_ref_;
};

// Positive distance L(F(t, x + delta), F(t, x)); the attack maximises it.
ad::Tensor LossUntargetedEndToEnd(const VcModel& model, const ad::Tensor& t,
                                  const ad::Tensor& x, const ad::Tensor& w,
                                  double epsilon);
ad::Tensor LossTargetedEndToEnd(const VcModel& model, const ad::Tensor& t,
                                const ad::Tensor& x, const ad::Tensor& y,
                                const ad::Tensor& w, double epsilon,
                                double lambda);
ad::Tensor LossEmbedding(const VcModel& model, const ad::Tensor& x,
                         const ad::Tensor& y, const ad::Tensor& w,
                         double epsilon, double lambda);
ad::Tensor LossFeedback(const VcModel& model, const ad::Tensor& t,
                        const ad::Tensor& x, const ad::Tensor& y,
                        const ad::Tensor& w, double epsilon, double lambda);

// Optimises w ~ N(0, 1) with Adam. `target` is required for targeted
// methods and rejected for the untargeted one. The adversarial input is
// clamped to [log floor, stats.max + epsilon] after optimisation.
AttackResult RunAttack(const VcModel& model, const AttackConfig& config,
                       const MelSpectrogram& t, const MelSpectrogram& x,
                       const MelSpectrogram* target);

// Uniformly draws an utterance from `pool` whose speaker has the opposite
// gender tag to `defended_speaker`. Throws SelectionError if none exists.
int SelectTarget(const Corpus& corpus, const std::vector<int>& pool,
                 int defended_speaker, std::uint64_t seed);

// "iteration,loss" rows.
void WriteLossTrace(const std::string& path, const std::vector<double>& trace);

}  // namespace advvc

#endif  // ADVVC_ATTACK_ATTACK_H_
