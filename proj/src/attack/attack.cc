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

#include "advvc/attack/attack.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "advvc/autodiff/adam.h"
#include "advvc/autodiff/ops.h"
#include "advvc/base/errors.h"
#include "advvc/base/random.h"

namespace advvc {

std::string MethodName(AttackMethod method) {
  switch (method) {
    case AttackMethod::kUntargetedEndToEnd: return "untargeted_e2e";
    case AttackMethod::kTargetedEndToEnd: return "targeted_e2e";
    case AttackMethod::kEmbedding: return "embedding";
    case AttackMethod::kFeedback: return "feedback";
  }
  return "unknown";
}

AttackMethod ParseMethod(const std::string& name) {
  for (AttackMethod m :
       {AttackMethod::kUntargetedEndToEnd, AttackMethod::kTargetedEndToEnd,
        AttackMethod::kEmbedding, AttackMethod::kFeedback}) {
    if (MethodName(m) == name) return m;
  }
  throw ConfigError("unknown attack method '" + name + "'");
}

bool IsTargeted(AttackMethod method) {
  return method != AttackMethod::kUntargetedEndToEnd;
}

void AttackConfig::Validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ConfigError("epsilon must be positive");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("lambda must be non-negative");
  }
  if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
}

ad::Tensor Reparameterize(const ad::Tensor& w, double epsilon) {
  return ad::Scale(ad::Tanh(w), epsilon);
}

ad::Tensor TwoTermLoss(const ad::Tensor& probe, const ad::Tensor& target_ref,
                       const ad::Tensor& source_ref, double lambda) {
  return ad::Sub(ad::L2Distance(probe, target_ref),
                 ad::Scale(ad::L2Distance(probe, source_ref), lambda));
}

AttackObjective::AttackObjective(const VcModel& model, AttackMethod method,
                                 const ad::Tensor& t, const ad::Tensor& x,
                                 const ad::Tensor* y, double epsilon,
                                 double lambda)
    : model_(model),
      method_(method),
      epsilon_(epsilon),
      lambda_(lambda),
      x_(x.Detach()) {
  if (IsTargeted(method) && y == nullptr) {
    throw ConfigError(MethodName(method) + " attack needs a target utterance");
  }
  if (!IsTargeted(method) && y != nullptr) {
    throw ConfigError("the untargeted attack takes no target utterance");
  }
  model.CheckInput(x_);
  if (y != nullptr) model.CheckInput(*y);
  const bool needs_content = method != AttackMethod::kEmbedding;
  if (needs_content) {
    model.CheckInput(t);
    content_code_ = model.ContentCode(t.Detach()).Detach();
  }
  switch (method) {
    case AttackMethod::kUntargetedEndToEnd:
      source_ref_ =
          model.Decode(content_code_, model.SpeakerEmbed(x_)).Detach();
      break;
    case AttackMethod::kTargetedEndToEnd:
      target_ref_ =
          model.Decode(content_code_, model.SpeakerEmbed(y->Detach())).Detach();
      source_ref_ =
          model.Decode(content_code_, model.SpeakerEmbed(x_)).Detach();
      break;
    case AttackMethod::kEmbedding:
    case AttackMethod::kFeedback:
      target_ref_ = model.SpeakerEmbed(y->Detach()).Detach();
      source_ref_ = model.SpeakerEmbed(x_).Detach();
      break;
  }
}

ad::Tensor AttackObjective::Perturbed(const ad::Tensor& w) const {
  if (w.value().rows() != x_.value().rows() ||
      w.value().cols() != x_.value().cols()) {
    throw DimensionError("w must have the shape of the defended utterance");
  }
  return ad::Add(x_, Reparameterize(w, epsilon_));
}

ad::Tensor AttackObjective::Loss(const ad::Tensor& w) const {
  const ad::Tensor probe_input = Perturbed(w);
  switch (method_) {
    case AttackMethod::kUntargetedEndToEnd: {
      ad::Tensor out =
          model_.Decode(content_code_, model_.SpeakerEmbed(probe_input));
      return ad::Scale(ad::L2Distance(out, source_ref_), -1.0);
    }
    case AttackMethod::kTargetedEndToEnd: {
      ad::Tensor out =
          model_.Decode(content_code_, model_.SpeakerEmbed(probe_input));
      return TwoTermLoss(out, target_ref_, source_ref_, lambda_);
    }
    case AttackMethod::kEmbedding:
      return TwoTermLoss(model_.SpeakerEmbed(probe_input), target_ref_,
                         source_ref_, lambda_);
    case AttackMethod::kFeedback: {
      ad::Tensor out =
          model_.Decode(content_code_, model_.SpeakerEmbed(probe_input));
      return TwoTermLoss(model_.SpeakerEmbed(out), target_ref_, source_ref_,
                         lambda_);
    }
  }
  throw ContractError("unknown attack method");
}

ad::Tensor LossUntargetedEndToEnd(const VcModel& model, const ad::Tensor& t,
                                  const ad::Tensor& x, const ad::Tensor& w,
                                  double epsilon) {
  AttackObjective objective(model, AttackMethod::kUntargetedEndToEnd, t, x,
                            nullptr, epsilon, 0.0);
  return ad::Scale(objective.Loss(w), -1.0);
}

ad::Tensor LossTargetedEndToEnd(const VcModel& model, const ad::Tensor& t,
                                const ad::Tensor& x, const ad::Tensor& y,
                                const ad::Tensor& w, double epsilon,
                                double lambda) {
  AttackObjective objective(model, AttackMethod::kTargetedEndToEnd, t, x, &y,
                            epsilon, lambda);
  return objective.Loss(w);
}

ad::Tensor LossEmbedding(const VcModel& model, const ad::Tensor& x,
                         const ad::Tensor& y, const ad::Tensor& w,
                         double epsilon, double lambda) {
  AttackObjective objective(model, AttackMethod::kEmbedding, x, x, &y, epsilon,
                            lambda);
  return objective.Loss(w);
}

ad::Tensor LossFeedback(const VcModel& model, const ad::Tensor& t,
                        const ad::Tensor& x, const ad::Tensor& y,
                        const ad::Tensor& w, double epsilon, double lambda) {
  AttackObjective objective(model, AttackMethod::kFeedback, t, x, &y, epsilon,
                            lambda);
  return objective.Loss(w);
}

AttackResult RunAttack(const VcModel& model, const AttackConfig& config,
                       const MelSpectrogram& t, const MelSpectrogram& x,
                       const MelSpectrogram* target) {
  config.Validate();
  model.CheckInput(x);
  ad::Tensor t_tensor = AsTensor(t);
  ad::Tensor y_tensor;
  if (target != nullptr) {
    model.CheckInput(*target);
    y_tensor = AsTensor(*target);
  }
  if (config.method != AttackMethod::kEmbedding) model.CheckInput(t);
  AttackObjective objective(model, config.method, t_tensor, AsTensor(x),
                            target != nullptr ? &y_tensor : nullptr,
                            config.epsilon, config.lambda);

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd w0(x.data.rows(), x.data.cols());
  for (Eigen::Index c = 0; c < w0.cols(); ++c) {
    for (Eigen::Index r = 0; r < w0.rows(); ++r) w0(r, c) = normal(rng);
  }
  ad::Tensor w = ad::Tensor::Parameter(std::move(w0));
  ad::AdamState state({.lr = config.lr}, x.data.rows(), x.data.cols());

  AttackResult result;
  result.config = config;
  result.loss_trace.reserve(config.iterations + 1);
  for (int i = 0; i <= config.iterations; ++i) {
    ad::Tensor loss = objective.Loss(w);
    result.loss_trace.push_back(loss.item());
    if (i == 0) result.graph_ops = ad::GraphOps(loss);
    if (i == config.iterations) break;
    ad::Backward(loss);
    ad::AdamStep(w, state);
  }

  result.w = w.value();
  result.delta = config.epsilon * result.w.array().tanh().matrix();
  const double lo = x.config.log_min();
  const double hi = model.stats().max + config.epsilon;
  result.adversarial_input.config = x.config;
  result.adversarial_input.data =
      (x.data + result.delta).cwiseMax(lo).cwiseMin(hi);
  return result;
}

int SelectTarget(const Corpus& corpus, const std::vector<int>& pool,
                 int defended_speaker, std::uint64_t seed) {
  const GenderTag defended =
      corpus.speakers.at(defended_speaker).gender_tag();
  std::vector<int> candidates;
  for (int idx : pool) {
    const int spk = corpus.utterances.at(idx).speaker;
    if (corpus.speakers.at(spk).gender_tag() != defended) {
      candidates.push_back(idx);
    }
  }
  if (candidates.empty()) {
    throw SelectionError("no utterance from a speaker of the opposite gender");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  return candidates[pick(rng)];
}

void WriteLossTrace(const std::string& path, const std::vector<double>& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "iteration,loss\n";
  char buf[64];
  for (std::size_t i = 0; i < trace.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.9g\n", i, trace[i]);
    out << buf;
  }
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace advvc
