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

#include "advvc/model/training.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "advvc/autodiff/adam.h"
#include "advvc/autodiff/ops.h"
#include "advvc/base/errors.h"
#include "advvc/base/random.h"

namespace advvc {
namespace {

std::vector<ad::Tensor> Handles(const NamedTensors& named) {
  std::vector<ad::Tensor> out;
  for (const auto& [name, t] : named) out.push_back(t);
  return out;
}

std::vector<int> ShuffledOrder(const std::vector<int>& items, std::uint64_t seed,
                               int epoch) {
  std::vector<int> order = items;
  std::mt19937_64 rng(MixSeed(seed, static_cast<std::uint64_t>(epoch)));
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

}  // namespace

int ClassifierHead::Predict(const SpeakerEmbedding& embedding) const {
  const Eigen::VectorXd logits = weight * embedding.vector + bias;
  Eigen::Index best = 0;
  logits.maxCoeff(&best);
  return speakers.at(best);
}

TrainedSpeakerEncoder TrainSpeakerEncoder(
    const Corpus& corpus, const std::vector<int>& train,
    const SpeakerTrainingOptions& options) {
  std::map<int, int> per_speaker;
  for (int i : train) ++per_speaker[corpus.utterances.at(i).speaker];
  if (per_speaker.size() < 2) {
    throw TrainingError("speaker encoder training needs at least 2 speakers");
  }
  for (const auto& [spk, count] : per_speaker) {
    if (count < 4) {
      throw TrainingError("speaker " + corpus.speakers.at(spk).speaker_id +
                          " has fewer than 4 training utterances");
    }
  }
  if (options.epochs < 1) throw TrainingError("epochs must be >= 1");

  TrainedSpeakerEncoder result;
  std::map<int, int> label_of;
  for (const auto& [spk, count] : per_speaker) {
    label_of[spk] = static_cast<int>(result.head.speakers.size());
    result.head.speakers.push_back(spk);
  }
  const int classes = static_cast<int>(result.head.speakers.size());

  const StftConfig& stft = corpus.stft;
  SpeakerEncoder encoder(stft.mel_bins, options.hidden, options.dim,
                         ComputeFeatureStats(corpus, train), stft,
                         options.seed);
  std::mt19937_64 rng(MixSeed(options.seed, 17));
  const double limit = std::sqrt(6.0 / (classes + options.dim));
  std::uniform_real_distribution<double> init(-limit, limit);
  ad::Matrix w0(classes, options.dim);
  for (Eigen::Index c = 0; c < w0.cols(); ++c) {
    for (Eigen::Index r = 0; r < w0.rows(); ++r) w0(r, c) = init(rng);
  }
  ad::Tensor head_w = ad::Tensor::Parameter(w0);
  ad::Tensor head_b = ad::Tensor::Parameter(ad::Matrix::Zero(classes, 1));

  std::vector<ad::Tensor> params = Handles(encoder.Parameters());
  params.push_back(head_w);
  params.push_back(head_b);
  ad::Adam adam(params, {.lr = options.lr});

  auto class_loss = [&](const ad::Tensor& mel, int label) {
    ad::Tensor logits =
        ad::BroadcastAdd(ad::MatMul(head_w, encoder.Embed(mel)), head_b);
    return ad::SoftmaxCrossEntropy(logits, label);
  };
  std::uniform_real_distribution<double> radius(0.0,
                                                options.adversarial_radius);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    double total = 0.0;
    for (int idx : ShuffledOrder(train, options.seed, epoch)) {
      const Utterance& u = corpus.utterances[idx];
      const int label = label_of[u.speaker];
      ad::Tensor loss = class_loss(AsTensor(u.mel), label);
      if (options.adversarial_radius > 0.0) {
        ad::Tensor probe = ad::Tensor::Parameter(u.mel.data);
        ad::Backward(class_loss(probe, label));
        adam.ZeroGrad();
        const ad::Matrix shifted =
            u.mel.data + radius(rng) * probe.grad().array().sign().matrix();
        loss = ad::Scale(
            ad::Add(loss, class_loss(ad::Tensor::Constant(shifted), label)),
            0.5);
      }
      ad::Backward(loss);
      adam.Step();
      total += loss.item();
    }
    result.epoch_loss.push_back(total / static_cast<double>(train.size()));
  }

  NamedTensors named = encoder.Parameters();
  RoundParametersToFloat(named);
  result.encoder = encoder.Frozen();
  result.head.weight = head_w.value();
  result.head.bias = head_b.value().col(0);
  return result;
}

double ClassificationAccuracy(const TrainedSpeakerEncoder& trained,
                              const Corpus& corpus,
                              const std::vector<int>& utterances) {
  if (utterances.empty()) throw ContractError("no utterances to classify");
  int correct = 0;
  for (int idx : utterances) {
    const Utterance& u = corpus.utterances.at(idx);
    if (trained.head.Predict(trained.encoder.Encode(u.mel)) == u.speaker) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(utterances.size());
}

TrainedAutoencoder TrainAutoencoder(const Corpus& corpus,
                                    const std::vector<int>& train,
                                    const SpeakerEncoder& speaker_encoder,
                                    const AutoencoderTrainingOptions& options) {
  if (train.empty()) throw TrainingError("no training utterances");
  if (options.epochs < 1) throw TrainingError("epochs must be >= 1");
  if (!(speaker_encoder.stft() == corpus.stft)) {
    throw TrainingError("speaker encoder STFT config differs from the corpus");
  }
  const SpeakerEncoder frozen = speaker_encoder.Frozen();
  VcModel model(options.dims, corpus.stft, ComputeFeatureStats(corpus, train),
                frozen, options.seed);
  const double inv_var = 1.0 / (model.stats().stddev * model.stats().stddev);

  // E_s is frozen, so every utterance's embedding is a constant.
  std::map<int, ad::Tensor> embeddings;
  for (int idx : train) {
    embeddings[idx] = frozen.Embed(AsTensor(corpus.utterances.at(idx).mel));
  }

  NamedTensors trainable = model.TrainableParameters();
  ad::Adam adam(Handles(trainable), {.lr = options.lr});
  TrainedAutoencoder result;
  std::mt19937_64 rng(MixSeed(options.seed, 29));
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    double total = 0.0;
    for (int idx : ShuffledOrder(train, options.seed, epoch)) {
      ad::Tensor x = AsTensor(corpus.utterances[idx].mel);
      ad::Tensor embedding = embeddings[idx];
      if (options.embedding_noise > 0.0) {
        Eigen::VectorXd e = embedding.value().col(0);
        for (Eigen::Index i = 0; i < e.size(); ++i) {
          e(i) += options.embedding_noise * noise(rng);
        }
        embedding = ad::Tensor::Constant(e.normalized());
      }
      ad::Tensor recon = model.Decode(model.ContentCode(x), embedding);
      ad::Tensor loss = ad::Scale(ad::MeanSquaredError(recon, x), inv_var);
      ad::Backward(loss);
      adam.Step();
      total += loss.item();
    }
    result.epoch_loss.push_back(total / static_cast<double>(train.size()));
  }
  RoundParametersToFloat(trainable);
  result.model = model.Frozen();
  return result;
}

double ReconstructionError(const VcModel& model, const Corpus& corpus,
                           const std::vector<int>& utterances) {
  if (utterances.empty()) throw ContractError("no utterances");
  double total = 0.0;
  for (int idx : utterances) {
    const MelSpectrogram& x = corpus.utterances.at(idx).mel;
    total += (model.Convert(x, x).data - x.data).squaredNorm() /
             static_cast<double>(x.data.size());
  }
  return total / static_cast<double>(utterances.size());
}

}  // namespace advvc
