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

#ifndef ADVVC_MODEL_VC_MODEL_H_
#define ADVVC_MODEL_VC_MODEL_H_

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "advvc/audio/corpus.h"
#include "advvc/audio/spectrogram.h"
#include "advvc/autodiff/tensor.h"

namespace advvc {

using NamedTensors = std::vector<std::pair<std::string, ad::Tensor>>;

// Two dense layers applied independently to every column (frame):
// out = W2 tanh(W1 x + b1) + b2, optionally followed by tanh.
class FrameMlp {
 public:
  FrameMlp() = default;
  FrameMlp(int in, int hidden, int out, bool tanh_output, std::mt19937_64& rng);

  ad::Tensor Forward(const ad::Tensor& frames) const;

  int in_dim() const { return static_cast<int>(w1_.cols()); }
  int hidden_dim() const { return static_cast<int>(w1_.rows()); }
  int out_dim() const { return static_cast<int>(w2_.rows()); }
  bool tanh_output() const { return tanh_output_; }

  void AppendParameters(const std::string& prefix, NamedTensors& out) const;
  // Replaces the weights with tensors from `named` (by prefix).
  void AssignParameters(const std::string& prefix, const NamedTensors& named);
  // Copy whose tensors are constants: safe to share between threads.
  FrameMlp Frozen() const;

 private:
  ad::Tensor w1_, b1_, w2_, b2_;
  bool tanh_output_ = false;
};

// Unit-norm speaker vector E_s(x).
struct SpeakerEmbedding {
  Eigen::VectorXd vector;
  int dim() const { return static_cast<int>(vector.size()); }
};

double CosineSimilarity(const SpeakerEmbedding& a, const SpeakerEmbedding& b);

// Frame-wise MLP (M -> H -> D), mean pooling over frames, l2 normalisation.
// Inputs are standardised per mel bin with the statistics' bin vectors.
class SpeakerEncoder {
 public:
  SpeakerEncoder() = default;
  SpeakerEncoder(int mel_bins, int hidden, int dim, const FeatureStats& stats,
                 const StftConfig& stft, std::uint64_t seed);

  // mel: M x T tensor of log-mel values; returns a D x 1 unit vector.
  ad::Tensor Embed(const ad::Tensor& mel) const;
  SpeakerEmbedding Encode(const MelSpectrogram& mel) const;

  int mel_bins() const { return net_.in_dim(); }
  int hidden() const { return net_.hidden_dim(); }
  int dim() const { return net_.out_dim(); }
  std::uint64_t seed() const { return seed_; }
  const FeatureStats& stats() const { return stats_; }
  const StftConfig& stft() const { return stft_; }

  NamedTensors Parameters() const;
  void AssignParameters(const NamedTensors& named);
  SpeakerEncoder Frozen() const;

 private:
  FrameMlp net_;
  FeatureStats stats_;
  StftConfig stft_;
  std::uint64_t seed_ = 0;
  ad::Tensor bin_scale_;  // 1 / stddev per bin
  ad::Tensor bin_shift_;  // -mean / stddev per bin
};

// The independent speaker-verification network has the speaker encoder's
// shape but its own seed and width.
using VerifierModel = SpeakerEncoder;

struct ModelDims {
  int mel_bins = 80;
  int hidden = 128;
  int content_dim = 16;
  int speaker_dim = 64;
  // Subtract the per-utterance mean frame before content encoding.
  bool content_instance_norm = true;

  void Validate() const;
  bool operator==(const ModelDims&) const = default;
};

// Encoder-decoder voice conversion: content encoder E_c, speaker encoder
// E_s and decoder D, all frame-wise. F(t, x) = D(E_c(t), E_s(x)).
class VcModel {
 public:
  VcModel() = default;
  VcModel(const ModelDims& dims, const StftConfig& stft,
          const FeatureStats& stats, SpeakerEncoder speaker,
          std::uint64_t seed);

  // C x T code of a content utterance.
  ad::Tensor ContentCode(const ad::Tensor& t) const;
  // D x 1 speaker embedding.
  ad::Tensor SpeakerEmbed(const ad::Tensor& x) const;
  // M x T spectrogram from a code and an embedding.
  ad::Tensor Decode(const ad::Tensor& code, const ad::Tensor& embedding) const;
  // F(t, x): content of t spoken with the voice of x. Shape M x T_t.
  ad::Tensor Convert(const ad::Tensor& t, const ad::Tensor& x) const;

  MelSpectrogram Convert(const MelSpectrogram& t,
                         const MelSpectrogram& x) const;
  SpeakerEmbedding SpeakerEncode(const MelSpectrogram& x) const;
  Eigen::MatrixXd ContentEncode(const MelSpectrogram& t) const;

  // Throws DimensionError unless `mel` was made with this model's
  // StftConfig and has at least one frame.
  void CheckInput(const MelSpectrogram& mel) const;
  void CheckInput(const ad::Tensor& mel) const;

  const ModelDims& dims() const { return dims_; }
  const StftConfig& stft() const { return stft_; }
  const FeatureStats& stats() const { return stats_; }
  const SpeakerEncoder& speaker_encoder() const { return speaker_; }
  std::uint64_t seed() const { return seed_; }

  // Content encoder and decoder weights (the speaker encoder is separate).
  NamedTensors TrainableParameters() const;
  NamedTensors Parameters() const;
  void AssignParameters(const NamedTensors& named);
  VcModel Frozen() const;

 private:
  ad::Tensor Normalize(const ad::Tensor& mel) const;

  ModelDims dims_;
  StftConfig stft_;
  FeatureStats stats_;
  FrameMlp content_;
  FrameMlp decoder_;
  SpeakerEncoder speaker_;
  std::uint64_t seed_ = 0;
};

// Rounds every parameter to the nearest float so that checkpoints, which
// store 32-bit floats, reproduce the model bit for bit.
void RoundParametersToFloat(const NamedTensors& params);

ad::Tensor AsTensor(const MelSpectrogram& mel);

}  // namespace advvc

#endif  // ADVVC_MODEL_VC_MODEL_H_
