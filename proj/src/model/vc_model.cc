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

#include "advvc/model/vc_model.h"

#include <algorithm>
#include <cmath>

#include "advvc/autodiff/ops.h"
#include "advvc/base/errors.h"

namespace advvc {
namespace {

ad::Matrix XavierUniform(int rows, int cols, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / (rows + cols));
  std::uniform_real_distribution<double> dist(-limit, limit);
  ad::Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = dist(rng);
  }
  return m;
}

ad::Tensor ConstantCopy(const ad::Tensor& t) { return ad::Tensor::Constant(t.value()); }

const ad::Tensor& Lookup(const NamedTensors& named, const std::string& name,
                         Eigen::Index rows, Eigen::Index cols) {
  for (const auto& [n, t] : named) {
    if (n != name) continue;
    if (t.rows() != rows || t.cols() != cols) {
      throw DimensionError("parameter " + name + " has shape (" +
                           std::to_string(t.rows()) + "x" +
                           std::to_string(t.cols()) + "), expected (" +
                           std::to_string(rows) + "x" + std::to_string(cols) +
                           ")");
    }
    return t;
  }
  throw DimensionError("missing parameter " + name);
}

ad::Tensor NormalizeInput(const ad::Tensor& mel, const FeatureStats& stats) {
  return ad::Affine(mel, 1.0 / stats.stddev, -stats.mean / stats.stddev);
}

}  // namespace

FrameMlp::FrameMlp(int in, int hidden, int out, bool tanh_output,
                   std::mt19937_64& rng)
    : w1_(ad::Tensor::Parameter(XavierUniform(hidden, in, rng))),
      b1_(ad::Tensor::Parameter(ad::Matrix::Zero(hidden, 1))),
      w2_(ad::Tensor::Parameter(XavierUniform(out, hidden, rng))),
      b2_(ad::Tensor::Parameter(ad::Matrix::Zero(out, 1))),
      tanh_output_(tanh_output) {}

ad::Tensor FrameMlp::Forward(const ad::Tensor& frames) const {
  if (frames.rows() != w1_.cols()) {
    throw DimensionError("frame mlp expects " + std::to_string(w1_.cols()) +
                         " rows, got " + std::to_string(frames.rows()));
  }
  ad::Tensor h = ad::Tanh(ad::BroadcastAdd(ad::MatMul(w1_, frames), b1_));
  ad::Tensor out = ad::BroadcastAdd(ad::MatMul(w2_, h), b2_);
  return tanh_output_ ? ad::Tanh(out) : out;
}

void FrameMlp::AppendParameters(const std::string& prefix,
                                NamedTensors& out) const {
  out.emplace_back(prefix + ".w1", w1_);
  out.emplace_back(prefix + ".b1", b1_);
  out.emplace_back(prefix + ".w2", w2_);
  out.emplace_back(prefix + ".b2", b2_);
}

void FrameMlp::AssignParameters(const std::string& prefix,
                                const NamedTensors& named) {
  w1_ = Lookup(named, prefix + ".w1", w1_.rows(), w1_.cols());
  b1_ = Lookup(named, prefix + ".b1", b1_.rows(), 1);
  w2_ = Lookup(named, prefix + ".w2", w2_.rows(), w2_.cols());
  b2_ = Lookup(named, prefix + ".b2", b2_.rows(), 1);
}

FrameMlp FrameMlp::Frozen() const {
  FrameMlp copy;
  copy.w1_ = ConstantCopy(w1_);
  copy.b1_ = ConstantCopy(b1_);
  copy.w2_ = ConstantCopy(w2_);
  copy.b2_ = ConstantCopy(b2_);
  copy.tanh_output_ = tanh_output_;
  return copy;
}

double CosineSimilarity(const SpeakerEmbedding& a, const SpeakerEmbedding& b) {
  if (a.dim() != b.dim()) throw DimensionError("embedding sizes differ");
  const double na = a.vector.norm(), nb = b.vector.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(a.vector.dot(b.vector) / (na * nb), -1.0, 1.0);
}

SpeakerEncoder::SpeakerEncoder(int mel_bins, int hidden, int dim,
                               const FeatureStats& stats,
                               const StftConfig& stft, std::uint64_t seed)
    : stats_(stats), stft_(stft), seed_(seed) {
  std::mt19937_64 rng(seed);
  net_ = FrameMlp(mel_bins, hidden, dim, /*tanh_output=*/false, rng);
  Eigen::VectorXd mean = Eigen::VectorXd::Constant(mel_bins, stats.mean);
  Eigen::VectorXd stddev = Eigen::VectorXd::Constant(mel_bins, stats.stddev);
  if (stats.bin_mean.size() > 0 || stats.bin_stddev.size() > 0) {
    if (stats.bin_mean.size() != mel_bins ||
        stats.bin_stddev.size() != mel_bins) {
      throw DimensionError("feature statistics have the wrong bin count");
    }
    mean = stats.bin_mean;
    stddev = stats.bin_stddev;
  }
  const Eigen::VectorXd scale = stddev.cwiseInverse();
  bin_scale_ = ad::Tensor::Constant(scale);
  bin_shift_ = ad::Tensor::Constant(-mean.cwiseProduct(scale));
}

ad::Tensor SpeakerEncoder::Embed(const ad::Tensor& mel) const {
  if (mel.cols() < 1) throw InputError("speaker encoder needs at least one frame");
  if (mel.rows() != mel_bins()) {
    throw DimensionError("speaker encoder expects " +
                         std::to_string(mel_bins()) + " mel bins, got " +
                         std::to_string(mel.rows()));
  }
  ad::Tensor standardised = ad::BroadcastAdd(
      ad::Mul(mel, ad::RepeatCols(bin_scale_, mel.cols())), bin_shift_);
  return ad::Normalize(ad::MeanOverCols(net_.Forward(standardised)));
}

SpeakerEmbedding SpeakerEncoder::Encode(const MelSpectrogram& mel) const {
  if (!(mel.config == stft_)) {
    throw DimensionError("spectrogram STFT config differs from the encoder's");
  }
  return {Embed(AsTensor(mel)).value().col(0)};
}

NamedTensors SpeakerEncoder::Parameters() const {
  NamedTensors out;
  net_.AppendParameters("speaker", out);
  return out;
}

void SpeakerEncoder::AssignParameters(const NamedTensors& named) {
  net_.AssignParameters("speaker", named);
}

SpeakerEncoder SpeakerEncoder::Frozen() const {
  SpeakerEncoder copy = *this;
  copy.net_ = net_.Frozen();
  return copy;
}

void ModelDims::Validate() const {
  if (mel_bins < 1 || hidden < 1 || content_dim < 1 || speaker_dim < 1) {
    throw ConfigError("model dimensions must be positive");
  }
  if (content_dim >= mel_bins) {
    throw ConfigError("content bottleneck must be narrower than mel_bins");
  }
}

VcModel::VcModel(const ModelDims& dims, const StftConfig& stft,
                 const FeatureStats& stats, SpeakerEncoder speaker,
                 std::uint64_t seed)
    : dims_(dims), stft_(stft), stats_(stats), speaker_(std::move(speaker)),
      seed_(seed) {
  dims_.Validate();
  if (dims_.mel_bins != stft.mel_bins) {
    throw DimensionError("model mel_bins differs from the STFT config");
  }
  if (speaker_.mel_bins() != dims_.mel_bins ||
      speaker_.dim() != dims_.speaker_dim) {
    throw DimensionError("speaker encoder does not match model dims");
  }
  if (!(speaker_.stft() == stft)) {
    throw DimensionError("speaker encoder was trained with another STFT config");
  }
  std::mt19937_64 rng(seed);
  content_ = FrameMlp(dims_.mel_bins, dims_.hidden, dims_.content_dim,
                      /*tanh_output=*/true, rng);
  decoder_ = FrameMlp(dims_.content_dim + dims_.speaker_dim, dims_.hidden,
                      dims_.mel_bins, /*tanh_output=*/false, rng);
}

ad::Tensor VcModel::Normalize(const ad::Tensor& mel) const {
  return NormalizeInput(mel, stats_);
}

ad::Tensor VcModel::ContentCode(const ad::Tensor& t) const {
  CheckInput(t);
  ad::Tensor x = Normalize(t);
  if (dims_.content_instance_norm) {
    x = ad::BroadcastAdd(x, ad::Scale(ad::MeanOverCols(x), -1.0));
  }
  return content_.Forward(x);
}

ad::Tensor VcModel::SpeakerEmbed(const ad::Tensor& x) const {
  CheckInput(x);
  return speaker_.Embed(x);
}

ad::Tensor VcModel::Decode(const ad::Tensor& code,
                           const ad::Tensor& embedding) const {
  if (code.rows() != dims_.content_dim || embedding.rows() != dims_.speaker_dim ||
      embedding.cols() != 1) {
    throw DimensionError("decoder input does not match model dims");
  }
  ad::Tensor input =
      ad::ConcatRows(code, ad::RepeatCols(embedding, code.cols()));
  return ad::Affine(decoder_.Forward(input), stats_.stddev, stats_.mean);
}

ad::Tensor VcModel::Convert(const ad::Tensor& t, const ad::Tensor& x) const {
  return Decode(ContentCode(t), SpeakerEmbed(x));
}

MelSpectrogram VcModel::Convert(const MelSpectrogram& t,
                                const MelSpectrogram& x) const {
  CheckInput(t);
  CheckInput(x);
  return {Convert(AsTensor(t), AsTensor(x)).value(), stft_};
}

SpeakerEmbedding VcModel::SpeakerEncode(const MelSpectrogram& x) const {
  CheckInput(x);
  return {SpeakerEmbed(AsTensor(x)).value().col(0)};
}

Eigen::MatrixXd VcModel::ContentEncode(const MelSpectrogram& t) const {
  CheckInput(t);
  return ContentCode(AsTensor(t)).value();
}

void VcModel::CheckInput(const MelSpectrogram& mel) const {
  if (!(mel.config == stft_)) {
    throw DimensionError("spectrogram STFT config differs from the model's");
  }
  CheckInput(AsTensor(mel));
}

void VcModel::CheckInput(const ad::Tensor& mel) const {
  if (mel.rows() != dims_.mel_bins) {
    throw DimensionError("model expects " + std::to_string(dims_.mel_bins) +
                         " mel bins, got " + std::to_string(mel.rows()));
  }
  if (mel.cols() < 1) throw InputError("spectrogram has no frames");
}

NamedTensors VcModel::TrainableParameters() const {
  NamedTensors out;
  content_.AppendParameters("content", out);
  decoder_.AppendParameters("decoder", out);
  return out;
}

NamedTensors VcModel::Parameters() const {
  NamedTensors out = TrainableParameters();
  for (auto& p : speaker_.Parameters()) out.push_back(p);
  return out;
}

void VcModel::AssignParameters(const NamedTensors& named) {
  content_.AssignParameters("content", named);
  decoder_.AssignParameters("decoder", named);
  speaker_.AssignParameters(named);
}

VcModel VcModel::Frozen() const {
  VcModel copy = *this;
  copy.content_ = content_.Frozen();
  copy.decoder_ = decoder_.Frozen();
  copy.speaker_ = speaker_.Frozen();
  return copy;
}

void RoundParametersToFloat(const NamedTensors& params) {
  for (const auto& [name, t] : params) {
    ad::Tensor handle = t;
    ad::Matrix& v = handle.mutable_value();
    v = v.cast<float>().cast<double>();
  }
}

ad::Tensor AsTensor(const MelSpectrogram& mel) {
  return ad::Tensor::Constant(mel.data);
}

}  // namespace advvc
