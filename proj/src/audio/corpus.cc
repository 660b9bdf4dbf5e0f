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

#include "advvc/audio/corpus.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "advvc/base/errors.h"
#include "advvc/base/random.h"

namespace advvc {
namespace {

constexpr double kMinBinVariance = 1e-6;

}  // namespace

std::vector<int> Corpus::Indices(bool held_out) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(utterances.size()); ++i) {
    if (utterances[i].held_out == held_out) out.push_back(i);
  }
  return out;
}

std::vector<int> Corpus::IndicesOfSpeaker(int speaker, bool held_out) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(utterances.size()); ++i) {
    const Utterance& u = utterances[i];
    if (u.speaker == speaker && u.held_out == held_out) out.push_back(i);
  }
  return out;
}

void AssignHeldOut(Corpus& corpus, int held_out_per_speaker) {
  std::vector<int> counts(corpus.speakers.size(), 0);
  for (const Utterance& u : corpus.utterances) ++counts[u.speaker];
  for (Utterance& u : corpus.utterances) {
    u.held_out = u.index >= counts[u.speaker] - held_out_per_speaker;
  }
}

Corpus GenerateCorpus(const CorpusOptions& options) {
  options.stft.Validate();
  if (options.utterances_per_speaker < 1) {
    throw ConfigError("need at least one utterance per speaker");
  }
  if (options.held_out_per_speaker < 0 ||
      options.held_out_per_speaker >= options.utterances_per_speaker) {
    throw ConfigError("held-out count must leave training utterances");
  }
  Corpus corpus;
  corpus.stft = options.stft;
  corpus.speakers = MakeSpeakerBank(options.speakers, options.seed);
  std::mt19937_64 rng(MixSeed(options.seed, 1));
  std::uniform_real_distribution<double> dur(options.min_duration,
                                             options.max_duration);
  for (int s = 0; s < options.speakers; ++s) {
    for (int i = 0; i < options.utterances_per_speaker; ++i) {
      Utterance u;
      u.speaker = s;
      u.index = i;
      u.seed = MixSeed(options.seed, 1000 + static_cast<std::uint64_t>(s) * 1000 + i);
      // Rounded to whole hops so frame counts are exact.
      u.duration = std::round(dur(rng) * options.stft.sample_rate /
                              options.stft.hop) *
                   options.stft.hop / options.stft.sample_rate;
      u.wave = SynthUtterance(corpus.speakers[s], u.duration, u.seed,
                              options.stft.sample_rate);
      u.mel = ComputeMelSpectrogram(u.wave, options.stft);
      corpus.utterances.push_back(std::move(u));
    }
  }
  AssignHeldOut(corpus, options.held_out_per_speaker);
  return corpus;
}

bool FeatureStats::operator==(const FeatureStats& other) const {
  auto same = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return a.size() == b.size() && a == b;
  };
  return mean == other.mean && stddev == other.stddev && p1 == other.p1 &&
         p99 == other.p99 && max == other.max &&
         same(bin_mean, other.bin_mean) && same(bin_stddev, other.bin_stddev);
}

FeatureStats ComputeFeatureStats(const Corpus& corpus,
                                 const std::vector<int>& indices) {
  std::vector<double> values;
  for (int i : indices) {
    const auto& d = corpus.utterances.at(i).mel.data;
    values.insert(values.end(), d.data(), d.data() + d.size());
  }
  if (values.empty()) throw InputError("no spectrogram values for statistics");
  FeatureStats st;
  double sum = 0.0, sq = 0.0;
  for (double v : values) {
    sum += v;
    sq += v * v;
  }
  const double n = static_cast<double>(values.size());
  st.mean = sum / n;
  st.stddev = std::sqrt(std::max(sq / n - st.mean * st.mean, 1e-12));
  std::sort(values.begin(), values.end());
  auto pct = [&](double q) {
    const auto k = static_cast<std::size_t>(std::floor(q * (values.size() - 1)));
    return values[k];
  };
  const Eigen::Index bins = corpus.utterances.at(indices.front()).mel.data.rows();
  Eigen::VectorXd bin_sum = Eigen::VectorXd::Zero(bins);
  Eigen::VectorXd bin_sq = Eigen::VectorXd::Zero(bins);
  double frames = 0.0;
  for (int i : indices) {
    const auto& d = corpus.utterances[i].mel.data;
    if (d.rows() != bins) throw DimensionError("mel bin counts differ");
    bin_sum += d.rowwise().sum();
    bin_sq += d.array().square().matrix().rowwise().sum();
    frames += static_cast<double>(d.cols());
  }
  st.bin_mean = bin_sum / frames;
  st.bin_stddev = (bin_sq / frames - st.bin_mean.cwiseAbs2())
                      .cwiseMax(kMinBinVariance)
                      .cwiseSqrt();
  st.p1 = pct(0.01);
  st.p99 = pct(0.99);
  st.max = values.back();
  return st;
}

}  // namespace advvc
