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

#ifndef ADVVC_AUDIO_CORPUS_H_
#define ADVVC_AUDIO_CORPUS_H_

#include <cstdint>
#include <vector>

#include "advvc/audio/spectrogram.h"
#include "advvc/audio/synth.h"
#include "advvc/audio/wav.h"

namespace advvc {

struct Utterance {
  int speaker = 0;  // index into Corpus::speakers
  int index = 0;    // position within the speaker's utterances
  std::uint64_t seed = 0;
  double duration = 0.0;
  bool held_out = false;
  Waveform wave;
  MelSpectrogram mel;
};

struct CorpusOptions {
  int speakers = 20;
  int utterances_per_speaker = 24;
  int held_out_per_speaker = 8;  // the last ones of each speaker
  double min_duration = 1.0;
  double max_duration = 2.0;
  std::uint64_t seed = 7;
  StftConfig stft;
};

struct Corpus {
  std::vector<SyntheticSpeaker> speakers;
  std::vector<Utterance> utterances;
  StftConfig stft;

  std::vector<int> Indices(bool held_out) const;
  std::vector<int> IndicesOfSpeaker(int speaker, bool held_out) const;
  int num_speakers() const { return static_cast<int>(speakers.size()); }
};

// Synthesises every utterance and its log-mel spectrogram.
Corpus GenerateCorpus(const CorpusOptions& options);

// Marks the last `held_out_per_speaker` utterances of each speaker.
void AssignHeldOut(Corpus& corpus, int held_out_per_speaker);

// Log-mel statistics over a set of spectrograms.
struct FeatureStats {
  double mean = 0.0;
  double stddev = 1.0;
  double p1 = 0.0;
  double p99 = 0.0;
  double max = 0.0;
  // Per mel bin; empty means every bin uses mean and stddev.
  Eigen::VectorXd bin_mean;
  Eigen::VectorXd bin_stddev;

  double dynamic_range() const { return p99 - p1; }
  bool operator==(const FeatureStats& other) const;
};

FeatureStats ComputeFeatureStats(const Corpus& corpus,
                                 const std::vector<int>& indices);

}  // namespace advvc

#endif  // ADVVC_AUDIO_CORPUS_H_
