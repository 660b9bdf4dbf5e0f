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

#ifndef ADVVC_AUDIO_WAV_H_
#define ADVVC_AUDIO_WAV_H_

#include <string>
#include <vector>

namespace advvc {

// Mono signal with samples nominally in [-1, 1].
struct Waveform {
  std::vector<float> samples;
  int sample_rate = 16000;

  std::size_t size() const { return samples.size(); }
  double duration() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// Reads a RIFF/WAVE file holding 16-bit little-endian PCM mono audio.
// Samples are scaled by 1/32768. Throws FormatError for a malformed header,
// UnsupportedFormatError for other encodings or channel counts and IoError
// when the file cannot be opened.
Waveform LoadWav(const std::string& path);

// Writes 16-bit PCM mono. Samples are clipped to [-1, 1] before
// quantisation.
void SaveWav(const Waveform& wave, const std::string& path);

// Quantised value stored for a sample, exposed for tests.
short QuantizeSample(float sample);

}  // namespace advvc

#endif  // ADVVC_AUDIO_WAV_H_
