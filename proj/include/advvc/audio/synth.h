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

#ifndef ADVVC_AUDIO_SYNTH_H_
#define ADVVC_AUDIO_SYNTH_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "advvc/audio/wav.h"

namespace advvc {

// Binary voice class used for opposite-gender target selection.
enum class GenderTag { kLow, kHigh };

inline constexpr double kGenderSplitHz = 165.0;

inline GenderTag GenderFromF0(double f0_hz) {
  return f0_hz < kGenderSplitHz ? GenderTag::kLow : GenderTag::kHigh;
}

const char* GenderName(GenderTag tag);

struct Formant {
  double center_hz = 0.0;
  double bandwidth_hz = 0.0;
};

// Parametric voice: glottal pulse train at f0_base shaped by three formant
// resonators. Formants are the speaker's neutral-vowel resonances; each
// vowel rescales them.
struct SyntheticSpeaker {
  std::string speaker_id;
  double f0_base = 120.0;
  std::array<Formant, 3> formants{};
  double spectral_tilt = 1.0;  // source harmonic k has amplitude k^-tilt
  double breathiness = 0.02;   // aspiration noise level

  GenderTag gender_tag() const { return GenderFromF0(f0_base); }
  // Throws ConfigError if f0 is outside [80, 300] Hz or formant centers are
  // not strictly increasing.
  void Validate() const;
};

inline constexpr int kNumVowels = 5;

// Deterministic rendering of `duration` seconds (0.5 to 10) at 16 kHz. The
// segmentation into 2-5 vowels and their per-segment formant perturbations
// depend on `seed` only, so two speakers rendered with the same seed say the
// same thing. Pitch jitter and vibrato also depend on the speaker. The peak
// amplitude is normalised to 0.9.
Waveform SynthUtterance(const SyntheticSpeaker& speaker, double duration,
                        std::uint64_t seed, int sample_rate = 16000);

// Vowel indices chosen for (duration, seed), in order.
std::vector<int> VowelSequence(double duration, std::uint64_t seed);

// Speakers alternating low/high voice class, drawn from `seed`.
std::vector<SyntheticSpeaker> MakeSpeakerBank(int num_speakers,
                                              std::uint64_t seed);

}  // namespace advvc

#endif  // ADVVC_AUDIO_SYNTH_H_
