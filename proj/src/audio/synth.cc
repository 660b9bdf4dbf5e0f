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

#include "advvc/audio/synth.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "advvc/base/errors.h"
#include "advvc/base/random.h"

namespace advvc {
namespace {

constexpr std::array<double, 3> kNeutralFormants = {500.0, 1500.0, 2500.0};

// Formant ratios against the neutral vowel for /a/ /i/ /u/ /e/ /o/.
constexpr std::array<std::array<double, 3>, kNumVowels> kVowelRatios = {{
    {1.46, 0.727, 0.976},
    {0.54, 1.527, 1.204},
    {0.60, 0.580, 0.896},
    {1.06, 1.227, 0.992},
    {1.14, 0.560, 0.964},
}};

struct Segment {
  int vowel = 0;
  double end = 0.0;  // seconds
  std::array<double, 3> perturb{};
  double gain = 1.0;
};

std::vector<Segment> PlanSegments(double duration, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> count_dist(2, 5);
  std::uniform_real_distribution<double> weight(0.6, 1.4);
  std::uniform_int_distribution<int> vowel_dist(0, kNumVowels - 1);
  std::uniform_real_distribution<double> perturb(-0.04, 0.04);
  std::uniform_real_distribution<double> gain(0.75, 1.0);

  std::vector<Segment> segments(count_dist(rng));
  std::vector<double> weights(segments.size());
  for (double& w : weights) w = weight(rng);
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double acc = 0.0;
  int previous = -1;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    acc += weights[i];
    Segment& s = segments[i];
    s.end = duration * acc / total;
    do {
      s.vowel = vowel_dist(rng);
    } while (s.vowel == previous);
    previous = s.vowel;
    for (double& p : s.perturb) p = 1.0 + perturb(rng);
    s.gain = gain(rng);
  }
  segments.back().end = duration;
  return segments;
}

// One-pole smoother coefficient for a time constant in seconds.
double SmoothingAlpha(double tau, int sample_rate) {
  return 1.0 - std::exp(-1.0 / (tau * sample_rate));
}

// Klatt-style two-pole resonator with unit gain at DC.
struct Resonator {
  double y1 = 0.0, y2 = 0.0;
  double Step(double x, double freq, double bw, double dt) {
    const double c = -std::exp(-2.0 * std::numbers::pi * bw * dt);
    const double b = 2.0 * std::exp(-std::numbers::pi * bw * dt) *
                     std::cos(2.0 * std::numbers::pi * freq * dt);
    const double a = 1.0 - b - c;
    const double y = a * x + b * y1 + c * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

}  // namespace

const char* GenderName(GenderTag tag) {
  return tag == GenderTag::kLow ? "low" : "high";
}

void SyntheticSpeaker::Validate() const {
  if (!(f0_base >= 80.0 && f0_base <= 300.0)) {
    throw ConfigError("speaker " + speaker_id + ": f0_base outside [80, 300]");
  }
  for (int i = 0; i < 3; ++i) {
    if (!(formants[i].center_hz > 0.0 && formants[i].bandwidth_hz > 0.0)) {
      throw ConfigError("speaker " + speaker_id + ": non-positive formant");
    }
    if (i > 0 && !(formants[i].center_hz > formants[i - 1].center_hz)) {
      throw ConfigError("speaker " + speaker_id +
                        ": formant centers not increasing");
    }
  }
}

std::vector<int> VowelSequence(double duration, std::uint64_t seed) {
  std::vector<int> vowels;
  for (const Segment& s : PlanSegments(duration, seed)) vowels.push_back(s.vowel);
  return vowels;
}

Waveform SynthUtterance(const SyntheticSpeaker& speaker, double duration,
                        std::uint64_t seed, int sample_rate) {
  speaker.Validate();
  if (!(duration >= 0.5 && duration <= 10.0)) {
    throw InputError("utterance duration must lie in [0.5, 10] s");
  }
  const std::vector<Segment> segments = PlanSegments(duration, seed);
  std::mt19937_64 voice_rng(MixSeed(seed, HashString(speaker.speaker_id)));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double vib_rate = 4.0 + 2.0 * unit(voice_rng);
  const double vib_depth = 0.005 + 0.01 * unit(voice_rng);
  const double vib_phase = 2.0 * std::numbers::pi * unit(voice_rng);
  const double declination = 0.06 * (unit(voice_rng) - 0.3);

  const auto n = static_cast<std::size_t>(std::lround(duration * sample_rate));
  const double dt = 1.0 / sample_rate;
  const double nyquist = 0.5 * sample_rate;
  const double formant_alpha = SmoothingAlpha(0.015, sample_rate);
  const double jitter_alpha = SmoothingAlpha(0.03, sample_rate);
  const int jitter_period = sample_rate / 100;

  std::array<double, 3> bandwidth;
  for (int i = 0; i < 3; ++i) bandwidth[i] = speaker.formants[i].bandwidth_hz;
  auto target_formants = [&](const Segment& s) {
    std::array<double, 3> f;
    for (int i = 0; i < 3; ++i) {
      f[i] = speaker.formants[i].center_hz * kVowelRatios[s.vowel][i] *
             s.perturb[i];
    }
    f[1] = std::max(f[1], f[0] + 100.0);
    f[2] = std::max(f[2], f[1] + 100.0);
    for (double& x : f) x = std::min(x, 0.9 * nyquist);
    return f;
  };

  std::vector<double> amp(1, 0.0);
  auto harmonic_amp = [&](int k) {
    while (static_cast<int>(amp.size()) <= k) {
      amp.push_back(std::pow(static_cast<double>(amp.size()),
                             -speaker.spectral_tilt));
    }
    return amp[k];
  };

  std::vector<double> out(n);
  std::array<Resonator, 3> resonators;
  std::array<double, 3> formants = target_formants(segments.front());
  double gain = segments.front().gain;
  double jitter = 0.0, jitter_target = 0.0;
  double phase = 0.0;
  std::size_t seg = 0;
  const double fade = 0.015;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    while (seg + 1 < segments.size() && t >= segments[seg].end) ++seg;
    const std::array<double, 3> target = target_formants(segments[seg]);
    for (int k = 0; k < 3; ++k) formants[k] += formant_alpha * (target[k] - formants[k]);
    gain += formant_alpha * (segments[seg].gain - gain);

    if (i % jitter_period == 0) jitter_target = 0.01 * gauss(voice_rng);
    jitter += jitter_alpha * (jitter_target - jitter);
    const double f0 = speaker.f0_base *
                      (1.0 + declination * (0.5 - t / duration)) *
                      (1.0 + vib_depth * std::sin(2.0 * std::numbers::pi * vib_rate * t + vib_phase)) *
                      (1.0 + jitter);
    phase += 2.0 * std::numbers::pi * f0 * dt;
    if (phase > 2.0 * std::numbers::pi) phase -= 2.0 * std::numbers::pi;

    // sin(k * phase) by the Chebyshev recurrence.
    const int harmonics = static_cast<int>(0.9 * nyquist / f0);
    const double c = std::cos(phase);
    double s_prev = 0.0, s_cur = std::sin(phase), source = 0.0;
    for (int k = 1; k <= harmonics; ++k) {
      source += harmonic_amp(k) * s_cur;
      const double s_next = 2.0 * c * s_cur - s_prev;
      s_prev = s_cur;
      s_cur = s_next;
    }
    source += speaker.breathiness * gauss(voice_rng);

    double y = source;
    for (int k = 0; k < 3; ++k) y = resonators[k].Step(y, formants[k], bandwidth[k], dt);

    const double env = std::min({1.0, t / fade, (duration - t) / fade});
    out[i] = y * gain * std::max(env, 0.0);
  }

  double peak = 0.0;
  for (double v : out) peak = std::max(peak, std::abs(v));
  Waveform wave;
  wave.sample_rate = sample_rate;
  wave.samples.resize(n);
  const double scale = peak > 0.0 ? 0.9 / peak : 0.0;
  for (std::size_t i = 0; i < n; ++i) wave.samples[i] = static_cast<float>(out[i] * scale);
  return wave;
}

std::vector<SyntheticSpeaker> MakeSpeakerBank(int num_speakers,
                                              std::uint64_t seed) {
  if (num_speakers < 1) throw ConfigError("need at least one speaker");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int per_class[2] = {(num_speakers + 1) / 2, num_speakers / 2};

  // Stratified pitch within each class keeps neighbouring speakers apart.
  std::array<std::vector<double>, 2> f0_slots;
  const double lo[2] = {90.0, 180.0}, span[2] = {60.0, 100.0};
  for (int c = 0; c < 2; ++c) {
    for (int j = 0; j < per_class[c]; ++j) {
      f0_slots[c].push_back(lo[c] + span[c] * (j + 0.2 + 0.6 * unit(rng)) /
                                        per_class[c]);
    }
    std::shuffle(f0_slots[c].begin(), f0_slots[c].end(), rng);
  }

  std::vector<SyntheticSpeaker> bank;
  std::array<int, 2> used = {0, 0};
  for (int i = 0; i < num_speakers; ++i) {
    const int cls = i % 2;
    SyntheticSpeaker s;
    char id[16];
    std::snprintf(id, sizeof(id), "spk%02d", i);
    s.speaker_id = id;
    s.f0_base = f0_slots[cls][used[cls]++];
    const double scale = cls == 0 ? 0.88 + 0.12 * unit(rng) : 1.05 + 0.15 * unit(rng);
    const double bw_lo[3] = {50.0, 70.0, 100.0}, bw_span[3] = {40.0, 50.0, 80.0};
    for (int k = 0; k < 3; ++k) {
      s.formants[k].center_hz = kNeutralFormants[k] * scale * (0.95 + 0.1 * unit(rng));
      s.formants[k].bandwidth_hz = bw_lo[k] + bw_span[k] * unit(rng);
    }
    s.spectral_tilt = 0.7 + 0.8 * unit(rng);
    s.breathiness = 0.005 + 0.045 * unit(rng);
    s.Validate();
    bank.push_back(s);
  }
  return bank;
}

}  // namespace advvc
