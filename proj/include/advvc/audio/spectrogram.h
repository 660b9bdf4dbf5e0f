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

#ifndef ADVVC_AUDIO_SPECTROGRAM_H_
#define ADVVC_AUDIO_SPECTROGRAM_H_

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "advvc/audio/wav.h"

namespace advvc {

struct StftConfig {
  int sample_rate = 16000;
  int n_fft = 1024;
  int hop = 256;
  int mel_bins = 80;
  double f_min = 0.0;
  double f_max = 8000.0;
  double log_floor = 1e-10;

  int num_bins() const { return n_fft / 2 + 1; }
  double log_min() const;
  // Throws ConfigError when an invariant does not hold.
  void Validate() const;
  // Frames produced for a signal of `num_samples` samples (centered framing).
  int NumFrames(std::size_t num_samples) const;

  bool operator==(const StftConfig&) const = default;
};

// M x T log-mel magnitudes. Frames are columns.
struct MelSpectrogram {
  Eigen::MatrixXd data;
  StftConfig config;

  int mel_bins() const { return static_cast<int>(data.rows()); }
  int frames() const { return static_cast<int>(data.cols()); }
};

using ComplexMatrix = Eigen::MatrixXcd;

// Triangular, area-normalised filters on the HTK mel scale; mel_bins rows,
// num_bins columns.
Eigen::MatrixXd MelFilterbank(const StftConfig& cfg);
// Center frequency (Hz) of each filter's peak.
std::vector<double> MelCenterFrequencies(const StftConfig& cfg);
double HzToMel(double hz);
double MelToHz(double mel);

// Periodic Hann analysis window.
std::vector<double> HannWindow(int n);

// Short-time Fourier transform with n_fft/2 zeros padded on both sides, so
// frame t is centered on sample t * hop. Result is num_bins x frames.
ComplexMatrix Stft(std::span<const double> signal, const StftConfig& cfg);
// Least-squares inverse of Stft (windowed overlap-add divided by the summed
// squared window), cropped to `length` samples.
std::vector<double> Istft(const ComplexMatrix& spec, const StftConfig& cfg,
                          std::size_t length);

// log(max(log_floor, mel_filterbank * |STFT(w)|)). Throws InputError when
// the waveform has fewer than n_fft samples or the wrong sample rate.
MelSpectrogram ComputeMelSpectrogram(const Waveform& wave,
                                     const StftConfig& cfg);

}  // namespace advvc

#endif  // ADVVC_AUDIO_SPECTROGRAM_H_
