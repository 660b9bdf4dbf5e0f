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

#ifndef ADVVC_AUDIO_GRIFFIN_LIM_H_
#define ADVVC_AUDIO_GRIFFIN_LIM_H_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "advvc/audio/spectrogram.h"
#include "advvc/audio/wav.h"

namespace advvc {

inline constexpr int kDefaultGriffinLimIterations = 60;

enum class MelInversion {
  // A few non-negative least squares steps (multiplicative updates) started
  // from the clamped pseudo-inverse. Longer runs fit the mel frames tighter
  // but smear narrow peaks, which Griffin-Lim then cannot match.
  kNonNegativeLeastSquares,
  // Pseudo-inverse of the filterbank with negatives clamped to zero.
  kPseudoInverse,
};

inline constexpr int kNnlsIterations = 5;
inline constexpr double kGriffinLimMomentum = 0.99;

// Linear magnitude spectrogram (num_bins x frames) whose mel projection
// approximates exp(mel.data).
Eigen::MatrixXd MelToLinearMagnitude(
    const MelSpectrogram& mel,
    MelInversion method = MelInversion::kNonNegativeLeastSquares);

// ||A - B|| / ||B|| over the full (two-sided) spectrum: interior bins of a
// one-sided spectrogram count twice.
double SpectralConvergence(const Eigen::MatrixXd& estimate,
                           const Eigen::MatrixXd& target);

struct PhaseReconstruction {
  std::vector<double> samples;
  // Spectral convergence of the STFT of each iterate against the target.
  std::vector<double> convergence;
};

// Griffin-Lim on a one-sided linear magnitude spectrogram, accelerated with
// momentum. A step that would raise the spectral convergence is replaced by
// a plain projection step and the momentum is reset, so the recorded
// convergence does not go up. The initial phase is uniform random from
// `seed`; the output has (frames - 1) * hop samples. Throws ContractError if
// iterations < 1.
PhaseReconstruction ReconstructPhase(const Eigen::MatrixXd& magnitude,
                                     const StftConfig& cfg, int iterations,
                                     std::uint64_t seed);

// Mel inversion followed by Griffin-Lim. The result is scaled down, if
// needed, so every sample lies in [-1, 1].
Waveform GriffinLim(
    const MelSpectrogram& mel, int iterations = kDefaultGriffinLimIterations,
    std::uint64_t seed = 0,
    MelInversion method = MelInversion::kNonNegativeLeastSquares);

}  // namespace advvc

#endif  // ADVVC_AUDIO_GRIFFIN_LIM_H_
