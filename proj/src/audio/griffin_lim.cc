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

#include "advvc/audio/griffin_lim.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>

#include "advvc/base/errors.h"

namespace advvc {
namespace {

double WeightedSquaredNorm(const Eigen::MatrixXd& m) {
  double total = 0.0;
  const Eigen::Index last = m.rows() - 1;
  for (Eigen::Index k = 0; k <= last; ++k) {
    const double w = (k == 0 || k == last) ? 1.0 : 2.0;
    total += w * m.row(k).squaredNorm();
  }
  return total;
}

// Keeps the phase of `c` and imposes `magnitude`; zero bins take phase 0.
ComplexMatrix ProjectMagnitude(const ComplexMatrix& c,
                               const Eigen::MatrixXd& magnitude) {
  ComplexMatrix out(c.rows(), c.cols());
  for (Eigen::Index t = 0; t < c.cols(); ++t) {
    for (Eigen::Index k = 0; k < c.rows(); ++k) {
      const double a = std::abs(c(k, t));
      out(k, t) = a > 0.0 ? magnitude(k, t) * (c(k, t) / a)
                          : std::complex<double>(magnitude(k, t), 0.0);
    }
  }
  return out;
}

}  // namespace

Eigen::MatrixXd MelToLinearMagnitude(const MelSpectrogram& mel,
                                     MelInversion method) {
  const StftConfig& cfg = mel.config;
  if (mel.data.rows() != cfg.mel_bins) {
    throw DimensionError("mel spectrogram rows do not match its config");
  }
  const Eigen::MatrixXd fb = MelFilterbank(cfg);
  const Eigen::MatrixXd mel_mag = mel.data.array().exp().matrix();

  // fb has full row rank, so pinv(fb) = fb^T (fb fb^T)^-1.
  const Eigen::MatrixXd gram = fb * fb.transpose();
  Eigen::MatrixXd linear =
      (fb.transpose() * gram.ldlt().solve(mel_mag)).cwiseMax(0.0);
  if (method == MelInversion::kPseudoInverse) return linear;

  // Lee-Seung updates never increase ||fb * S - mel||^2 and keep S >= 0.
  const Eigen::MatrixXd numer = fb.transpose() * mel_mag;
  for (int it = 0; it < kNnlsIterations; ++it) {
    const Eigen::MatrixXd denom = fb.transpose() * (fb * linear);
    linear = linear.cwiseProduct(numer).cwiseQuotient(denom.cwiseMax(1e-30));
  }
  return linear;
}

double SpectralConvergence(const Eigen::MatrixXd& estimate,
                           const Eigen::MatrixXd& target) {
  if (estimate.rows() != target.rows() || estimate.cols() != target.cols()) {
    throw DimensionError("spectral convergence: shape mismatch");
  }
  const double denom = WeightedSquaredNorm(target);
  if (denom <= 0.0) return 0.0;
  return std::sqrt(WeightedSquaredNorm(estimate - target) / denom);
}

PhaseReconstruction ReconstructPhase(const Eigen::MatrixXd& magnitude,
                                     const StftConfig& cfg, int iterations,
                                     std::uint64_t seed) {
  if (iterations < 1) throw ContractError("griffin-lim: iterations must be >= 1");
  if (magnitude.rows() != cfg.num_bins() || magnitude.cols() < 1) {
    throw DimensionError("griffin-lim: magnitude has wrong shape");
  }
  const std::size_t length =
      static_cast<std::size_t>(magnitude.cols() - 1) * cfg.hop;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi,
                                               std::numbers::pi);
  ComplexMatrix spec(magnitude.rows(), magnitude.cols());
  for (Eigen::Index t = 0; t < spec.cols(); ++t) {
    for (Eigen::Index k = 0; k < spec.rows(); ++k) {
      spec(k, t) = std::polar(magnitude(k, t), angle(rng));
    }
  }

  PhaseReconstruction result;
  result.convergence.reserve(iterations);
  ComplexMatrix previous;  // last magnitude-projected estimate
  ComplexMatrix current;
  double best = std::numeric_limits<double>::infinity();
  for (int it = 0; it < iterations; ++it) {
    result.samples = Istft(spec, cfg, length);
    ComplexMatrix rebuilt = Stft(result.samples, cfg);
    double sc = SpectralConvergence(rebuilt.cwiseAbs(), magnitude);
    if (sc > best) {
      result.samples = Istft(current, cfg, length);
      rebuilt = Stft(result.samples, cfg);
      sc = SpectralConvergence(rebuilt.cwiseAbs(), magnitude);
      previous.resize(0, 0);
    }
    best = std::min(best, sc);
    result.convergence.push_back(sc);
    current = ProjectMagnitude(rebuilt, magnitude);
    spec = previous.size() == 0
               ? current
               : ComplexMatrix(current + kGriffinLimMomentum * (current - previous));
    previous = current;
  }
  return result;
}

Waveform GriffinLim(const MelSpectrogram& mel, int iterations,
                    std::uint64_t seed, MelInversion method) {
  const PhaseReconstruction rec = ReconstructPhase(
      MelToLinearMagnitude(mel, method), mel.config, iterations, seed);
  double peak = 0.0;
  for (double s : rec.samples) peak = std::max(peak, std::abs(s));
  const double gain = peak > 1.0 ? 1.0 / peak : 1.0;
  Waveform wave;
  wave.sample_rate = mel.config.sample_rate;
  wave.samples.reserve(rec.samples.size());
  for (double s : rec.samples) wave.samples.push_back(static_cast<float>(s * gain));
  return wave;
}

}  // namespace advvc
