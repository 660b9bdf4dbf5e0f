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

#include "advvc/audio/spectrogram.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "advvc/base/errors.h"

namespace advvc {
namespace {

// FFTW planning is not thread-safe but executing an existing plan on new
// arrays is, so plans are created once per size under a lock.
struct FftPlans {
  fftw_plan forward;
  fftw_plan inverse;
};

const FftPlans& PlansFor(int n) {
  static std::mutex mu;
  static std::map<int, FftPlans> plans;
  std::lock_guard<std::mutex> lock(mu);
  auto it = plans.find(n);
  if (it != plans.end()) return it->second;
  std::vector<double> real(n);
  std::vector<fftw_complex> spec(n / 2 + 1);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  FftPlans p;
  p.forward = fftw_plan_dft_r2c_1d(n, real.data(), spec.data(), flags);
  p.inverse = fftw_plan_dft_c2r_1d(n, spec.data(), real.data(), flags);
  return plans.emplace(n, p).first->second;
}

}  // namespace

double StftConfig::log_min() const { return std::log(log_floor); }

void StftConfig::Validate() const {
  auto fail = [](const std::string& what) {
    throw ConfigError("invalid STFT config: " + what);
  };
  if (sample_rate <= 0) fail("sample_rate must be positive");
  if (n_fft < 2 || n_fft % 2 != 0) fail("n_fft must be even and >= 2");
  if (hop < 1 || hop > n_fft) fail("need 1 <= hop <= n_fft");
  if (mel_bins < 1) fail("mel_bins must be >= 1");
  if (!(f_min >= 0.0 && f_min < f_max && f_max <= sample_rate / 2.0)) {
    fail("need 0 <= f_min < f_max <= sample_rate / 2");
  }
  if (!(log_floor > 0.0)) fail("log_floor must be positive");
}

int StftConfig::NumFrames(std::size_t num_samples) const {
  return 1 + static_cast<int>(num_samples / static_cast<std::size_t>(hop));
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

std::vector<double> MelCenterFrequencies(const StftConfig& cfg) {
  const double lo = HzToMel(cfg.f_min);
  const double hi = HzToMel(cfg.f_max);
  std::vector<double> centers(cfg.mel_bins);
  for (int m = 0; m < cfg.mel_bins; ++m) {
    centers[m] = MelToHz(lo + (hi - lo) * (m + 1) / (cfg.mel_bins + 1));
  }
  return centers;
}

Eigen::MatrixXd MelFilterbank(const StftConfig& cfg) {
  cfg.Validate();
  const double lo = HzToMel(cfg.f_min);
  const double hi = HzToMel(cfg.f_max);
  std::vector<double> edges(cfg.mel_bins + 2);
  for (int i = 0; i < cfg.mel_bins + 2; ++i) {
    edges[i] = MelToHz(lo + (hi - lo) * i / (cfg.mel_bins + 1));
  }
  const int bins = cfg.num_bins();
  const double bin_hz = static_cast<double>(cfg.sample_rate) / cfg.n_fft;
  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(cfg.mel_bins, bins);
  for (int m = 0; m < cfg.mel_bins; ++m) {
    const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    const double area_norm = 2.0 / (right - left);
    for (int k = 0; k < bins; ++k) {
      const double f = k * bin_hz;
      double w = 0.0;
      if (f > left && f <= center) {
        w = (f - left) / (center - left);
      } else if (f > center && f < right) {
        w = (right - f) / (right - center);
      }
      fb(m, k) = w * area_norm;
    }
  }
  return fb;
}

std::vector<double> HannWindow(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  }
  return w;
}

ComplexMatrix Stft(std::span<const double> signal, const StftConfig& cfg) {
  const int n = cfg.n_fft;
  const int pad = n / 2;
  const int frames = cfg.NumFrames(signal.size());
  const std::vector<double> window = HannWindow(n);
  const FftPlans& plans = PlansFor(n);

  ComplexMatrix spec(cfg.num_bins(), frames);
  std::vector<double> buf(n);
  std::vector<fftw_complex> out(cfg.num_bins());
  const auto len = static_cast<long>(signal.size());
  for (int t = 0; t < frames; ++t) {
    const long start = static_cast<long>(t) * cfg.hop - pad;
    for (int i = 0; i < n; ++i) {
      const long idx = start + i;
      buf[i] = (idx >= 0 && idx < len) ? signal[idx] * window[i] : 0.0;
    }
    fftw_execute_dft_r2c(plans.forward, buf.data(), out.data());
    for (int k = 0; k < cfg.num_bins(); ++k) {
      spec(k, t) = {out[k][0], out[k][1]};
    }
  }
  return spec;
}

std::vector<double> Istft(const ComplexMatrix& spec, const StftConfig& cfg,
                          std::size_t length) {
  const int n = cfg.n_fft;
  const int pad = n / 2;
  if (spec.rows() != cfg.num_bins()) {
    throw DimensionError("istft: spectrum has wrong bin count");
  }
  const std::vector<double> window = HannWindow(n);
  const FftPlans& plans = PlansFor(n);

  std::vector<double> acc(length, 0.0);
  std::vector<double> norm(length, 0.0);
  std::vector<fftw_complex> in(cfg.num_bins());
  std::vector<double> frame(n);
  const auto len = static_cast<long>(length);
  for (Eigen::Index t = 0; t < spec.cols(); ++t) {
    for (int k = 0; k < cfg.num_bins(); ++k) {
      in[k][0] = spec(k, t).real();
      in[k][1] = spec(k, t).imag();
    }
    fftw_execute_dft_c2r(plans.inverse, in.data(), frame.data());
    const long start = static_cast<long>(t) * cfg.hop - pad;
    for (int i = 0; i < n; ++i) {
      const long idx = start + i;
      if (idx < 0 || idx >= len) continue;
      acc[idx] += frame[i] / n * window[i];
      norm[idx] += window[i] * window[i];
    }
  }
  for (std::size_t i = 0; i < length; ++i) {
    if (norm[i] > 1e-10) acc[i] /= norm[i];
  }
  return acc;
}

MelSpectrogram ComputeMelSpectrogram(const Waveform& wave,
                                     const StftConfig& cfg) {
  cfg.Validate();
  if (wave.sample_rate != cfg.sample_rate) {
    throw InputError("sample rate " + std::to_string(wave.sample_rate) +
                     " does not match config rate " +
                     std::to_string(cfg.sample_rate));
  }
  if (wave.samples.size() < static_cast<std::size_t>(cfg.n_fft)) {
    throw InputError("waveform shorter than n_fft (" +
                     std::to_string(wave.samples.size()) + " < " +
                     std::to_string(cfg.n_fft) + " samples)");
  }
  const std::vector<double> signal(wave.samples.begin(), wave.samples.end());
  const Eigen::MatrixXd magnitude = Stft(signal, cfg).cwiseAbs();
  MelSpectrogram mel;
  mel.config = cfg;
  mel.data = (MelFilterbank(cfg) * magnitude)
                 .cwiseMax(cfg.log_floor)
                 .array()
                 .log()
                 .matrix();
  return mel;
}

}  // namespace advvc
