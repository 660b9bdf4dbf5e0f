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

#include "advvc/verification/verification.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>

#include "advvc/base/errors.h"
#include "json.hpp"

namespace advvc {
namespace {

struct OperatingPoint {
  double threshold;
  double far;
  double frr;
};

}  // namespace

double AcceptanceRate(const std::vector<double>& scores, double threshold) {
  if (scores.empty()) return 0.0;
  const auto accepted = std::count_if(scores.begin(), scores.end(),
                                      [&](double s) { return s > threshold; });
  return static_cast<double>(accepted) / static_cast<double>(scores.size());
}

EerCalibration ComputeEer(const std::vector<double>& positive_scores,
                          const std::vector<double>& negative_scores) {
  if (positive_scores.empty() || negative_scores.empty()) {
    throw CalibrationError("EER needs positive and negative scores");
  }
  for (const auto* list : {&positive_scores, &negative_scores}) {
    for (double s : *list) {
      if (!std::isfinite(s)) throw CalibrationError("non-finite score");
    }
  }
  std::vector<double> pos = positive_scores;
  std::vector<double> neg = negative_scores;
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  std::vector<double> all = pos;
  all.insert(all.end(), neg.begin(), neg.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  const double n_pos = static_cast<double>(pos.size());
  const double n_neg = static_cast<double>(neg.size());
  auto point_at = [&](double threshold) {
    const auto pos_rejected =
        std::upper_bound(pos.begin(), pos.end(), threshold) - pos.begin();
    const auto neg_rejected =
        std::upper_bound(neg.begin(), neg.end(), threshold) - neg.begin();
    return OperatingPoint{threshold, 1.0 - neg_rejected / n_neg,
                          pos_rejected / n_pos};
  };

  std::vector<OperatingPoint> points;
  points.push_back({all.front(), 1.0, 0.0});
  for (std::size_t i = 0; i + 1 < all.size(); ++i) {
    points.push_back(point_at(0.5 * (all[i] + all[i + 1])));
  }
  points.push_back(point_at(all.back()));

  EerCalibration cal;
  cal.n_positive = static_cast<int>(pos.size());
  cal.n_negative = static_cast<int>(neg.size());
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    const OperatingPoint& a = points[k];
    const OperatingPoint& b = points[k + 1];
    const double da = a.far - a.frr;
    const double db = b.far - b.frr;
    if (da == 0.0) {
      cal.threshold = a.threshold;
      cal.eer = a.far;
      return cal;
    }
    if (db == 0.0) {
      cal.threshold = b.threshold;
      cal.eer = b.far;
      return cal;
    }
    if (da > 0.0 && db < 0.0) {
      const double alpha = da / (da - db);
      cal.threshold = a.threshold + alpha * (b.threshold - a.threshold);
      cal.eer = a.far + alpha * (b.far - a.far);
      return cal;
    }
  }
  throw CalibrationError("no FAR/FRR crossing found");
}

EerCalibration CalibrateThreshold(const VerifierModel& verifier,
                                  const Corpus& corpus,
                                  const std::vector<int>& pool,
                                  std::uint64_t seed, int per_speaker) {
  std::map<int, std::vector<int>> by_speaker;
  for (int idx : pool) by_speaker[corpus.utterances.at(idx).speaker].push_back(idx);
  if (by_speaker.size() < 2) {
    throw CalibrationError("calibration needs at least 2 speakers");
  }
  if (per_speaker < 2) throw CalibrationError("per_speaker must be >= 2");

  std::map<int, SpeakerEmbedding> embedding;
  for (int idx : pool) {
    embedding[idx] = verifier.Encode(corpus.utterances[idx].mel);
  }
  std::mt19937_64 rng(seed);
  std::vector<double> positives, negatives;
  for (auto& [spk, utts] : by_speaker) {
    if (utts.size() < 2) {
      throw CalibrationError("speaker " + corpus.speakers.at(spk).speaker_id +
                             " has a single utterance");
    }
    std::vector<int> sampled = utts;
    std::shuffle(sampled.begin(), sampled.end(), rng);
    sampled.resize(std::min<std::size_t>(sampled.size(), per_speaker));
    std::vector<int> others;
    for (int idx : pool) {
      if (corpus.utterances[idx].speaker != spk) others.push_back(idx);
    }
    const std::size_t n_pos = sampled.size() / 2;
    for (std::size_t i = 0; i < sampled.size(); ++i) {
      const SpeakerEmbedding& e = embedding[sampled[i]];
      if (i < n_pos) {
        std::uniform_int_distribution<std::size_t> pick(0, utts.size() - 2);
        std::size_t j = pick(rng);
        // Skip the anchor itself.
        const auto self = std::find(utts.begin(), utts.end(), sampled[i]) -
                          utts.begin();
        if (static_cast<std::ptrdiff_t>(j) >= self) ++j;
        positives.push_back(CosineSimilarity(e, embedding[utts[j]]));
      } else {
        std::uniform_int_distribution<std::size_t> pick(0, others.size() - 1);
        negatives.push_back(CosineSimilarity(e, embedding[others[pick(rng)]]));
      }
    }
  }
  EerCalibration cal = ComputeEer(positives, negatives);
  cal.seed = seed;
  return cal;
}

VerificationDecision VerifyPair(const VerifierModel& verifier,
                                const MelSpectrogram& a,
                                const MelSpectrogram& b,
                                const EerCalibration& calibration) {
  VerificationDecision d;
  d.similarity = CosineSimilarity(verifier.Encode(a), verifier.Encode(b));
  d.same = d.similarity > calibration.threshold;
  return d;
}

double VerificationAccuracy(const VerifierModel& verifier,
                            const EerCalibration& calibration,
                            const std::vector<VerificationPair>& pairs) {
  if (pairs.empty()) throw ContractError("no verification pairs");
  int same = 0;
  for (const VerificationPair& p : pairs) {
    if (p.reference == nullptr || p.probe == nullptr) {
      throw ContractError("null spectrogram in verification pair");
    }
    if (VerifyPair(verifier, *p.reference, *p.probe, calibration).same) ++same;
  }
  return static_cast<double>(same) / static_cast<double>(pairs.size());
}

void WriteCalibrationReport(const std::string& path,
                            const EerCalibration& calibration) {
  nlohmann::json j = {{"threshold", calibration.threshold},
                      {"eer", calibration.eer},
                      {"n_positive", calibration.n_positive},
                      {"n_negative", calibration.n_negative},
                      {"seed", calibration.seed}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed for " + path);
}

EerCalibration ReadCalibrationReport(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  try {
    nlohmann::json j = nlohmann::json::parse(in);
    EerCalibration cal;
    cal.threshold = j.at("threshold").get<double>();
    cal.eer = j.at("eer").get<double>();
    cal.n_positive = j.at("n_positive").get<int>();
    cal.n_negative = j.at("n_negative").get<int>();
    cal.seed = j.at("seed").get<std::uint64_t>();
    return cal;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad calibration report " + path + ": " + e.what());
  }
}

}  // namespace advvc
