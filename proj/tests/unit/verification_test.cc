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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "advvc/audio/corpus.h"
#include "advvc/base/errors.h"
#include "advvc/model/vc_model.h"
#include "advvc/verification/verification.h"
#include "support/oracles.h"

namespace advvc {
namespace {

TEST(Eer, SeparableScores) {
  const EerCalibration c = ComputeEer({0.9, 0.8}, {0.1, 0.2});
  EXPECT_EQ(c.eer, 0.0);
  EXPECT_GT(c.threshold, 0.2);
  EXPECT_LT(c.threshold, 0.8);
  EXPECT_EQ(c.n_positive, 2);
  EXPECT_EQ(c.n_negative, 2);
}

TEST(Eer, OverlappingScores) {
  const EerCalibration c = ComputeEer({0.9, 0.7, 0.6}, {0.8, 0.3, 0.2});
  EXPECT_NEAR(c.eer, 1.0 / 3.0, 1e-12);
  EXPECT_GT(c.threshold, 0.6);
  EXPECT_LT(c.threshold, 0.8);
  // At the threshold both error rates are one third.
  EXPECT_NEAR(1.0 - AcceptanceRate({0.9, 0.7, 0.6}, c.threshold), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(AcceptanceRate({0.8, 0.3, 0.2}, c.threshold), 1.0 / 3.0, 1e-12);
}

TEST(Eer, MatchesBruteForceScan) {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 50; ++i) {
    const auto [pos, neg] = testing::RandomScoreSet(rng);
    const EerCalibration c = ComputeEer(pos, neg);
    const testing::EerScan scan = testing::BruteForceEer(pos, neg);
    ASSERT_GE(scan.eer, 0.0);
    EXPECT_NEAR(c.eer, scan.eer, 1e-12) << "set " << i;
    EXPECT_GE(c.threshold, scan.interval_lo - 1e-12) << "set " << i;
    EXPECT_LE(c.threshold, scan.interval_hi + 1e-12) << "set " << i;
    EXPECT_GE(c.eer, 0.0);
    EXPECT_LE(c.eer, 1.0);
    const auto [lo, hi] = std::minmax_element(pos.begin(), pos.end());
    const double smin = std::min(*lo, *std::min_element(neg.begin(), neg.end()));
    const double smax = std::max(*hi, *std::max_element(neg.begin(), neg.end()));
    EXPECT_GE(c.threshold, smin);
    EXPECT_LE(c.threshold, smax);
  }
}

TEST(Eer, InvariantUnderMonotoneTransforms) {
  std::mt19937_64 rng(78);
  for (int i = 0; i < 30; ++i) {
    const auto [pos, neg] = testing::RandomScoreSet(rng);
    auto warp = [](std::vector<double> v) {
      for (double& s : v) s = std::exp(3.0 * s) - 7.0;
      return v;
    };
    EXPECT_NEAR(ComputeEer(pos, neg).eer, ComputeEer(warp(pos), warp(neg)).eer,
                1e-12)
        << "set " << i;
  }
}

TEST(Eer, RejectsEmptyOrNonFiniteInput) {
  EXPECT_THROW(ComputeEer({}, {0.1}), CalibrationError);
  EXPECT_THROW(ComputeEer({0.1}, {}), CalibrationError);
  EXPECT_THROW(ComputeEer({0.1, NAN}, {0.2}), CalibrationError);
}

const Corpus& SmallCorpus() {
  static const Corpus corpus = [] {
    CorpusOptions o;
    o.speakers = 4;
    o.utterances_per_speaker = 6;
    o.held_out_per_speaker = 3;
    o.seed = 5;
    return GenerateCorpus(o);
  }();
  return corpus;
}

SpeakerEncoder Untrained() {
  const Corpus& c = SmallCorpus();
  return SpeakerEncoder(c.stft.mel_bins, 16, 8,
                        ComputeFeatureStats(c, c.Indices(false)), c.stft, 3)
      .Frozen();
}

TEST(VerifyPair, SelfSimilarityAndStrictThreshold) {
  const SpeakerEncoder v = Untrained();
  const MelSpectrogram& x = SmallCorpus().utterances[0].mel;
  EerCalibration cal;
  cal.threshold = 0.99;
  const VerificationDecision d = VerifyPair(v, x, x, cal);
  EXPECT_NEAR(d.similarity, 1.0, 1e-12);
  EXPECT_TRUE(d.same);
  const MelSpectrogram& other = SmallCorpus().utterances[7].mel;
  const VerificationDecision e = VerifyPair(v, x, other, cal);
  cal.threshold = e.similarity;
  EXPECT_FALSE(VerifyPair(v, x, other, cal).same);
  EXPECT_GE(e.similarity, -1.0 - 1e-6);
  EXPECT_LE(e.similarity, 1.0 + 1e-6);
}

TEST(VerifyPair, OrthogonalEmbeddingsScoreZero) {
  SpeakerEmbedding a, b;
  a.vector = Eigen::VectorXd::Unit(4, 0);
  b.vector = Eigen::VectorXd::Unit(4, 2);
  EXPECT_EQ(CosineSimilarity(a, b), 0.0);
  EXPECT_EQ(AcceptanceRate({0.0, 0.0}, 0.1), 0.0);
}

TEST(VerificationAccuracy, SelfPairsPermutationAndEmptyInput) {
  const SpeakerEncoder v = Untrained();
  const Corpus& c = SmallCorpus();
  EerCalibration cal;
  cal.threshold = 0.5;
  std::vector<VerificationPair> pairs;
  for (int i = 0; i < 5; ++i) pairs.push_back({&c.utterances[i].mel, &c.utterances[i].mel});
  EXPECT_EQ(VerificationAccuracy(v, cal, pairs), 1.0);
  for (int i = 0; i < 5; ++i) pairs.push_back({&c.utterances[i].mel, &c.utterances[20 - i].mel});
  const double acc = VerificationAccuracy(v, cal, pairs);
  std::reverse(pairs.begin(), pairs.end());
  EXPECT_EQ(VerificationAccuracy(v, cal, pairs), acc);
  cal.threshold = 1.0;
  EXPECT_EQ(VerificationAccuracy(v, cal, pairs), 0.0);
  EXPECT_THROW(VerificationAccuracy(v, cal, {}), ContractError);
}

TEST(Calibration, SeededAndReportRoundTrips) {
  const SpeakerEncoder v = Untrained();
  const Corpus& c = SmallCorpus();
  const EerCalibration a = CalibrateThreshold(v, c, c.Indices(true), 4);
  const EerCalibration b = CalibrateThreshold(v, c, c.Indices(true), 4);
  EXPECT_EQ(a.threshold, b.threshold);
  EXPECT_EQ(a.eer, b.eer);
  EXPECT_EQ(a.seed, 4u);
  EXPECT_GT(a.n_positive, 0);
  EXPECT_GT(a.n_negative, 0);
  const auto path = std::filesystem::temp_directory_path() / "advvc_cal.json";
  WriteCalibrationReport(path.string(), a);
  const EerCalibration r = ReadCalibrationReport(path.string());
  EXPECT_EQ(r.threshold, a.threshold);
  EXPECT_EQ(r.eer, a.eer);
  EXPECT_EQ(r.n_positive, a.n_positive);
  EXPECT_EQ(r.n_negative, a.n_negative);
  EXPECT_EQ(r.seed, a.seed);
  std::filesystem::remove(path);
}

TEST(Calibration, NeedsTwoSpeakers) {
  const SpeakerEncoder v = Untrained();
  const Corpus& c = SmallCorpus();
  EXPECT_THROW(CalibrateThreshold(v, c, c.IndicesOfSpeaker(0, true), 1),
               CalibrationError);
}

}  // namespace
}  // namespace advvc
