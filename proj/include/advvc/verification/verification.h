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

#ifndef ADVVC_VERIFICATION_VERIFICATION_H_
#define ADVVC_VERIFICATION_VERIFICATION_H_

#include <cstdint>
#include <string>
#include <vector>

#include "advvc/audio/corpus.h"
#include "advvc/model/vc_model.h"

namespace advvc {

struct EerCalibration {
  double threshold = 0.0;
  double eer = 0.0;
  int n_positive = 0;
  int n_negative = 0;
  std::uint64_t seed = 0;
};

// Equal error rate of cosine scores. A pair is accepted iff its score is
// strictly above the threshold.
//
// Operating points are: every score accepted (threshold at the smallest
// score), the midpoints between consecutive distinct scores, and every score
// rejected (threshold at the largest score). FAR - FRR strictly decreases
// along them. The EER is read at a point where it is zero, or linearly
// interpolated between the last positive and first negative point, the
// threshold being interpolated with the same weight. Throws CalibrationError
// when either list is empty.
EerCalibration ComputeEer(const std::vector<double>& positive_scores,
                          const std::vector<double>& negative_scores);

// Fraction of scores above `threshold` (strict).
double AcceptanceRate(const std::vector<double>& scores, double threshold);

// Samples min(per_speaker, available) utterances for every speaker of
// `pool`. Half are paired with another utterance of the same speaker, the
// rest with an utterance of a random other speaker. Throws CalibrationError
// for fewer than 2 speakers or a speaker with a single utterance.
EerCalibration CalibrateThreshold(const VerifierModel& verifier,
                                  const Corpus& corpus,
                                  const std::vector<int>& pool,
                                  std::uint64_t seed, int per_speaker = 32);

struct VerificationDecision {
  bool same = false;
  double similarity = 0.0;
};

VerificationDecision VerifyPair(const VerifierModel& verifier,
                                const MelSpectrogram& a,
                                const MelSpectrogram& b,
                                const EerCalibration& calibration);

// Reference utterance of the defended speaker and a generated probe.
struct VerificationPair {
  const MelSpectrogram* reference = nullptr;
  const MelSpectrogram* probe = nullptr;
};

// Fraction of pairs judged "same". Throws ContractError on an empty list.
double VerificationAccuracy(const VerifierModel& verifier,
                            const EerCalibration& calibration,
                            const std::vector<VerificationPair>& pairs);

void WriteCalibrationReport(const std::string& path,
                            const EerCalibration& calibration);
EerCalibration ReadCalibrationReport(const std::string& path);

}  // namespace advvc

#endif  // ADVVC_VERIFICATION_VERIFICATION_H_
