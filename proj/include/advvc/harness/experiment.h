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

#ifndef ADVVC_HARNESS_EXPERIMENT_H_
#define ADVVC_HARNESS_EXPERIMENT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "advvc/attack/attack.h"
#include "advvc/audio/corpus.h"
#include "advvc/model/training.h"
#include "advvc/model/vc_model.h"
#include "advvc/verification/verification.h"
#include "json.hpp"

namespace advvc {

enum class Scenario { kWhiteBox, kBlackBox };

std::string ScenarioName(Scenario scenario);  // "white_box" / "black_box"
Scenario ParseScenario(const std::string& name);

struct ExperimentSeeds {
  std::uint64_t corpus = 7;
  std::uint64_t model = 1;
  std::uint64_t proxy = 2;
  std::uint64_t verifier = 1001;
  std::uint64_t attack = 3;
  std::uint64_t calibration = 5;
  std::uint64_t evaluation = 11;
};

// Everything that determines an experiment's output.
struct ExperimentConfig {
  Scenario scenario = Scenario::kWhiteBox;
  AttackMethod method = AttackMethod::kEmbedding;
  // Perturbation scales as fractions of the corpus log-mel range p99 - p1.
  std::vector<double> epsilon_sweep = {0.01, 0.02, 0.05, 0.075, 0.1, 0.2};
  int n_pairs = 30;
  ExperimentSeeds seeds;

  int speakers = 20;
  int utterances_per_speaker = 24;
  int held_out_per_speaker = 8;

  int speaker_epochs = 200;
  int autoencoder_epochs = 200;
  double embedding_noise = 0.2;
  int verifier_hidden = 96;
  double verifier_adversarial_radius = 1.0;

  double lambda = 0.1;
  double lr = 1e-3;
  int iterations = 1500;

  int jobs = 1;

  // Throws ConfigError.
  void Validate() const;
  CorpusOptions corpus_options() const;
};

nlohmann::json ToJson(const ExperimentConfig& config);
// Fields missing from `j` keep the values of `base`; unknown keys are
// rejected with ConfigError.
ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j,
                                          const ExperimentConfig& base = {});

struct SystemOptions {
  ModelDims dims;
  int speaker_epochs = 200;
  int autoencoder_epochs = 200;
  double embedding_noise = 0.2;
  int verifier_hidden = 96;
  double verifier_adversarial_radius = 1.0;
  std::uint64_t model_seed = 1;
  std::uint64_t verifier_seed = 1001;
  std::uint64_t calibration_seed = 5;
};

SystemOptions SystemOptionsFrom(const ExperimentConfig& config);

struct TrainedVc {
  VcModel model;
  double speaker_accuracy = 0.0;  // held-out classification accuracy
  std::vector<double> speaker_loss;
  std::vector<double> autoencoder_loss;
};

// Speaker encoder then autoencoder, both seeded from `seed`, trained on the
// corpus's training utterances.
TrainedVc TrainVc(const Corpus& corpus, const SystemOptions& options,
                  std::uint64_t seed);

struct TrainedSystem {
  TrainedVc deployed;
  VerifierModel verifier;
  double verifier_accuracy = 0.0;
  EerCalibration calibration;  // on held-out utterances
};

TrainedSystem TrainSystem(const Corpus& corpus, const SystemOptions& options);

// One evaluation case: the defended utterance x, the content utterance used
// while attacking, a different content utterance used for evaluation, and
// an opposite-gender target. Values are corpus utterance indices.
struct EvaluationTriple {
  int defended = 0;
  int content = 0;
  int evaluation_content = 0;
  int target = 0;
};

struct EvaluationSet {
  std::vector<EvaluationTriple> triples;
  int attempts = 0;
  double pass_rate() const {
    return attempts == 0 ? 0.0
                         : static_cast<double>(triples.size()) / attempts;
  }
};

// Draws defended utterances from the held-out set in seeded order, each
// with content utterances of two other speakers. A case is kept only if the
// verifier accepts both conversions F(t, x) and F(t', x). Throws
// InsufficientConversionError when fewer than n_pairs cases pass.
EvaluationSet BuildEvaluationSet(const VcModel& model, const Corpus& corpus,
                                 const VerifierModel& verifier,
                                 const EerCalibration& calibration,
                                 int n_pairs, std::uint64_t seed);

struct PairOutcome {
  double input_similarity = 0.0;
  double output_similarity = 0.0;
  bool input_same = false;
  bool output_same = false;
  double max_abs_delta = 0.0;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::vector<std::string> graph_ops;
};

struct ExperimentRow {
  double epsilon = 0.0;      // fraction of the dynamic range
  double epsilon_abs = 0.0;  // log-mel units
  AttackMethod method = AttackMethod::kEmbedding;
  Scenario scenario = Scenario::kWhiteBox;
  double input_accuracy = 0.0;
  double output_accuracy = 0.0;
  std::vector<PairOutcome> outcomes;
};

// Attack settings shared by every pair of a row; epsilon is absolute.
struct AttackSettings {
  AttackMethod method = AttackMethod::kEmbedding;
  double epsilon_fraction = 0.05;
  double lambda = 0.1;
  double lr = 1e-3;
  int iterations = 1500;
  std::uint64_t seed = 3;
  int jobs = 1;
};

// Perturbations are optimised against `attacked`, then x + delta is
// converted by `deployed` with the evaluation content utterance and both the
// adversarial input and output are verified against x.
ExperimentRow RunTransfer(const VcModel& attacked, const VcModel& deployed,
                          Scenario scenario, const Corpus& corpus,
                          const EvaluationSet& set,
                          const AttackSettings& settings,
                          const VerifierModel& verifier,
                          const EerCalibration& calibration);

ExperimentRow RunWhiteBox(const VcModel& model, const Corpus& corpus,
                          const EvaluationSet& set,
                          const AttackSettings& settings,
                          const VerifierModel& verifier,
                          const EerCalibration& calibration);

ExperimentRow RunBlackBox(const VcModel& deployed, const VcModel& proxy,
                          const Corpus& corpus, const EvaluationSet& set,
                          const AttackSettings& settings,
                          const VerifierModel& verifier,
                          const EerCalibration& calibration);

// Acceptance rate of (x, F(t', x)) over the set, i.e. without attack.
double BaselineOutputAccuracy(const VcModel& model, const Corpus& corpus,
                              const EvaluationSet& set,
                              const VerifierModel& verifier,
                              const EerCalibration& calibration);

// Fixed 4-decimal CSV: epsilon,method,scenario,input_acc,output_acc.
std::string FormatCsv(const std::vector<ExperimentRow>& rows);
void WriteCsv(const std::vector<ExperimentRow>& rows, const std::string& path);

// Self-contained SVG with input and output accuracy against epsilon.
std::string RenderPlot(const std::vector<ExperimentRow>& rows,
                       const std::string& title);
void EmitPlot(const std::vector<ExperimentRow>& rows, const std::string& path,
              const std::string& title = "");

struct ExperimentReport {
  ExperimentConfig config;
  TrainedSystem system;
  EvaluationSet evaluation_set;
  std::vector<ExperimentRow> rows;
  std::vector<std::string> warnings;
};

// Generates the corpus, trains the deployed model, verifier and (for the
// black-box scenario) the proxy, then sweeps epsilon.
ExperimentReport RunExperiment(const ExperimentConfig& config);

// Writes results.csv, accuracy.svg and calibration.json under `dir`.
void WriteExperimentArtifacts(const ExperimentReport& report,
                              const std::string& dir);

}  // namespace advvc

#endif  // ADVVC_HARNESS_EXPERIMENT_H_
