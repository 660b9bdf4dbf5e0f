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

// Properties of models trained on the default synthetic corpus. The system
// is trained once per process.

#include <chrono>
#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "advvc/attack/attack.h"
#include "advvc/audio/synth.h"
#include "advvc/base/errors.h"
#include "advvc/autodiff/ops.h"
#include "advvc/harness/experiment.h"
#include "advvc/model/checkpoint.h"
#include "advvc/model/training.h"

namespace advvc {
namespace {

struct Trained {
  ExperimentConfig config;
  Corpus corpus;
  TrainedSystem system;
};

const Trained& System() {
  static const Trained t = [] {
    Trained t;
    t.corpus = GenerateCorpus(t.config.corpus_options());
    t.system = TrainSystem(t.corpus, SystemOptionsFrom(t.config));
    return t;
  }();
  return t;
}

const VcModel& Model() { return System().system.deployed.model; }
const Corpus& Data() { return System().corpus; }

double Distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::sqrt((a - b).squaredNorm() + ad::kL2Stabilizer);
}

TEST(Trained, SpeakerEmbeddingsCluster) {
  const std::vector<int> held = Data().Indices(true);
  std::vector<SpeakerEmbedding> e;
  for (int i : held) e.push_back(Model().SpeakerEncode(Data().utterances[i].mel));
  double intra = 0, inter = 0;
  int n_intra = 0, n_inter = 0;
  for (std::size_t i = 0; i < held.size(); ++i) {
    for (std::size_t j = i + 1; j < held.size(); ++j) {
      const double c = CosineSimilarity(e[i], e[j]);
      if (Data().utterances[held[i]].speaker == Data().utterances[held[j]].speaker) {
        intra += c;
        ++n_intra;
      } else {
        inter += c;
        ++n_inter;
      }
    }
  }
  EXPECT_GE(intra / n_intra - inter / n_inter, 0.2);
}

TEST(Trained, ConversionsSoundLikeTheSpeakerUtterance) {
  const std::vector<int> held = Data().Indices(true);
  const SpeakerEncoder& v = System().system.verifier;
  int closer = 0, total = 0;
  for (std::size_t k = 0; k < held.size(); k += 3) {
    const int x = held[k];
    const int t = held[(k + 37) % held.size()];
    if (Data().utterances[x].speaker == Data().utterances[t].speaker) continue;
    const SpeakerEmbedding out = v.Encode(
        Model().Convert(Data().utterances[t].mel, Data().utterances[x].mel));
    closer += CosineSimilarity(out, v.Encode(Data().utterances[x].mel)) >
              CosineSimilarity(out, v.Encode(Data().utterances[t].mel));
    ++total;
  }
  ASSERT_GT(total, 20);
  EXPECT_GE(static_cast<double>(closer) / total, 0.8);
}

TEST(Trained, ReconstructionIsAccurateAndBeatsUntrained) {
  const std::vector<int> train = Data().Indices(false);
  const double trained = ReconstructionError(Model(), Data(), train);
  EXPECT_LT(trained, 0.5);
  const VcModel untrained(Model().dims(), Model().stft(), Model().stats(),
                          Model().speaker_encoder(), 12345);
  EXPECT_GE(ReconstructionError(untrained, Data(), train), 5.0 * trained);
}

TEST(Trained, ConversionGradientReachesTheSpeakerInput) {
  const ad::Tensor t = AsTensor(Data().utterances[0].mel);
  ad::Tensor x = ad::Tensor::Parameter(Data().utterances[30].mel.data);
  ad::Backward(ad::Sum(Model().Convert(t, x)));
  EXPECT_GT(x.grad().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Trained, VerifierAcceptsHeldOutSameSpeakerPairs) {
  const SpeakerEncoder& v = System().system.verifier;
  const EerCalibration& cal = System().system.calibration;
  int accepted = 0, total = 0;
  for (int s = 0; s < Data().num_speakers(); ++s) {
    const std::vector<int> idx = Data().IndicesOfSpeaker(s, true);
    for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
      accepted += VerifyPair(v, Data().utterances[idx[i]].mel,
                             Data().utterances[idx[i + 1]].mel, cal).same;
      ++total;
    }
  }
  EXPECT_GE(static_cast<double>(accepted) / total, 0.85);
}

TEST(Trained, VerifierIsIndependentOfTheAttackedEncoder) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "advvc_independence";
  fs::create_directories(dir);
  SaveVcModel(Model(), (dir / "m.ckpt").string());
  SaveSpeakerEncoder(System().system.verifier, (dir / "v.ckpt").string());
  const auto model_meta = ReadCheckpointMetadata((dir / "m.ckpt").string());
  const auto verifier_meta = ReadCheckpointMetadata((dir / "v.ckpt").string());
  const SpeakerEncoder reloaded = LoadSpeakerEncoder((dir / "v.ckpt").string());
  const VcModel model = LoadVcModel((dir / "m.ckpt").string());
  EXPECT_NE(reloaded.seed(), model.speaker_encoder().seed());
  EXPECT_NE(reloaded.hidden(), model.speaker_encoder().hidden());
  fs::remove_all(dir);
}

TEST(Trained, ContentCodeFollowsWhatIsSaidNotWhoSaysIt) {
  // Both distances cross the same two speakers; only the words differ.
  auto code = [&](int speaker, std::uint64_t seed) {
    return Model().ContentEncode(ComputeMelSpectrogram(
        SynthUtterance(Data().speakers[speaker], 1.5, seed), Data().stft));
  };
  const int pairs[][2] = {{0, 1}, {0, 15}, {3, 12}, {7, 8}, {18, 19}};
  for (const auto& pair : pairs) {
    double same_words = 0, other_words = 0;
    for (std::uint64_t seed = 500; seed < 505; ++seed) {
      const Eigen::MatrixXd a = code(pair[0], seed);
      same_words += (a - code(pair[1], seed)).colwise().norm().mean();
      other_words += (a - code(pair[1], seed + 100)).colwise().norm().mean();
    }
    EXPECT_LT(same_words, other_words) << pair[0] << " vs " << pair[1];
  }
}

struct Pair {
  int t, x, y;
};

std::vector<Pair> Pairs(int n) {
  const std::vector<int> held = Data().Indices(true);
  std::vector<Pair> out;
  for (int k = 0; static_cast<int>(out.size()) < n; ++k) {
    const int x = held[(k * 7) % held.size()];
    const int t = held[(k * 7 + 45) % held.size()];
    if (Data().utterances[x].speaker == Data().utterances[t].speaker) continue;
    out.push_back({t, x,
                   SelectTarget(Data(), held, Data().utterances[x].speaker, k)});
  }
  return out;
}

AttackConfig Config(AttackMethod m, double fraction, int iterations = 1500) {
  AttackConfig c;
  c.method = m;
  c.epsilon = fraction * Model().stats().dynamic_range();
  c.iterations = iterations;
  return c;
}

TEST(TrainedAttack, TargetedLossesEndBelowTheirStart) {
  for (AttackMethod m : {AttackMethod::kEmbedding, AttackMethod::kTargetedEndToEnd,
                         AttackMethod::kFeedback}) {
    int improved = 0;
    const std::vector<Pair> pairs = Pairs(8);
    for (const Pair& p : pairs) {
      const AttackResult r =
          RunAttack(Model(), Config(m, 0.05), Data().utterances[p.t].mel,
                    Data().utterances[p.x].mel, &Data().utterances[p.y].mel);
      improved += r.loss_trace.back() <= r.loss_trace.front();
    }
    EXPECT_GE(improved, 0.95 * pairs.size()) << MethodName(m);
  }
}

TEST(TrainedAttack, EmbeddingAttackPullsTowardsTheTarget) {
  for (const Pair& p : Pairs(4)) {
    const MelSpectrogram& x = Data().utterances[p.x].mel;
    const Eigen::VectorXd ey = Model().SpeakerEncode(Data().utterances[p.y].mel).vector;
    const AttackResult r = RunAttack(Model(), Config(AttackMethod::kEmbedding, 0.2),
                                     Data().utterances[p.t].mel, x,
                                     &Data().utterances[p.y].mel);
    const double before = Distance(Model().SpeakerEncode(x).vector, ey);
    MelSpectrogram unclamped = x;
    unclamped.data += r.delta;
    const double after = Distance(Model().SpeakerEncode(unclamped).vector, ey);
    EXPECT_LT(after, 0.25 * before);
  }
}

TEST(TrainedAttack, UntargetedAttackPushesTheOutputAway) {
  for (const Pair& p : Pairs(3)) {
    const AttackResult r = RunAttack(
        Model(), Config(AttackMethod::kUntargetedEndToEnd, 0.05),
        Data().utterances[p.t].mel, Data().utterances[p.x].mel, nullptr);
    // The trace holds the negated distance.
    EXPECT_GE(-r.loss_trace.back(), 10.0 * -r.loss_trace.front());
  }
}

double SecondsPerIteration(AttackMethod m, const Pair& p) {
  const auto start = std::chrono::steady_clock::now();
  RunAttack(Model(), Config(m, 0.05, 60), Data().utterances[p.t].mel,
            Data().utterances[p.x].mel, &Data().utterances[p.y].mel);
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
             .count() / 60.0;
}

TEST(TrainedAttack, EmbeddingAttackIsTheCheapestPerIteration) {
  const Pair p = Pairs(1).front();
  const double emb = SecondsPerIteration(AttackMethod::kEmbedding, p);
  const double e2e = SecondsPerIteration(AttackMethod::kTargetedEndToEnd, p);
  const double fb = SecondsPerIteration(AttackMethod::kFeedback, p);
  EXPECT_LT(emb, e2e);
  EXPECT_GT(fb, emb);
}

TEST(TrainedHarness, JobCountDoesNotChangeResults) {
  const EvaluationSet set = BuildEvaluationSet(
      Model(), Data(), System().system.verifier, System().system.calibration, 4,
      System().config.seeds.evaluation);
  EXPECT_EQ(BaselineOutputAccuracy(Model(), Data(), set, System().system.verifier,
                                   System().system.calibration),
            1.0);
  AttackSettings s;
  s.iterations = 40;
  s.jobs = 1;
  const ExperimentRow a = RunWhiteBox(Model(), Data(), set, s,
                                      System().system.verifier,
                                      System().system.calibration);
  s.jobs = 3;
  const ExperimentRow b = RunWhiteBox(Model(), Data(), set, s,
                                      System().system.verifier,
                                      System().system.calibration);
  EXPECT_EQ(FormatCsv({a}), FormatCsv({b}));
  for (std::size_t i = 0; i < a.outcomes.size(); ++i) {
    EXPECT_EQ(a.outcomes[i].final_loss, b.outcomes[i].final_loss);
    EXPECT_EQ(a.outcomes[i].output_similarity, b.outcomes[i].output_similarity);
  }
}

TEST(TrainedHarness, ProxyWithTheDeployedSeedWarns) {
  ExperimentConfig c;
  c.scenario = Scenario::kBlackBox;
  c.seeds.proxy = c.seeds.model;
  c.speakers = 4;
  c.utterances_per_speaker = 8;
  c.held_out_per_speaker = 3;
  c.speaker_epochs = 20;
  c.autoencoder_epochs = 20;
  c.iterations = 5;
  c.n_pairs = 2;
  c.epsilon_sweep = {0.05};
  try {
    const ExperimentReport r = RunExperiment(c);
    ASSERT_EQ(r.warnings.size(), 1u);
  } catch (const InsufficientConversionError&) {
    GTEST_SKIP() << "toy system too weak to build an evaluation set";
  }
}

}  // namespace
}  // namespace advvc
