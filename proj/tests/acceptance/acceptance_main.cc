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

// Acceptance run: trains the default system once and evaluates every
// criterion, printing one PASS/FAIL line each.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "advvc/attack/attack.h"
#include "advvc/audio/corpus.h"
#include "advvc/audio/griffin_lim.h"
#include "advvc/autodiff/ops.h"
#include "advvc/harness/experiment.h"
#include "advvc/verification/verification.h"
#include "support/oracles.h"

namespace advvc {
namespace {

using Clock = std::chrono::steady_clock;
using testing::CompareGradients;
using testing::ScalarFn;
using testing::UniformMatrix;
using testing::WeightedSum;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

void Progress(const std::string& msg) { std::cerr << "[acceptance] " << msg << std::endl; }

// --- 1: gradients --------------------------------------------------------

Outcome GradientCriterion() {
  const auto start = Clock::now();
  constexpr int kM = 8, kT = 4;
  constexpr double kEps = 0.5, kLambda = 0.1;
  double worst = 0.0;
  std::string worst_name;
  int checks = 0;

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    const Eigen::MatrixXd a = UniformMatrix(kM, kT, rng);
    const Eigen::MatrixXd b = UniformMatrix(kM, kT, rng);
    const Eigen::MatrixXd rhs = UniformMatrix(kT, 3, rng);
    const Eigen::MatrixXd col = UniformMatrix(kM, 1, rng);
    Eigen::MatrixXd away = UniformMatrix(kM, kT, rng);
    for (Eigen::Index i = 0; i < away.size(); ++i) {
      if (std::abs(away(i)) < 1e-2) away(i) = 0.5;
    }
    auto C = [](const Eigen::MatrixXd& m) { return ad::Tensor::Constant(m); };
    const std::uint64_t ws = seed + 1000;

    std::vector<std::tuple<std::string, ScalarFn, Eigen::MatrixXd>> cases = {
        {"matmul/lhs", [&](const ad::Tensor& p) { return WeightedSum(ad::MatMul(p, C(rhs)), ws); }, a},
        {"matmul/rhs", [&](const ad::Tensor& p) { return WeightedSum(ad::MatMul(C(a), p), ws); }, rhs},
        {"add", [&](const ad::Tensor& p) { return WeightedSum(ad::Add(p, C(b)), ws); }, a},
        {"sub/lhs", [&](const ad::Tensor& p) { return WeightedSum(ad::Sub(p, C(b)), ws); }, a},
        {"sub/rhs", [&](const ad::Tensor& p) { return WeightedSum(ad::Sub(C(b), p), ws); }, a},
        {"mul", [&](const ad::Tensor& p) { return WeightedSum(ad::Mul(p, C(b)), ws); }, a},
        {"mul/self", [&](const ad::Tensor& p) { return WeightedSum(ad::Mul(p, p), ws); }, a},
        {"scale", [&](const ad::Tensor& p) { return WeightedSum(ad::Scale(p, -1.7), ws); }, a},
        {"affine", [&](const ad::Tensor& p) { return WeightedSum(ad::Affine(p, 0.3, 2.0), ws); }, a},
        {"broadcast_add/matrix", [&](const ad::Tensor& p) { return WeightedSum(ad::BroadcastAdd(p, C(col)), ws); }, a},
        {"broadcast_add/bias", [&](const ad::Tensor& p) { return WeightedSum(ad::BroadcastAdd(C(a), p), ws); }, col},
        {"repeat_cols", [&](const ad::Tensor& p) { return WeightedSum(ad::RepeatCols(p, kT), ws); }, col},
        {"concat_rows/top", [&](const ad::Tensor& p) { return WeightedSum(ad::ConcatRows(p, C(b)), ws); }, a},
        {"concat_rows/bottom", [&](const ad::Tensor& p) { return WeightedSum(ad::ConcatRows(C(b), p), ws); }, a},
        {"tanh", [&](const ad::Tensor& p) { return WeightedSum(ad::Tanh(p), ws); }, a},
        {"relu", [&](const ad::Tensor& p) { return WeightedSum(ad::Relu(p), ws); }, away},
        {"mean_over_cols", [&](const ad::Tensor& p) { return WeightedSum(ad::MeanOverCols(p), ws); }, a},
        {"sum", [&](const ad::Tensor& p) { return ad::Sum(p); }, a},
        {"l2_distance", [&](const ad::Tensor& p) { return ad::L2Distance(p, C(b)); }, a},
        {"mse", [&](const ad::Tensor& p) { return ad::MeanSquaredError(p, C(b)); }, a},
        {"normalize", [&](const ad::Tensor& p) { return WeightedSum(ad::Normalize(p), ws); }, col},
        {"softmax_cross_entropy", [&](const ad::Tensor& p) { return ad::SoftmaxCrossEntropy(p, static_cast<int>(seed % kM)); }, col},
    };

    // Losses of the attack, on a small untrained model.
    const VcModel model = testing::TinyModel(seed);
    const ad::Tensor t = C(UniformMatrix(kM, kT, rng, -8.0, 0.0));
    const ad::Tensor x = C(UniformMatrix(kM, kT, rng, -8.0, 0.0));
    const ad::Tensor y = C(UniformMatrix(kM, kT, rng, -8.0, 0.0));
    const Eigen::MatrixXd w0 = UniformMatrix(kM, kT, rng);
    cases.push_back({"loss/untargeted_e2e", [&](const ad::Tensor& w) {
      return LossUntargetedEndToEnd(model, t, x, w, kEps); }, w0});
    cases.push_back({"loss/targeted_e2e", [&](const ad::Tensor& w) {
      return LossTargetedEndToEnd(model, t, x, y, w, kEps, kLambda); }, w0});
    cases.push_back({"loss/embedding", [&](const ad::Tensor& w) {
      return LossEmbedding(model, x, y, w, kEps, kLambda); }, w0});
    cases.push_back({"loss/feedback", [&](const ad::Tensor& w) {
      return LossFeedback(model, t, x, y, w, kEps, kLambda); }, w0});

    for (const auto& [name, fn, x0] : cases) {
      const double err = CompareGradients(fn, x0).relative_error;
      ++checks;
      if (!(err <= worst)) {
        worst = err;
        worst_name = name;
      }
    }
  }
  Outcome o;
  o.seconds = Seconds(start);
  o.pass = worst < 1e-3 && o.seconds < 10.0;
  o.detail = Fmt("%d checks over 10 seeds, worst relative error %.2e (%s)",
                 checks, worst, worst_name.c_str());
  return o;
}

// --- 3: EER oracle ---------------------------------------------------------

Outcome EerCriterion() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20240);
  int agree = 0;
  std::string first_failure;
  for (int i = 0; i < 50; ++i) {
    const auto [pos, neg] = testing::RandomScoreSet(rng);
    const EerCalibration cal = ComputeEer(pos, neg);
    const testing::EerScan scan = testing::BruteForceEer(pos, neg);
    const bool same_eer = std::abs(cal.eer - scan.eer) <= 1e-12;
    const bool inside = cal.threshold >= scan.interval_lo - 1e-12 &&
                        cal.threshold <= scan.interval_hi + 1e-12;
    if (same_eer && inside) {
      ++agree;
    } else if (first_failure.empty()) {
      first_failure = Fmt("; set %d: eer %.6f vs %.6f, threshold %.6f vs [%.6f, %.6f]",
                          i, cal.eer, scan.eer, cal.threshold,
                          scan.interval_lo, scan.interval_hi);
    }
  }
  Outcome o;
  o.seconds = Seconds(start);
  o.pass = agree == 50 && o.seconds < 5.0;
  o.detail = Fmt("%d/50 score sets agree with the brute-force scan", agree) +
             first_failure;
  return o;
}

// --- 10: Griffin-Lim -------------------------------------------------------

Outcome GriffinLimCriterion(const Corpus& corpus) {
  const auto start = Clock::now();
  const std::vector<int> held = corpus.Indices(true);
  double worst_final = 0.0, worst_rise = 0.0;
  for (int k = 0; k < 10; ++k) {
    const Utterance& u = corpus.utterances[held[k * held.size() / 10]];
    const PhaseReconstruction rec = ReconstructPhase(
        MelToLinearMagnitude(u.mel), corpus.stft, kDefaultGriffinLimIterations,
        static_cast<std::uint64_t>(k));
    worst_final = std::max(worst_final, rec.convergence.back());
    for (std::size_t i = 1; i < rec.convergence.size(); ++i) {
      worst_rise =
          std::max(worst_rise, rec.convergence[i] - rec.convergence[i - 1]);
    }
  }
  Outcome o;
  o.seconds = Seconds(start);
  o.pass = worst_final < 0.2 && worst_rise <= 1e-6 && o.seconds < 60.0;
  o.detail = Fmt("worst spectral convergence after 60 iterations %.4f, "
                 "largest per-iteration increase %.2e",
                 worst_final, worst_rise);
  return o;
}

// --- shared trained system -------------------------------------------------

struct World {
  ExperimentConfig config;
  Corpus corpus;
  SystemOptions options;
  TrainedSystem system;
  double system_seconds = 0.0;
  double deployed_seconds = 0.0;
  VcModel proxy;
  double proxy_seconds = 0.0;
  std::optional<EvaluationSet> set;
  double set_seconds = 0.0;
  std::vector<ExperimentRow> all_rows;
};

AttackSettings Settings(const World& w, AttackMethod method, double fraction,
                        int jobs) {
  AttackSettings s;
  s.method = method;
  s.epsilon_fraction = fraction;
  s.lambda = w.config.lambda;
  s.lr = w.config.lr;
  s.iterations = w.config.iterations;
  s.seed = w.config.seeds.attack;
  s.jobs = jobs;
  return s;
}

Outcome TrainingCriterion(const World& w) {
  const TrainedVc& vc = w.system.deployed;
  const double first = vc.autoencoder_loss.front();
  const double last = vc.autoencoder_loss.back();
  Outcome o;
  o.seconds = w.deployed_seconds;
  o.pass = vc.speaker_accuracy >= 0.9 && last <= 0.2 * first &&
           vc.autoencoder_loss.size() == 200 && o.seconds < 600.0;
  o.detail = Fmt("held-out speaker accuracy %.4f; reconstruction loss "
                 "epoch 1 %.4f, epoch %zu %.4f (ratio %.3f)",
                 vc.speaker_accuracy, first, vc.autoencoder_loss.size(), last,
                 last / first);
  return o;
}

Outcome ConversionCriterion(const World& w) {
  Outcome o;
  o.seconds = w.set_seconds;
  if (!w.set) {
    o.detail = "evaluation set could not be built";
    return o;
  }
  const EvaluationSet& set = *w.set;
  const double eval_acc = BaselineOutputAccuracy(
      w.system.deployed.model, w.corpus, set, w.system.verifier,
      w.system.calibration);
  // Acceptance of F(t, x) with the attack-time content utterance.
  std::vector<MelSpectrogram> outs;
  for (const auto& tr : set.triples) {
    outs.push_back(w.system.deployed.model.Convert(
        w.corpus.utterances[tr.content].mel,
        w.corpus.utterances[tr.defended].mel));
  }
  std::vector<VerificationPair> pairs;
  for (std::size_t i = 0; i < outs.size(); ++i) {
    pairs.push_back({&w.corpus.utterances[set.triples[i].defended].mel, &outs[i]});
  }
  const double attack_acc = VerificationAccuracy(
      w.system.verifier, w.system.calibration, pairs);
  o.pass = set.triples.size() == 30 && eval_acc == 1.0 && attack_acc == 1.0 &&
           o.seconds < 120.0;
  o.detail = Fmt("%zu triples (pass rate %.3f over %d attempts); original-"
                 "output accuracy %.4f (attack content) and %.4f (evaluation "
                 "content)",
                 set.triples.size(), set.pass_rate(), set.attempts, attack_acc,
                 eval_acc);
  return o;
}

struct WhiteBoxResults {
  std::map<AttackMethod, ExperimentRow> rows;
  double seconds = 0.0;
};

Outcome WhiteBoxCriterion(const WhiteBoxResults& r) {
  Outcome o;
  o.seconds = r.seconds;
  const ExperimentRow& emb = r.rows.at(AttackMethod::kEmbedding);
  bool ok = emb.input_accuracy >= 0.85 && emb.output_accuracy <= 0.55 &&
            emb.input_accuracy - emb.output_accuracy >= 0.30;
  std::ostringstream d;
  for (const auto& [method, row] : r.rows) {
    const double gap = row.input_accuracy - row.output_accuracy;
    ok = ok && gap >= 0.25;
    d << MethodName(method) << " in " << Fmt("%.2f", row.input_accuracy)
      << " out " << Fmt("%.2f", row.output_accuracy) << " gap "
      << Fmt("%.2f", gap) << "; ";
  }
  o.pass = ok && o.seconds < 1800.0;
  o.detail = d.str() + Fmt("%.0f s", o.seconds);
  return o;
}

Outcome SweepCriterion(const std::vector<ExperimentRow>& rows, double seconds) {
  Outcome o;
  o.seconds = seconds;
  const ExperimentRow& lo = rows.front();
  const ExperimentRow& hi = rows.back();
  o.pass = lo.epsilon == 0.01 && hi.epsilon == 0.2 &&
           lo.input_accuracy >= 0.95 &&
           hi.input_accuracy <= lo.input_accuracy - 0.2 &&
           hi.output_accuracy <= lo.output_accuracy - 0.2 && seconds < 7200.0;
  std::ostringstream d;
  d << MethodName(lo.method) << " " << ScenarioName(lo.scenario) << " in/out:";
  for (const auto& r : rows) {
    d << Fmt(" %.3g=%.2f/%.2f", r.epsilon, r.input_accuracy, r.output_accuracy);
  }
  o.detail = d.str();
  return o;
}

Outcome BlackBoxCriterion(const ExperimentRow& black, const ExperimentRow& white,
                          double baseline, double seconds) {
  Outcome o;
  o.seconds = seconds;
  const double drop = baseline - black.output_accuracy;
  o.pass = drop >= 0.2 && black.input_accuracy >= 0.85 &&
           white.output_accuracy <= black.output_accuracy + 0.05 &&
           seconds < 2700.0;
  o.detail = Fmt("baseline output %.2f, black-box in %.2f out %.2f (drop "
                 "%.2f), white-box out %.2f",
                 baseline, black.input_accuracy, black.output_accuracy, drop,
                 white.output_accuracy);
  return o;
}

const std::set<std::string>& NonClippingOps() {
  static const std::set<std::string> ops = {
      "leaf", "matmul", "add", "sub", "mul", "scale", "affine",
      "broadcast_add", "repeat_cols", "concat_rows", "tanh",
      "mean_over_cols", "sum", "l2_distance", "normalize"};
  return ops;
}

Outcome BoundCriterion(const std::vector<ExperimentRow>& rows) {
  Outcome o;
  int attacks = 0, violations = 0, clipping_graphs = 0;
  double worst_ratio = 0.0;
  std::set<std::string> foreign;
  for (const ExperimentRow& row : rows) {
    for (const PairOutcome& p : row.outcomes) {
      ++attacks;
      worst_ratio = std::max(worst_ratio, p.max_abs_delta / row.epsilon_abs);
      if (!(p.max_abs_delta < row.epsilon_abs)) ++violations;
      bool clean = !p.graph_ops.empty();
      for (const std::string& op : p.graph_ops) {
        if (!NonClippingOps().count(op)) {
          clean = false;
          foreign.insert(op);
        }
      }
      if (!clean) ++clipping_graphs;
    }
  }
  o.pass = attacks > 0 && violations == 0 && clipping_graphs == 0;
  o.detail = Fmt("%d attacks, %d bound violations, max |delta|/eps_abs "
                 "%.6f, %d graphs with ops outside the non-clipping set",
                 attacks, violations, worst_ratio, clipping_graphs);
  for (const std::string& op : foreign) o.detail += " [" + op + "]";
  return o;
}

// --- 9: determinism via the CLI --------------------------------------------

std::string Slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome DeterminismCriterion(const std::string& cli, const std::string& work) {
  const auto start = Clock::now();
  Outcome o;
  if (cli.empty()) {
    o.detail = "no CLI path given";
    return o;
  }
  namespace fs = std::filesystem;
  fs::create_directories(work);
  const fs::path cfg = fs::path(work) / "determinism.json";
  {
    std::ofstream out(cfg);
    out << R"({"scenario": "black_box", "method": "embedding",
  "epsilon_sweep": [0.05, 0.2], "n_pairs": 6, "speakers": 8,
  "utterances_per_speaker": 12, "held_out_per_speaker": 4,
  "speaker_epochs": 40, "autoencoder_epochs": 40, "iterations": 150})";
  }
  std::vector<std::string> csv;
  for (const char* run : {"run_a", "run_b"}) {
    const fs::path dir = fs::path(work) / run;
    fs::remove_all(dir);
    const std::string cmd = "\"" + cli + "\" experiment --config \"" +
                            cfg.string() + "\" --out-dir \"" + dir.string() +
                            "\" > \"" + (fs::path(work) / run).string() +
                            ".log\" 2>&1";
    const int rc = std::system(cmd.c_str());
    if (rc != 0) {
      o.detail = Fmt("experiment run %s failed (status %d)", run, rc);
      o.seconds = Seconds(start);
      return o;
    }
    csv.push_back(Slurp(dir / "results.csv"));
  }
  o.seconds = Seconds(start);
  const int lines = static_cast<int>(std::count(csv[0].begin(), csv[0].end(), '\n'));
  o.pass = !csv[0].empty() && csv[0] == csv[1];
  o.detail = Fmt("two experiment runs, %d CSV lines, %s", lines,
                 o.pass ? "byte-identical" : "DIFFERENT");
  return o;
}

}  // namespace
}  // namespace advvc

int main(int argc, char** argv) {
  using namespace advvc;
  CLI::App app{"Acceptance run"};
  std::string cli;
  std::string work = "acceptance_work";
  int jobs = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--cli", cli, "Path to the advvc executable");
  app.add_option("--work-dir", work, "Scratch directory");
  app.add_option("--jobs", jobs, "Concurrent attacks");
  CLI11_PARSE(app, argc, argv);
  std::filesystem::create_directories(work);

  std::map<int, std::pair<std::string, Outcome>> results;
  auto record = [&](int id, const std::string& name, Outcome o) {
    Progress(Fmt("%d %s: %s", id, o.pass ? "PASS" : "FAIL", o.detail.c_str()));
    results[id] = {name, std::move(o)};
  };
  auto guarded = [&](int id, const std::string& name,
                     const std::function<Outcome()>& fn) {
    try {
      record(id, name, fn());
    } catch (const std::exception& e) {
      Outcome o;
      o.detail = std::string("error: ") + e.what();
      record(id, name, o);
    }
  };

  guarded(1, "gradient correctness", GradientCriterion);
  guarded(3, "EER oracle equivalence", EerCriterion);

  World w;
  w.config.jobs = jobs;
  Progress("generating the default corpus");
  w.corpus = GenerateCorpus(w.config.corpus_options());
  w.options = SystemOptionsFrom(w.config);
  guarded(10, "Griffin-Lim quality", [&] { return GriffinLimCriterion(w.corpus); });

  Progress("training deployed model, verifier and calibration");
  try {
    const auto start = Clock::now();
    w.system = TrainSystem(w.corpus, w.options);
    w.deployed_seconds = Seconds(start);
  } catch (const std::exception& e) {
    record(4, "training sanity",
           {false, std::string("error: ") + e.what(), 0.0});
    return 1;
  }
  guarded(4, "training sanity", [&] { return TrainingCriterion(w); });
  Progress(Fmt("verifier accuracy %.4f, threshold %.4f, EER %.4f",
               w.system.verifier_accuracy, w.system.calibration.threshold,
               w.system.calibration.eer));

  try {
    const auto start = Clock::now();
    w.set = BuildEvaluationSet(w.system.deployed.model, w.corpus,
                               w.system.verifier, w.system.calibration,
                               w.config.n_pairs, w.config.seeds.evaluation);
    w.set_seconds = Seconds(start);
  } catch (const std::exception& e) {
    Progress(std::string("evaluation set: ") + e.what());
  }
  guarded(5, "conversion baseline", [&] { return ConversionCriterion(w); });
  if (!w.set) return 1;
  const VcModel& deployed = w.system.deployed.model;
  const double baseline = BaselineOutputAccuracy(
      deployed, w.corpus, *w.set, w.system.verifier, w.system.calibration);

  WhiteBoxResults white;
  guarded(6, "white-box defense gap", [&] {
    const auto start = Clock::now();
    for (AttackMethod m : {AttackMethod::kEmbedding,
                           AttackMethod::kTargetedEndToEnd,
                           AttackMethod::kFeedback}) {
      Progress("white-box " + MethodName(m));
      white.rows.emplace(
          m, RunWhiteBox(deployed, w.corpus, *w.set, Settings(w, m, 0.05, jobs),
                         w.system.verifier, w.system.calibration));
      w.all_rows.push_back(white.rows.at(m));
    }
    white.seconds = Seconds(start);
    return WhiteBoxCriterion(white);
  });

  std::vector<ExperimentRow> sweep;
  double sweep_seconds = 0.0;
  guarded(7, "perturbation sweep shape", [&] {
    Progress("training proxy model");
    const auto start = Clock::now();
    w.proxy = TrainVc(w.corpus, w.options, w.config.seeds.proxy).model;
    w.proxy_seconds = Seconds(start);
    for (double eps : w.config.epsilon_sweep) {
      Progress(Fmt("black-box embedding at %.3g", eps));
      sweep.push_back(RunBlackBox(deployed, w.proxy, w.corpus, *w.set,
                                  Settings(w, AttackMethod::kEmbedding, eps, jobs),
                                  w.system.verifier, w.system.calibration));
      w.all_rows.push_back(sweep.back());
    }
    sweep_seconds = Seconds(start);
    WriteCsv(sweep, (std::filesystem::path(work) / "sweep.csv").string());
    EmitPlot(sweep, (std::filesystem::path(work) / "sweep.svg").string());
    return SweepCriterion(sweep, sweep_seconds);
  });

  guarded(8, "black-box transfer", [&] {
    const ExperimentRow* black = nullptr;
    for (const auto& r : sweep) {
      if (r.epsilon == 0.05) black = &r;
    }
    if (black == nullptr || !white.rows.count(AttackMethod::kEmbedding)) {
      return Outcome{false, "missing white-box or black-box rows", 0.0};
    }
    return BlackBoxCriterion(*black, white.rows.at(AttackMethod::kEmbedding),
                             baseline,
                             w.proxy_seconds + sweep_seconds / sweep.size());
  });

  guarded(2, "perturbation bound", [&] { return BoundCriterion(w.all_rows); });
  guarded(9, "determinism", [&] {
    return DeterminismCriterion(cli, (std::filesystem::path(work) / "determinism").string());
  });

  bool all = true;
  for (const auto& [id, entry] : results) {
    const auto& [name, o] = entry;
    std::printf("%s %d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id,
                name.c_str(), o.detail.c_str(), o.seconds);
    all = all && o.pass;
  }
  std::fflush(stdout);
  return all ? 0 : 1;
}
