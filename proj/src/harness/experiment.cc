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

#include "advvc/harness/experiment.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "advvc/base/errors.h"
#include "advvc/base/parallel.h"
#include "advvc/base/random.h"

namespace advvc {
namespace {

std::string Fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string Compact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string XmlEscape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

template <typename T>
void Take(const nlohmann::json& j, const char* key, T& field) {
  if (!j.contains(key)) return;
  try {
    field = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

std::string ScenarioName(Scenario scenario) {
  return scenario == Scenario::kWhiteBox ? "white_box" : "black_box";
}

Scenario ParseScenario(const std::string& name) {
  if (name == "white_box") return Scenario::kWhiteBox;
  if (name == "black_box") return Scenario::kBlackBox;
  throw ConfigError("unknown scenario '" + name +
                    "' (expected white_box or black_box)");
}

void ExperimentConfig::Validate() const {
  if (n_pairs < 1) throw ConfigError("n_pairs must be >= 1");
  if (epsilon_sweep.empty()) throw ConfigError("epsilon sweep is empty");
  for (std::size_t i = 0; i < epsilon_sweep.size(); ++i) {
    if (!(epsilon_sweep[i] > 0.0) || !std::isfinite(epsilon_sweep[i])) {
      throw ConfigError("epsilon values must be positive");
    }
    if (i > 0 && !(epsilon_sweep[i] > epsilon_sweep[i - 1])) {
      throw ConfigError("epsilon values must be strictly increasing");
    }
  }
  if (speakers < 2) throw ConfigError("need at least 2 speakers");
  if (held_out_per_speaker < 2 ||
      utterances_per_speaker - held_out_per_speaker < 4) {
    throw ConfigError(
        "each speaker needs >= 4 training and >= 2 held-out utterances");
  }
  if (speaker_epochs < 1 || autoencoder_epochs < 1) {
    throw ConfigError("epochs must be >= 1");
  }
  if (verifier_hidden < 1) throw ConfigError("verifier_hidden must be >= 1");
  if (verifier_adversarial_radius < 0.0 || embedding_noise < 0.0) {
    throw ConfigError("noise and radius must be non-negative");
  }
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  AttackConfig attack;
  attack.lambda = lambda;
  attack.lr = lr;
  attack.iterations = iterations;
  attack.Validate();
}

CorpusOptions ExperimentConfig::corpus_options() const {
  CorpusOptions o;
  o.speakers = speakers;
  o.utterances_per_speaker = utterances_per_speaker;
  o.held_out_per_speaker = held_out_per_speaker;
  o.seed = seeds.corpus;
  return o;
}

nlohmann::json ToJson(const ExperimentConfig& c) {
  return {{"scenario", ScenarioName(c.scenario)},
          {"method", MethodName(c.method)},
          {"epsilon_sweep", c.epsilon_sweep},
          {"n_pairs", c.n_pairs},
          {"seeds",
           {{"corpus", c.seeds.corpus},
            {"model", c.seeds.model},
            {"proxy", c.seeds.proxy},
            {"verifier", c.seeds.verifier},
            {"attack", c.seeds.attack},
            {"calibration", c.seeds.calibration},
            {"evaluation", c.seeds.evaluation}}},
          {"speakers", c.speakers},
          {"utterances_per_speaker", c.utterances_per_speaker},
          {"held_out_per_speaker", c.held_out_per_speaker},
          {"speaker_epochs", c.speaker_epochs},
          {"autoencoder_epochs", c.autoencoder_epochs},
          {"embedding_noise", c.embedding_noise},
          {"verifier_hidden", c.verifier_hidden},
          {"verifier_adversarial_radius", c.verifier_adversarial_radius},
          {"lambda", c.lambda},
          {"lr", c.lr},
          {"iterations", c.iterations},
          {"jobs", c.jobs}};
}

ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j,
                                          const ExperimentConfig& base) {
  if (!j.is_object()) throw ConfigError("experiment config must be an object");
  const nlohmann::json known = ToJson(base);
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  ExperimentConfig c = base;
  if (j.contains("scenario")) {
    std::string s;
    Take(j, "scenario", s);
    c.scenario = ParseScenario(s);
  }
  if (j.contains("method")) {
    std::string m;
    Take(j, "method", m);
    c.method = ParseMethod(m);
  }
  Take(j, "epsilon_sweep", c.epsilon_sweep);
  Take(j, "n_pairs", c.n_pairs);
  if (j.contains("seeds")) {
    const nlohmann::json& s = j.at("seeds");
    if (!s.is_object()) throw ConfigError("seeds must be an object");
    for (const auto& [key, value] : s.items()) {
      if (!known.at("seeds").contains(key)) {
        throw ConfigError("unknown seed '" + key + "'");
      }
    }
    Take(s, "corpus", c.seeds.corpus);
    Take(s, "model", c.seeds.model);
    Take(s, "proxy", c.seeds.proxy);
    Take(s, "verifier", c.seeds.verifier);
    Take(s, "attack", c.seeds.attack);
    Take(s, "calibration", c.seeds.calibration);
    Take(s, "evaluation", c.seeds.evaluation);
  }
  Take(j, "speakers", c.speakers);
  Take(j, "utterances_per_speaker", c.utterances_per_speaker);
  Take(j, "held_out_per_speaker", c.held_out_per_speaker);
  Take(j, "speaker_epochs", c.speaker_epochs);
  Take(j, "autoencoder_epochs", c.autoencoder_epochs);
  Take(j, "embedding_noise", c.embedding_noise);
  Take(j, "verifier_hidden", c.verifier_hidden);
  Take(j, "verifier_adversarial_radius", c.verifier_adversarial_radius);
  Take(j, "lambda", c.lambda);
  Take(j, "lr", c.lr);
  Take(j, "iterations", c.iterations);
  Take(j, "jobs", c.jobs);
  c.Validate();
  return c;
}

SystemOptions SystemOptionsFrom(const ExperimentConfig& config) {
  SystemOptions o;
  o.speaker_epochs = config.speaker_epochs;
  o.autoencoder_epochs = config.autoencoder_epochs;
  o.embedding_noise = config.embedding_noise;
  o.verifier_hidden = config.verifier_hidden;
  o.verifier_adversarial_radius = config.verifier_adversarial_radius;
  o.model_seed = config.seeds.model;
  o.verifier_seed = config.seeds.verifier;
  o.calibration_seed = config.seeds.calibration;
  return o;
}

TrainedVc TrainVc(const Corpus& corpus, const SystemOptions& options,
                  std::uint64_t seed) {
  const std::vector<int> train = corpus.Indices(false);
  const std::vector<int> held = corpus.Indices(true);
  SpeakerTrainingOptions so;
  so.hidden = options.dims.hidden;
  so.dim = options.dims.speaker_dim;
  so.epochs = options.speaker_epochs;
  so.seed = seed;
  TrainedSpeakerEncoder speaker = TrainSpeakerEncoder(corpus, train, so);

  AutoencoderTrainingOptions ao;
  ao.dims = options.dims;
  ao.epochs = options.autoencoder_epochs;
  ao.seed = MixSeed(seed, 0xae);
  ao.embedding_noise = options.embedding_noise;
  TrainedAutoencoder ae = TrainAutoencoder(corpus, train, speaker.encoder, ao);

  TrainedVc out;
  out.model = std::move(ae.model);
  out.speaker_accuracy =
      held.empty() ? 0.0 : ClassificationAccuracy(speaker, corpus, held);
  out.speaker_loss = std::move(speaker.epoch_loss);
  out.autoencoder_loss = std::move(ae.epoch_loss);
  return out;
}

TrainedSystem TrainSystem(const Corpus& corpus, const SystemOptions& options) {
  TrainedSystem sys;
  sys.deployed = TrainVc(corpus, options, options.model_seed);

  SpeakerTrainingOptions vo;
  vo.hidden = options.verifier_hidden;
  vo.dim = options.dims.speaker_dim;
  vo.epochs = options.speaker_epochs;
  vo.seed = options.verifier_seed;
  vo.adversarial_radius = options.verifier_adversarial_radius;
  TrainedSpeakerEncoder verifier =
      TrainSpeakerEncoder(corpus, corpus.Indices(false), vo);
  const std::vector<int> held = corpus.Indices(true);
  sys.verifier = verifier.encoder;
  sys.verifier_accuracy = ClassificationAccuracy(verifier, corpus, held);
  sys.calibration = CalibrateThreshold(sys.verifier, corpus, held,
                                       options.calibration_seed);
  return sys;
}

EvaluationSet BuildEvaluationSet(const VcModel& model, const Corpus& corpus,
                                 const VerifierModel& verifier,
                                 const EerCalibration& calibration,
                                 int n_pairs, std::uint64_t seed) {
  if (n_pairs < 1) throw ConfigError("n_pairs must be >= 1");
  const std::vector<int> pool = corpus.Indices(true);
  std::vector<int> order = pool;
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  EvaluationSet set;
  for (int x : order) {
    if (static_cast<int>(set.triples.size()) == n_pairs) break;
    const int speaker = corpus.utterances[x].speaker;
    std::vector<int> others;
    for (int idx : pool) {
      if (corpus.utterances[idx].speaker != speaker) others.push_back(idx);
    }
    if (others.size() < 2) continue;
    std::uniform_int_distribution<std::size_t> pick(0, others.size() - 1);
    const int t = others[pick(rng)];
    int t_eval = others[pick(rng)];
    while (t_eval == t) t_eval = others[pick(rng)];
    const std::uint64_t target_seed = rng();
    ++set.attempts;

    const MelSpectrogram& xm = corpus.utterances[x].mel;
    if (!VerifyPair(verifier, xm, model.Convert(corpus.utterances[t].mel, xm),
                    calibration)
             .same ||
        !VerifyPair(verifier, xm,
                    model.Convert(corpus.utterances[t_eval].mel, xm),
                    calibration)
             .same) {
      continue;
    }
    EvaluationTriple tr;
    tr.defended = x;
    tr.content = t;
    tr.evaluation_content = t_eval;
    tr.target = SelectTarget(corpus, pool, speaker, target_seed);
    set.triples.push_back(tr);
  }
  if (static_cast<int>(set.triples.size()) < n_pairs) {
    throw InsufficientConversionError(
        "only " + std::to_string(set.triples.size()) + " of " +
        std::to_string(set.attempts) +
        " conversions passed verification (pass rate " +
        Fixed4(set.pass_rate()) + "), " + std::to_string(n_pairs) +
        " needed");
  }
  return set;
}

ExperimentRow RunTransfer(const VcModel& attacked, const VcModel& deployed,
                          Scenario scenario, const Corpus& corpus,
                          const EvaluationSet& set,
                          const AttackSettings& settings,
                          const VerifierModel& verifier,
                          const EerCalibration& calibration) {
  if (set.triples.empty()) throw ContractError("empty evaluation set");
  ExperimentRow row;
  row.epsilon = settings.epsilon_fraction;
  row.epsilon_abs =
      settings.epsilon_fraction * deployed.stats().dynamic_range();
  row.method = settings.method;
  row.scenario = scenario;
  row.outcomes.resize(set.triples.size());

  const int n = static_cast<int>(set.triples.size());
  ParallelFor(n, settings.jobs, [&](int i) {
    const EvaluationTriple& tr = set.triples[i];
    AttackConfig cfg;
    cfg.method = settings.method;
    cfg.epsilon = row.epsilon_abs;
    cfg.lambda = settings.lambda;
    cfg.lr = settings.lr;
    cfg.iterations = settings.iterations;
    cfg.seed = MixSeed(settings.seed, static_cast<std::uint64_t>(i));
    const MelSpectrogram& x = corpus.utterances[tr.defended].mel;
    const MelSpectrogram* y = IsTargeted(settings.method)
                                  ? &corpus.utterances[tr.target].mel
                                  : nullptr;
    AttackResult res =
        RunAttack(attacked, cfg, corpus.utterances[tr.content].mel, x, y);

    PairOutcome& o = row.outcomes[i];
    const VerificationDecision in =
        VerifyPair(verifier, x, res.adversarial_input, calibration);
    const VerificationDecision out = VerifyPair(
        verifier, x,
        deployed.Convert(corpus.utterances[tr.evaluation_content].mel,
                         res.adversarial_input),
        calibration);
    o.input_similarity = in.similarity;
    o.input_same = in.same;
    o.output_similarity = out.similarity;
    o.output_same = out.same;
    o.max_abs_delta = res.delta.cwiseAbs().maxCoeff();
    o.initial_loss = res.loss_trace.front();
    o.final_loss = res.loss_trace.back();
    o.graph_ops = std::move(res.graph_ops);
  });

  int in_same = 0, out_same = 0;
  for (const PairOutcome& o : row.outcomes) {
    in_same += o.input_same;
    out_same += o.output_same;
  }
  row.input_accuracy = static_cast<double>(in_same) / n;
  row.output_accuracy = static_cast<double>(out_same) / n;
  return row;
}

ExperimentRow RunWhiteBox(const VcModel& model, const Corpus& corpus,
                          const EvaluationSet& set,
                          const AttackSettings& settings,
                          const VerifierModel& verifier,
                          const EerCalibration& calibration) {
  return RunTransfer(model, model, Scenario::kWhiteBox, corpus, set, settings,
                     verifier, calibration);
}

ExperimentRow RunBlackBox(const VcModel& deployed, const VcModel& proxy,
                          const Corpus& corpus, const EvaluationSet& set,
                          const AttackSettings& settings,
                          const VerifierModel& verifier,
                          const EerCalibration& calibration) {
  if (!(proxy.dims() == deployed.dims()) ||
      !(proxy.stft() == deployed.stft())) {
    throw ConfigError("proxy and deployed models differ in shape");
  }
  return RunTransfer(proxy, deployed, Scenario::kBlackBox, corpus, set,
                     settings, verifier, calibration);
}

double BaselineOutputAccuracy(const VcModel& model, const Corpus& corpus,
                              const EvaluationSet& set,
                              const VerifierModel& verifier,
                              const EerCalibration& calibration) {
  std::vector<MelSpectrogram> outputs;
  outputs.reserve(set.triples.size());
  for (const EvaluationTriple& tr : set.triples) {
    outputs.push_back(model.Convert(corpus.utterances[tr.evaluation_content].mel,
                                    corpus.utterances[tr.defended].mel));
  }
  std::vector<VerificationPair> pairs;
  for (std::size_t i = 0; i < set.triples.size(); ++i) {
    pairs.push_back({&corpus.utterances[set.triples[i].defended].mel,
                     &outputs[i]});
  }
  return VerificationAccuracy(verifier, calibration, pairs);
}

std::string FormatCsv(const std::vector<ExperimentRow>& rows) {
  std::string out = "epsilon,method,scenario,input_acc,output_acc\n";
  for (const ExperimentRow& r : rows) {
    out += Fixed4(r.epsilon) + "," + MethodName(r.method) + "," +
           ScenarioName(r.scenario) + "," + Fixed4(r.input_accuracy) + "," +
           Fixed4(r.output_accuracy) + "\n";
  }
  return out;
}

void WriteCsv(const std::vector<ExperimentRow>& rows, const std::string& path) {
  WriteText(path, FormatCsv(rows));
}

std::string RenderPlot(const std::vector<ExperimentRow>& rows,
                       const std::string& title) {
  if (rows.empty()) throw ContractError("nothing to plot");
  constexpr double kWidth = 640, kHeight = 420;
  constexpr double kLeft = 70, kRight = 150, kTop = 50, kBottom = 60;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  double lo = rows.front().epsilon, hi = rows.front().epsilon;
  for (const auto& r : rows) {
    lo = std::min(lo, r.epsilon);
    hi = std::max(hi, r.epsilon);
  }
  auto px = [&](double eps) {
    if (hi == lo) return kLeft + plot_w / 2;
    return kLeft + plot_w * (eps - lo) / (hi - lo);
  };
  auto py = [&](double acc) {
    return kTop + plot_h * (1.0 - std::clamp(acc, 0.0, 1.0));
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" fill=\"white\"/>\n";
  std::string heading = title;
  if (heading.empty()) {
    heading = MethodName(rows.front().method) + " attack, " +
              ScenarioName(rows.front().scenario);
  }
  svg << "<text x=\"" << kLeft << "\" y=\"28\" font-family=\"sans-serif\" "
      << "font-size=\"16\">" << XmlEscape(heading) << "</text>\n";

  // Axes and grid.
  svg << "<g stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\""
      << kLeft + plot_w << "\" y2=\"" << kTop + plot_h << "\"/>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << kTop + plot_h << "\"/>\n</g>\n";
  svg << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int k = 0; k <= 5; ++k) {
    const double acc = k / 5.0;
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << py(acc) << "\" x2=\""
        << kLeft + plot_w << "\" y2=\"" << py(acc)
        << "\" stroke=\"#dddddd\"/>\n"
        << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(acc) + 4
        << "\" text-anchor=\"end\">" << Compact(acc) << "</text>\n";
  }
  std::vector<double> ticks;
  for (const auto& r : rows) {
    if (std::find(ticks.begin(), ticks.end(), r.epsilon) == ticks.end()) {
      ticks.push_back(r.epsilon);
    }
  }
  for (double e : ticks) {
    svg << "<text x=\"" << px(e) << "\" y=\"" << kTop + plot_h + 18
        << "\" text-anchor=\"middle\">" << Compact(e) << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 15
      << "\" text-anchor=\"middle\" font-size=\"13\">"
      << "perturbation scale (fraction of log-mel range)</text>\n"
      << "<text x=\"18\" y=\"" << kTop + plot_h / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
      << kTop + plot_h / 2 << ")\">verification accuracy</text>\n</g>\n";

  struct Series {
    const char* label;
    const char* color;
    bool input;
  };
  const Series series[] = {{"adversarial input", "#1f5fbf", true},
                           {"adversarial output", "#c0392b", false}};
  int legend_row = 0;
  for (const Series& s : series) {
    std::ostringstream points;
    for (const auto& r : rows) {
      const double acc = s.input ? r.input_accuracy : r.output_accuracy;
      points << px(r.epsilon) << "," << py(acc) << " ";
    }
    std::string pts = points.str();
    pts.pop_back();
    svg << "<polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"2\" points=\"" << pts << "\"/>\n";
    for (const auto& r : rows) {
      const double acc = s.input ? r.input_accuracy : r.output_accuracy;
      svg << "<circle cx=\"" << px(r.epsilon) << "\" cy=\"" << py(acc)
          << "\" r=\"3.5\" fill=\"" << s.color << "\"/>\n";
    }
    const double ly = kTop + 10 + 20 * legend_row++;
    svg << "<line x1=\"" << kLeft + plot_w + 12 << "\" y1=\"" << ly
        << "\" x2=\"" << kLeft + plot_w + 32 << "\" y2=\"" << ly
        << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << kLeft + plot_w + 38 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void EmitPlot(const std::vector<ExperimentRow>& rows, const std::string& path,
              const std::string& title) {
  WriteText(path, RenderPlot(rows, title));
}

ExperimentReport RunExperiment(const ExperimentConfig& config) {
  config.Validate();
  ExperimentReport report;
  report.config = config;
  const Corpus corpus = GenerateCorpus(config.corpus_options());
  const SystemOptions options = SystemOptionsFrom(config);
  report.system = TrainSystem(corpus, options);

  VcModel proxy;
  const bool black_box = config.scenario == Scenario::kBlackBox;
  if (black_box) {
    if (config.seeds.proxy == config.seeds.model) {
      report.warnings.push_back(
          "proxy seed equals the deployed seed: the black-box run degenerates "
          "to white-box");
    }
    proxy = TrainVc(corpus, options, config.seeds.proxy).model;
  }
  const VcModel& deployed = report.system.deployed.model;
  report.evaluation_set = BuildEvaluationSet(
      deployed, corpus, report.system.verifier, report.system.calibration,
      config.n_pairs, config.seeds.evaluation);

  for (double eps : config.epsilon_sweep) {
    AttackSettings s;
    s.method = config.method;
    s.epsilon_fraction = eps;
    s.lambda = config.lambda;
    s.lr = config.lr;
    s.iterations = config.iterations;
    s.seed = config.seeds.attack;
    s.jobs = config.jobs;
    report.rows.push_back(
        black_box ? RunBlackBox(deployed, proxy, corpus,
                                report.evaluation_set, s,
                                report.system.verifier,
                                report.system.calibration)
                  : RunWhiteBox(deployed, corpus, report.evaluation_set, s,
                                report.system.verifier,
                                report.system.calibration));
  }
  return report;
}

void WriteExperimentArtifacts(const ExperimentReport& report,
                              const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path d(dir);
  WriteCsv(report.rows, (d / "results.csv").string());
  EmitPlot(report.rows, (d / "accuracy.svg").string());
  WriteCalibrationReport((d / "calibration.json").string(),
                         report.system.calibration);
}

}  // namespace advvc
