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

// Command-line front end: corpus generation, training, attacks, conversion,
// verification and full experiments.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "advvc/attack/attack.h"
#include "advvc/audio/corpus.h"
#include "advvc/audio/griffin_lim.h"
#include "advvc/audio/spectrogram.h"
#include "advvc/audio/wav.h"
#include "advvc/base/errors.h"
#include "advvc/harness/corpus_io.h"
#include "advvc/harness/experiment.h"
#include "advvc/model/checkpoint.h"
#include "advvc/verification/verification.h"

#ifndef ADVVC_VERSION
#define ADVVC_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace advvc {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

// Thrown for problems the user can fix on the command line.
class UsageError : public Error {
 public:
  using Error::Error;
};

std::string Timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out_dir = "out";
  int jobs = 1;
};

void AddGlobals(CLI::App* app, Globals& g, const std::string& seed_role) {
  app->add_option("--seed", g.seed, "Seed (" + seed_role + ")");
  app->add_option("--config", g.config,
                  "JSON config file; its values override flags")
      ->check(CLI::ExistingFile);
  app->add_option("--out-dir", g.out_dir, "Directory for all outputs");
  app->add_option("--jobs", g.jobs, "Concurrent attack instances")
      ->check(CLI::PositiveNumber);
}

json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("config " + path + " is not valid JSON: " + e.what());
  }
}

// Overlays the config file on the resolved flag values. Keys must already
// exist in `params`.
void ApplyConfig(const std::string& path, json& params) {
  if (path.empty()) return;
  const json cfg = ReadJsonFile(path);
  if (!cfg.is_object()) throw UsageError("config must be a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    if (!params.contains(key)) {
      throw UsageError("unknown config key '" + key + "'");
    }
    if (params[key].is_number() && !value.is_number()) {
      throw UsageError("config key '" + key + "' must be a number");
    }
    params[key] = value;
  }
}

void WriteJson(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

void WriteManifest(const fs::path& dir, const std::string& subcommand,
                   const json& params, const json& seeds,
                   const std::string& started, const json& extra) {
  json m = {{"tool", "advvc"},
            {"version", ADVVC_VERSION},
            {"subcommand", subcommand},
            {"config", params},
            {"seeds", seeds},
            {"started_at", started},
            {"finished_at", Timestamp()}};
  if (!extra.is_null()) m["results"] = extra;
  WriteJson(dir / "manifest.json", m);
}

MelSpectrogram LoadMelInput(const std::string& path, const StftConfig& stft) {
  const std::string ext = fs::path(path).extension().string();
  if (ext == ".wav" || ext == ".WAV") {
    const Waveform wave = LoadWav(path);
    if (wave.sample_rate != stft.sample_rate) {
      throw InputError(path + ": sample rate " +
                       std::to_string(wave.sample_rate) + " does not match " +
                       std::to_string(stft.sample_rate));
    }
    return ComputeMelSpectrogram(wave, stft);
  }
  MelSpectrogram mel = LoadSpectrogram(path);
  if (!(mel.config == stft)) {
    throw DimensionError(path + ": spectrogram settings differ from the model");
  }
  return mel;
}

fs::path PrepareOutDir(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

// ---------------------------------------------------------------------------

struct GenCorpusArgs {
  Globals g;
  int speakers = 20;
  int utterances = 24;
  int held_out = 8;
};

void RunGenCorpus(GenCorpusArgs& a) {
  const std::string started = Timestamp();
  json p = {{"speakers", a.speakers},
            {"utterances", a.utterances},
            {"held_out", a.held_out},
            {"seed", a.g.seed.value_or(7)},
            {"out_dir", a.g.out_dir},
            {"jobs", a.g.jobs}};
  ApplyConfig(a.g.config, p);
  CorpusOptions o;
  o.speakers = p["speakers"];
  o.utterances_per_speaker = p["utterances"];
  o.held_out_per_speaker = p["held_out"];
  o.seed = p["seed"];
  if (o.speakers < 2 || o.utterances_per_speaker < 1 ||
      o.held_out_per_speaker < 0 ||
      o.held_out_per_speaker >= o.utterances_per_speaker) {
    throw UsageError("invalid corpus shape");
  }
  const fs::path out = PrepareOutDir(p["out_dir"]);
  const Corpus corpus = GenerateCorpus(o);
  WriteCorpus(corpus, o, out.string());
  WriteManifest(out, "gen-corpus", p, {{"corpus", o.seed}}, started,
                {{"utterances", corpus.utterances.size()}});
  std::cout << "wrote " << corpus.utterances.size() << " utterances of "
            << corpus.num_speakers() << " speakers to " << out.string()
            << "\n";
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  Globals g;
  std::string corpus;
  int speaker_epochs = 200;
  int autoencoder_epochs = 200;
  double embedding_noise = 0.2;
  bool skip_verifier = false;
  std::uint64_t verifier_seed = 1001;
  int verifier_hidden = 96;
  double verifier_radius = 1.0;
  std::uint64_t calibration_seed = 5;
};

void RunTrain(TrainArgs& a) {
  const std::string started = Timestamp();
  json p = {{"corpus", a.corpus},
            {"speaker_epochs", a.speaker_epochs},
            {"autoencoder_epochs", a.autoencoder_epochs},
            {"embedding_noise", a.embedding_noise},
            {"skip_verifier", a.skip_verifier},
            {"verifier_seed", a.verifier_seed},
            {"verifier_hidden", a.verifier_hidden},
            {"verifier_radius", a.verifier_radius},
            {"calibration_seed", a.calibration_seed},
            {"seed", a.g.seed.value_or(1)},
            {"out_dir", a.g.out_dir},
            {"jobs", a.g.jobs}};
  ApplyConfig(a.g.config, p);
  if (p["corpus"].get<std::string>().empty()) {
    throw UsageError("--corpus is required");
  }
  const Corpus corpus = LoadCorpus(p["corpus"]);
  SystemOptions o;
  o.dims.mel_bins = corpus.stft.mel_bins;
  o.speaker_epochs = p["speaker_epochs"];
  o.autoencoder_epochs = p["autoencoder_epochs"];
  o.embedding_noise = p["embedding_noise"];
  o.verifier_hidden = p["verifier_hidden"];
  o.verifier_adversarial_radius = p["verifier_radius"];
  o.model_seed = p["seed"];
  o.verifier_seed = p["verifier_seed"];
  o.calibration_seed = p["calibration_seed"];
  const fs::path out = PrepareOutDir(p["out_dir"]);

  json results;
  json seeds = {{"model", o.model_seed}};
  if (p["skip_verifier"].get<bool>()) {
    TrainedVc vc = TrainVc(corpus, o, o.model_seed);
    SaveVcModel(vc.model, (out / "model.ckpt").string(),
                {{"role", "deployed"}});
    results = {{"speaker_accuracy", vc.speaker_accuracy},
               {"autoencoder_loss_first", vc.autoencoder_loss.front()},
               {"autoencoder_loss_last", vc.autoencoder_loss.back()}};
  } else {
    TrainedSystem sys = TrainSystem(corpus, o);
    SaveVcModel(sys.deployed.model, (out / "model.ckpt").string(),
                {{"role", "deployed"}});
    SaveSpeakerEncoder(sys.verifier, (out / "verifier.ckpt").string(),
                       {{"role", "verifier"}});
    WriteCalibrationReport((out / "calibration.json").string(),
                           sys.calibration);
    seeds["verifier"] = o.verifier_seed;
    seeds["calibration"] = o.calibration_seed;
    results = {{"speaker_accuracy", sys.deployed.speaker_accuracy},
               {"autoencoder_loss_first",
                sys.deployed.autoencoder_loss.front()},
               {"autoencoder_loss_last", sys.deployed.autoencoder_loss.back()},
               {"verifier_accuracy", sys.verifier_accuracy},
               {"threshold", sys.calibration.threshold},
               {"eer", sys.calibration.eer}};
  }
  WriteManifest(out, "train", p, seeds, started, results);
  std::cout << results.dump(2) << "\n";
}

// ---------------------------------------------------------------------------

struct AttackArgs {
  Globals g;
  std::string model;
  std::string input;
  std::string target;
  std::string content;
  std::string method = "embedding";
  double epsilon = 0.05;
  double lambda = 0.1;
  double lr = 1e-3;
  int iterations = 1500;
  int griffin_lim_iterations = kDefaultGriffinLimIterations;
};

void RunAttackCommand(AttackArgs& a) {
  const std::string started = Timestamp();
  json p = {{"model", a.model},
            {"input", a.input},
            {"target", a.target},
            {"content", a.content},
            {"method", a.method},
            {"epsilon", a.epsilon},
            {"lambda", a.lambda},
            {"lr", a.lr},
            {"iterations", a.iterations},
            {"griffin_lim_iterations", a.griffin_lim_iterations},
            {"seed", a.g.seed.value_or(3)},
            {"out_dir", a.g.out_dir},
            {"jobs", a.g.jobs}};
  ApplyConfig(a.g.config, p);
  AttackConfig cfg;
  try {
    cfg.method = ParseMethod(p["method"]);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  if (p["model"].get<std::string>().empty() ||
      p["input"].get<std::string>().empty()) {
    throw UsageError("--model and --input are required");
  }
  const bool targeted = IsTargeted(cfg.method);
  if (targeted && p["target"].get<std::string>().empty()) {
    throw UsageError("method " + MethodName(cfg.method) + " needs --target");
  }
  if (!targeted && !p["target"].get<std::string>().empty()) {
    throw UsageError("untargeted attack takes no --target");
  }
  const double fraction = p["epsilon"];
  if (!(fraction > 0.0)) throw UsageError("--epsilon must be positive");

  const VcModel model = LoadVcModel(p["model"]);
  const MelSpectrogram x = LoadMelInput(p["input"], model.stft());
  const std::string content_path = p["content"].get<std::string>().empty()
                                       ? p["input"].get<std::string>()
                                       : p["content"].get<std::string>();
  const MelSpectrogram t = LoadMelInput(content_path, model.stft());
  std::optional<MelSpectrogram> y;
  if (targeted) y = LoadMelInput(p["target"], model.stft());

  cfg.epsilon = fraction * model.stats().dynamic_range();
  cfg.lambda = p["lambda"];
  cfg.lr = p["lr"];
  cfg.iterations = p["iterations"];
  cfg.seed = p["seed"];
  try {
    cfg.Validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  const AttackResult res = RunAttack(model, cfg, t, x, y ? &*y : nullptr);
  const double max_delta = res.delta.cwiseAbs().maxCoeff();
  if (!(max_delta < cfg.epsilon)) {
    throw NumericalError("perturbation bound violated");
  }

  const fs::path out = PrepareOutDir(p["out_dir"]);
  SaveSpectrogram(res.adversarial_input, (out / "adversarial.mel").string());
  WriteLossTrace((out / "loss.csv").string(), res.loss_trace);
  SaveWav(GriffinLim(res.adversarial_input, p["griffin_lim_iterations"],
                     cfg.seed),
          (out / "adversarial.wav").string());
  const json results = {{"epsilon_abs", cfg.epsilon},
                        {"max_abs_delta", max_delta},
                        {"initial_loss", res.loss_trace.front()},
                        {"final_loss", res.loss_trace.back()}};
  WriteManifest(out, "attack", p, {{"attack", cfg.seed}}, started, results);
  std::printf("max|delta| = %.6f < epsilon_abs = %.6f\n", max_delta,
              cfg.epsilon);
  std::printf("loss %.6f -> %.6f over %d iterations\n", res.loss_trace.front(),
              res.loss_trace.back(), cfg.iterations);
}

// ---------------------------------------------------------------------------

struct ConvertArgs {
  Globals g;
  std::string model;
  std::string content;
  std::string speaker;
  int griffin_lim_iterations = kDefaultGriffinLimIterations;
};

void RunConvert(ConvertArgs& a) {
  const std::string started = Timestamp();
  json p = {{"model", a.model},
            {"content", a.content},
            {"speaker", a.speaker},
            {"griffin_lim_iterations", a.griffin_lim_iterations},
            {"seed", a.g.seed.value_or(0)},
            {"out_dir", a.g.out_dir},
            {"jobs", a.g.jobs}};
  ApplyConfig(a.g.config, p);
  if (p["model"].get<std::string>().empty() ||
      p["content"].get<std::string>().empty() ||
      p["speaker"].get<std::string>().empty()) {
    throw UsageError("--model, --content and --speaker are required");
  }
  const VcModel model = LoadVcModel(p["model"]);
  const MelSpectrogram t = LoadMelInput(p["content"], model.stft());
  const MelSpectrogram x = LoadMelInput(p["speaker"], model.stft());
  const MelSpectrogram converted = model.Convert(t, x);
  const fs::path out = PrepareOutDir(p["out_dir"]);
  SaveSpectrogram(converted, (out / "converted.mel").string());
  SaveWav(GriffinLim(converted, p["griffin_lim_iterations"], p["seed"]),
          (out / "converted.wav").string());
  WriteManifest(out, "convert", p, {{"griffin_lim", p["seed"]}}, started,
                {{"frames", converted.frames()}});
  std::cout << "converted " << converted.frames() << " frames\n";
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  Globals g;
  std::string verifier;
  std::string calibration;
  std::string reference;
  std::string probe;
};

void RunVerify(VerifyArgs& a) {
  const std::string started = Timestamp();
  json p = {{"verifier", a.verifier},
            {"calibration", a.calibration},
            {"reference", a.reference},
            {"probe", a.probe},
            {"seed", a.g.seed.value_or(0)},
            {"out_dir", a.g.out_dir},
            {"jobs", a.g.jobs}};
  ApplyConfig(a.g.config, p);
  for (const char* key : {"verifier", "calibration", "reference", "probe"}) {
    if (p[key].get<std::string>().empty()) {
      throw UsageError(std::string("--") + key + " is required");
    }
  }
  const SpeakerEncoder verifier = LoadSpeakerEncoder(p["verifier"]);
  const EerCalibration cal = ReadCalibrationReport(p["calibration"]);
  const MelSpectrogram ref = LoadMelInput(p["reference"], verifier.stft());
  const MelSpectrogram probe = LoadMelInput(p["probe"], verifier.stft());
  const VerificationDecision d = VerifyPair(verifier, ref, probe, cal);
  const fs::path out = PrepareOutDir(p["out_dir"]);
  const json results = {{"similarity", d.similarity},
                        {"threshold", cal.threshold},
                        {"same", d.same}};
  WriteManifest(out, "verify", p, json::object(), started, results);
  std::printf("similarity %.4f threshold %.4f -> %s\n", d.similarity,
              cal.threshold, d.same ? "same" : "different");
}

// ---------------------------------------------------------------------------

struct ExperimentArgs {
  Globals g;
  ExperimentConfig c;
  std::string scenario = "white_box";
  std::string method = "embedding";
};

void RunExperimentCommand(ExperimentArgs& a) {
  const std::string started = Timestamp();
  ExperimentConfig c = a.c;
  try {
    c.scenario = ParseScenario(a.scenario);
    c.method = ParseMethod(a.method);
    if (a.g.seed) c.seeds.attack = *a.g.seed;
    c.jobs = a.g.jobs;
    c.Validate();
    if (!a.g.config.empty()) {
      json cfg = ReadJsonFile(a.g.config);
      if (cfg.is_object() && cfg.contains("out_dir")) {
        a.g.out_dir = cfg["out_dir"].get<std::string>();
        cfg.erase("out_dir");
      }
      c = ExperimentConfigFromJson(cfg, c);
    }
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  const fs::path out = PrepareOutDir(a.g.out_dir);
  const ExperimentReport report = RunExperiment(c);
  WriteExperimentArtifacts(report, out.string());
  for (const std::string& w : report.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  json p = ToJson(c);
  p["out_dir"] = a.g.out_dir;
  const json results = {
      {"speaker_accuracy", report.system.deployed.speaker_accuracy},
      {"verifier_accuracy", report.system.verifier_accuracy},
      {"threshold", report.system.calibration.threshold},
      {"eer", report.system.calibration.eer},
      {"evaluation_pass_rate", report.evaluation_set.pass_rate()},
      {"warnings", report.warnings}};
  WriteManifest(out, "experiment", p, p["seeds"], started, results);
  std::cout << FormatCsv(report.rows);
}

}  // namespace
}  // namespace advvc

int main(int argc, char** argv) {
  using namespace advvc;
  CLI::App app{"Adversarial defenses against voice conversion", "advvc"};
  app.set_version_flag("--version", ADVVC_VERSION);
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  GenCorpusArgs gen;
  CLI::App* gen_cmd =
      app.add_subcommand("gen-corpus", "Synthesise a multi-speaker corpus");
  gen_cmd->add_option("--speakers", gen.speakers, "Number of speakers");
  gen_cmd->add_option("--utterances", gen.utterances, "Utterances per speaker");
  gen_cmd->add_option("--held-out", gen.held_out,
                      "Held-out utterances per speaker");
  AddGlobals(gen_cmd, gen.g, "corpus, default 7");

  TrainArgs train;
  CLI::App* train_cmd = app.add_subcommand(
      "train", "Train the conversion model, verifier and threshold");
  train_cmd->add_option("--corpus", train.corpus,
                        "Corpus directory from gen-corpus");
  train_cmd->add_option("--speaker-epochs", train.speaker_epochs);
  train_cmd->add_option("--autoencoder-epochs", train.autoencoder_epochs);
  train_cmd->add_option("--embedding-noise", train.embedding_noise,
                        "Embedding noise during decoder training");
  train_cmd->add_flag("--skip-verifier", train.skip_verifier,
                      "Only train the conversion model");
  train_cmd->add_option("--verifier-seed", train.verifier_seed);
  train_cmd->add_option("--verifier-hidden", train.verifier_hidden);
  train_cmd->add_option("--verifier-radius", train.verifier_radius,
                        "Sign-gradient training radius of the verifier");
  train_cmd->add_option("--calibration-seed", train.calibration_seed);
  AddGlobals(train_cmd, train.g, "model, default 1");

  AttackArgs attack;
  CLI::App* attack_cmd =
      app.add_subcommand("attack", "Perturb one utterance of the defended speaker");
  attack_cmd->add_option("--model", attack.model, "Model checkpoint");
  attack_cmd->add_option("--input", attack.input,
                         "Utterance to protect (.wav or spectrogram file)");
  attack_cmd->add_option("--target", attack.target,
                         "Target-speaker utterance (targeted methods)");
  attack_cmd->add_option("--content", attack.content,
                         "Content utterance for decoder-based losses "
                         "(default: the input)");
  attack_cmd->add_option("--method", attack.method)
      ->check(CLI::IsMember(
          {"untargeted_e2e", "targeted_e2e", "embedding", "feedback"}));
  attack_cmd->add_option("--epsilon", attack.epsilon,
                         "Perturbation scale as a fraction of the model's "
                         "log-mel dynamic range");
  attack_cmd->add_option("--lambda", attack.lambda, "Source repulsion weight");
  attack_cmd->add_option("--lr", attack.lr, "Adam step size");
  attack_cmd->add_option("--iterations", attack.iterations);
  attack_cmd->add_option("--griffin-lim-iterations",
                         attack.griffin_lim_iterations);
  AddGlobals(attack_cmd, attack.g, "attack, default 3");

  ConvertArgs convert;
  CLI::App* convert_cmd =
      app.add_subcommand("convert", "Convert content to a speaker's voice");
  convert_cmd->add_option("--model", convert.model, "Model checkpoint");
  convert_cmd->add_option("--content", convert.content, "Content utterance");
  convert_cmd->add_option("--speaker", convert.speaker, "Speaker utterance");
  convert_cmd->add_option("--griffin-lim-iterations",
                          convert.griffin_lim_iterations);
  AddGlobals(convert_cmd, convert.g, "phase reconstruction, default 0");

  VerifyArgs verify;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "Score two utterances with the verifier");
  verify_cmd->add_option("--verifier", verify.verifier, "Verifier checkpoint");
  verify_cmd->add_option("--calibration", verify.calibration,
                         "Calibration report");
  verify_cmd->add_option("--reference", verify.reference);
  verify_cmd->add_option("--probe", verify.probe);
  AddGlobals(verify_cmd, verify.g, "unused");

  ExperimentArgs exp;
  CLI::App* exp_cmd = app.add_subcommand(
      "experiment", "Train everything and sweep the perturbation scale");
  ExperimentConfig& c = exp.c;
  exp_cmd->add_option("--scenario", exp.scenario)
      ->check(CLI::IsMember({"white_box", "black_box"}));
  exp_cmd->add_option("--method", exp.method)
      ->check(CLI::IsMember(
          {"untargeted_e2e", "targeted_e2e", "embedding", "feedback"}));
  exp_cmd->add_option("--epsilons", c.epsilon_sweep,
                      "Perturbation scales (fractions of dynamic range)")
      ->delimiter(',');
  exp_cmd->add_option("--n-pairs", c.n_pairs);
  exp_cmd->add_option("--speakers", c.speakers);
  exp_cmd->add_option("--utterances", c.utterances_per_speaker);
  exp_cmd->add_option("--held-out", c.held_out_per_speaker);
  exp_cmd->add_option("--speaker-epochs", c.speaker_epochs);
  exp_cmd->add_option("--autoencoder-epochs", c.autoencoder_epochs);
  exp_cmd->add_option("--embedding-noise", c.embedding_noise);
  exp_cmd->add_option("--verifier-hidden", c.verifier_hidden);
  exp_cmd->add_option("--verifier-radius", c.verifier_adversarial_radius);
  exp_cmd->add_option("--lambda", c.lambda);
  exp_cmd->add_option("--lr", c.lr);
  exp_cmd->add_option("--iterations", c.iterations);
  exp_cmd->add_option("--corpus-seed", c.seeds.corpus);
  exp_cmd->add_option("--model-seed", c.seeds.model);
  exp_cmd->add_option("--proxy-seed", c.seeds.proxy);
  exp_cmd->add_option("--verifier-seed", c.seeds.verifier);
  exp_cmd->add_option("--calibration-seed", c.seeds.calibration);
  exp_cmd->add_option("--evaluation-seed", c.seeds.evaluation);
  AddGlobals(exp_cmd, exp.g, "attack, default 3");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) RunGenCorpus(gen);
    if (*train_cmd) RunTrain(train);
    if (*attack_cmd) RunAttackCommand(attack);
    if (*convert_cmd) RunConvert(convert);
    if (*verify_cmd) RunVerify(verify);
    if (*exp_cmd) RunExperimentCommand(exp);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
