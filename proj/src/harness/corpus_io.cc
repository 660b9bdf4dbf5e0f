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

#include "advvc/harness/corpus_io.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "advvc/base/errors.h"
#include "advvc/model/checkpoint.h"

namespace advvc {
namespace {

namespace fs = std::filesystem;

std::string RelativeWavPath(const Corpus& corpus, const Utterance& u) {
  const std::string& id = corpus.speakers.at(u.speaker).speaker_id;
  char name[64];
  std::snprintf(name, sizeof(name), "_%03d.wav", u.index);
  return "wav/" + id + "/" + id + name;
}

}  // namespace

nlohmann::json ToJson(const SyntheticSpeaker& s) {
  nlohmann::json formants = nlohmann::json::array();
  for (const Formant& f : s.formants) {
    formants.push_back({{"center_hz", f.center_hz},
                        {"bandwidth_hz", f.bandwidth_hz}});
  }
  return {{"speaker_id", s.speaker_id},
          {"f0_base", s.f0_base},
          {"formants", formants},
          {"spectral_tilt", s.spectral_tilt},
          {"breathiness", s.breathiness},
          {"gender_tag", GenderName(s.gender_tag())}};
}

SyntheticSpeaker SpeakerFromJson(const nlohmann::json& j) {
  try {
    SyntheticSpeaker s;
    s.speaker_id = j.at("speaker_id").get<std::string>();
    s.f0_base = j.at("f0_base").get<double>();
    const auto& formants = j.at("formants");
    if (!formants.is_array() || formants.size() != s.formants.size()) {
      throw FormatError("speaker needs exactly 3 formants");
    }
    for (std::size_t i = 0; i < s.formants.size(); ++i) {
      s.formants[i].center_hz = formants[i].at("center_hz").get<double>();
      s.formants[i].bandwidth_hz = formants[i].at("bandwidth_hz").get<double>();
    }
    s.spectral_tilt = j.at("spectral_tilt").get<double>();
    s.breathiness = j.at("breathiness").get<double>();
    s.Validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad speaker entry: ") + e.what());
  }
}

void WriteCorpus(const Corpus& corpus, const CorpusOptions& options,
                 const std::string& dir) {
  nlohmann::json speakers = nlohmann::json::array();
  for (const auto& s : corpus.speakers) speakers.push_back(ToJson(s));
  nlohmann::json utterances = nlohmann::json::array();
  for (const Utterance& u : corpus.utterances) {
    const std::string rel = RelativeWavPath(corpus, u);
    fs::create_directories((fs::path(dir) / rel).parent_path());
    SaveWav(u.wave, (fs::path(dir) / rel).string());
    utterances.push_back({{"speaker", u.speaker},
                          {"index", u.index},
                          {"seed", u.seed},
                          {"duration", u.duration},
                          {"held_out", u.held_out},
                          {"path", rel}});
  }
  nlohmann::json manifest = {
      {"options",
       {{"speakers", options.speakers},
        {"utterances_per_speaker", options.utterances_per_speaker},
        {"held_out_per_speaker", options.held_out_per_speaker},
        {"min_duration", options.min_duration},
        {"max_duration", options.max_duration},
        {"seed", options.seed}}},
      {"stft", ToJson(corpus.stft)},
      {"speakers", speakers},
      {"utterances", utterances}};
  std::ofstream out(fs::path(dir) / "corpus.json", std::ios::binary);
  if (!out) throw IoError("cannot write corpus manifest in " + dir);
  out << manifest.dump(2) << "\n";
  if (!out) throw IoError("write failed for corpus manifest in " + dir);
}

Corpus LoadCorpus(const std::string& dir) {
  const fs::path manifest_path = fs::path(dir) / "corpus.json";
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw IoError("cannot read " + manifest_path.string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad corpus manifest: " + std::string(e.what()));
  }
  Corpus corpus;
  try {
    corpus.stft = StftConfigFromJson(manifest.at("stft"));
  } catch (const CheckpointError& e) {
    throw FormatError(std::string("bad corpus STFT config: ") + e.what());
  }
  corpus.stft.Validate();
  try {
    for (const auto& s : manifest.at("speakers")) {
      corpus.speakers.push_back(SpeakerFromJson(s));
    }
    for (const auto& j : manifest.at("utterances")) {
      Utterance u;
      u.speaker = j.at("speaker").get<int>();
      if (u.speaker < 0 || u.speaker >= corpus.num_speakers()) {
        throw FormatError("utterance refers to an unknown speaker");
      }
      u.index = j.at("index").get<int>();
      u.seed = j.at("seed").get<std::uint64_t>();
      u.duration = j.at("duration").get<double>();
      u.held_out = j.at("held_out").get<bool>();
      u.wave = LoadWav((fs::path(dir) / j.at("path").get<std::string>()).string());
      u.mel = ComputeMelSpectrogram(u.wave, corpus.stft);
      corpus.utterances.push_back(std::move(u));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad corpus manifest: " + std::string(e.what()));
  }
  return corpus;
}

}  // namespace advvc
