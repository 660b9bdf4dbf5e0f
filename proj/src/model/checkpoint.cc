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

#include "advvc/model/checkpoint.h"

#include <array>
#include <cstring>
#include <fstream>
#include <iterator>

#include "advvc/base/errors.h"

namespace advvc {
namespace {

constexpr std::array<char, 8> kMagic = {'A', 'D', 'V', 'V', 'C', 'K', 'P', 'T'};

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t GetU32(const std::string& in, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i]))
         << (8 * i);
  }
  return v;
}

template <typename T>
T Field(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("checkpoint field '") + key +
                          "': " + e.what());
  }
}

NamedMatrices ToMatrices(const NamedTensors& named) {
  NamedMatrices out;
  for (const auto& [name, t] : named) out.emplace_back(name, t.value());
  return out;
}

NamedTensors ToTensors(const NamedMatrices& named) {
  NamedTensors out;
  for (const auto& [name, m] : named) {
    out.emplace_back(name, ad::Tensor::Constant(m));
  }
  return out;
}

void CheckShapes(const NamedTensors& expected, const NamedMatrices& actual) {
  if (expected.size() != actual.size()) {
    throw CheckpointError("checkpoint holds " + std::to_string(actual.size()) +
                          " tensors, expected " +
                          std::to_string(expected.size()));
  }
  for (const auto& [name, t] : expected) {
    bool found = false;
    for (const auto& [n, m] : actual) {
      if (n != name) continue;
      found = true;
      if (m.rows() != t.value().rows() || m.cols() != t.value().cols()) {
        throw CheckpointError("tensor '" + name + "' has the wrong shape");
      }
    }
    if (!found) throw CheckpointError("tensor '" + name + "' missing");
  }
}

nlohmann::json SpeakerHeader(const SpeakerEncoder& enc) {
  return {{"mel_bins", enc.mel_bins()},
          {"hidden", enc.hidden()},
          {"dim", enc.dim()},
          {"seed", enc.seed()},
          {"stats", ToJson(enc.stats())}};
}

SpeakerEncoder SpeakerFromHeader(const nlohmann::json& j,
                                 const StftConfig& stft) {
  try {
    return SpeakerEncoder(Field<int>(j, "mel_bins"), Field<int>(j, "hidden"),
                          Field<int>(j, "dim"),
                          FeatureStatsFromJson(j.at("stats")), stft,
                          Field<std::uint64_t>(j, "seed"));
  } catch (const CheckpointError&) {
    throw;
  } catch (const Error& e) {
    throw CheckpointError(std::string("invalid speaker encoder: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("invalid speaker encoder: ") + e.what());
  }
}

TensorFile ReadKind(const std::string& path, const std::string& kind) {
  TensorFile file = ReadTensorFile(path);
  if (file.kind != kind) {
    throw CheckpointError(path + " holds a '" + file.kind + "', expected '" +
                          kind + "'");
  }
  return file;
}

}  // namespace

nlohmann::json ToJson(const StftConfig& cfg) {
  return {{"sample_rate", cfg.sample_rate}, {"n_fft", cfg.n_fft},
          {"hop", cfg.hop},                 {"mel_bins", cfg.mel_bins},
          {"f_min", cfg.f_min},             {"f_max", cfg.f_max},
          {"log_floor", cfg.log_floor}};
}

nlohmann::json ToJson(const FeatureStats& stats) {
  auto vec = [](const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  return {{"mean", stats.mean},
          {"stddev", stats.stddev},
          {"p1", stats.p1},
          {"p99", stats.p99},
          {"max", stats.max},
          {"bin_mean", vec(stats.bin_mean)},
          {"bin_stddev", vec(stats.bin_stddev)}};
}

nlohmann::json ToJson(const ModelDims& dims) {
  return {{"mel_bins", dims.mel_bins},
          {"hidden", dims.hidden},
          {"content_dim", dims.content_dim},
          {"speaker_dim", dims.speaker_dim},
          {"content_instance_norm", dims.content_instance_norm}};
}

StftConfig StftConfigFromJson(const nlohmann::json& j) {
  StftConfig cfg;
  cfg.sample_rate = Field<int>(j, "sample_rate");
  cfg.n_fft = Field<int>(j, "n_fft");
  cfg.hop = Field<int>(j, "hop");
  cfg.mel_bins = Field<int>(j, "mel_bins");
  cfg.f_min = Field<double>(j, "f_min");
  cfg.f_max = Field<double>(j, "f_max");
  cfg.log_floor = Field<double>(j, "log_floor");
  return cfg;
}

FeatureStats FeatureStatsFromJson(const nlohmann::json& j) {
  FeatureStats s;
  s.mean = Field<double>(j, "mean");
  s.stddev = Field<double>(j, "stddev");
  s.p1 = Field<double>(j, "p1");
  s.p99 = Field<double>(j, "p99");
  s.max = Field<double>(j, "max");
  auto vec = [&](const char* key) {
    const auto v = Field<std::vector<double>>(j, key);
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(
        v.data(), static_cast<Eigen::Index>(v.size())));
  };
  s.bin_mean = vec("bin_mean");
  s.bin_stddev = vec("bin_stddev");
  return s;
}

ModelDims ModelDimsFromJson(const nlohmann::json& j) {
  ModelDims d;
  d.mel_bins = Field<int>(j, "mel_bins");
  d.hidden = Field<int>(j, "hidden");
  d.content_dim = Field<int>(j, "content_dim");
  d.speaker_dim = Field<int>(j, "speaker_dim");
  d.content_instance_norm = Field<bool>(j, "content_instance_norm");
  return d;
}

void WriteTensorFile(const std::string& path, const std::string& kind,
                     nlohmann::json header, const NamedMatrices& tensors) {
  header["kind"] = kind;
  nlohmann::json table = nlohmann::json::array();
  for (const auto& [name, m] : tensors) {
    table.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
  }
  header["tensors"] = table;
  const std::string text = header.dump();

  std::string out(kMagic.begin(), kMagic.end());
  PutU32(out, kCheckpointVersion);
  PutU32(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  for (const auto& [name, m] : tensors) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const float f = static_cast<float>(m.data()[i]);
      std::uint32_t bits;
      std::memcpy(&bits, &f, sizeof(bits));
      PutU32(out, bits);
    }
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot write " + path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("write failed for " + path);
}

TensorFile ReadTensorFile(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot read " + path);
  const std::string in((std::istreambuf_iterator<char>(file)),
                       std::istreambuf_iterator<char>());
  if (in.size() < 16 || !std::equal(kMagic.begin(), kMagic.end(), in.begin())) {
    throw CheckpointError(path + " is not a checkpoint");
  }
  const std::uint32_t version = GetU32(in, 8);
  if (version != kCheckpointVersion) {
    throw CheckpointError(path + ": unsupported format version " +
                          std::to_string(version));
  }
  const std::uint32_t header_len = GetU32(in, 12);
  if (in.size() - 16 < header_len) throw CheckpointError(path + " is truncated");

  TensorFile result;
  try {
    result.header = nlohmann::json::parse(in.substr(16, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(path + ": bad header: " + e.what());
  }
  result.kind = Field<std::string>(result.header, "kind");
  std::size_t pos = 16 + static_cast<std::size_t>(header_len);
  const nlohmann::json table = result.header.value("tensors", nlohmann::json());
  if (!table.is_array()) throw CheckpointError(path + ": no tensor table");
  for (const auto& entry : table) {
    const auto rows = Field<std::int64_t>(entry, "rows");
    const auto cols = Field<std::int64_t>(entry, "cols");
    if (rows < 0 || cols < 0 || (rows > 0 && cols > (1LL << 40) / rows)) {
      throw CheckpointError(path + ": bad tensor shape");
    }
    const std::size_t count = static_cast<std::size_t>(rows * cols);
    if ((in.size() - pos) / 4 < count) {
      throw CheckpointError(path + " is truncated");
    }
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t i = 0; i < count; ++i, pos += 4) {
      const std::uint32_t bits = GetU32(in, pos);
      float f;
      std::memcpy(&f, &bits, sizeof(f));
      m.data()[i] = f;
    }
    result.tensors.emplace_back(Field<std::string>(entry, "name"), std::move(m));
  }
  if (pos != in.size()) throw CheckpointError(path + " has trailing bytes");
  return result;
}

void SaveVcModel(const VcModel& model, const std::string& path,
                 const nlohmann::json& metadata) {
  nlohmann::json header = {{"dims", ToJson(model.dims())},
                           {"stft", ToJson(model.stft())},
                           {"stats", ToJson(model.stats())},
                           {"seed", model.seed()},
                           {"speaker_encoder",
                            SpeakerHeader(model.speaker_encoder())},
                           {"metadata", metadata}};
  WriteTensorFile(path, "vc_model", header, ToMatrices(model.Parameters()));
}

VcModel LoadVcModel(const std::string& path) {
  TensorFile file = ReadKind(path, "vc_model");
  const nlohmann::json& h = file.header;
  try {
    const StftConfig stft = StftConfigFromJson(h.at("stft"));
    SpeakerEncoder speaker = SpeakerFromHeader(h.at("speaker_encoder"), stft);
    VcModel model(ModelDimsFromJson(h.at("dims")), stft,
                  FeatureStatsFromJson(h.at("stats")), speaker,
                  Field<std::uint64_t>(h, "seed"));
    CheckShapes(model.Parameters(), file.tensors);
    model.AssignParameters(ToTensors(file.tensors));
    return model;
  } catch (const CheckpointError&) {
    throw;
  } catch (const Error& e) {
    throw CheckpointError(path + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(path + ": " + e.what());
  }
}

void SaveSpeakerEncoder(const SpeakerEncoder& encoder, const std::string& path,
                        const nlohmann::json& metadata) {
  nlohmann::json header = {{"stft", ToJson(encoder.stft())},
                           {"speaker_encoder", SpeakerHeader(encoder)},
                           {"metadata", metadata}};
  WriteTensorFile(path, "speaker_encoder", header,
                  ToMatrices(encoder.Parameters()));
}

SpeakerEncoder LoadSpeakerEncoder(const std::string& path) {
  TensorFile file = ReadKind(path, "speaker_encoder");
  try {
    const StftConfig stft = StftConfigFromJson(file.header.at("stft"));
    SpeakerEncoder enc =
        SpeakerFromHeader(file.header.at("speaker_encoder"), stft);
    CheckShapes(enc.Parameters(), file.tensors);
    enc.AssignParameters(ToTensors(file.tensors));
    return enc;
  } catch (const CheckpointError&) {
    throw;
  } catch (const Error& e) {
    throw CheckpointError(path + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(path + ": " + e.what());
  }
}

void SaveSpectrogram(const MelSpectrogram& mel, const std::string& path) {
  WriteTensorFile(path, "mel_spectrogram", {{"stft", ToJson(mel.config)}},
                  {{"mel", mel.data}});
}

MelSpectrogram LoadSpectrogram(const std::string& path) {
  TensorFile file = ReadKind(path, "mel_spectrogram");
  if (file.tensors.size() != 1) throw CheckpointError(path + ": expected one tensor");
  MelSpectrogram mel;
  try {
    mel.config = StftConfigFromJson(file.header.at("stft"));
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(path + ": " + e.what());
  }
  mel.data = std::move(file.tensors[0].second);
  return mel;
}

nlohmann::json ReadCheckpointMetadata(const std::string& path) {
  TensorFile file = ReadTensorFile(path);
  return file.header.value("metadata", nlohmann::json::object());
}

}  // namespace advvc
