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

#ifndef ADVVC_MODEL_CHECKPOINT_H_
#define ADVVC_MODEL_CHECKPOINT_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "advvc/model/vc_model.h"
#include "json.hpp"

namespace advvc {

// Checkpoint layout, all integers little-endian:
//   8 bytes   magic "ADVVCKPT"
//   u32       format version (kCheckpointVersion)
//   u32       header length N
//   N bytes   JSON header: kind, configs and the tensor table
//             [{name, rows, cols}, ...]
//   float32   tensor data in table order, each tensor column-major
inline constexpr std::uint32_t kCheckpointVersion = 1;

nlohmann::json ToJson(const StftConfig& cfg);
nlohmann::json ToJson(const FeatureStats& stats);
nlohmann::json ToJson(const ModelDims& dims);
StftConfig StftConfigFromJson(const nlohmann::json& j);
FeatureStats FeatureStatsFromJson(const nlohmann::json& j);
ModelDims ModelDimsFromJson(const nlohmann::json& j);

using NamedMatrices = std::vector<std::pair<std::string, Eigen::MatrixXd>>;

struct TensorFile {
  std::string kind;
  nlohmann::json header;  // the full JSON header
  NamedMatrices tensors;
};

// Low-level container I/O. Values are stored as float32. Throws IoError or
// CheckpointError.
void WriteTensorFile(const std::string& path, const std::string& kind,
                     nlohmann::json header, const NamedMatrices& tensors);
TensorFile ReadTensorFile(const std::string& path);

// `metadata` is stored verbatim under "metadata".
void SaveVcModel(const VcModel& model, const std::string& path,
                 const nlohmann::json& metadata = nlohmann::json::object());
VcModel LoadVcModel(const std::string& path);

void SaveSpeakerEncoder(const SpeakerEncoder& encoder, const std::string& path,
                        const nlohmann::json& metadata =
                            nlohmann::json::object());
SpeakerEncoder LoadSpeakerEncoder(const std::string& path);

// A spectrogram with its STFT config, e.g. an adversarial input.
void SaveSpectrogram(const MelSpectrogram& mel, const std::string& path);
MelSpectrogram LoadSpectrogram(const std::string& path);

nlohmann::json ReadCheckpointMetadata(const std::string& path);

}  // namespace advvc

#endif  // ADVVC_MODEL_CHECKPOINT_H_
