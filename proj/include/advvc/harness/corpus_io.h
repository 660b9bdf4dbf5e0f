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

#ifndef ADVVC_HARNESS_CORPUS_IO_H_
#define ADVVC_HARNESS_CORPUS_IO_H_

#include <string>

#include "advvc/audio/corpus.h"
#include "json.hpp"

namespace advvc {

// Writes <dir>/wav/<speaker>/<speaker>_<index>.wav for every utterance and
// <dir>/corpus.json describing speakers, utterances and the STFT config.
// Output is a pure function of the corpus.
void WriteCorpus(const Corpus& corpus, const CorpusOptions& options,
                 const std::string& dir);

// Reads a tree written by WriteCorpus and recomputes the spectrograms from
// the stored 16-bit audio. Throws IoError, FormatError or ConfigError.
Corpus LoadCorpus(const std::string& dir);

nlohmann::json ToJson(const SyntheticSpeaker& speaker);
SyntheticSpeaker SpeakerFromJson(const nlohmann::json& j);

}  // namespace advvc

#endif  // ADVVC_HARNESS_CORPUS_IO_H_
