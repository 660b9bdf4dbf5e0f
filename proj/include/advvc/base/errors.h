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

#ifndef ADVVC_BASE_ERRORS_H_
#define ADVVC_BASE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace advvc {

// Root of every exception thrown by the library. The CLI maps these to
// exit code 2; usage problems are reported separately by the parser.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define ADVVC_DEFINE_ERROR(Name)          \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

ADVVC_DEFINE_ERROR(FormatError);             // malformed file contents
ADVVC_DEFINE_ERROR(UnsupportedFormatError);  // well-formed but not supported
ADVVC_DEFINE_ERROR(IoError);
ADVVC_DEFINE_ERROR(InputError);       // e.g. waveform too short, T = 0
ADVVC_DEFINE_ERROR(DimensionError);   // shape mismatch
ADVVC_DEFINE_ERROR(ContractError);    // API precondition violated
ADVVC_DEFINE_ERROR(NumericalError);   // NaN / Inf
ADVVC_DEFINE_ERROR(TrainingError);
ADVVC_DEFINE_ERROR(CheckpointError);
ADVVC_DEFINE_ERROR(ConfigError);
ADVVC_DEFINE_ERROR(SelectionError);
ADVVC_DEFINE_ERROR(CalibrationError);
ADVVC_DEFINE_ERROR(InsufficientConversionError);

#undef ADVVC_DEFINE_ERROR

}  // namespace advvc

#endif  // ADVVC_BASE_ERRORS_H_
