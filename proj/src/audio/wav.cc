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

#include "advvc/audio/wav.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "advvc/base/errors.h"

namespace advvc {
namespace {

std::uint32_t ReadU32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t ReadU16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutU16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

short QuantizeSample(float sample) {
  const double clipped = std::clamp(static_cast<double>(sample), -1.0, 1.0);
  const double q = std::round(clipped * 32768.0);
  return static_cast<short>(std::clamp(q, -32768.0, 32767.0));
}

Waveform LoadWav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw FormatError(path + ": not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  Waveform wave;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = ReadU32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) {
      throw FormatError(path + ": chunk extends past end of file");
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw FormatError(path + ": fmt chunk too small");
      const unsigned char* f = bytes.data() + body;
      const std::uint16_t format = ReadU16(f);
      const std::uint16_t channels = ReadU16(f + 2);
      const std::uint32_t rate = ReadU32(f + 4);
      const std::uint16_t bits = ReadU16(f + 14);
      if (format != 1) throw UnsupportedFormatError(path + ": not PCM");
      if (channels != 1) {
        throw UnsupportedFormatError(path + ": only mono is supported");
      }
      if (bits != 16) {
        throw UnsupportedFormatError(path + ": only 16-bit PCM is supported");
      }
      if (rate == 0) throw FormatError(path + ": zero sample rate");
      wave.sample_rate = static_cast<int>(rate);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw FormatError(path + ": data chunk before fmt chunk");
      if (size % 2 != 0) throw FormatError(path + ": odd data chunk size");
      wave.samples.resize(size / 2);
      for (std::size_t i = 0; i < wave.samples.size(); ++i) {
        const auto raw = static_cast<std::int16_t>(ReadU16(bytes.data() + body + 2 * i));
        wave.samples[i] = static_cast<float>(raw / 32768.0);
      }
      return wave;
    }
    pos = body + size + (size & 1u);
  }
  throw FormatError(path + (have_fmt ? ": missing data chunk" : ": missing fmt chunk"));
}

void SaveWav(const Waveform& wave, const std::string& path) {
  const auto data_bytes = static_cast<std::uint32_t>(wave.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  PutU32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  PutU32(out, 16);
  PutU16(out, 1);  // PCM
  PutU16(out, 1);  // mono
  PutU32(out, static_cast<std::uint32_t>(wave.sample_rate));
  PutU32(out, static_cast<std::uint32_t>(wave.sample_rate) * 2);
  PutU16(out, 2);
  PutU16(out, 16);
  out += "data";
  PutU32(out, data_bytes);
  for (float s : wave.samples) {
    PutU16(out, static_cast<std::uint16_t>(QuantizeSample(s)));
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write " + path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("write failed for " + path);
}

}  // namespace advvc
