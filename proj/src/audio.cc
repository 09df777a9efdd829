// Copyright (c) 2026 The ATS Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ats/audio.h"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "ats/array_file.h"
#include "ats/errors.h"

namespace ats {

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xfffe;

void Append16(std::string* out, uint16_t v) {
  out->push_back(static_cast<char>(v & 0xff));
  out->push_back(static_cast<char>(v >> 8));
}

void Append32(std::string* out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint16_t Read16(const char* p) {
  return static_cast<uint16_t>(static_cast<unsigned char>(p[0]) |
                               (static_cast<unsigned char>(p[1]) << 8));
}

uint32_t Read32(const char* p) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  }
  return v;
}

[[noreturn]] void Bad(const std::string& detail) {
  throw DataError(DataErrorCode::kMalformedHeader, "WAV " + detail);
}

}  // namespace

void AudioWaveform::Validate() const {
  if (sample_rate_hz <= 0) {
    throw DataError(DataErrorCode::kInvalidData, "non-positive audio rate");
  }
  for (double s : samples) {
    if (!std::isfinite(s) || std::abs(s) > 1.0) {
      throw DataError(DataErrorCode::kInvalidData,
                      "audio samples must be finite and within [-1, 1]");
    }
  }
}

std::string EncodeWav(const AudioWaveform& audio, WavFormat format) {
  const bool is_float = format == WavFormat::kFloat32;
  const uint16_t bits = is_float ? 32 : 16;
  const uint32_t bytes_per_sample = bits / 8;
  const uint32_t data_size =
      static_cast<uint32_t>(audio.samples.size()) * bytes_per_sample;

  std::string out;
  out.reserve(44 + data_size);
  out.append("RIFF");
  Append32(&out, 36 + data_size);
  out.append("WAVEfmt ");
  Append32(&out, 16);
  Append16(&out, is_float ? kFormatFloat : kFormatPcm);
  Append16(&out, 1);
  Append32(&out, static_cast<uint32_t>(audio.sample_rate_hz));
  Append32(&out, static_cast<uint32_t>(audio.sample_rate_hz) * bytes_per_sample);
  Append16(&out, static_cast<uint16_t>(bytes_per_sample));
  Append16(&out, bits);
  out.append("data");
  Append32(&out, data_size);
  for (double s : audio.samples) {
    if (is_float) {
      AppendF32(&out, static_cast<float>(s));
    } else {
      const double clipped = std::clamp(s, -1.0, 1.0);
      const auto q = static_cast<int16_t>(std::lround(clipped * 32767.0));
      Append16(&out, static_cast<uint16_t>(q));
    }
  }
  return out;
}

AudioWaveform DecodeWav(std::string_view bytes) {
  if (bytes.size() < 12 || bytes.substr(0, 4) != "RIFF" ||
      bytes.substr(8, 4) != "WAVE") {
    Bad("missing RIFF/WAVE signature");
  }
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string_view id = bytes.substr(pos, 4);
    const uint32_t size = Read32(bytes.data() + pos + 4);
    const size_t body = pos + 8;
    if (size > bytes.size() - body) Bad("chunk overruns file");
    if (id == "fmt ") {
      if (size < 16) Bad("fmt chunk too small");
      format = Read16(bytes.data() + body);
      channels = Read16(bytes.data() + body + 2);
      rate = Read32(bytes.data() + body + 4);
      bits = Read16(bytes.data() + body + 14);
      if (format == kFormatExtensible && size >= 26) {
        format = Read16(bytes.data() + body + 24);
      }
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) Bad("data chunk before fmt chunk");
      if (channels != 1) Bad("only mono files are supported");
      if (rate == 0) Bad("zero sample rate");
      AudioWaveform audio;
      audio.sample_rate_hz = static_cast<int>(rate);
      if (format == kFormatFloat && bits == 32) {
        audio.samples.resize(size / 4);
        for (size_t i = 0; i < audio.samples.size(); ++i) {
          audio.samples[i] = ReadF32(bytes.data() + body + 4 * i);
        }
      } else if (format == kFormatPcm && bits == 16) {
        audio.samples.resize(size / 2);
        for (size_t i = 0; i < audio.samples.size(); ++i) {
          const auto v = static_cast<int16_t>(Read16(bytes.data() + body + 2 * i));
          audio.samples[i] = v / 32768.0;
        }
      } else {
        Bad("unsupported encoding (format " + std::to_string(format) + ", " +
            std::to_string(bits) + " bits)");
      }
      return audio;
    }
    pos = body + size + (size & 1);
  }
  Bad("no data chunk");
}

AudioWaveform ReadWav(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw DataError(DataErrorCode::kMissingFile, path.string());
  }
  return DecodeWav(ReadFileBytes(path));
}

void WriteWav(const std::filesystem::path& path, const AudioWaveform& audio,
              WavFormat format) {
  WriteFileBytes(path, EncodeWav(audio, format));
}

}  // namespace ats
