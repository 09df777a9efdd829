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

#ifndef ATS_AUDIO_H_
#define ATS_AUDIO_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ats {

struct AudioWaveform {
  std::vector<double> samples;
  int sample_rate_hz = 44100;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
  // Throws DataError(kInvalidData) on a non-positive rate, non-finite
  // samples or |sample| > 1.
  void Validate() const;
};

enum class WavFormat { kPcm16, kFloat32 };

// Mono RIFF/WAVE codec.
std::string EncodeWav(const AudioWaveform& audio,
                      WavFormat format = WavFormat::kFloat32);
// Accepts 16-bit PCM and 32-bit IEEE float mono files. Throws
// DataError(kMalformedHeader) on anything else.
AudioWaveform DecodeWav(std::string_view bytes);

AudioWaveform ReadWav(const std::filesystem::path& path);
void WriteWav(const std::filesystem::path& path, const AudioWaveform& audio,
              WavFormat format = WavFormat::kFloat32);

}  // namespace ats

#endif  // ATS_AUDIO_H_
