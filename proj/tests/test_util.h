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

#ifndef ATS_TESTS_TEST_UTIL_H_
#define ATS_TESTS_TEST_UTIL_H_

#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ats/audio.h"
#include "ats/data_pipeline.h"
#include "ats/model_config.h"
#include "ats/random.h"

namespace ats::testing {

inline AudioWaveform Sine(double freq_hz, double amplitude, int64_t n,
                          int rate = 44100) {
  AudioWaveform a;
  a.sample_rate_hz = rate;
  a.samples.resize(n);
  for (int64_t i = 0; i < n; ++i) {
    a.samples[i] = amplitude * std::sin(2.0 * std::numbers::pi * freq_hz * i / rate);
  }
  return a;
}

inline AudioWaveform Silence(int64_t n, int rate = 44100) {
  AudioWaveform a;
  a.sample_rate_hz = rate;
  a.samples.assign(n, 0.0);
  return a;
}

inline EmaRecording RandomEma(int64_t frames, int channels, uint64_t seed,
                              double rate = 100.0) {
  RandomStream rng(seed, "ema");
  EmaRecording e;
  e.sample_rate_hz = rate;
  e.samples.resize(frames, channels);
  for (int64_t t = 0; t < frames; ++t) {
    for (int c = 0; c < channels; ++c) e.samples(t, c) = rng.Uniform(-5.0, 5.0);
  }
  e.channel_names = DefaultChannelNames(channels);
  return e;
}

inline Eigen::MatrixXd RandomMatrix(Eigen::Index rows, Eigen::Index cols,
                                    uint64_t seed, double scale = 1.0) {
  RandomStream rng(seed, "matrix");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = scale * rng.Uniform(-1.0, 1.0);
  }
  return m;
}

// Reduced model used where default dimensions would only slow tests down.
inline ModelConfig SmallConfig() {
  ModelConfig cfg;
  cfg.n_speakers = 2;
  cfg.d_hidden = 16;
  cfg.d_style = 8;
  cfg.d_ff = 32;
  cfg.n_conformer_blocks = 1;
  cfg.n_attn_heads = 2;
  cfg.n_baseline_conv_blocks = 1;
  cfg.n_baseline_layers = 1;
  return cfg;
}

// Fresh directory under the test temp root, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& name) {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    std::string tag = name;
    if (info != nullptr) tag = std::string(info->test_suite_name()) + "_" + info->name();
    path_ = std::filesystem::path(::testing::TempDir()) / ("ats_" + tag);
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace ats::testing

#endif  // ATS_TESTS_TEST_UTIL_H_
