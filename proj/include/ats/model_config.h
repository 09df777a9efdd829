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

#ifndef ATS_MODEL_CONFIG_H_
#define ATS_MODEL_CONFIG_H_

#include <cstdint>

#include "json.hpp"

namespace ats {

enum class WindowType { kHann, kRectangular };

// Acoustic front-end settings. Frames are 1024-sample windows advanced by
// 768 samples (25% overlap) with no centre padding.
struct FeatureConfig {
  int sample_rate_hz = 44100;
  int win_samples = 1024;
  int hop_samples = 768;
  WindowType window = WindowType::kHann;
  // Floor inside log-mel and energy logarithms.
  double log_floor = 1e-8;
  double f0_min_hz = 60.0;
  double f0_max_hz = 400.0;
  // Minimum normalized autocorrelation peak for a voiced frame.
  double voicing_threshold = 0.3;
  double trim_threshold_db = -40.0;
  double trim_frame_ms = 25.0;
  double trim_hop_ms = 10.0;

  void Validate() const;
};

struct ModelConfig {
  int n_speakers = 8;
  int c_ema = 18;
  int d_hidden = 256;
  int d_style = 128;
  int n_mels = 40;
  int n_conformer_blocks = 8;
  int n_attn_heads = 4;
  int conv_kernel = 5;
  int predictor_kernel = 3;
  int d_ff = 1024;
  int n_baseline_conv_blocks = 3;
  int n_baseline_layers = 6;
  double lambda_mel = 0.8;
  double lambda_pitch = 0.1;
  double lambda_energy = 0.1;
  double dropout = 0.0;
  uint64_t seed = 0;
  FeatureConfig features;

  // Throws ConfigError.
  void Validate() const;
};

void to_json(nlohmann::json& j, const FeatureConfig& c);
void from_json(const nlohmann::json& j, FeatureConfig& c);
void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

}  // namespace ats

#endif  // ATS_MODEL_CONFIG_H_
