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

#include "ats/model_config.h"

#include <string>

#include "ats/errors.h"
#include "json_field.h"

namespace ats {

namespace {

void Check(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invalid config: " + what);
}

}  // namespace

NLOHMANN_JSON_SERIALIZE_ENUM(WindowType, {{WindowType::kHann, "hann"},
                                          {WindowType::kRectangular,
                                           "rectangular"}})

void FeatureConfig::Validate() const {
  Check(sample_rate_hz > 0, "sample_rate_hz must be positive");
  Check(win_samples >= 2, "win_samples must be at least 2");
  Check(hop_samples > 0, "hop_samples must be positive");
  Check(log_floor > 0.0, "log_floor must be positive");
  Check(f0_min_hz > 0.0 && f0_max_hz > f0_min_hz, "f0 band must be increasing");
  Check(f0_max_hz < sample_rate_hz / 2.0, "f0_max_hz must be below Nyquist");
  Check(sample_rate_hz / f0_min_hz < win_samples,
        "the window must hold one period of f0_min_hz");
  Check(trim_frame_ms > 0.0 && trim_hop_ms > 0.0, "trim frames must be positive");
}

void ModelConfig::Validate() const {
  Check(n_speakers >= 1, "n_speakers must be positive");
  Check(c_ema >= 1, "c_ema must be positive");
  Check(d_hidden >= 1 && d_style >= 1 && n_mels >= 1 && d_ff >= 1,
        "layer widths must be positive");
  Check(n_attn_heads >= 1, "n_attn_heads must be positive");
  Check(d_hidden % n_attn_heads == 0,
        "d_hidden must be divisible by n_attn_heads");
  Check(d_style % n_attn_heads == 0, "d_style must be divisible by n_attn_heads");
  Check(n_conformer_blocks >= 0 && n_baseline_conv_blocks >= 0 &&
            n_baseline_layers >= 0,
        "block counts must be non-negative");
  Check(conv_kernel >= 1 && predictor_kernel >= 1, "kernels must be positive");
  Check(lambda_mel >= 0.0 && lambda_pitch >= 0.0 && lambda_energy >= 0.0,
        "loss weights must be non-negative");
  Check(dropout >= 0.0 && dropout < 1.0, "dropout must lie in [0, 1)");
  features.Validate();
}

void to_json(nlohmann::json& j, const FeatureConfig& c) {
  j = nlohmann::json{{"sample_rate_hz", c.sample_rate_hz},
                     {"win_samples", c.win_samples},
                     {"hop_samples", c.hop_samples},
                     {"window", c.window},
                     {"log_floor", c.log_floor},
                     {"f0_min_hz", c.f0_min_hz},
                     {"f0_max_hz", c.f0_max_hz},
                     {"voicing_threshold", c.voicing_threshold},
                     {"trim_threshold_db", c.trim_threshold_db},
                     {"trim_frame_ms", c.trim_frame_ms},
                     {"trim_hop_ms", c.trim_hop_ms}};
}

void from_json(const nlohmann::json& j, FeatureConfig& c) {
  ReadField(j, "sample_rate_hz", c.sample_rate_hz);
  ReadField(j, "win_samples", c.win_samples);
  ReadField(j, "hop_samples", c.hop_samples);
  ReadField(j, "window", c.window);
  ReadField(j, "log_floor", c.log_floor);
  ReadField(j, "f0_min_hz", c.f0_min_hz);
  ReadField(j, "f0_max_hz", c.f0_max_hz);
  ReadField(j, "voicing_threshold", c.voicing_threshold);
  ReadField(j, "trim_threshold_db", c.trim_threshold_db);
  ReadField(j, "trim_frame_ms", c.trim_frame_ms);
  ReadField(j, "trim_hop_ms", c.trim_hop_ms);
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = nlohmann::json{{"n_speakers", c.n_speakers},
                     {"c_ema", c.c_ema},
                     {"d_hidden", c.d_hidden},
                     {"d_style", c.d_style},
                     {"n_mels", c.n_mels},
                     {"n_conformer_blocks", c.n_conformer_blocks},
                     {"n_attn_heads", c.n_attn_heads},
                     {"conv_kernel", c.conv_kernel},
                     {"predictor_kernel", c.predictor_kernel},
                     {"d_ff", c.d_ff},
                     {"n_baseline_conv_blocks", c.n_baseline_conv_blocks},
                     {"n_baseline_layers", c.n_baseline_layers},
                     {"lambda_mel", c.lambda_mel},
                     {"lambda_pitch", c.lambda_pitch},
                     {"lambda_energy", c.lambda_energy},
                     {"dropout", c.dropout},
                     {"seed", c.seed},
                     {"features", c.features}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  ReadField(j, "n_speakers", c.n_speakers);
  ReadField(j, "c_ema", c.c_ema);
  ReadField(j, "d_hidden", c.d_hidden);
  ReadField(j, "d_style", c.d_style);
  ReadField(j, "n_mels", c.n_mels);
  ReadField(j, "n_conformer_blocks", c.n_conformer_blocks);
  ReadField(j, "n_attn_heads", c.n_attn_heads);
  ReadField(j, "conv_kernel", c.conv_kernel);
  ReadField(j, "predictor_kernel", c.predictor_kernel);
  ReadField(j, "d_ff", c.d_ff);
  ReadField(j, "n_baseline_conv_blocks", c.n_baseline_conv_blocks);
  ReadField(j, "n_baseline_layers", c.n_baseline_layers);
  ReadField(j, "lambda_mel", c.lambda_mel);
  ReadField(j, "lambda_pitch", c.lambda_pitch);
  ReadField(j, "lambda_energy", c.lambda_energy);
  ReadField(j, "dropout", c.dropout);
  ReadField(j, "seed", c.seed);
  ReadField(j, "features", c.features);
}

}  // namespace ats
