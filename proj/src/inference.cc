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

#include "ats/inference.h"

#include <algorithm>
#include <cmath>

#include "ats/autodiff.h"
#include "ats/model.h"

namespace ats {

int64_t InferenceFrameCount(const EmaRecording& ema, const FeatureConfig& fc) {
  const double frames =
      ema.duration_s() * fc.sample_rate_hz / static_cast<double>(fc.hop_samples);
  return std::max<int64_t>(1, std::llround(frames));
}

MelSpectrogram SynthesizeMelFromFrames(const Eigen::MatrixXd& ema_frames,
                                       int speaker_index,
                                       const ParameterStore& params,
                                       const ModelConfig& cfg) {
  ad::Graph graph(/*record_gradients=*/false);
  ForwardContext ctx(graph, params);
  const ProposedOutputs out =
      ForwardProposed(ctx, ema_frames, speaker_index, cfg, /*with_predictors=*/false);
  MelSpectrogram mel;
  mel.frames = out.mel.value();
  mel.hop_samples = cfg.features.hop_samples;
  mel.win_samples = cfg.features.win_samples;
  mel.audio_rate_hz = cfg.features.sample_rate_hz;
  return mel;
}

MelSpectrogram SynthesizeMel(const EmaRecording& ema, int speaker_index,
                             const ParameterStore& params, const ModelConfig& cfg,
                             int64_t target_frames) {
  ema.Validate();
  if (target_frames <= 0) target_frames = InferenceFrameCount(ema, cfg.features);
  return SynthesizeMelFromFrames(ResampleEma(ema, target_frames), speaker_index,
                                 params, cfg);
}

}  // namespace ats
