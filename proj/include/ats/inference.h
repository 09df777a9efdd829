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

// Inference path: EMA + speaker -> integration block -> style encoder ->
// mel generator. The variance predictors are not evaluated.

#ifndef ATS_INFERENCE_H_
#define ATS_INFERENCE_H_

#include <cstdint>

#include <Eigen/Dense>

#include "ats/data_pipeline.h"
#include "ats/features.h"
#include "ats/model_config.h"
#include "ats/parameter_store.h"

namespace ats {

// round(EMA duration * audio rate / hop), at least 1.
int64_t InferenceFrameCount(const EmaRecording& ema, const FeatureConfig& fc);

// Resamples the EMA to target_frames (derived from its duration when
// target_frames <= 0) and runs the inference path. Throws std::out_of_range
// for a bad speaker index or a parameter missing from the store.
MelSpectrogram SynthesizeMel(const EmaRecording& ema, int speaker_index,
                             const ParameterStore& params, const ModelConfig& cfg,
                             int64_t target_frames = 0);

// Same, for EMA already on the mel frame grid.
MelSpectrogram SynthesizeMelFromFrames(const Eigen::MatrixXd& ema_frames,
                                       int speaker_index,
                                       const ParameterStore& params,
                                       const ModelConfig& cfg);

}  // namespace ats

#endif  // ATS_INFERENCE_H_
