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

// Waveform rendering from a log-mel spectrogram without a neural vocoder.

#ifndef ATS_GRIFFIN_LIM_H_
#define ATS_GRIFFIN_LIM_H_

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ats/audio.h"
#include "ats/features.h"
#include "ats/model_config.h"

namespace ats {

struct GriffinLimOptions {
  int n_iters = 60;
  uint64_t seed = 0;  // initial random phase
};

// Linear magnitude spectrogram [T x (win / 2 + 1)] from log-mel frames: each
// mel magnitude is spread uniformly over its filter, and overlapping
// filters are averaged with their triangle weights. Negative values are
// clamped to zero.
Eigen::MatrixXd MelToMagnitude(const MelSpectrogram& mel, const ModelConfig& cfg);

// Inverse STFT by weighted overlap-add (least-squares estimate from
// modified STFT). spectra holds one-sided complex frames.
std::vector<double> InverseStft(
    const std::vector<std::vector<std::complex<double>>>& spectra,
    const std::vector<double>& window, int hop);

std::vector<std::vector<std::complex<double>>> Stft(const std::vector<double>& x,
                                                    const std::vector<double>& window,
                                                    int hop, int64_t frames);

// Spectral convergence of a waveform against a target magnitude, using the
// full two-sided spectrum norm:
//   || |STFT(x)| - S || / || S ||.
double SpectralConvergence(const std::vector<double>& x, const Eigen::MatrixXd& target,
                           const std::vector<double>& window, int hop);

// Phase reconstruction with n_iters projection rounds on the mel frame grid.
// Output has (T - 1) * hop + win samples, clipped to [-1, 1]. When
// convergence is non-null it receives the spectral convergence after each
// round, which is non-increasing.
AudioWaveform GriffinLim(const MelSpectrogram& mel, const ModelConfig& cfg,
                         const GriffinLimOptions& options = {},
                         std::vector<double>* convergence = nullptr);

}  // namespace ats

#endif  // ATS_GRIFFIN_LIM_H_
