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

// Acoustic targets on a shared frame grid: frame t covers samples
// [t * hop, t * hop + win), T = floor((N - win) / hop) + 1.

#ifndef ATS_FEATURES_H_
#define ATS_FEATURES_H_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ats/audio.h"
#include "ats/model_config.h"

namespace ats {

struct MelSpectrogram {
  Eigen::MatrixXd frames;  // [T x n_mels], natural-log magnitudes
  int hop_samples = 768;
  int win_samples = 1024;
  int audio_rate_hz = 44100;

  Eigen::Index num_frames() const { return frames.rows(); }
  // Throws DataError(kInvalidData).
  void Validate(int n_mels) const;
};

struct ProsodyTrack {
  std::vector<double> pitch_db;   // 20 log10(F0 / 1 Hz); 0 when unvoiced
  std::vector<double> energy_db;  // 20 log10(spectral L2 norm + floor)
  std::vector<bool> voiced;

  size_t size() const { return pitch_db.size(); }
  void Validate() const;
};

inline constexpr double kUnvoicedPitchDb = 0.0;

double ToDb(double amplitude);
double FromDb(double db);

// Number of fully contained frames; 0 when n_samples < win.
int64_t FrameCount(int64_t n_samples, int win_samples, int hop_samples);

std::vector<double> MakeWindow(WindowType type, int length);

double HzToMel(double hz);
double MelToHz(double mel);
// Triangular HTK-scale filters spanning 0 Hz to Nyquist, peak weight 1:
// [n_mels x (win / 2 + 1)].
Eigen::MatrixXd MelFilterbank(int n_mels, int win_samples, int sample_rate_hz);
std::vector<double> MelCenterFrequencies(int n_mels, int sample_rate_hz);

// One-sided magnitude spectra of windowed frames: [T x (win / 2 + 1)].
// Throws DataError(kAudioTooShort) when the audio holds no full frame.
Eigen::MatrixXd MagnitudeSpectrogram(const AudioWaveform& audio,
                                     const FeatureConfig& cfg);

MelSpectrogram ExtractMel(const AudioWaveform& audio, const ModelConfig& cfg);

struct PitchTrack {
  std::vector<double> pitch_db;
  std::vector<bool> voiced;
};

// Normalized autocorrelation per frame over the configured F0 band.
PitchTrack ExtractPitch(const AudioWaveform& audio, const ModelConfig& cfg);

std::vector<double> ExtractEnergy(const AudioWaveform& audio,
                                  const ModelConfig& cfg);

}  // namespace ats

#endif  // ATS_FEATURES_H_
