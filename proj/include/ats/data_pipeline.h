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

// Recording types, alignment of EMA to the acoustic frame grid, and the
// synthetic verification corpus.

#ifndef ATS_DATA_PIPELINE_H_
#define ATS_DATA_PIPELINE_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ats/audio.h"
#include "ats/features.h"
#include "ats/model_config.h"

namespace ats {

struct EmaRecording {
  Eigen::MatrixXd samples;  // [T_ema x C_ema], millimetres
  double sample_rate_hz = 100.0;
  std::vector<std::string> channel_names;

  Eigen::Index num_frames() const { return samples.rows(); }
  Eigen::Index num_channels() const { return samples.cols(); }
  double duration_s() const { return samples.rows() / sample_rate_hz; }
  // Throws DataError: kChannelCountMismatch when the names do not match the
  // column count, kInvalidData on a bad rate or non-finite samples.
  void Validate() const;
};

// "<SENSOR>_<AXIS>" for sensors TR, TB, TT, UL, LL, JAW and axes X, Y, Z.
std::vector<std::string> HaskinsChannelNames();
// Haskins names for 18 channels, "CH<i>" otherwise.
std::vector<std::string> DefaultChannelNames(int channels);

struct UtteranceSample {
  std::string utterance_id;
  Eigen::MatrixXd ema;  // [T x C_ema] on the mel frame grid
  MelSpectrogram mel;
  ProsodyTrack prosody;
  int speaker_index = 0;

  Eigen::Index num_frames() const { return mel.num_frames(); }
  // Throws DataError(kInvalidData) unless ema rows, mel frames and prosody
  // length agree.
  void Validate() const;
};

struct AlignedPair {
  EmaRecording ema;
  AudioWaveform audio;
};

// Largest allowed difference between EMA and audio durations.
inline constexpr double kMaxDurationMismatchS = 0.05;

// Removes leading and trailing audio whose short-term energy sits more than
// |threshold_db| below the loudest analysis frame, and crops the EMA to the
// same interval. Frames of frame_ms advance by hop_ms and the last ones may
// be partial; a frame's energy is its sum of squares, which makes the
// operation idempotent.
//
// Throws DataError(kUnalignedPair) when durations differ by more than
// kMaxDurationMismatchS, and DataError(kAllSilent) for digital silence.
AlignedPair TrimSilence(const EmaRecording& ema, const AudioWaveform& audio,
                        double threshold_db, double frame_ms = 25.0,
                        double hop_ms = 10.0);

// Per-channel linear interpolation onto target_frames uniformly spaced
// points spanning the first to the last input row. A single target frame
// yields the first row. Throws DataError(kInvalidData) when T_ema < 2 or
// target_frames < 1.
Eigen::MatrixXd ResampleEma(const Eigen::MatrixXd& ema, int64_t target_frames);
Eigen::MatrixXd ResampleEma(const EmaRecording& ema, int64_t target_frames);

// Trim, extract mel, resample EMA to the mel grid, extract pitch and energy.
UtteranceSample BuildSample(const EmaRecording& ema, const AudioWaveform& audio,
                            int speaker_index, const ModelConfig& cfg,
                            std::string utterance_id = "");

struct SyntheticRecording {
  std::string utterance_id;
  int speaker_index = 0;
  EmaRecording ema;
  AudioWaveform audio;
};

// Base F0 of a synthetic speaker: geometric spacing over [100, 220] Hz.
double SpeakerBaseF0(int speaker_index, int n_speakers);

// Raw paired recordings. Utterance i belongs to speaker i mod n_speakers and
// lasts between 1 and 3 s. EMA channels are sums of up to five slow
// sinusoids; the audio is a harmonic tone at a speaker-specific F0 whose
// three formants follow EMA channels 4, 7 and 14 and whose level follows
// channel 17 (all modulo c_ema). Values are float32-representable so they
// survive the on-disk formats exactly.
std::vector<SyntheticRecording> GenerateSyntheticRecordings(
    int n_speakers, int n_utterances, uint64_t seed, const ModelConfig& cfg);

// GenerateSyntheticRecordings passed through BuildSample.
std::vector<UtteranceSample> GenerateSyntheticCorpus(int n_speakers,
                                                     int n_utterances,
                                                     uint64_t seed,
                                                     const ModelConfig& cfg);

}  // namespace ats

#endif  // ATS_DATA_PIPELINE_H_
