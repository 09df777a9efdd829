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

#include "ats/data_pipeline.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ats/errors.h"
#include "ats/random.h"

namespace ats {

namespace {

// Peak frame mean square below which an utterance counts as digital silence.
constexpr double kSilentMeanSquare = 1e-14;

// Synthetic corpus constants.
constexpr double kEmaRateHz = 100.0;
constexpr double kMinDurationS = 1.0;
constexpr double kMaxDurationS = 3.0;
constexpr double kMinEdgeSilenceS = 0.10;
constexpr double kMaxEdgeSilenceS = 0.25;
constexpr double kFadeS = 0.02;
constexpr double kNoiseStd = 1e-3;
constexpr double kPeakLevel = 0.3;
constexpr double kMaxHarmonicHz = 8000.0;
constexpr int kControlBlock = 64;
constexpr int kMaxSinusoids = 5;

struct Formant {
  int channel;
  double center_hz;
  double hz_per_mm;
  double min_hz;
  double max_hz;
  double gain;
  double bandwidth_hz;
};

constexpr std::array<Formant, 3> kFormants = {{
    {4, 550.0, 50.0, 250.0, 1000.0, 1.0, 90.0},
    {7, 1500.0, 120.0, 800.0, 2600.0, 0.6, 120.0},
    {14, 2600.0, 80.0, 2000.0, 3600.0, 0.35, 160.0},
}};
constexpr int kLevelChannel = 17;
constexpr double kEnvelopeFloor = 0.03;

struct Sinusoid {
  double freq_hz;
  double amplitude;
  double phase;
};

// One articulator channel: offset plus a few slow sinusoids.
struct Trajectory {
  double offset = 0.0;
  std::vector<Sinusoid> parts;

  double Deviation(double t) const {
    double v = 0.0;
    for (const Sinusoid& s : parts) {
      v += s.amplitude * std::sin(2.0 * std::numbers::pi * s.freq_hz * t + s.phase);
    }
    return v;
  }
};

double Quantize(double v) { return static_cast<double>(static_cast<float>(v)); }

SyntheticRecording Synthesize(int index, int n_speakers, uint64_t seed,
                              const ModelConfig& cfg) {
  RandomStream rng(seed, "utterance" + std::to_string(index));
  const int fs = cfg.features.sample_rate_hz;
  const int channels = cfg.c_ema;

  SyntheticRecording rec;
  rec.utterance_id = "utt" + std::to_string(index);
  rec.speaker_index = index % n_speakers;

  const double duration = rng.Uniform(kMinDurationS, kMaxDurationS);
  const double lead = rng.Uniform(kMinEdgeSilenceS, kMaxEdgeSilenceS);
  const double trail = rng.Uniform(kMinEdgeSilenceS, kMaxEdgeSilenceS);
  const int64_t n_samples = std::llround(duration * fs);
  const int64_t n_ema = std::llround(duration * kEmaRateHz);

  std::vector<Trajectory> tracks(channels);
  for (Trajectory& tr : tracks) {
    tr.offset = rng.Uniform(-10.0, 10.0);
    const int parts = static_cast<int>(rng.UniformInt(1, kMaxSinusoids));
    for (int j = 0; j < parts; ++j) {
      Sinusoid s;
      s.freq_hz = rng.Uniform(0.5, 4.0);
      s.amplitude = rng.Uniform(0.5, 3.0) / std::sqrt(static_cast<double>(parts));
      s.phase = rng.Uniform(0.0, 2.0 * std::numbers::pi);
      tr.parts.push_back(s);
    }
  }

  rec.ema.sample_rate_hz = kEmaRateHz;
  rec.ema.channel_names = DefaultChannelNames(channels);
  rec.ema.samples.resize(n_ema, channels);
  for (int64_t r = 0; r < n_ema; ++r) {
    const double t = r / kEmaRateHz;
    for (int c = 0; c < channels; ++c) {
      rec.ema.samples(r, c) = Quantize(tracks[c].offset + tracks[c].Deviation(t));
    }
  }

  const double base_f0 = SpeakerBaseF0(rec.speaker_index, n_speakers);
  const double intonation_hz = rng.Uniform(0.3, 1.5);
  const double intonation_phase = rng.Uniform(0.0, 2.0 * std::numbers::pi);
  const double voice_on = lead;
  const double voice_off = duration - trail;
  const int max_harmonics =
      static_cast<int>(kMaxHarmonicHz / (base_f0 * 0.94)) + 1;

  // Controls at block boundaries, interpolated linearly inside each block.
  struct Controls {
    double f0;
    std::vector<double> amps;
  };
  auto controls_at = [&](int64_t n) {
    const double t = static_cast<double>(n) / fs;
    Controls c;
    c.f0 = base_f0 *
           (1.0 + 0.06 * std::sin(2.0 * std::numbers::pi * intonation_hz * t +
                                  intonation_phase));
    c.amps.assign(max_harmonics, 0.0);
    double gate = 0.0;
    if (t > voice_on && t < voice_off) {
      const double edge = std::min(t - voice_on, voice_off - t);
      gate = edge >= kFadeS
                 ? 1.0
                 : 0.5 * (1.0 - std::cos(std::numbers::pi * edge / kFadeS));
    }
    if (gate == 0.0) return c;
    std::array<double, 3> formant_hz;
    for (size_t i = 0; i < kFormants.size(); ++i) {
      const Formant& f = kFormants[i];
      const double d = tracks[f.channel % channels].Deviation(t);
      formant_hz[i] = std::clamp(f.center_hz + f.hz_per_mm * d, f.min_hz, f.max_hz);
    }
    const double jaw = tracks[kLevelChannel % channels].Deviation(t);
    const double level = kPeakLevel * (0.75 + 0.25 * std::tanh(jaw / 2.0)) * gate;
    double total = 0.0;
    for (int h = 1; h <= max_harmonics; ++h) {
      const double f = h * c.f0;
      if (f > kMaxHarmonicHz) break;
      double env = kEnvelopeFloor;
      for (size_t i = 0; i < kFormants.size(); ++i) {
        const double x = (f - formant_hz[i]) / kFormants[i].bandwidth_hz;
        env += kFormants[i].gain / (1.0 + x * x);
      }
      c.amps[h - 1] = env;
      total += env;
    }
    for (double& a : c.amps) a *= level / total;
    return c;
  };

  rec.audio.sample_rate_hz = fs;
  rec.audio.samples.assign(n_samples, 0.0);
  double theta = 0.0;
  Controls next = controls_at(0);
  for (int64_t start = 0; start < n_samples; start += kControlBlock) {
    const Controls cur = std::move(next);
    next = controls_at(start + kControlBlock);
    const int64_t stop = std::min<int64_t>(start + kControlBlock, n_samples);
    for (int64_t n = start; n < stop; ++n) {
      const double w = static_cast<double>(n - start) / kControlBlock;
      const double f0 = cur.f0 + w * (next.f0 - cur.f0);
      double v = 0.0;
      for (int h = 0; h < max_harmonics; ++h) {
        const double a = cur.amps[h] + w * (next.amps[h] - cur.amps[h]);
        if (a != 0.0) v += a * std::sin((h + 1) * theta);
      }
      rec.audio.samples[n] = v;
      theta += 2.0 * std::numbers::pi * f0 / fs;
      if (theta > 2.0 * std::numbers::pi) theta -= 2.0 * std::numbers::pi;
    }
  }
  RandomStream noise(seed, "noise" + std::to_string(index));
  for (double& s : rec.audio.samples) {
    s = Quantize(std::clamp(s + kNoiseStd * noise.Normal(), -1.0, 1.0));
  }
  return rec;
}

}  // namespace

void EmaRecording::Validate() const {
  if (sample_rate_hz <= 0.0 || !std::isfinite(sample_rate_hz)) {
    throw DataError(DataErrorCode::kInvalidData, "non-positive EMA rate");
  }
  if (samples.cols() < 1) {
    throw DataError(DataErrorCode::kInvalidData, "EMA has no channels");
  }
  if (static_cast<Eigen::Index>(channel_names.size()) != samples.cols()) {
    throw DataError(DataErrorCode::kChannelCountMismatch,
                    std::to_string(channel_names.size()) + " names for " +
                        std::to_string(samples.cols()) + " columns");
  }
  if (!samples.allFinite()) {
    throw DataError(DataErrorCode::kInvalidData, "non-finite EMA sample");
  }
}

std::vector<std::string> HaskinsChannelNames() {
  static const char* kSensors[] = {"TR", "TB", "TT", "UL", "LL", "JAW"};
  static const char* kAxes[] = {"X", "Y", "Z"};
  std::vector<std::string> names;
  for (const char* sensor : kSensors) {
    for (const char* axis : kAxes) names.push_back(std::string(sensor) + "_" + axis);
  }
  return names;
}

std::vector<std::string> DefaultChannelNames(int channels) {
  if (channels == 18) return HaskinsChannelNames();
  std::vector<std::string> names;
  for (int i = 0; i < channels; ++i) names.push_back("CH" + std::to_string(i));
  return names;
}

void UtteranceSample::Validate() const {
  const Eigen::Index t = mel.num_frames();
  if (ema.rows() != t || static_cast<Eigen::Index>(prosody.size()) != t ||
      static_cast<Eigen::Index>(prosody.energy_db.size()) != t) {
    throw DataError(DataErrorCode::kInvalidData,
                    "misaligned sample '" + utterance_id + "'");
  }
  prosody.Validate();
}

AlignedPair TrimSilence(const EmaRecording& ema, const AudioWaveform& audio,
                        double threshold_db, double frame_ms, double hop_ms) {
  if (std::abs(ema.duration_s() - audio.duration_s()) > kMaxDurationMismatchS) {
    throw DataError(DataErrorCode::kUnalignedPair,
                    "EMA " + std::to_string(ema.duration_s()) + " s vs audio " +
                        std::to_string(audio.duration_s()) + " s");
  }
  const auto n = static_cast<int64_t>(audio.samples.size());
  const int64_t frame = std::max<int64_t>(
      1, static_cast<int64_t>(std::floor(frame_ms * 1e-3 * audio.sample_rate_hz)));
  const int64_t hop = std::max<int64_t>(
      1, static_cast<int64_t>(std::floor(hop_ms * 1e-3 * audio.sample_rate_hz)));

  std::vector<double> prefix(n + 1, 0.0);
  for (int64_t i = 0; i < n; ++i) {
    prefix[i + 1] = prefix[i] + audio.samples[i] * audio.samples[i];
  }
  std::vector<double> energy;
  for (int64_t start = 0; start < n; start += hop) {
    energy.push_back(prefix[std::min(start + frame, n)] - prefix[start]);
  }
  const double peak =
      energy.empty() ? 0.0 : *std::max_element(energy.begin(), energy.end());
  if (peak <= kSilentMeanSquare * static_cast<double>(frame)) {
    throw DataError(DataErrorCode::kAllSilent, "peak frame energy " +
                                                   std::to_string(peak));
  }
  const double floor_db = 10.0 * std::log10(peak + 1e-20) + threshold_db;
  int64_t first = -1, last = -1;
  for (size_t k = 0; k < energy.size(); ++k) {
    if (10.0 * std::log10(energy[k] + 1e-20) >= floor_db) {
      if (first < 0) first = static_cast<int64_t>(k);
      last = static_cast<int64_t>(k);
    }
  }
  const int64_t begin = first * hop;
  const int64_t end = std::min(last * hop + frame, n);

  AlignedPair out;
  out.audio.sample_rate_hz = audio.sample_rate_hz;
  out.audio.samples.assign(audio.samples.begin() + begin,
                           audio.samples.begin() + end);

  const int64_t t_ema = ema.num_frames();
  const double scale = static_cast<double>(t_ema) / static_cast<double>(n);
  int64_t row_begin = std::llround(begin * scale);
  int64_t row_end = std::llround(end * scale);
  row_begin = std::clamp<int64_t>(row_begin, 0, std::max<int64_t>(t_ema - 1, 0));
  row_end = std::clamp<int64_t>(row_end, row_begin + 1, t_ema);
  out.ema.sample_rate_hz = ema.sample_rate_hz;
  out.ema.channel_names = ema.channel_names;
  out.ema.samples = ema.samples.middleRows(row_begin, row_end - row_begin);
  return out;
}

Eigen::MatrixXd ResampleEma(const Eigen::MatrixXd& ema, int64_t target_frames) {
  if (target_frames < 1) {
    throw DataError(DataErrorCode::kInvalidData,
                    "target frame count " + std::to_string(target_frames));
  }
  const Eigen::Index t_in = ema.rows();
  if (t_in < 2) {
    throw DataError(DataErrorCode::kInvalidData,
                    "EMA needs at least 2 frames to interpolate");
  }
  Eigen::MatrixXd out(target_frames, ema.cols());
  if (target_frames == 1) {
    out.row(0) = ema.row(0);
    return out;
  }
  for (int64_t i = 0; i < target_frames; ++i) {
    const double p = static_cast<double>(i) * static_cast<double>(t_in - 1) /
                     static_cast<double>(target_frames - 1);
    const auto i0 = std::min<Eigen::Index>(static_cast<Eigen::Index>(p), t_in - 2);
    const double w = p - static_cast<double>(i0);
    out.row(i) = (1.0 - w) * ema.row(i0) + w * ema.row(i0 + 1);
  }
  return out;
}

Eigen::MatrixXd ResampleEma(const EmaRecording& ema, int64_t target_frames) {
  return ResampleEma(ema.samples, target_frames);
}

UtteranceSample BuildSample(const EmaRecording& ema, const AudioWaveform& audio,
                            int speaker_index, const ModelConfig& cfg,
                            std::string utterance_id) {
  ema.Validate();
  audio.Validate();
  if (speaker_index < 0 || speaker_index >= cfg.n_speakers) {
    throw DataError(DataErrorCode::kInvalidData,
                    "speaker index " + std::to_string(speaker_index) +
                        " outside [0, " + std::to_string(cfg.n_speakers) + ")");
  }
  if (ema.num_channels() != cfg.c_ema) {
    throw DataError(DataErrorCode::kChannelCountMismatch,
                    "EMA has " + std::to_string(ema.num_channels()) +
                        " channels, model expects " + std::to_string(cfg.c_ema));
  }
  const FeatureConfig& fc = cfg.features;
  const AlignedPair trimmed = TrimSilence(ema, audio, fc.trim_threshold_db,
                                          fc.trim_frame_ms, fc.trim_hop_ms);
  UtteranceSample sample;
  sample.utterance_id = std::move(utterance_id);
  sample.speaker_index = speaker_index;
  sample.mel = ExtractMel(trimmed.audio, cfg);
  sample.ema = ResampleEma(trimmed.ema, sample.mel.num_frames());
  PitchTrack pitch = ExtractPitch(trimmed.audio, cfg);
  sample.prosody.pitch_db = std::move(pitch.pitch_db);
  sample.prosody.voiced = std::move(pitch.voiced);
  sample.prosody.energy_db = ExtractEnergy(trimmed.audio, cfg);
  sample.Validate();
  return sample;
}

double SpeakerBaseF0(int speaker_index, int n_speakers) {
  if (n_speakers <= 1) return 140.0;
  return 100.0 * std::pow(2.2, static_cast<double>(speaker_index) / (n_speakers - 1));
}

std::vector<SyntheticRecording> GenerateSyntheticRecordings(
    int n_speakers, int n_utterances, uint64_t seed, const ModelConfig& cfg) {
  if (n_speakers < 1 || n_utterances < 1) {
    throw std::invalid_argument("synthetic corpus needs >= 1 speaker and utterance");
  }
  cfg.Validate();
  std::vector<SyntheticRecording> recs;
  recs.reserve(n_utterances);
  for (int i = 0; i < n_utterances; ++i) {
    recs.push_back(Synthesize(i, n_speakers, seed, cfg));
  }
  return recs;
}

std::vector<UtteranceSample> GenerateSyntheticCorpus(int n_speakers,
                                                     int n_utterances,
                                                     uint64_t seed,
                                                     const ModelConfig& cfg) {
  std::vector<UtteranceSample> corpus;
  for (const SyntheticRecording& rec :
       GenerateSyntheticRecordings(n_speakers, n_utterances, seed, cfg)) {
    corpus.push_back(BuildSample(rec.ema, rec.audio, rec.speaker_index, cfg,
                                 rec.utterance_id));
  }
  return corpus;
}

}  // namespace ats
