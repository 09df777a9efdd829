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

#include "ats/features.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "ats/errors.h"

namespace ats {

namespace {

// Among local maxima of the normalized autocorrelation, the shortest lag
// scoring at least this fraction of the best one wins. Suppresses picks at
// multiples of the true period.
constexpr double kOctaveTolerance = 0.9;

// Mean-square level below which a frame is treated as digital silence.
constexpr double kSilenceMeanSquare = 1e-14;

void RequireFrames(const AudioWaveform& audio, const FeatureConfig& cfg) {
  if (static_cast<int64_t>(audio.samples.size()) < cfg.win_samples) {
    throw DataError(DataErrorCode::kAudioTooShort,
                    std::to_string(audio.samples.size()) + " samples < window " +
                        std::to_string(cfg.win_samples));
  }
}

}  // namespace

void MelSpectrogram::Validate(int n_mels) const {
  if (frames.rows() < 1 || frames.cols() != n_mels) {
    throw DataError(DataErrorCode::kInvalidData,
                    "mel must be [T >= 1 x " + std::to_string(n_mels) + "]");
  }
  if (!frames.allFinite()) {
    throw DataError(DataErrorCode::kInvalidData, "mel has non-finite values");
  }
  if (hop_samples <= 0 || win_samples <= 0 || audio_rate_hz <= 0) {
    throw DataError(DataErrorCode::kInvalidData, "mel frame metadata");
  }
}

void ProsodyTrack::Validate() const {
  if (energy_db.size() != pitch_db.size() || voiced.size() != pitch_db.size()) {
    throw DataError(DataErrorCode::kInvalidData, "prosody track lengths differ");
  }
  for (size_t i = 0; i < pitch_db.size(); ++i) {
    if (!std::isfinite(pitch_db[i]) || !std::isfinite(energy_db[i])) {
      throw DataError(DataErrorCode::kInvalidData, "non-finite prosody value");
    }
  }
}

double ToDb(double amplitude) { return 20.0 * std::log10(amplitude); }

double FromDb(double db) { return std::pow(10.0, db / 20.0); }

int64_t FrameCount(int64_t n_samples, int win_samples, int hop_samples) {
  if (n_samples < win_samples) return 0;
  return (n_samples - win_samples) / hop_samples + 1;
}

std::vector<double> MakeWindow(WindowType type, int length) {
  std::vector<double> w(length, 1.0);
  if (type == WindowType::kHann) {
    for (int n = 0; n < length; ++n) {
      w[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * n / length));
    }
  }
  return w;
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::vector<double> MelCenterFrequencies(int n_mels, int sample_rate_hz) {
  const double top = HzToMel(sample_rate_hz / 2.0);
  std::vector<double> centers(n_mels);
  for (int m = 0; m < n_mels; ++m) {
    centers[m] = MelToHz(top * (m + 1) / (n_mels + 1));
  }
  return centers;
}

Eigen::MatrixXd MelFilterbank(int n_mels, int win_samples, int sample_rate_hz) {
  const int bins = win_samples / 2 + 1;
  const double top = HzToMel(sample_rate_hz / 2.0);
  std::vector<double> edges(n_mels + 2);
  for (int i = 0; i < n_mels + 2; ++i) {
    edges[i] = MelToHz(top * i / (n_mels + 1));
  }
  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(n_mels, bins);
  for (int m = 0; m < n_mels; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate_hz / win_samples;
      if (f > lo && f <= mid) {
        fb(m, k) = (f - lo) / (mid - lo);
      } else if (f > mid && f < hi) {
        fb(m, k) = (hi - f) / (hi - mid);
      }
    }
  }
  return fb;
}

Eigen::MatrixXd MagnitudeSpectrogram(const AudioWaveform& audio,
                                     const FeatureConfig& cfg) {
  RequireFrames(audio, cfg);
  const int win = cfg.win_samples;
  const int64_t frames =
      FrameCount(static_cast<int64_t>(audio.samples.size()), win, cfg.hop_samples);
  const std::vector<double> window = MakeWindow(cfg.window, win);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> buf(win);
  std::vector<std::complex<double>> spec;
  Eigen::MatrixXd mag(frames, win / 2 + 1);
  for (int64_t t = 0; t < frames; ++t) {
    const double* src = audio.samples.data() + t * cfg.hop_samples;
    for (int n = 0; n < win; ++n) buf[n] = src[n] * window[n];
    fft.fwd(spec, buf);
    for (int k = 0; k <= win / 2; ++k) mag(t, k) = std::abs(spec[k]);
  }
  return mag;
}

MelSpectrogram ExtractMel(const AudioWaveform& audio, const ModelConfig& cfg) {
  const FeatureConfig& fc = cfg.features;
  const Eigen::MatrixXd mag = MagnitudeSpectrogram(audio, fc);
  const Eigen::MatrixXd fb =
      MelFilterbank(cfg.n_mels, fc.win_samples, audio.sample_rate_hz);
  MelSpectrogram mel;
  mel.frames = ((mag * fb.transpose()).array() + fc.log_floor).log().matrix();
  mel.hop_samples = fc.hop_samples;
  mel.win_samples = fc.win_samples;
  mel.audio_rate_hz = audio.sample_rate_hz;
  return mel;
}

PitchTrack ExtractPitch(const AudioWaveform& audio, const ModelConfig& cfg) {
  const FeatureConfig& fc = cfg.features;
  RequireFrames(audio, fc);
  const int win = fc.win_samples;
  const int64_t frames = FrameCount(static_cast<int64_t>(audio.samples.size()),
                                    win, fc.hop_samples);
  const double rate = audio.sample_rate_hz;
  const int min_lag = std::max(2, static_cast<int>(std::floor(rate / fc.f0_max_hz)));
  const int max_lag =
      std::min(win - 2, static_cast<int>(std::ceil(rate / fc.f0_min_hz)));

  // Autocorrelation numerators via a zero-padded FFT.
  int nfft = 1;
  while (nfft < 2 * win) nfft *= 2;
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> buf(nfft), acf;
  std::vector<std::complex<double>> spec;
  std::vector<double> prefix(win + 1), r(max_lag + 2, 0.0);

  PitchTrack track;
  track.pitch_db.assign(frames, kUnvoicedPitchDb);
  track.voiced.assign(frames, false);
  for (int64_t t = 0; t < frames; ++t) {
    const double* x = audio.samples.data() + t * fc.hop_samples;
    prefix[0] = 0.0;
    for (int n = 0; n < win; ++n) prefix[n + 1] = prefix[n] + x[n] * x[n];
    if (prefix[win] / win < kSilenceMeanSquare) continue;

    std::fill(buf.begin(), buf.end(), 0.0);
    std::copy(x, x + win, buf.begin());
    fft.fwd(spec, buf);
    for (auto& c : spec) c = std::norm(c);
    fft.inv(acf, spec, nfft);

    for (int lag = min_lag - 1; lag <= max_lag + 1 && lag < win; ++lag) {
      const double head = prefix[win - lag];
      const double tail = prefix[win] - prefix[lag];
      const double denom = std::sqrt(head * tail);
      r[lag] = denom > 0.0 ? acf[lag] / denom : 0.0;
    }
    double best = -1.0;
    for (int lag = min_lag; lag <= max_lag; ++lag) {
      if (r[lag] >= r[lag - 1] && r[lag] >= r[lag + 1]) best = std::max(best, r[lag]);
    }
    if (best < fc.voicing_threshold) continue;
    int chosen = -1;
    for (int lag = min_lag; lag <= max_lag; ++lag) {
      if (r[lag] >= r[lag - 1] && r[lag] >= r[lag + 1] &&
          r[lag] >= kOctaveTolerance * best) {
        chosen = lag;
        break;
      }
    }
    // Parabolic refinement of the peak position.
    double lag = chosen;
    const double a = r[chosen - 1], b = r[chosen], c = r[chosen + 1];
    const double curvature = a - 2.0 * b + c;
    if (curvature < 0.0) lag += 0.5 * (a - c) / curvature;
    const double f0 = rate / lag;
    if (f0 < fc.f0_min_hz * 0.95 || f0 > fc.f0_max_hz * 1.05) continue;
    track.pitch_db[t] = ToDb(f0);
    track.voiced[t] = true;
  }
  return track;
}

std::vector<double> ExtractEnergy(const AudioWaveform& audio,
                                  const ModelConfig& cfg) {
  const Eigen::MatrixXd mag = MagnitudeSpectrogram(audio, cfg.features);
  std::vector<double> energy(mag.rows());
  for (Eigen::Index t = 0; t < mag.rows(); ++t) {
    energy[t] = ToDb(mag.row(t).norm() + cfg.features.log_floor);
  }
  return energy;
}

}  // namespace ats
