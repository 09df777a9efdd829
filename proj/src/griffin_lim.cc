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

#include "ats/griffin_lim.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "ats/random.h"

namespace ats {

namespace {

// Overlap-add weights below this are treated as uncovered samples.
constexpr double kMinWindowWeight = 1e-10;

// Squared norm of a one-sided spectrum counted over the full two-sided one.
double TwoSidedWeight(int k, int win) { return (k == 0 || 2 * k == win) ? 1.0 : 2.0; }

}  // namespace

Eigen::MatrixXd MelToMagnitude(const MelSpectrogram& mel, const ModelConfig& cfg) {
  const Eigen::MatrixXd fb =
      MelFilterbank(static_cast<int>(mel.frames.cols()), mel.win_samples,
                    mel.audio_rate_hz);
  const Eigen::VectorXd area = fb.rowwise().sum();
  const Eigen::RowVectorXd coverage = fb.colwise().sum();
  Eigen::MatrixXd mel_mag =
      ((mel.frames.array().exp() - cfg.features.log_floor).max(0.0)).matrix();
  for (Eigen::Index m = 0; m < fb.rows(); ++m) {
    if (area(m) > 0.0) mel_mag.col(m) /= area(m);
  }
  Eigen::MatrixXd mag = mel_mag * fb;
  for (Eigen::Index k = 0; k < mag.cols(); ++k) {
    mag.col(k) = coverage(k) > 0.0 ? Eigen::VectorXd(mag.col(k) / coverage(k))
                                   : Eigen::VectorXd::Zero(mag.rows());
  }
  return mag;
}

std::vector<std::vector<std::complex<double>>> Stft(const std::vector<double>& x,
                                                    const std::vector<double>& window,
                                                    int hop, int64_t frames) {
  const int win = static_cast<int>(window.size());
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<std::vector<std::complex<double>>> out(frames);
  std::vector<double> buf(win);
  for (int64_t t = 0; t < frames; ++t) {
    for (int n = 0; n < win; ++n) buf[n] = x[t * hop + n] * window[n];
    fft.fwd(out[t], buf);
  }
  return out;
}

std::vector<double> InverseStft(
    const std::vector<std::vector<std::complex<double>>>& spectra,
    const std::vector<double>& window, int hop) {
  const int win = static_cast<int>(window.size());
  const auto frames = static_cast<int64_t>(spectra.size());
  const int64_t length = frames == 0 ? 0 : (frames - 1) * hop + win;
  std::vector<double> x(length, 0.0), weight(length, 0.0), buf;
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  for (int64_t t = 0; t < frames; ++t) {
    fft.inv(buf, spectra[t], win);
    for (int n = 0; n < win; ++n) {
      x[t * hop + n] += window[n] * buf[n];
      weight[t * hop + n] += window[n] * window[n];
    }
  }
  for (int64_t i = 0; i < length; ++i) {
    x[i] = weight[i] > kMinWindowWeight ? x[i] / weight[i] : 0.0;
  }
  return x;
}

double SpectralConvergence(const std::vector<double>& x, const Eigen::MatrixXd& target,
                           const std::vector<double>& window, int hop) {
  const int win = static_cast<int>(window.size());
  const auto spectra = Stft(x, window, hop, target.rows());
  double num = 0.0, den = 0.0;
  for (Eigen::Index t = 0; t < target.rows(); ++t) {
    for (int k = 0; k <= win / 2; ++k) {
      const double w = TwoSidedWeight(k, win);
      const double d = std::abs(spectra[t][k]) - target(t, k);
      num += w * d * d;
      den += w * target(t, k) * target(t, k);
    }
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

AudioWaveform GriffinLim(const MelSpectrogram& mel, const ModelConfig& cfg,
                         const GriffinLimOptions& options,
                         std::vector<double>* convergence) {
  const Eigen::MatrixXd target = MelToMagnitude(mel, cfg);
  const int win = mel.win_samples;
  const int hop = mel.hop_samples;
  const int bins = win / 2 + 1;
  const std::vector<double> window = MakeWindow(cfg.features.window, win);
  const Eigen::Index frames = target.rows();

  std::vector<std::vector<std::complex<double>>> spectra(
      frames, std::vector<std::complex<double>>(bins));
  RandomStream rng(options.seed, "griffin_lim");
  for (Eigen::Index t = 0; t < frames; ++t) {
    for (int k = 0; k < bins; ++k) {
      // DC and Nyquist bins of a real signal carry real values.
      const bool real_bin = k == 0 || 2 * k == win;
      const double phase =
          real_bin ? 0.0 : rng.Uniform(0.0, 2.0 * std::numbers::pi);
      spectra[t][k] = std::polar(target(t, k), phase);
    }
  }
  std::vector<double> x = InverseStft(spectra, window, hop);
  if (convergence != nullptr) convergence->clear();

  for (int it = 0; it < options.n_iters; ++it) {
    const auto estimate = Stft(x, window, hop, frames);
    for (Eigen::Index t = 0; t < frames; ++t) {
      for (int k = 0; k < bins; ++k) {
        const std::complex<double> z = estimate[t][k];
        const double a = std::abs(z);
        spectra[t][k] = a > 0.0 ? z * (target(t, k) / a)
                                : std::complex<double>(target(t, k), 0.0);
      }
    }
    x = InverseStft(spectra, window, hop);
    if (convergence != nullptr) {
      convergence->push_back(SpectralConvergence(x, target, window, hop));
    }
  }

  AudioWaveform audio;
  audio.sample_rate_hz = mel.audio_rate_hz;
  audio.samples.resize(x.size());
  std::transform(x.begin(), x.end(), audio.samples.begin(), [](double v) {
    return std::isfinite(v) ? std::clamp(v, -1.0, 1.0) : 0.0;
  });
  return audio;
}

}  // namespace ats
