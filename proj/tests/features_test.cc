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

#include <complex>

#include "ats/errors.h"
#include "test_util.h"

namespace ats {
namespace {

using testing::Silence;
using testing::Sine;

TEST(FeaturesTest, FrameCountBoundaries) {
  const ModelConfig cfg;
  const MelSpectrogram one = ExtractMel(Sine(440, 0.5, 1024), cfg);
  EXPECT_EQ(one.num_frames(), 1);
  EXPECT_EQ(one.frames.cols(), 40);
  EXPECT_EQ(ExtractMel(Sine(440, 0.5, 1024 + 768 * 9), cfg).num_frames(), 10);
  EXPECT_EQ(ExtractMel(Sine(440, 0.5, 1024 + 768 * 9 + 767), cfg).num_frames(), 10);
}

TEST(FeaturesTest, FrameCountMatchesClosedFormOnRandomLengths) {
  RandomStream rng(3, "lengths");
  for (int i = 0; i < 20; ++i) {
    const int64_t n = rng.UniformInt(1024, 200000);
    const int64_t expected =
        static_cast<int64_t>(std::floor((n - 1024) / 768.0)) + 1;
    EXPECT_EQ(FrameCount(n, 1024, 768), expected) << "N = " << n;
  }
  EXPECT_EQ(FrameCount(1023, 1024, 768), 0);
}

TEST(FeaturesTest, AudioShorterThanWindowIsRejected) {
  try {
    ExtractMel(Sine(440, 0.5, 1023), ModelConfig{});
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_EQ(e.code(), DataErrorCode::kAudioTooShort);
  }
}

TEST(FeaturesTest, DecibelRoundTrip) {
  for (double a : {1e-6, 0.01, 0.5, 1.0, 3.7, 1e4}) {
    EXPECT_NEAR(FromDb(ToDb(a)), a, 1e-9 * a);
  }
}

TEST(FeaturesTest, SineOf440HzPeaksInNearestMelBin) {
  const ModelConfig cfg;
  const MelSpectrogram mel = ExtractMel(Sine(440, 0.5, 44100), cfg);
  // HTK mel scale, n_mels points strictly inside (0, Nyquist).
  const double top = 2595.0 * std::log10(1.0 + 22050.0 / 700.0);
  int nearest = 0;
  double best = 1e300;
  for (int m = 0; m < 40; ++m) {
    const double mel_pt = top * (m + 1) / 41.0;
    const double hz = 700.0 * (std::pow(10.0, mel_pt / 2595.0) - 1.0);
    if (std::abs(hz - 440.0) < best) {
      best = std::abs(hz - 440.0);
      nearest = m;
    }
  }
  for (Eigen::Index t = 0; t < mel.num_frames(); ++t) {
    Eigen::Index arg = 0;
    mel.frames.row(t).maxCoeff(&arg);
    EXPECT_EQ(arg, nearest) << "frame " << t;
  }
}

TEST(FeaturesTest, FilterbankTrianglesPeakAtOne) {
  const Eigen::MatrixXd fb = MelFilterbank(40, 1024, 44100);
  EXPECT_EQ(fb.rows(), 40);
  EXPECT_EQ(fb.cols(), 513);
  EXPECT_GE(fb.minCoeff(), 0.0);
  EXPECT_LE(fb.maxCoeff(), 1.0);
}

TEST(FeaturesTest, PitchOfPureToneIsAnalytic) {
  const PitchTrack track = ExtractPitch(Sine(220, 0.5, 44100), ModelConfig{});
  int voiced = 0;
  for (size_t t = 0; t < track.voiced.size(); ++t) {
    if (!track.voiced[t]) continue;
    ++voiced;
    EXPECT_NEAR(track.pitch_db[t], 20.0 * std::log10(220.0), 0.5);
  }
  EXPECT_EQ(voiced, static_cast<int>(track.voiced.size()));
  EXPECT_NEAR(20.0 * std::log10(220.0), 46.85, 0.01);
}

TEST(FeaturesTest, LowLevelWhiteNoiseIsMostlyUnvoiced) {
  AudioWaveform noise = Silence(44100);
  RandomStream rng(11, "noise");
  for (double& s : noise.samples) s = 0.01 * rng.Normal();
  const PitchTrack track = ExtractPitch(noise, ModelConfig{});
  int unvoiced = 0;
  for (bool v : track.voiced) unvoiced += v ? 0 : 1;
  EXPECT_GE(unvoiced, 0.8 * track.voiced.size());
}

TEST(FeaturesTest, SilenceIsUnvoicedWithZeroPitch) {
  const PitchTrack track = ExtractPitch(Silence(20000), ModelConfig{});
  for (size_t t = 0; t < track.voiced.size(); ++t) {
    EXPECT_FALSE(track.voiced[t]);
    EXPECT_EQ(track.pitch_db[t], 0.0);
  }
}

TEST(FeaturesTest, SilenceEnergyIsFloor) {
  for (double e : ExtractEnergy(Silence(20000), ModelConfig{})) {
    EXPECT_NEAR(e, -160.0, 1e-9);
  }
}

TEST(FeaturesTest, DoublingAmplitudeAddsSixDecibels) {
  const ModelConfig cfg;
  const std::vector<double> a = ExtractEnergy(Sine(330, 0.2, 30000), cfg);
  const std::vector<double> b = ExtractEnergy(Sine(330, 0.4, 30000), cfg);
  ASSERT_EQ(a.size(), b.size());
  for (size_t t = 0; t < a.size(); ++t) {
    EXPECT_NEAR(b[t] - a[t], 20.0 * std::log10(2.0), 1e-6);
  }
}

TEST(FeaturesTest, RectangularEnergyMatchesDirectDft) {
  ModelConfig cfg;
  cfg.features.window = WindowType::kRectangular;
  const AudioWaveform tone = Sine(1000, 1.0, 1024 + 768 * 2);
  const std::vector<double> energy = ExtractEnergy(tone, cfg);
  ASSERT_EQ(energy.size(), 3u);
  for (int t = 0; t < 3; ++t) {
    double power = 0.0;
    for (int k = 0; k <= 512; ++k) {
      std::complex<double> x = 0.0;
      for (int n = 0; n < 1024; ++n) {
        x += tone.samples[t * 768 + n] *
             std::polar(1.0, -2.0 * std::numbers::pi * k * n / 1024.0);
      }
      power += std::norm(x);
    }
    const double expected = std::sqrt(power);
    const double got = std::pow(10.0, energy[t] / 20.0) - cfg.features.log_floor;
    EXPECT_NEAR(got, expected, 1e-6 * expected);
  }
}

}  // namespace
}  // namespace ats
