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

#include <complex>
#include <set>

#include "ats/errors.h"
#include "ats/features.h"
#include "ats/griffin_lim.h"
#include "ats/model.h"
#include "ats/vocoder_client.h"
#include "mock_server.h"
#include "test_util.h"

namespace ats {
namespace {

using testing::MockServer;
using testing::RandomEma;
using testing::SmallConfig;
using testing::Sine;

class InferenceTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    params_ = new ParameterStore(InitParameters(ModelConfig{}));
  }
  static void TearDownTestSuite() {
    delete params_;
    params_ = nullptr;
  }
  static ParameterStore* params_;
};

ParameterStore* InferenceTest::params_ = nullptr;

TEST_F(InferenceTest, TwoSecondsOfEmaGive115Frames) {
  const ModelConfig cfg;
  const EmaRecording ema = RandomEma(200, 18, 1);
  EXPECT_EQ(InferenceFrameCount(ema, cfg.features), 115);
  const MelSpectrogram mel = SynthesizeMel(ema, 0, *params_, cfg);
  EXPECT_EQ(mel.num_frames(), 115);
  EXPECT_EQ(mel.frames.cols(), 40);
  EXPECT_TRUE(mel.frames.allFinite());
}

TEST_F(InferenceTest, DeterministicAndSpeakerSensitive) {
  const ModelConfig cfg;
  const EmaRecording ema = RandomEma(60, 18, 2);
  const MelSpectrogram a = SynthesizeMel(ema, 0, *params_, cfg);
  const MelSpectrogram b = SynthesizeMel(ema, 0, *params_, cfg);
  const MelSpectrogram c = SynthesizeMel(ema, 1, *params_, cfg);
  EXPECT_EQ(a.frames, b.frames);
  EXPECT_GT((a.frames - c.frames).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(InferencePurityTest, VariancePredictorsAreNeverRead) {
  const ModelConfig cfg = SmallConfig();
  ParameterStore params = InitParameters(cfg);
  std::set<std::string> touched;
  params.set_access_observer([&](const std::string& name) { touched.insert(name); });
  SynthesizeMel(RandomEma(80, 18, 3), 1, params, cfg, 40);
  ASSERT_FALSE(touched.empty());
  std::set<std::string> modules;
  for (const std::string& name : touched) {
    modules.insert(name.substr(0, name.find('.')));
  }
  EXPECT_EQ(modules, (std::set<std::string>{"generator", "integration", "style"}));

  // The training path does read them.
  touched.clear();
  ad::Graph g(false);
  ForwardContext ctx(g, params);
  ForwardProposed(ctx, testing::RandomMatrix(10, 18, 4), 0, cfg, true);
  EXPECT_TRUE(touched.count("pitch_predictor.output.weight"));
  EXPECT_TRUE(touched.count("energy_predictor.output.weight"));
}

TEST(InferenceErrorsTest, BadSpeakerIndex) {
  const ModelConfig cfg = SmallConfig();
  const ParameterStore params = InitParameters(cfg);
  EXPECT_THROW(SynthesizeMel(RandomEma(50, 18, 5), 2, params, cfg), std::out_of_range);
}

MelSpectrogram ToneMel(double freq, int64_t samples) {
  return ExtractMel(Sine(freq, 0.5, samples), ModelConfig{});
}

TEST(GriffinLimTest, OutputLengthAndRange) {
  const MelSpectrogram mel = ToneMel(300, 20000);
  GriffinLimOptions opts;
  opts.n_iters = 5;
  const AudioWaveform audio = GriffinLim(mel, ModelConfig{}, opts);
  const int64_t t = mel.num_frames();
  EXPECT_LE(std::abs(static_cast<int64_t>(audio.samples.size()) - (t * 768 + 256)), 768);
  EXPECT_NO_THROW(audio.Validate());
}

TEST(GriffinLimTest, SpectralConvergenceIsNonIncreasing) {
  ModelConfig cfg;
  AudioWaveform voice = Sine(180, 0.3, 30000);
  const AudioWaveform over = Sine(540, 0.1, 30000);
  for (size_t i = 0; i < voice.samples.size(); ++i) voice.samples[i] += over.samples[i];
  const MelSpectrogram mel = ExtractMel(voice, cfg);
  GriffinLimOptions opts;
  opts.n_iters = 25;
  std::vector<double> sc;
  GriffinLim(mel, cfg, opts, &sc);
  ASSERT_EQ(sc.size(), 25u);
  for (size_t i = 1; i < sc.size(); ++i) {
    EXPECT_LE(sc[i], sc[i - 1] * (1.0 + 1e-9)) << "iteration " << i;
  }
  EXPECT_LT(sc.back(), sc.front());
}

TEST(GriffinLimTest, ToneReconstructsNearItsFrequency) {
  const ModelConfig cfg;
  const AudioWaveform audio = GriffinLim(ToneMel(440, 44100), cfg);
  // Direct DFT evaluation of a central segment on a 1 Hz grid.
  const int64_t start = 10000, len = 8192;
  double best_f = 0.0, best_mag = -1.0;
  for (int f = 100; f <= 1500; ++f) {
    std::complex<double> x = 0.0;
    for (int64_t n = 0; n < len; ++n) {
      x += audio.samples[start + n] *
           std::polar(1.0, -2.0 * std::numbers::pi * f * n / 44100.0);
    }
    if (std::abs(x) > best_mag) {
      best_mag = std::abs(x);
      best_f = f;
    }
  }
  auto mel_of = [](double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); };
  const double bin_width = mel_of(22050.0) / 41.0;
  EXPECT_LE(std::abs(mel_of(best_f) - mel_of(440.0)), bin_width) << best_f << " Hz";
}

TEST(GriffinLimTest, MagnitudeIsNonNegative) {
  const Eigen::MatrixXd mag = MelToMagnitude(ToneMel(700, 10000), ModelConfig{});
  EXPECT_EQ(mag.cols(), 513);
  EXPECT_GE(mag.minCoeff(), 0.0);
}

VocoderRequest SmallRequest() {
  VocoderRequest r;
  r.mel = ToneMel(250, 8000);
  r.speaker_label = "spk1";
  r.request_id = "req-7";
  return r;
}

TEST(VocoderTest, RequestRoundTrip) {
  const VocoderRequest r = SmallRequest();
  const VocoderRequest back = DecodeVocoderRequest(EncodeVocoderRequest(r));
  EXPECT_EQ(back.mel.frames, r.mel.frames);
  EXPECT_EQ(back.speaker_label, "spk1");
  EXPECT_EQ(back.request_id, "req-7");
  EXPECT_EQ(back.mel.hop_samples, 768);
  EXPECT_THROW(DecodeVocoderRequest("junk"), DataError);
}

TEST(VocoderTest, UnreachableWithFallbackUsesGriffinLim) {
  const ModelConfig cfg;
  VocoderOptions opts;
  opts.endpoint = {testing::kUnreachableUrl, 2.0};
  opts.griffin_lim_iters = 4;
  const VocoderRequest r = SmallRequest();
  const VocoderResult out = Vocode(r, cfg, opts);
  EXPECT_TRUE(out.used_fallback);
  EXPECT_FALSE(out.warning.empty());
  EXPECT_TRUE(out.wav_bytes.empty());
  GriffinLimOptions gl;
  gl.n_iters = 4;
  EXPECT_EQ(out.audio.samples, GriffinLim(r.mel, cfg, gl).samples);
}

TEST(VocoderTest, UnreachableWithoutFallbackIsTransportError) {
  VocoderOptions opts;
  opts.endpoint = {testing::kUnreachableUrl, 2.0};
  opts.fallback_to_griffin_lim = false;
  try {
    Vocode(SmallRequest(), ModelConfig{}, opts);
    FAIL();
  } catch (const EndpointError& e) {
    EXPECT_EQ(e.code(), EndpointErrorCode::kTransport);
  }
}

TEST(VocoderTest, EchoedWavIsReturnedByteIdentical) {
  AudioWaveform fixed = Sine(300, 0.25, 4000);
  const std::string wav = EncodeWav(fixed, WavFormat::kPcm16);
  std::string received_label;
  MockServer server("/vocode", [&](const httplib::Request& req, httplib::Response& res) {
    received_label = DecodeVocoderRequest(req.body).speaker_label;
    res.set_content(wav, "audio/wav");
  });
  VocoderOptions opts;
  opts.endpoint = {server.url("/vocode"), 5.0};
  opts.fallback_to_griffin_lim = false;
  const VocoderResult out = Vocode(SmallRequest(), ModelConfig{}, opts);
  EXPECT_EQ(out.wav_bytes, wav);
  EXPECT_FALSE(out.used_fallback);
  EXPECT_EQ(out.audio.samples.size(), fixed.samples.size());
  EXPECT_EQ(received_label, "spk1");
}

TEST(VocoderTest, StatusAndMalformedResponses) {
  MockServer server("/vocode", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("not a wav", "text/plain");
  });
  VocoderOptions opts;
  opts.endpoint = {server.url("/vocode"), 5.0};
  opts.fallback_to_griffin_lim = false;
  try {
    Vocode(SmallRequest(), ModelConfig{}, opts);
    FAIL();
  } catch (const EndpointError& e) {
    EXPECT_EQ(e.code(), EndpointErrorCode::kMalformedResponse);
  }
  // Unrouted path: the server answers 404.
  opts.endpoint.url = server.url("/missing");
  try {
    Vocode(SmallRequest(), ModelConfig{}, opts);
    FAIL();
  } catch (const EndpointError& e) {
    EXPECT_EQ(e.code(), EndpointErrorCode::kStatus);
  }
}

}  // namespace
}  // namespace ats
