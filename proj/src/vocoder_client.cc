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

#include "ats/vocoder_client.h"

#include "ats/array_file.h"
#include "ats/errors.h"
#include "ats/griffin_lim.h"

namespace ats {

std::string EncodeVocoderRequest(const VocoderRequest& request) {
  request.mel.Validate(static_cast<int>(request.mel.frames.cols()));
  const Eigen::MatrixXd& m = request.mel.frames;
  ArrayBundle b;
  b.meta["frames"] = m.rows();
  b.meta["n_mels"] = m.cols();
  b.meta["hop_samples"] = request.mel.hop_samples;
  b.meta["win_samples"] = request.mel.win_samples;
  b.meta["audio_rate_hz"] = request.mel.audio_rate_hz;
  b.meta["speaker_label"] = request.speaker_label;
  b.meta["request_id"] = request.request_id;
  NamedArray mel{"mel", {m.rows(), m.cols()}, {}};
  mel.data.reserve(m.size());
  for (Eigen::Index t = 0; t < m.rows(); ++t) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) mel.data.push_back(m(t, j));
  }
  b.arrays.push_back(std::move(mel));
  return EncodeBundle(b);
}

VocoderRequest DecodeVocoderRequest(std::string_view bytes) {
  const ArrayBundle b = DecodeBundle(bytes);
  VocoderRequest r;
  int64_t frames = 0, n_mels = 0;
  try {
    frames = b.meta.at("frames").get<int64_t>();
    n_mels = b.meta.at("n_mels").get<int64_t>();
    r.mel.hop_samples = b.meta.at("hop_samples").get<int>();
    r.mel.win_samples = b.meta.value("win_samples", r.mel.win_samples);
    r.mel.audio_rate_hz = b.meta.at("audio_rate_hz").get<int>();
    r.speaker_label = b.meta.value("speaker_label", std::string());
    r.request_id = b.meta.value("request_id", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(DataErrorCode::kMalformedHeader, e.what());
  }
  const NamedArray& mel = b.Get("mel");
  if (static_cast<int64_t>(mel.data.size()) != frames * n_mels) {
    throw DataError(DataErrorCode::kMalformedHeader, "mel size disagrees with header");
  }
  r.mel.frames.resize(frames, n_mels);
  for (int64_t t = 0; t < frames; ++t) {
    for (int64_t j = 0; j < n_mels; ++j) r.mel.frames(t, j) = mel.data[t * n_mels + j];
  }
  return r;
}

VocoderResult Vocode(const VocoderRequest& request, const ModelConfig& cfg,
                     const VocoderOptions& options) {
  VocoderResult result;
  try {
    std::string body =
        HttpPost(options.endpoint, EncodeVocoderRequest(request),
                 "application/octet-stream");
    try {
      result.audio = DecodeWav(body);
      result.audio.Validate();
    } catch (const DataError& e) {
      throw EndpointError(EndpointErrorCode::kMalformedResponse, e.what());
    }
    result.wav_bytes = std::move(body);
    return result;
  } catch (const EndpointError& e) {
    if (!options.fallback_to_griffin_lim) throw;
    result.warning = std::string("vocoder unavailable (") + e.what() +
                     "); rendered with Griffin-Lim";
  }
  GriffinLimOptions gl;
  gl.n_iters = options.griffin_lim_iters;
  gl.seed = options.griffin_lim_seed;
  result.audio = GriffinLim(request.mel, cfg, gl);
  result.used_fallback = true;
  return result;
}

}  // namespace ats
