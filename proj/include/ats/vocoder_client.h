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

// Client for an external neural vocoder service.
//
// Request: HTTP POST whose body is an array bundle holding the [T x n_mels]
// log-mel array "mel" and the header fields frames, n_mels, hop_samples,
// win_samples, audio_rate_hz, speaker_label and request_id. Response: RIFF
// WAV bytes.

#ifndef ATS_VOCODER_CLIENT_H_
#define ATS_VOCODER_CLIENT_H_

#include <string>
#include <string_view>

#include "ats/audio.h"
#include "ats/features.h"
#include "ats/http_client.h"
#include "ats/model_config.h"

namespace ats {

struct VocoderRequest {
  MelSpectrogram mel;
  std::string speaker_label;
  std::string request_id;
};

std::string EncodeVocoderRequest(const VocoderRequest& request);
// Throws DataError(kMalformedHeader).
VocoderRequest DecodeVocoderRequest(std::string_view bytes);

struct VocoderOptions {
  HttpEndpoint endpoint;
  // Render with Griffin-Lim instead of failing when the service does not
  // deliver a usable WAV.
  bool fallback_to_griffin_lim = true;
  int griffin_lim_iters = 60;
  uint64_t griffin_lim_seed = 0;
};

struct VocoderResult {
  AudioWaveform audio;
  // Response bytes as received; empty when the fallback rendered the audio.
  std::string wav_bytes;
  bool used_fallback = false;
  std::string warning;
};

// Throws EndpointError (kTransport, kTimeout, kStatus, kMalformedResponse)
// when the request fails and the fallback is disabled.
VocoderResult Vocode(const VocoderRequest& request, const ModelConfig& cfg,
                     const VocoderOptions& options);

}  // namespace ats

#endif  // ATS_VOCODER_CLIENT_H_
