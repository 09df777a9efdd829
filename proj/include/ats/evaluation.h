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

// Objective metrics: mel-cepstral distortion, prosody trajectory errors and
// character error rate through an external ASR service.

#ifndef ATS_EVALUATION_H_
#define ATS_EVALUATION_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ats/audio.h"
#include "ats/data_pipeline.h"
#include "ats/features.h"
#include "ats/http_client.h"
#include "ats/model_config.h"
#include "ats/parameter_store.h"

namespace ats {

inline constexpr int kDefaultCepstra = 13;

// Orthonormal DCT-II of each log-mel frame, keeping coefficients
// 1..n_ceps. Throws std::invalid_argument unless 1 <= n_ceps < n_mels.
Eigen::MatrixXd MelToCepstra(const Eigen::MatrixXd& log_mel,
                             int n_ceps = kDefaultCepstra);

// Mean over frames of (10 / ln 10) sqrt(2 sum_d (c_d - c'_d)^2), in dB.
// Throws std::invalid_argument on a shape mismatch.
double MelCepstralDistortion(const Eigen::MatrixXd& ref_ceps,
                             const Eigen::MatrixXd& gen_ceps);

struct TrajectoryRow {
  int64_t frame = 0;
  double reference = 0.0;
  double estimate = 0.0;
};

struct TrajectoryComparison {
  // Over voiced reference frames only; empty when none are voiced.
  std::optional<double> pitch_rmse_db;
  double energy_rmse_db = 0.0;
  std::vector<TrajectoryRow> pitch;   // all frames, for plotting
  std::vector<TrajectoryRow> energy;
};

// Throws std::invalid_argument on a length mismatch.
TrajectoryComparison CompareTrajectories(const std::vector<double>& pitch_pred,
                                         const std::vector<double>& energy_pred,
                                         const ProsodyTrack& target);

// "frame,reference,estimate" table.
std::string TrajectoryCsv(const std::vector<TrajectoryRow>& rows);

// Edit distance over bytes.
int64_t Levenshtein(std::string_view a, std::string_view b);

// Lowercase, drop ASCII punctuation, collapse whitespace runs to one space
// and trim.
std::string NormalizeTranscript(std::string_view text);

// 100 * Levenshtein(hyp, ref) / |ref|, after optional normalization.
// Throws std::invalid_argument for an empty reference.
double CharacterErrorRate(std::string_view hypothesis, std::string_view reference,
                          bool normalize);

class AsrClient {
 public:
  virtual ~AsrClient() = default;
  // Throws EndpointError on failure.
  virtual std::string Transcribe(const AudioWaveform& audio) = 0;
};

// POSTs WAV bytes and reads a plain-text transcript.
class HttpAsrClient : public AsrClient {
 public:
  explicit HttpAsrClient(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
  std::string Transcribe(const AudioWaveform& audio) override;

 private:
  HttpEndpoint endpoint_;
};

struct CerPair {
  AudioWaveform audio;
  std::string reference;
};

struct CerResult {
  double cer_percent = 0.0;  // mean over transcribed pairs
  std::vector<std::optional<double>> per_pair;
  std::vector<std::string> warnings;
};

// Pairs whose transcription fails are excluded with a warning. Throws
// EndpointError when every pair fails.
CerResult RunCerHarness(const std::vector<CerPair>& pairs, AsrClient& asr,
                        bool normalize);

struct EvalRow {
  std::string utterance_id;
  double mcd_db = 0.0;
  std::optional<double> pitch_rmse_db;
  double energy_rmse_db = 0.0;
  std::optional<double> cer_percent;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  double mean_mcd_db = 0.0;
  // Means over the rows that have a value.
  std::optional<double> mean_pitch_rmse_db;
  double mean_energy_rmse_db = 0.0;
  std::optional<double> mean_cer_percent;
  std::vector<std::string> warnings;

  void ComputeMeans();
  // One row per utterance plus a final "mean" row; empty cells for missing
  // values.
  std::string ToCsv() const;
};

struct PredictedProsody {
  std::vector<double> pitch_db;
  std::vector<double> energy_db;
};

using MelSynthesizer = std::function<Eigen::MatrixXd(const UtteranceSample&)>;
using ProsodyPredictor = std::function<PredictedProsody(const UtteranceSample&)>;

struct EvalOptions {
  int n_ceps = kDefaultCepstra;
  // Replace the model's inference path or predictors, e.g. with a stub.
  MelSynthesizer synthesizer;
  ProsodyPredictor prosody_predictor;
  // When non-empty, "<id>_pitch.csv" and "<id>_energy.csv" go here.
  std::filesystem::path trajectory_dir;
  // Optional CER: an ASR client and a transcript per utterance id. The
  // audio is rendered with Griffin-Lim.
  AsrClient* asr = nullptr;
  std::function<std::optional<std::string>(const std::string&)> transcript_for;
  bool normalize_text = true;
  int griffin_lim_iters = 60;
};

// Training-path prediction of pitch and energy from the sample's EMA.
PredictedProsody PredictProsody(const UtteranceSample& sample,
                                const ParameterStore& params,
                                const ModelConfig& cfg);

EvalReport EvaluateCorpus(const ParameterStore& params,
                          const std::vector<UtteranceSample>& corpus,
                          const ModelConfig& cfg, const EvalOptions& options = {});

}  // namespace ats

#endif  // ATS_EVALUATION_H_
