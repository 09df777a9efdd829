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

#include "ats/evaluation.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "ats/array_file.h"
#include "ats/autodiff.h"
#include "ats/errors.h"
#include "ats/griffin_lim.h"
#include "ats/inference.h"
#include "ats/model.h"

namespace ats {

namespace {

double Rmse(double sum_sq, int64_t count) {
  return std::sqrt(sum_sq / static_cast<double>(count));
}

std::string Cell(const std::optional<double>& v) {
  if (!v) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", *v);
  return buf;
}

std::string Cell(double v) { return Cell(std::optional<double>(v)); }

std::optional<double> MeanOf(const std::vector<EvalRow>& rows,
                             std::optional<double> EvalRow::*field) {
  double sum = 0.0;
  int64_t n = 0;
  for (const EvalRow& r : rows) {
    if (r.*field) {
      sum += *(r.*field);
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace

Eigen::MatrixXd MelToCepstra(const Eigen::MatrixXd& log_mel, int n_ceps) {
  const Eigen::Index n = log_mel.cols();
  if (n_ceps < 1 || n_ceps >= n) {
    throw std::invalid_argument("n_ceps " + std::to_string(n_ceps) +
                                " outside [1, " + std::to_string(n - 1) + "]");
  }
  Eigen::MatrixXd basis(n, n_ceps);
  const double scale = std::sqrt(2.0 / static_cast<double>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int k = 1; k <= n_ceps; ++k) {
      basis(i, k - 1) =
          scale * std::cos(std::numbers::pi * k * (2.0 * i + 1.0) / (2.0 * n));
    }
  }
  return log_mel * basis;
}

double MelCepstralDistortion(const Eigen::MatrixXd& ref_ceps,
                             const Eigen::MatrixXd& gen_ceps) {
  if (ref_ceps.rows() != gen_ceps.rows() || ref_ceps.cols() != gen_ceps.cols()) {
    throw std::invalid_argument("cepstra shape mismatch");
  }
  if (ref_ceps.rows() == 0) throw std::invalid_argument("no frames");
  const double k = 10.0 / std::numbers::ln10;
  const Eigen::VectorXd dist =
      (2.0 * (ref_ceps - gen_ceps).rowwise().squaredNorm()).array().sqrt();
  return k * dist.mean();
}

TrajectoryComparison CompareTrajectories(const std::vector<double>& pitch_pred,
                                         const std::vector<double>& energy_pred,
                                         const ProsodyTrack& target) {
  const size_t t = target.size();
  if (pitch_pred.size() != t || energy_pred.size() != t ||
      target.energy_db.size() != t || target.voiced.size() != t) {
    throw std::invalid_argument("trajectory length mismatch");
  }
  TrajectoryComparison out;
  double pitch_sq = 0.0, energy_sq = 0.0;
  int64_t voiced = 0;
  for (size_t i = 0; i < t; ++i) {
    const auto frame = static_cast<int64_t>(i);
    out.pitch.push_back({frame, target.pitch_db[i], pitch_pred[i]});
    out.energy.push_back({frame, target.energy_db[i], energy_pred[i]});
    const double de = energy_pred[i] - target.energy_db[i];
    energy_sq += de * de;
    if (target.voiced[i]) {
      const double dp = pitch_pred[i] - target.pitch_db[i];
      pitch_sq += dp * dp;
      ++voiced;
    }
  }
  if (t > 0) out.energy_rmse_db = Rmse(energy_sq, static_cast<int64_t>(t));
  if (voiced > 0) out.pitch_rmse_db = Rmse(pitch_sq, voiced);
  return out;
}

std::string TrajectoryCsv(const std::vector<TrajectoryRow>& rows) {
  std::string out = "frame,reference,estimate\n";
  char line[96];
  for (const TrajectoryRow& r : rows) {
    std::snprintf(line, sizeof(line), "%lld,%.10g,%.10g\n",
                  static_cast<long long>(r.frame), r.reference, r.estimate);
    out += line;
  }
  return out;
}

int64_t Levenshtein(std::string_view a, std::string_view b) {
  std::vector<int64_t> prev(b.size() + 1), cur(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int64_t>(j);
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int64_t>(i);
    for (size_t j = 1; j <= b.size(); ++j) {
      const int64_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string NormalizeTranscript(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
    } else if (!std::ispunct(c)) {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  return out;
}

double CharacterErrorRate(std::string_view hypothesis, std::string_view reference,
                          bool normalize) {
  std::string hyp(hypothesis), ref(reference);
  if (normalize) {
    hyp = NormalizeTranscript(hyp);
    ref = NormalizeTranscript(ref);
  }
  if (ref.empty()) throw std::invalid_argument("empty reference transcript");
  return 100.0 * static_cast<double>(Levenshtein(hyp, ref)) /
         static_cast<double>(ref.size());
}

std::string HttpAsrClient::Transcribe(const AudioWaveform& audio) {
  return HttpPost(endpoint_, EncodeWav(audio, WavFormat::kPcm16), "audio/wav");
}

CerResult RunCerHarness(const std::vector<CerPair>& pairs, AsrClient& asr,
                        bool normalize) {
  CerResult result;
  double sum = 0.0;
  int64_t ok = 0;
  for (size_t i = 0; i < pairs.size(); ++i) {
    try {
      const std::string hyp = asr.Transcribe(pairs[i].audio);
      const double cer = CharacterErrorRate(hyp, pairs[i].reference, normalize);
      result.per_pair.push_back(cer);
      sum += cer;
      ++ok;
    } catch (const EndpointError& e) {
      result.per_pair.push_back(std::nullopt);
      result.warnings.push_back("pair " + std::to_string(i) + " excluded: " + e.what());
    }
  }
  if (ok == 0) {
    throw EndpointError(EndpointErrorCode::kTransport,
                        "ASR failed for all " + std::to_string(pairs.size()) +
                            " pairs");
  }
  result.cer_percent = sum / static_cast<double>(ok);
  return result;
}

void EvalReport::ComputeMeans() {
  mean_mcd_db = 0.0;
  mean_energy_rmse_db = 0.0;
  for (const EvalRow& r : rows) {
    mean_mcd_db += r.mcd_db;
    mean_energy_rmse_db += r.energy_rmse_db;
  }
  if (!rows.empty()) {
    mean_mcd_db /= static_cast<double>(rows.size());
    mean_energy_rmse_db /= static_cast<double>(rows.size());
  }
  mean_pitch_rmse_db = MeanOf(rows, &EvalRow::pitch_rmse_db);
  mean_cer_percent = MeanOf(rows, &EvalRow::cer_percent);
}

std::string EvalReport::ToCsv() const {
  std::string out = "utterance_id,mcd_db,pitch_rmse_db,energy_rmse_db,cer_percent\n";
  for (const EvalRow& r : rows) {
    out += r.utterance_id + "," + Cell(r.mcd_db) + "," + Cell(r.pitch_rmse_db) + "," +
           Cell(r.energy_rmse_db) + "," + Cell(r.cer_percent) + "\n";
  }
  out += "mean," + Cell(mean_mcd_db) + "," + Cell(mean_pitch_rmse_db) + "," +
         Cell(mean_energy_rmse_db) + "," + Cell(mean_cer_percent) + "\n";
  return out;
}

PredictedProsody PredictProsody(const UtteranceSample& sample,
                                const ParameterStore& params,
                                const ModelConfig& cfg) {
  ad::Graph graph(/*record_gradients=*/false);
  ForwardContext ctx(graph, params);
  const ProposedOutputs out =
      ForwardProposed(ctx, sample.ema, sample.speaker_index, cfg, true);
  const Matrix& p = out.pitch.value();
  const Matrix& e = out.energy.value();
  return {std::vector<double>(p.data(), p.data() + p.size()),
          std::vector<double>(e.data(), e.data() + e.size())};
}

EvalReport EvaluateCorpus(const ParameterStore& params,
                          const std::vector<UtteranceSample>& corpus,
                          const ModelConfig& cfg, const EvalOptions& options) {
  EvalReport report;
  for (const UtteranceSample& sample : corpus) {
    EvalRow row;
    row.utterance_id = sample.utterance_id;
    const Eigen::MatrixXd mel =
        options.synthesizer
            ? options.synthesizer(sample)
            : SynthesizeMelFromFrames(sample.ema, sample.speaker_index, params, cfg)
                  .frames;
    row.mcd_db = MelCepstralDistortion(MelToCepstra(sample.mel.frames, options.n_ceps),
                                       MelToCepstra(mel, options.n_ceps));

    const PredictedProsody prosody = options.prosody_predictor
                                         ? options.prosody_predictor(sample)
                                         : PredictProsody(sample, params, cfg);
    const TrajectoryComparison traj =
        CompareTrajectories(prosody.pitch_db, prosody.energy_db, sample.prosody);
    row.pitch_rmse_db = traj.pitch_rmse_db;
    row.energy_rmse_db = traj.energy_rmse_db;
    if (!options.trajectory_dir.empty()) {
      WriteFileBytes(options.trajectory_dir / (sample.utterance_id + "_pitch.csv"),
                     TrajectoryCsv(traj.pitch));
      WriteFileBytes(options.trajectory_dir / (sample.utterance_id + "_energy.csv"),
                     TrajectoryCsv(traj.energy));
    }

    if (options.asr != nullptr && options.transcript_for) {
      if (const auto reference = options.transcript_for(sample.utterance_id)) {
        MelSpectrogram spec = sample.mel;
        spec.frames = mel;
        GriffinLimOptions gl;
        gl.n_iters = options.griffin_lim_iters;
        try {
          row.cer_percent = CharacterErrorRate(
              options.asr->Transcribe(GriffinLim(spec, cfg, gl)), *reference,
              options.normalize_text);
        } catch (const EndpointError& e) {
          report.warnings.push_back(sample.utterance_id + ": CER skipped: " + e.what());
        }
      }
    }
    report.rows.push_back(std::move(row));
  }
  report.ComputeMeans();
  return report;
}

}  // namespace ats
