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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ats/array_file.h"
#include "ats/audio.h"
#include "ats/checkpoint.h"
#include "ats/cli.h"
#include "ats/data_pipeline.h"
#include "ats/dataset_io.h"
#include "ats/errors.h"
#include "ats/evaluation.h"
#include "ats/features.h"
#include "ats/gradient_audit.h"
#include "ats/inference.h"
#include "ats/model.h"
#include "ats/random.h"
#include "ats/training.h"

namespace ats {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool passed = false;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Format(const char* fmt, double a, double b = 0.0, double c = 0.0,
                   double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c, d);
  return buf;
}

// Overfit run shared by criteria 4 and 8.
struct OverfitRun {
  ModelConfig cfg;
  std::vector<UtteranceSample> corpus;
  ParameterStore initial;
  TrainResult first;
  TrainResult second;
  double seconds_per_run = 0.0;
};

OverfitRun& Overfit() {
  static OverfitRun* run = [] {
    auto* r = new OverfitRun;
    r->cfg.d_hidden = 64;
    r->cfg.n_conformer_blocks = 2;
    r->corpus = GenerateSyntheticCorpus(2, 4, 42, r->cfg);
    r->initial = InitParameters(r->cfg);
    TrainConfig t;
    t.learning_rate = 1e-4;
    t.max_steps = 500;
    const auto start = Clock::now();
    r->first = TrainLoop(r->corpus, r->initial, r->cfg, t);
    r->seconds_per_run = Seconds(start);
    r->second = TrainLoop(r->corpus, r->initial, r->cfg, t);
    return r;
  }();
  return *run;
}

Outcome LossComposition() {
  const auto start = Clock::now();
  const LossBreakdown l = ComposeLoss(1.0, 2.0, 3.0, ModelConfig{});
  const double err = std::abs(l.l_total - 1.3);
  const double secs = Seconds(start);
  return {err <= 1e-12 && secs < 1.0,
          Format("l_total = %.15f, |error| = %.2e, %.3f s", l.l_total, err, secs)};
}

Outcome ShapeSuite() {
  const auto start = Clock::now();
  const ModelConfig cfg;
  const ParameterStore params = InitParameters(cfg);
  const ParameterStore baseline = InitBaselineParameters(cfg);
  RandomStream rng(1, "shape");
  Eigen::MatrixXd ema(200, cfg.c_ema);
  for (Eigen::Index i = 0; i < ema.size(); ++i) ema.data()[i] = rng.Uniform(-5.0, 5.0);
  ad::Graph g(false);
  ForwardContext ctx(g, params);
  const ProposedOutputs out = ForwardProposed(ctx, ema, 3, cfg, true);
  ad::Graph gb(false);
  ForwardContext bctx(gb, baseline);
  const ad::Var base = BaselineForward(bctx, bctx.Input(ema), cfg);
  const bool ok = out.hidden.rows() == 200 && out.hidden.cols() == 256 &&
                  out.style.rows() == 200 && out.style.cols() == 128 &&
                  out.pitch.rows() == 200 && out.pitch.cols() == 1 &&
                  out.energy.rows() == 200 && out.energy.cols() == 1 &&
                  out.mel.rows() == 200 && out.mel.cols() == 40 &&
                  base.rows() == 200 && base.cols() == 40 &&
                  out.mel.value().allFinite() && base.value().allFinite();
  const double secs = Seconds(start);
  std::ostringstream s;
  s << "hidden " << out.hidden.rows() << "x" << out.hidden.cols() << ", style "
    << out.style.rows() << "x" << out.style.cols() << ", pitch " << out.pitch.rows()
    << ", energy " << out.energy.rows() << ", mel " << out.mel.rows() << "x"
    << out.mel.cols() << ", baseline " << base.rows() << "x" << base.cols() << ", "
    << Format("%.1f s", secs);
  return {ok && secs < 30.0, s.str()};
}

Outcome GradientAudit() {
  const auto start = Clock::now();
  const GradientAuditReport report = RunGradientAudit(GradientAuditConfig(), 7);
  const double secs = Seconds(start);
  double worst = 0.0;
  std::string worst_block;
  for (const BlockAuditResult& b : report.blocks) {
    if (b.max_relative_error >= worst) {
      worst = b.max_relative_error;
      worst_block = b.block;
    }
  }
  return {report.all_passed() && worst < 1e-4 && secs < 300.0,
          std::to_string(report.blocks.size()) + " blocks, worst " + worst_block +
              Format(" %.2e, %.1f s", worst, secs)};
}

Outcome OverfitConvergence() {
  const auto start = Clock::now();
  OverfitRun& run = Overfit();
  const auto& h = run.first.history;
  const size_t n = run.corpus.size();
  // One epoch visits each utterance once, so epoch means compare like with
  // like; single steps sample utterances of different difficulty.
  double first_epoch = 0.0, last_epoch = 0.0;
  for (size_t i = 0; i < n; ++i) {
    first_epoch += h[i].loss.l_mel / n;
    last_epoch += h[h.size() - n + i].loss.l_mel / n;
  }
  const double ratio = last_epoch / first_epoch;
  double corpus_before = 0.0, corpus_after = 0.0;
  for (const UtteranceSample& s : run.corpus) {
    corpus_before += ComputeLossAndGradients(run.initial, s, run.cfg).loss.l_mel / n;
    corpus_after += ComputeLossAndGradients(run.first.params, s, run.cfg).loss.l_mel / n;
  }
  bool identical = run.first.history.size() == run.second.history.size() &&
                   run.first.params == run.second.params;
  for (size_t i = 0; identical && i < h.size(); ++i) {
    identical = h[i].loss.l_total == run.second.history[i].loss.l_total &&
                h[i].loss.l_mel == run.second.history[i].loss.l_mel;
  }
  const double secs = Seconds(start);
  std::string detail =
      Format("epoch-mean l_mel %.4f -> %.4f (ratio %.4f); ", first_epoch, last_epoch,
             ratio) +
      Format("corpus l_mel %.4f -> %.4f (ratio %.4f); ", corpus_before, corpus_after,
             corpus_after / corpus_before) +
      Format("step 1 -> 500 ratio %.4f; ", h.back().loss.l_mel / h.front().loss.l_mel) +
      (identical ? "two runs bit-identical" : "runs differ") +
      Format(", %.1f s per run", run.seconds_per_run);
  return {h.size() == 500 && ratio <= 0.2 && identical && run.seconds_per_run < 900.0,
          detail + Format(" (%.0f s total)", secs)};
}

Outcome MetricOracles() {
  RandomStream rng(5, "metrics");
  Eigen::MatrixXd a(20, 13);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.Uniform(-3.0, 3.0);
  const double identity = MelCepstralDistortion(a, a);
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(1, 13), g = f;
  g(0, 4) = 1.0;
  const double delta = MelCepstralDistortion(f, g);
  const double delta_err = std::abs(delta - 10.0 / std::log(10.0) * std::sqrt(2.0));

  Eigen::MatrixXd mel(6, 40);
  for (Eigen::Index i = 0; i < mel.size(); ++i) mel.data()[i] = rng.Uniform(-10.0, 2.0);
  const Eigen::MatrixXd ceps = MelToCepstra(mel);
  double dct_err = 0.0;
  for (Eigen::Index t = 0; t < 6; ++t) {
    for (int k = 1; k <= 13; ++k) {
      double s = 0.0;
      for (int i = 0; i < 40; ++i) {
        s += mel(t, i) * std::cos(std::numbers::pi * k * (2 * i + 1) / 80.0);
      }
      dct_err = std::max(dct_err, std::abs(std::sqrt(2.0 / 40.0) * s - ceps(t, k - 1)));
    }
  }
  const int64_t lev = Levenshtein("kitten", "sitting");
  return {identity == 0.0 && delta_err <= 1e-9 && dct_err <= 1e-10 && lev == 3,
          Format("mcd(x, x) = %g, delta-1 frame %.10f dB (|error| %.1e), ", identity,
                 delta, delta_err) +
              Format("DCT max |error| %.1e, Levenshtein(kitten, sitting) = %g", dct_err,
                     static_cast<double>(lev))};
}

Outcome PipelineLaws() {
  const ModelConfig cfg;
  RandomStream rng(6, "lengths");
  int frame_failures = 0;
  for (int i = 0; i < 20; ++i) {
    const int64_t n = rng.UniformInt(1024, 120000);
    AudioWaveform audio;
    audio.samples.resize(n);
    for (double& s : audio.samples) s = rng.Uniform(-0.5, 0.5);
    const int64_t expected = static_cast<int64_t>(std::floor((n - 1024) / 768.0)) + 1;
    if (ExtractMel(audio, cfg).num_frames() != expected) ++frame_failures;
  }
  Eigen::MatrixXd ema(73, 18);
  for (Eigen::Index i = 0; i < ema.size(); ++i) ema.data()[i] = rng.Uniform(-20.0, 20.0);
  double endpoint_err = 0.0;
  for (int64_t target : {2, 50, 115, 400}) {
    const Eigen::MatrixXd r = ResampleEma(ema, target);
    endpoint_err = std::max(endpoint_err, (r.row(0) - ema.row(0)).cwiseAbs().maxCoeff());
    endpoint_err =
        std::max(endpoint_err, (r.row(target - 1) - ema.row(72)).cwiseAbs().maxCoeff());
  }
  double db_err = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double x = std::exp(rng.Uniform(-15.0, 5.0));
    db_err = std::max(db_err, std::abs(FromDb(ToDb(x)) - x) / x);
  }
  int aligned = 0;
  const auto& corpus = Overfit().corpus;
  for (const UtteranceSample& s : corpus) {
    try {
      s.Validate();
      aligned += s.ema.rows() == s.num_frames() &&
                 static_cast<Eigen::Index>(s.prosody.size()) == s.num_frames();
    } catch (const DataError&) {
    }
  }
  return {frame_failures == 0 && endpoint_err <= 1e-9 && db_err <= 1e-9 &&
              aligned == static_cast<int>(corpus.size()),
          Format("frame-count mismatches %g/20, resample endpoint |error| %.1e, ",
                 frame_failures, endpoint_err) +
              Format("dB round-trip rel error %.1e, aligned utterances %g/%g", db_err,
                     aligned, static_cast<double>(corpus.size()))};
}

Outcome InferencePurity() {
  const ModelConfig cfg;
  ParameterStore params = InitParameters(cfg);
  std::set<std::string> touched;
  params.set_access_observer([&](const std::string& name) { touched.insert(name); });
  EmaRecording ema;
  ema.samples.resize(150, cfg.c_ema);
  RandomStream rng(7, "purity");
  for (Eigen::Index i = 0; i < ema.samples.size(); ++i) {
    ema.samples.data()[i] = rng.Uniform(-5.0, 5.0);
  }
  ema.channel_names = DefaultChannelNames(cfg.c_ema);
  SynthesizeMel(ema, 2, params, cfg);
  int predictor_reads = 0;
  std::set<std::string> modules;
  for (const std::string& name : touched) {
    modules.insert(name.substr(0, name.find('.')));
    if (name.starts_with(kPitchPrefix) || name.starts_with(kEnergyPrefix)) ++predictor_reads;
  }
  std::string list;
  for (const std::string& m : modules) list += (list.empty() ? "" : ", ") + m;
  return {predictor_reads == 0 && modules.count(kIntegrationPrefix) &&
              modules.count(kStylePrefix) && modules.count(kGeneratorPrefix),
          std::to_string(touched.size()) + " parameters read from {" + list + "}, " +
              std::to_string(predictor_reads) + " variance-predictor reads"};
}

Outcome SpeakerAndProsodyEffect() {
  OverfitRun& run = Overfit();
  const UtteranceSample& s = run.corpus[0];
  const MelSpectrogram a = SynthesizeMelFromFrames(s.ema, 0, run.first.params, run.cfg);
  const MelSpectrogram b = SynthesizeMelFromFrames(s.ema, 1, run.first.params, run.cfg);
  const double swap = (a.frames - b.frames).cwiseAbs().maxCoeff();
  const EvalReport before = EvaluateCorpus(run.initial, run.corpus, run.cfg);
  const EvalReport after = EvaluateCorpus(run.first.params, run.corpus, run.cfg);
  const bool pitch_lower = before.mean_pitch_rmse_db && after.mean_pitch_rmse_db &&
                           *after.mean_pitch_rmse_db < *before.mean_pitch_rmse_db;
  const bool energy_lower = after.mean_energy_rmse_db < before.mean_energy_rmse_db;
  return {swap > 1e-3 && pitch_lower && energy_lower,
          Format("speaker swap max |diff| %.4f; ", swap) +
              Format("pitch RMSE %.2f -> %.2f dB; energy RMSE %.2f -> %.2f dB",
                     before.mean_pitch_rmse_db.value_or(NAN),
                     after.mean_pitch_rmse_db.value_or(NAN), before.mean_energy_rmse_db,
                     after.mean_energy_rmse_db)};
}

Outcome RobustFallback() {
  const fs::path dir = fs::temp_directory_path() / "ats_acceptance_fallback";
  fs::remove_all(dir);
  fs::create_directories(dir);
  OverfitRun& run = Overfit();
  SaveCheckpoint(dir / "model.ckpt", {run.cfg, TrainConfig{}, run.first.params, {}});
  const auto recs = GenerateSyntheticRecordings(2, 1, 42, run.cfg);
  WriteEma(dir / "utt.ema", recs[0].ema);
  const std::vector<std::string> args = {
      "ats_cli",
      "synthesize",
      "--ema",
      (dir / "utt.ema").string(),
      "--speaker",
      "1",
      "--out",
      (dir / "out.wav").string(),
      "--set",
      "paths.workdir=" + dir.string(),
      "paths.checkpoint=" + (dir / "model.ckpt").string(),
      "endpoints.vocoder_url=http://127.0.0.1:1/vocode",
      "endpoints.timeout_s=5",
      "fallback_vocoder=true"};
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  Outcome o;
  try {
    const AudioWaveform audio = ReadWav(dir / "out.wav");
    audio.Validate();
    double peak = 0.0;
    for (double v : audio.samples) peak = std::max(peak, std::abs(v));
    const bool warned = err.str().find("Griffin-Lim") != std::string::npos;
    o.passed = code == 0 && !audio.samples.empty() && warned;
    o.detail = "exit " + std::to_string(code) + ", " +
               std::to_string(audio.samples.size()) + " finite samples" +
               Format(", peak %.3f", peak) + (warned ? ", warning printed" : ", no warning");
  } catch (const std::exception& e) {
    o.detail = "exit " + std::to_string(code) + ", " + e.what() + "; " + err.str();
  }
  fs::remove_all(dir);
  return o;
}

}  // namespace
}  // namespace ats

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<ats::Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {1, "loss composition", ats::LossComposition},
      {2, "shape suite", ats::ShapeSuite},
      {3, "gradient audit", ats::GradientAudit},
      {4, "overfit convergence", ats::OverfitConvergence},
      {5, "metric oracles", ats::MetricOracles},
      {6, "pipeline laws", ats::PipelineLaws},
      {7, "inference-path purity", ats::InferencePurity},
      {8, "speaker and prosody effect", ats::SpeakerAndProsodyEffect},
      {9, "vocoder fallback", ats::RobustFallback},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    ats::Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.passed ? 0 : 1;
    std::printf("%s criterion %d (%s): %s\n", o.passed ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
