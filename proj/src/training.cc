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

#include "ats/training.h"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

#include "ats/autodiff.h"
#include "ats/checkpoint.h"
#include "ats/errors.h"
#include "ats/model.h"
#include "ats/random.h"
#include "json_field.h"

namespace ats {

namespace {

void Check(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invalid train config: " + what);
}

void RequireSameShape(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                      const std::string& what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(
        what + " shape mismatch: [" + std::to_string(a.rows()) + " x " +
        std::to_string(a.cols()) + "] vs [" + std::to_string(b.rows()) + " x " +
        std::to_string(b.cols()) + "]");
  }
}

Eigen::MatrixXd Column(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

bool Finite(const LossBreakdown& l) {
  return std::isfinite(l.l_mel) && std::isfinite(l.l_pitch) &&
         std::isfinite(l.l_energy) && std::isfinite(l.l_total);
}

std::filesystem::path StepCheckpointPath(const std::filesystem::path& dir,
                                         int64_t step) {
  return dir / ("ckpt_step" + std::to_string(step) + ".ckpt");
}

}  // namespace

void TrainConfig::Validate() const {
  Check(learning_rate >= 0.0 && std::isfinite(learning_rate),
        "learning_rate must be finite and non-negative");
  Check(max_steps >= 1, "max_steps must be positive");
  Check(batch_size >= 1, "batch_size must be positive");
  Check(grad_clip_norm > 0.0, "grad_clip_norm must be positive");
  Check(checkpoint_every >= 1, "checkpoint_every must be positive");
  Check(adam_beta1 >= 0.0 && adam_beta1 < 1.0, "adam_beta1 must lie in [0, 1)");
  Check(adam_beta2 >= 0.0 && adam_beta2 < 1.0, "adam_beta2 must lie in [0, 1)");
  Check(adam_epsilon > 0.0, "adam_epsilon must be positive");
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = nlohmann::json{{"learning_rate", c.learning_rate},
                     {"max_steps", c.max_steps},
                     {"batch_size", c.batch_size},
                     {"grad_clip_norm", c.grad_clip_norm},
                     {"checkpoint_every", c.checkpoint_every},
                     {"seed", c.seed},
                     {"adam_beta1", c.adam_beta1},
                     {"adam_beta2", c.adam_beta2},
                     {"adam_epsilon", c.adam_epsilon}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  ReadField(j, "learning_rate", c.learning_rate);
  ReadField(j, "max_steps", c.max_steps);
  ReadField(j, "batch_size", c.batch_size);
  ReadField(j, "grad_clip_norm", c.grad_clip_norm);
  ReadField(j, "checkpoint_every", c.checkpoint_every);
  ReadField(j, "seed", c.seed);
  ReadField(j, "adam_beta1", c.adam_beta1);
  ReadField(j, "adam_beta2", c.adam_beta2);
  ReadField(j, "adam_epsilon", c.adam_epsilon);
}

double L1Loss(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target) {
  RequireSameShape(pred, target, "l1 loss");
  if (pred.size() == 0) throw std::invalid_argument("l1 loss of empty arrays");
  return (pred - target).cwiseAbs().sum() / static_cast<double>(pred.size());
}

LossBreakdown ComposeLoss(double l_mel, double l_pitch, double l_energy,
                          const ModelConfig& cfg) {
  LossBreakdown l;
  l.l_mel = l_mel;
  l.l_pitch = l_pitch;
  l.l_energy = l_energy;
  l.l_total = cfg.lambda_mel * l_mel + cfg.lambda_pitch * l_pitch +
              cfg.lambda_energy * l_energy;
  return l;
}

LossBreakdown TotalLoss(const Eigen::MatrixXd& mel_pred,
                        const Eigen::MatrixXd& mel_target,
                        const Eigen::VectorXd& pitch_pred,
                        const Eigen::VectorXd& pitch_target,
                        const Eigen::VectorXd& energy_pred,
                        const Eigen::VectorXd& energy_target,
                        const ModelConfig& cfg) {
  RequireSameShape(mel_pred, mel_target, "mel");
  RequireSameShape(pitch_pred, pitch_target, "pitch");
  RequireSameShape(energy_pred, energy_target, "energy");
  return ComposeLoss(L1Loss(mel_pred, mel_target), L1Loss(pitch_pred, pitch_target),
                     L1Loss(energy_pred, energy_target), cfg);
}

LossAndGradients ComputeLossAndGradients(const ParameterStore& params,
                                         const UtteranceSample& sample,
                                         const ModelConfig& cfg,
                                         uint64_t dropout_seed) {
  ad::Graph graph;
  ForwardContext ctx(graph, params, /*training=*/true, dropout_seed);
  const ProposedOutputs out =
      ForwardProposed(ctx, sample.ema, sample.speaker_index, cfg, true);
  RequireSameShape(out.mel.value(), sample.mel.frames, "mel");
  const Eigen::MatrixXd pitch_target = Column(sample.prosody.pitch_db);
  const Eigen::MatrixXd energy_target = Column(sample.prosody.energy_db);
  RequireSameShape(out.pitch.value(), pitch_target, "pitch");
  RequireSameShape(out.energy.value(), energy_target, "energy");

  ad::Var l_mel = ad::MeanAbsError(out.mel, sample.mel.frames);
  ad::Var l_pitch = ad::MeanAbsError(out.pitch, pitch_target);
  ad::Var l_energy = ad::MeanAbsError(out.energy, energy_target);
  ad::Var total = ad::Add(ad::Add(ad::Scale(l_mel, cfg.lambda_mel),
                                  ad::Scale(l_pitch, cfg.lambda_pitch)),
                          ad::Scale(l_energy, cfg.lambda_energy));

  LossAndGradients result;
  result.loss = ComposeLoss(l_mel.value()(0, 0), l_pitch.value()(0, 0),
                            l_energy.value()(0, 0), cfg);
  if (!Finite(result.loss)) return result;
  graph.Backward(total);
  result.gradients = ctx.Gradients();
  return result;
}

double GlobalNorm(const GradientMap& gradients) {
  double sq = 0.0;
  for (const auto& [name, g] : gradients) sq += g.squaredNorm();
  return std::sqrt(sq);
}

double ClipGradients(GradientMap& gradients, double max_norm) {
  const double norm = GlobalNorm(gradients);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (auto& [name, g] : gradients) g *= scale;
  }
  return norm;
}

void AdamUpdate(ParameterStore& params, const GradientMap& gradients,
                AdamState& state, const TrainConfig& tcfg) {
  state.step += 1;
  const double b1 = tcfg.adam_beta1, b2 = tcfg.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (const auto& [name, g] : gradients) {
    Tensor& p = params.Mutable(name);
    auto [mit, m_new] = state.m.try_emplace(name, Eigen::MatrixXd::Zero(g.rows(), g.cols()));
    auto [vit, v_new] = state.v.try_emplace(name, Eigen::MatrixXd::Zero(g.rows(), g.cols()));
    Eigen::MatrixXd& m = mit->second;
    Eigen::MatrixXd& v = vit->second;
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    const Eigen::MatrixXd step =
        tcfg.learning_rate * ((m / c1).array() /
                              ((v / c2).array().sqrt() + tcfg.adam_epsilon))
                                 .matrix();
    p.AssignFrom(p.ToMatrix() - step);
  }
}

LossBreakdown TrainStep(ParameterStore& params, AdamState& state,
                        std::span<const UtteranceSample* const> batch,
                        const ModelConfig& cfg, const TrainConfig& tcfg) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const int64_t step = state.step + 1;
  const double inv = 1.0 / static_cast<double>(batch.size());
  double l_mel = 0.0, l_pitch = 0.0, l_energy = 0.0;
  GradientMap sum;
  for (size_t i = 0; i < batch.size(); ++i) {
    const uint64_t dropout_seed =
        SplitMix64(tcfg.seed ^ SplitMix64(static_cast<uint64_t>(step) * 1000003u + i));
    LossAndGradients lg = ComputeLossAndGradients(params, *batch[i], cfg, dropout_seed);
    if (!Finite(lg.loss)) throw DivergenceError(step);
    l_mel += lg.loss.l_mel * inv;
    l_pitch += lg.loss.l_pitch * inv;
    l_energy += lg.loss.l_energy * inv;
    for (auto& [name, g] : lg.gradients) {
      auto it = sum.find(name);
      if (it == sum.end()) {
        sum.emplace(name, g * inv);
      } else {
        it->second += g * inv;
      }
    }
  }
  const LossBreakdown loss = ComposeLoss(l_mel, l_pitch, l_energy, cfg);
  if (!Finite(loss)) throw DivergenceError(step);
  ClipGradients(sum, tcfg.grad_clip_norm);
  AdamUpdate(params, sum, state, tcfg);
  return loss;
}

LossBreakdown TrainStep(ParameterStore& params, AdamState& state,
                        const UtteranceSample& sample, const ModelConfig& cfg,
                        const TrainConfig& tcfg) {
  const UtteranceSample* batch[] = {&sample};
  return TrainStep(params, state, batch, cfg, tcfg);
}

std::vector<size_t> EpochOrder(size_t corpus_size, uint64_t seed, int64_t epoch) {
  std::vector<size_t> order(corpus_size);
  for (size_t i = 0; i < corpus_size; ++i) order[i] = i;
  RandomStream rng(seed, "epoch" + std::to_string(epoch));
  for (size_t i = corpus_size; i > 1; --i) {
    const auto j = static_cast<size_t>(rng.UniformInt(0, static_cast<int64_t>(i) - 1));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

TrainResult TrainLoop(const std::vector<UtteranceSample>& corpus,
                      ParameterStore initial, const ModelConfig& cfg,
                      const TrainConfig& tcfg, const TrainLoopOptions& options) {
  if (corpus.empty()) throw std::invalid_argument("empty training corpus");
  cfg.Validate();
  tcfg.Validate();

  TrainResult result;
  if (!options.resume_from.empty()) {
    Checkpoint ckpt = LoadCheckpoint(options.resume_from);
    result.params = std::move(ckpt.params);
    result.optimizer = std::move(ckpt.optimizer);
  } else {
    result.params = std::move(initial);
  }

  auto save = [&](const std::filesystem::path& path) {
    Checkpoint ckpt{cfg, tcfg, result.params, result.optimizer};
    SaveCheckpoint(path, ckpt);
  };

  const auto n = static_cast<int64_t>(corpus.size());
  std::vector<size_t> order;
  int64_t order_epoch = -1;
  std::vector<const UtteranceSample*> batch(tcfg.batch_size);
  while (result.optimizer.step < tcfg.max_steps) {
    const int64_t step = result.optimizer.step + 1;
    for (int b = 0; b < tcfg.batch_size; ++b) {
      const int64_t position = (step - 1) * tcfg.batch_size + b;
      const int64_t epoch = position / n;
      if (epoch != order_epoch) {
        order = EpochOrder(corpus.size(), tcfg.seed, epoch);
        order_epoch = epoch;
      }
      batch[b] = &corpus[order[position % n]];
    }
    const LossBreakdown loss =
        TrainStep(result.params, result.optimizer, batch, cfg, tcfg);
    result.history.push_back({step, loss});
    if (options.on_step) options.on_step(result.history.back());
    if (!options.checkpoint_dir.empty() && step % tcfg.checkpoint_every == 0) {
      result.checkpoints.push_back(StepCheckpointPath(options.checkpoint_dir, step));
      save(result.checkpoints.back());
    }
  }
  if (!options.checkpoint_dir.empty()) {
    result.final_checkpoint = options.checkpoint_dir / "final.ckpt";
    save(result.final_checkpoint);
  }
  return result;
}

std::string LossHistoryCsv(const std::vector<LossRecord>& history) {
  std::string out = "step,l_mel,l_pitch,l_energy,l_total\n";
  char line[160];
  for (const LossRecord& r : history) {
    std::snprintf(line, sizeof(line), "%lld,%.17g,%.17g,%.17g,%.17g\n",
                  static_cast<long long>(r.step), r.loss.l_mel, r.loss.l_pitch,
                  r.loss.l_energy, r.loss.l_total);
    out += line;
  }
  return out;
}

void WriteLossHistoryCsv(const std::filesystem::path& path,
                         const std::vector<LossRecord>& history) {
  WriteFileBytes(path, LossHistoryCsv(history));
}

}  // namespace ats
