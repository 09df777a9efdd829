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

// Weighted L1 objective, Adam with global-norm clipping, and the training
// loop with resumable checkpoints.

#ifndef ATS_TRAINING_H_
#define ATS_TRAINING_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "ats/data_pipeline.h"
#include "ats/model_config.h"
#include "ats/parameter_store.h"

namespace ats {

struct TrainConfig {
  double learning_rate = 1e-4;
  int64_t max_steps = 1000;
  int batch_size = 1;
  double grad_clip_norm = 1.0;
  int64_t checkpoint_every = 100;
  uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  // Throws ConfigError. A learning rate of 0 is accepted (frozen model).
  void Validate() const;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

struct LossBreakdown {
  double l_mel = 0.0;
  double l_pitch = 0.0;
  double l_energy = 0.0;
  double l_total = 0.0;
};

// Mean absolute elementwise difference. Throws std::invalid_argument on a
// shape mismatch.
double L1Loss(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target);

// l_total = lambda_mel l_mel + lambda_pitch l_pitch + lambda_energy l_energy.
LossBreakdown ComposeLoss(double l_mel, double l_pitch, double l_energy,
                          const ModelConfig& cfg);

// Throws std::invalid_argument naming the mismatched pair.
LossBreakdown TotalLoss(const Eigen::MatrixXd& mel_pred,
                        const Eigen::MatrixXd& mel_target,
                        const Eigen::VectorXd& pitch_pred,
                        const Eigen::VectorXd& pitch_target,
                        const Eigen::VectorXd& energy_pred,
                        const Eigen::VectorXd& energy_target,
                        const ModelConfig& cfg);

using GradientMap = std::map<std::string, Eigen::MatrixXd>;

struct LossAndGradients {
  LossBreakdown loss;
  GradientMap gradients;  // keyed by parameter name, matrix views
};

// Training-path forward and backward for one sample. dropout_seed only
// matters when cfg.dropout > 0.
LossAndGradients ComputeLossAndGradients(const ParameterStore& params,
                                         const UtteranceSample& sample,
                                         const ModelConfig& cfg,
                                         uint64_t dropout_seed = 0);

// Rescales all gradients together so their global L2 norm is at most
// max_norm. Returns the norm before clipping.
double ClipGradients(GradientMap& gradients, double max_norm);
double GlobalNorm(const GradientMap& gradients);

struct AdamState {
  int64_t step = 0;
  std::unordered_map<std::string, Eigen::MatrixXd> m;
  std::unordered_map<std::string, Eigen::MatrixXd> v;
};

// Bias-corrected Adam update of every parameter that has a gradient.
void AdamUpdate(ParameterStore& params, const GradientMap& gradients,
                AdamState& state, const TrainConfig& tcfg);

// One optimizer step over a batch: mean loss and mean gradients, clipping,
// Adam. Returns the pre-update loss. Throws DivergenceError(step) on a
// non-finite loss, leaving params and state untouched.
LossBreakdown TrainStep(ParameterStore& params, AdamState& state,
                        std::span<const UtteranceSample* const> batch,
                        const ModelConfig& cfg, const TrainConfig& tcfg);
LossBreakdown TrainStep(ParameterStore& params, AdamState& state,
                        const UtteranceSample& sample, const ModelConfig& cfg,
                        const TrainConfig& tcfg);

// Visit order of corpus indices for an epoch; a pure function of its
// arguments so a resumed run needs no generator state.
std::vector<size_t> EpochOrder(size_t corpus_size, uint64_t seed, int64_t epoch);

struct LossRecord {
  int64_t step = 0;  // 1-based optimizer step
  LossBreakdown loss;
};

struct TrainLoopOptions {
  // Checkpoints are written here when non-empty.
  std::filesystem::path checkpoint_dir;
  // Continue from this checkpoint when non-empty.
  std::filesystem::path resume_from;
  std::function<void(const LossRecord&)> on_step;
};

struct TrainResult {
  ParameterStore params;
  AdamState optimizer;
  std::vector<LossRecord> history;
  std::vector<std::filesystem::path> checkpoints;
  std::filesystem::path final_checkpoint;
};

// Runs steps until tcfg.max_steps. Checkpoints "ckpt_step<N>.ckpt" every
// checkpoint_every steps and "final.ckpt" at the end. Throws
// std::invalid_argument on an empty corpus.
TrainResult TrainLoop(const std::vector<UtteranceSample>& corpus,
                      ParameterStore initial, const ModelConfig& cfg,
                      const TrainConfig& tcfg, const TrainLoopOptions& options = {});

void WriteLossHistoryCsv(const std::filesystem::path& path,
                         const std::vector<LossRecord>& history);
std::string LossHistoryCsv(const std::vector<LossRecord>& history);

}  // namespace ats

#endif  // ATS_TRAINING_H_
