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

// Network blocks of the articulation-to-speech model.
//
//   EMA ++ one-hot speaker -> integration block -> hidden [T x d_hidden]
//   hidden -> style encoder -> style [T x d_style]
//   style -> pitch / energy predictors (training only) -> [T]
//   hidden ++ style -> conformer mel generator -> mel [T x n_mels]
//
// Every block is a pure function of its inputs and the parameters it reads
// through a ForwardContext, so the same code serves inference (no gradient
// recording) and training.

#ifndef ATS_MODEL_H_
#define ATS_MODEL_H_

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "ats/autodiff.h"
#include "ats/model_config.h"
#include "ats/parameter_store.h"

namespace ats {

using ad::Matrix;

// Binds parameters from a store into a graph on first use.
class ForwardContext {
 public:
  // When training is false parameters enter the graph as constants and
  // dropout is disabled.
  ForwardContext(ad::Graph& graph, const ParameterStore& params,
                 bool training = false, uint64_t dropout_seed = 0);

  ad::Graph& graph() { return graph_; }
  bool training() const { return training_; }

  ad::Var Param(const std::string& name);
  ad::Var Input(Matrix value) { return graph_.Constant(std::move(value)); }
  ad::Var Dropout(ad::Var x, double rate);

  // Gradients of every bound parameter after graph().Backward(), keyed by
  // parameter name, each shaped like the parameter's matrix view.
  std::map<std::string, Matrix> Gradients() const;

 private:
  ad::Graph& graph_;
  const ParameterStore& params_;
  bool training_;
  std::mt19937_64 dropout_rng_;
  std::unordered_map<std::string, ad::Var> bound_;
};

enum class ProsodyKind { kPitch, kEnergy };

// Throws std::out_of_range unless 0 <= speaker_index < n_speakers.
Eigen::RowVectorXd OneHotSpeaker(int speaker_index, int n_speakers);

// Standard sinusoidal table: even columns sin, odd columns cos.
Matrix SinusoidalPositions(Eigen::Index frames, Eigen::Index width);

// y = x W^T + b with W [out x in] at "<prefix>.weight", b at "<prefix>.bias".
ad::Var Linear(ForwardContext& ctx, const std::string& prefix, ad::Var x);
ad::Var Conv(ForwardContext& ctx, const std::string& prefix, ad::Var x,
             int kernel);
ad::Var Norm(ForwardContext& ctx, const std::string& prefix, ad::Var x);

// Multi-head self-attention over all frames. When positions is non-null it
// is added to the query/key input only.
ad::Var SelfAttention(ForwardContext& ctx, const std::string& prefix, ad::Var x,
                      int heads, const Matrix* positions);

// Conv(kernel, same) + ReLU over [ema | speaker] to d_hidden, then a GRU;
// output = conv features + GRU states.
ad::Var IntegrationBlock(ForwardContext& ctx, ad::Var ema,
                         const Eigen::RowVectorXd& speaker,
                         const ModelConfig& cfg);

// Linear, two residual conv blocks, residual self-attention (no positional
// signal), linear. Frame-level output [T x d_style].
ad::Var StyleEncoder(ForwardContext& ctx, ad::Var hidden, const ModelConfig& cfg);

// Two conv + ReLU + LayerNorm layers and a linear head; output [T x 1] in dB.
ad::Var VariancePredictor(ForwardContext& ctx, ad::Var style, ProsodyKind kind,
                          const ModelConfig& cfg);

// Post-norm block: conv sub-layer, self-attention sub-layer with sinusoidal
// positions on queries/keys, feed-forward sub-layer. Shape preserving.
ad::Var ConformerBlock(ForwardContext& ctx, const std::string& prefix, ad::Var x,
                       const ModelConfig& cfg);

// Throws std::invalid_argument if hidden and style differ in frame count.
ad::Var MelGenerator(ForwardContext& ctx, ad::Var hidden, ad::Var style,
                     const ModelConfig& cfg);

// Residual conv blocks then transformer encoder layers; no speaker or style
// conditioning. Reads parameters under "baseline.".
ad::Var BaselineForward(ForwardContext& ctx, ad::Var ema, const ModelConfig& cfg);

struct ProposedOutputs {
  ad::Var hidden;
  ad::Var style;
  ad::Var mel;
  ad::Var pitch;   // invalid when predictors were not run
  ad::Var energy;  // invalid when predictors were not run
};

// Training path (all four modules) when with_predictors is true; the
// inference path (integration, style, generator) otherwise.
ProposedOutputs ForwardProposed(ForwardContext& ctx, const Matrix& ema,
                                int speaker_index, const ModelConfig& cfg,
                                bool with_predictors);

ParameterStore InitParameters(const ModelConfig& cfg);
ParameterStore InitBaselineParameters(const ModelConfig& cfg);

// Parameter name prefixes of each module.
inline constexpr const char* kIntegrationPrefix = "integration";
inline constexpr const char* kStylePrefix = "style";
inline constexpr const char* kPitchPrefix = "pitch_predictor";
inline constexpr const char* kEnergyPrefix = "energy_predictor";
inline constexpr const char* kGeneratorPrefix = "generator";
inline constexpr const char* kBaselinePrefix = "baseline";

}  // namespace ats

#endif  // ATS_MODEL_H_
