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

#include "ats/model.h"

#include <cmath>
#include <stdexcept>
#include <string_view>

#include "ats/random.h"

namespace ats {

namespace {

std::string Join(const std::string& prefix, std::string_view leaf) {
  return prefix + "." + std::string(leaf);
}

enum class InitKind { kGlorot, kZero, kOne };

struct ParamSpec {
  std::string name;
  std::vector<int64_t> shape;
  InitKind kind;
  double fan_in = 0.0;
  double fan_out = 0.0;
};

class Declarations {
 public:
  void Linear(const std::string& prefix, int in, int out) {
    Add(Join(prefix, "weight"), {out, in}, InitKind::kGlorot, in, out);
    Add(Join(prefix, "bias"), {out}, InitKind::kZero);
  }
  void Conv(const std::string& prefix, int in, int out, int kernel) {
    Add(Join(prefix, "weight"), {out, in, kernel}, InitKind::kGlorot,
        in * kernel, out * kernel);
    Add(Join(prefix, "bias"), {out}, InitKind::kZero);
  }
  void Norm(const std::string& prefix, int n) {
    Add(Join(prefix, "gamma"), {n}, InitKind::kOne);
    Add(Join(prefix, "beta"), {n}, InitKind::kZero);
  }
  void Gru(const std::string& prefix, int in, int hidden) {
    Add(Join(prefix, "weight_ih"), {3 * hidden, in}, InitKind::kGlorot, in,
        3 * hidden);
    Add(Join(prefix, "weight_hh"), {3 * hidden, hidden}, InitKind::kGlorot,
        hidden, 3 * hidden);
    Add(Join(prefix, "bias_ih"), {3 * hidden}, InitKind::kZero);
    Add(Join(prefix, "bias_hh"), {3 * hidden}, InitKind::kZero);
  }
  void Attention(const std::string& prefix, int width) {
    for (const char* leaf : {"query", "key", "value", "output"}) {
      Linear(Join(prefix, leaf), width, width);
    }
  }

  const std::vector<ParamSpec>& specs() const { return specs_; }

 private:
  void Add(std::string name, std::vector<int64_t> shape, InitKind kind,
           double fan_in = 0.0, double fan_out = 0.0) {
    specs_.push_back({std::move(name), std::move(shape), kind, fan_in, fan_out});
  }

  std::vector<ParamSpec> specs_;
};

void DeclarePredictor(Declarations& d, const std::string& prefix,
                      const ModelConfig& cfg) {
  d.Conv(Join(prefix, "conv1"), cfg.d_style, cfg.d_hidden, cfg.predictor_kernel);
  d.Norm(Join(prefix, "norm1"), cfg.d_hidden);
  d.Conv(Join(prefix, "conv2"), cfg.d_hidden, cfg.d_hidden, cfg.predictor_kernel);
  d.Norm(Join(prefix, "norm2"), cfg.d_hidden);
  d.Linear(Join(prefix, "output"), cfg.d_hidden, 1);
}

// Conv, attention and feed-forward sub-layers shared by conformer and
// transformer layers.
void DeclareAttentionLayer(Declarations& d, const std::string& prefix,
                           const ModelConfig& cfg) {
  d.Attention(Join(prefix, "attn"), cfg.d_hidden);
  d.Norm(Join(prefix, "attn_norm"), cfg.d_hidden);
  d.Linear(Join(prefix, "ff1"), cfg.d_hidden, cfg.d_ff);
  d.Linear(Join(prefix, "ff2"), cfg.d_ff, cfg.d_hidden);
  d.Norm(Join(prefix, "ff_norm"), cfg.d_hidden);
}

Declarations DeclareProposed(const ModelConfig& cfg) {
  Declarations d;
  const std::string integ = kIntegrationPrefix;
  d.Conv(Join(integ, "conv"), cfg.c_ema + cfg.n_speakers, cfg.d_hidden,
         cfg.conv_kernel);
  d.Gru(Join(integ, "gru"), cfg.d_hidden, cfg.d_hidden);

  const std::string style = kStylePrefix;
  d.Linear(Join(style, "input"), cfg.d_hidden, cfg.d_style);
  d.Conv(Join(style, "conv1"), cfg.d_style, cfg.d_style, cfg.conv_kernel);
  d.Conv(Join(style, "conv2"), cfg.d_style, cfg.d_style, cfg.conv_kernel);
  d.Attention(Join(style, "attn"), cfg.d_style);
  d.Linear(Join(style, "output"), cfg.d_style, cfg.d_style);

  DeclarePredictor(d, kPitchPrefix, cfg);
  DeclarePredictor(d, kEnergyPrefix, cfg);

  const std::string gen = kGeneratorPrefix;
  d.Linear(Join(gen, "input"), cfg.d_hidden + cfg.d_style, cfg.d_hidden);
  for (int b = 0; b < cfg.n_conformer_blocks; ++b) {
    const std::string block = Join(gen, "block" + std::to_string(b));
    d.Conv(Join(block, "conv"), cfg.d_hidden, cfg.d_hidden, cfg.conv_kernel);
    d.Norm(Join(block, "conv_norm"), cfg.d_hidden);
    DeclareAttentionLayer(d, block, cfg);
  }
  d.Linear(Join(gen, "output"), cfg.d_hidden, cfg.n_mels);
  return d;
}

Declarations DeclareBaseline(const ModelConfig& cfg) {
  Declarations d;
  const std::string base = kBaselinePrefix;
  d.Linear(Join(base, "input"), cfg.c_ema, cfg.d_hidden);
  for (int b = 0; b < cfg.n_baseline_conv_blocks; ++b) {
    const std::string block = Join(base, "conv_block" + std::to_string(b));
    d.Conv(Join(block, "conv"), cfg.d_hidden, cfg.d_hidden, cfg.conv_kernel);
    d.Norm(Join(block, "conv_norm"), cfg.d_hidden);
  }
  for (int l = 0; l < cfg.n_baseline_layers; ++l) {
    DeclareAttentionLayer(d, Join(base, "layer" + std::to_string(l)), cfg);
  }
  d.Linear(Join(base, "output"), cfg.d_hidden, cfg.n_mels);
  return d;
}

ParameterStore Materialize(const Declarations& decl, uint64_t seed) {
  ParameterStore store;
  for (const ParamSpec& spec : decl.specs()) {
    int64_t count = 1;
    for (int64_t s : spec.shape) count *= s;
    std::vector<double> data(count, 0.0);
    if (spec.kind == InitKind::kOne) {
      std::fill(data.begin(), data.end(), 1.0);
    } else if (spec.kind == InitKind::kGlorot) {
      // Each tensor draws from its own stream keyed by (seed, name), so the
      // values do not depend on declaration order.
      RandomStream rng(seed, spec.name);
      const double limit = std::sqrt(6.0 / (spec.fan_in + spec.fan_out));
      for (double& v : data) v = rng.Uniform(-limit, limit);
    }
    store.Add(spec.name, spec.shape, std::move(data));
  }
  return store;
}

ad::Var FeedForward(ForwardContext& ctx, const std::string& prefix, ad::Var x,
                    const ModelConfig& cfg) {
  ad::Var h = ad::Relu(Linear(ctx, Join(prefix, "ff1"), x));
  h = ctx.Dropout(h, cfg.dropout);
  return Linear(ctx, Join(prefix, "ff2"), h);
}

// Self-attention and feed-forward sub-layers with post-norm residuals.
ad::Var AttentionLayer(ForwardContext& ctx, const std::string& prefix,
                       ad::Var x, const ModelConfig& cfg) {
  const Matrix positions = SinusoidalPositions(x.rows(), x.cols());
  ad::Var a = SelfAttention(ctx, Join(prefix, "attn"), x, cfg.n_attn_heads,
                            &positions);
  x = Norm(ctx, Join(prefix, "attn_norm"),
           ad::Add(x, ctx.Dropout(a, cfg.dropout)));
  ad::Var f = FeedForward(ctx, prefix, x, cfg);
  return Norm(ctx, Join(prefix, "ff_norm"),
              ad::Add(x, ctx.Dropout(f, cfg.dropout)));
}

// x + ReLU(conv(x)) followed by layer normalization.
ad::Var ResidualConvNorm(ForwardContext& ctx, const std::string& prefix,
                         ad::Var x, const ModelConfig& cfg) {
  ad::Var c = ad::Relu(Conv(ctx, Join(prefix, "conv"), x, cfg.conv_kernel));
  return Norm(ctx, Join(prefix, "conv_norm"),
              ad::Add(x, ctx.Dropout(c, cfg.dropout)));
}

}  // namespace

ForwardContext::ForwardContext(ad::Graph& graph, const ParameterStore& params,
                               bool training, uint64_t dropout_seed)
    : graph_(graph),
      params_(params),
      training_(training),
      dropout_rng_(dropout_seed) {}

ad::Var ForwardContext::Param(const std::string& name) {
  auto it = bound_.find(name);
  if (it != bound_.end()) return it->second;
  Matrix value = params_.Get(name).ToMatrix();
  ad::Var v = training_ ? graph_.Variable(std::move(value))
                        : graph_.Constant(std::move(value));
  bound_.emplace(name, v);
  return v;
}

ad::Var ForwardContext::Dropout(ad::Var x, double rate) {
  if (!training_ || rate <= 0.0) return x;
  return ad::Dropout(x, rate, dropout_rng_);
}

std::map<std::string, Matrix> ForwardContext::Gradients() const {
  std::map<std::string, Matrix> out;
  for (const auto& [name, v] : bound_) out.emplace(name, graph_.grad(v));
  return out;
}

Eigen::RowVectorXd OneHotSpeaker(int speaker_index, int n_speakers) {
  if (speaker_index < 0 || speaker_index >= n_speakers) {
    throw std::out_of_range("speaker index " + std::to_string(speaker_index) +
                            " outside [0, " + std::to_string(n_speakers) + ")");
  }
  Eigen::RowVectorXd v = Eigen::RowVectorXd::Zero(n_speakers);
  v(speaker_index) = 1.0;
  return v;
}

Matrix SinusoidalPositions(Eigen::Index frames, Eigen::Index width) {
  Matrix pe(frames, width);
  for (Eigen::Index t = 0; t < frames; ++t) {
    for (Eigen::Index i = 0; i < width; ++i) {
      const double rate =
          std::pow(10000.0, -static_cast<double>(i - i % 2) / width);
      pe(t, i) = i % 2 == 0 ? std::sin(t * rate) : std::cos(t * rate);
    }
  }
  return pe;
}

ad::Var Linear(ForwardContext& ctx, const std::string& prefix, ad::Var x) {
  return ad::AddRow(ad::MatMulNT(x, ctx.Param(Join(prefix, "weight"))),
                    ctx.Param(Join(prefix, "bias")));
}

ad::Var Conv(ForwardContext& ctx, const std::string& prefix, ad::Var x,
             int kernel) {
  return ad::Conv1dSame(x, ctx.Param(Join(prefix, "weight")),
                        ctx.Param(Join(prefix, "bias")), kernel);
}

ad::Var Norm(ForwardContext& ctx, const std::string& prefix, ad::Var x) {
  return ad::LayerNorm(x, ctx.Param(Join(prefix, "gamma")),
                       ctx.Param(Join(prefix, "beta")));
}

ad::Var SelfAttention(ForwardContext& ctx, const std::string& prefix, ad::Var x,
                      int heads, const Matrix* positions) {
  const Eigen::Index width = x.cols();
  if (heads < 1 || width % heads != 0) {
    throw std::invalid_argument("attention width " + std::to_string(width) +
                                " not divisible by " + std::to_string(heads) +
                                " heads");
  }
  ad::Var qk_in = positions != nullptr ? ad::AddConstant(x, *positions) : x;
  ad::Var q = Linear(ctx, Join(prefix, "query"), qk_in);
  ad::Var k = Linear(ctx, Join(prefix, "key"), qk_in);
  ad::Var v = Linear(ctx, Join(prefix, "value"), x);
  const Eigen::Index head_dim = width / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  std::vector<ad::Var> outputs;
  outputs.reserve(heads);
  for (int h = 0; h < heads; ++h) {
    ad::Var qh = ad::SliceCols(q, h * head_dim, head_dim);
    ad::Var kh = ad::SliceCols(k, h * head_dim, head_dim);
    ad::Var vh = ad::SliceCols(v, h * head_dim, head_dim);
    ad::Var weights = ad::SoftmaxRows(ad::Scale(ad::MatMulNT(qh, kh), scale));
    outputs.push_back(ad::MatMul(weights, vh));
  }
  return Linear(ctx, Join(prefix, "output"), ad::ConcatCols(outputs));
}

ad::Var IntegrationBlock(ForwardContext& ctx, ad::Var ema,
                         const Eigen::RowVectorXd& speaker,
                         const ModelConfig& cfg) {
  if (ema.cols() != cfg.c_ema) {
    throw std::invalid_argument("EMA width " + std::to_string(ema.cols()) +
                                " != c_ema " + std::to_string(cfg.c_ema));
  }
  if (speaker.size() != cfg.n_speakers) {
    throw std::invalid_argument("speaker vector width " +
                                std::to_string(speaker.size()) +
                                " != n_speakers " +
                                std::to_string(cfg.n_speakers));
  }
  int ones = 0;
  for (Eigen::Index i = 0; i < speaker.size(); ++i) {
    if (speaker(i) == 1.0) {
      ++ones;
    } else if (speaker(i) != 0.0) {
      ones = -1;
      break;
    }
  }
  if (ones != 1) throw std::invalid_argument("speaker vector is not one-hot");

  const std::string prefix = kIntegrationPrefix;
  ad::Var spk = ctx.Input(speaker.replicate(ema.rows(), 1));
  ad::Var input = ad::ConcatCols({ema, spk});
  ad::Var features =
      ad::Relu(Conv(ctx, Join(prefix, "conv"), input, cfg.conv_kernel));
  const std::string gru = Join(prefix, "gru");
  ad::Var states = ad::Gru(features, ctx.Param(Join(gru, "weight_ih")),
                           ctx.Param(Join(gru, "weight_hh")),
                           ctx.Param(Join(gru, "bias_ih")),
                           ctx.Param(Join(gru, "bias_hh")));
  return ad::Add(features, states);
}

ad::Var StyleEncoder(ForwardContext& ctx, ad::Var hidden, const ModelConfig& cfg) {
  const std::string prefix = kStylePrefix;
  ad::Var x = Linear(ctx, Join(prefix, "input"), hidden);
  for (const char* conv : {"conv1", "conv2"}) {
    ad::Var c = ad::Relu(Conv(ctx, Join(prefix, conv), x, cfg.conv_kernel));
    x = ad::Add(x, ctx.Dropout(c, cfg.dropout));
  }
  ad::Var a = SelfAttention(ctx, Join(prefix, "attn"), x, cfg.n_attn_heads,
                            nullptr);
  x = ad::Add(x, ctx.Dropout(a, cfg.dropout));
  return Linear(ctx, Join(prefix, "output"), x);
}

ad::Var VariancePredictor(ForwardContext& ctx, ad::Var style, ProsodyKind kind,
                          const ModelConfig& cfg) {
  const std::string prefix =
      kind == ProsodyKind::kPitch ? kPitchPrefix : kEnergyPrefix;
  ad::Var x = style;
  for (const char* layer : {"1", "2"}) {
    x = ad::Relu(Conv(ctx, prefix + ".conv" + layer, x, cfg.predictor_kernel));
    x = Norm(ctx, prefix + ".norm" + layer, x);
    x = ctx.Dropout(x, cfg.dropout);
  }
  return Linear(ctx, Join(prefix, "output"), x);
}

ad::Var ConformerBlock(ForwardContext& ctx, const std::string& prefix, ad::Var x,
                       const ModelConfig& cfg) {
  x = ResidualConvNorm(ctx, prefix, x, cfg);
  return AttentionLayer(ctx, prefix, x, cfg);
}

ad::Var MelGenerator(ForwardContext& ctx, ad::Var hidden, ad::Var style,
                     const ModelConfig& cfg) {
  if (hidden.rows() != style.rows()) {
    throw std::invalid_argument(
        "mel generator: hidden has " + std::to_string(hidden.rows()) +
        " frames but style has " + std::to_string(style.rows()));
  }
  const std::string prefix = kGeneratorPrefix;
  ad::Var x = Linear(ctx, Join(prefix, "input"), ad::ConcatCols({hidden, style}));
  for (int b = 0; b < cfg.n_conformer_blocks; ++b) {
    x = ConformerBlock(ctx, Join(prefix, "block" + std::to_string(b)), x, cfg);
  }
  return Linear(ctx, Join(prefix, "output"), x);
}

ad::Var BaselineForward(ForwardContext& ctx, ad::Var ema, const ModelConfig& cfg) {
  if (ema.cols() != cfg.c_ema) {
    throw std::invalid_argument("EMA width " + std::to_string(ema.cols()) +
                                " != c_ema " + std::to_string(cfg.c_ema));
  }
  const std::string prefix = kBaselinePrefix;
  ad::Var x = Linear(ctx, Join(prefix, "input"), ema);
  for (int b = 0; b < cfg.n_baseline_conv_blocks; ++b) {
    x = ResidualConvNorm(ctx, Join(prefix, "conv_block" + std::to_string(b)), x,
                         cfg);
  }
  for (int l = 0; l < cfg.n_baseline_layers; ++l) {
    x = AttentionLayer(ctx, Join(prefix, "layer" + std::to_string(l)), x, cfg);
  }
  return Linear(ctx, Join(prefix, "output"), x);
}

ProposedOutputs ForwardProposed(ForwardContext& ctx, const Matrix& ema,
                                int speaker_index, const ModelConfig& cfg,
                                bool with_predictors) {
  ProposedOutputs out;
  out.hidden = IntegrationBlock(ctx, ctx.Input(ema),
                                OneHotSpeaker(speaker_index, cfg.n_speakers), cfg);
  out.style = StyleEncoder(ctx, out.hidden, cfg);
  if (with_predictors) {
    out.pitch = VariancePredictor(ctx, out.style, ProsodyKind::kPitch, cfg);
    out.energy = VariancePredictor(ctx, out.style, ProsodyKind::kEnergy, cfg);
  }
  out.mel = MelGenerator(ctx, out.hidden, out.style, cfg);
  return out;
}

ParameterStore InitParameters(const ModelConfig& cfg) {
  cfg.Validate();
  return Materialize(DeclareProposed(cfg), cfg.seed);
}

ParameterStore InitBaselineParameters(const ModelConfig& cfg) {
  cfg.Validate();
  return Materialize(DeclareBaseline(cfg), cfg.seed);
}

}  // namespace ats
