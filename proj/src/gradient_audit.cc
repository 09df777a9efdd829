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

#include "ats/gradient_audit.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>

#include "ats/autodiff.h"
#include "ats/model.h"
#include "ats/parameter_store.h"
#include "ats/random.h"

namespace ats {

namespace {

using BlockFn =
    std::function<ad::Var(ForwardContext&, const std::vector<ad::Var>&)>;

Matrix RandomMatrix(RandomStream& rng, Eigen::Index rows, Eigen::Index cols,
                    double scale) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.Uniform(-scale, scale);
  return m;
}

// Moves biases, betas and gains away from their constant initial values so
// every term of the backward pass is exercised.
void Randomize(ParameterStore& params, uint64_t seed) {
  for (const std::string& name : params.names()) {
    RandomStream rng(seed, "audit/" + name);
    Tensor& t = params.Mutable(name);
    const bool gain = name.ends_with(".gamma");
    const bool offset = name.ends_with(".bias") || name.ends_with(".beta") ||
                        name.ends_with(".bias_ih") || name.ends_with(".bias_hh");
    for (double& v : t.data) {
      if (gain) {
        v = 1.0 + rng.Uniform(-0.5, 0.5);
      } else if (offset) {
        v = rng.Uniform(-0.5, 0.5);
      } else {
        v += rng.Uniform(-0.1, 0.1);
      }
    }
  }
}

class BlockAuditor {
 public:
  BlockAuditor(ParameterStore& params, const GradientAuditOptions& options,
               uint64_t seed)
      : params_(params), options_(options), seed_(seed) {}

  BlockAuditResult Run(const std::string& block, std::vector<Matrix> inputs,
                       const BlockFn& fn) {
    BlockAuditResult result;
    result.block = block;

    // Analytic pass.
    ad::Graph graph;
    ForwardContext ctx(graph, params_, /*training=*/true);
    std::vector<ad::Var> vars;
    for (const Matrix& m : inputs) vars.push_back(graph.Variable(m));
    const ad::Var out = fn(ctx, vars);
    RandomStream rng(seed_, "projection/" + block);
    projection_ = RandomMatrix(rng, out.rows(), out.cols(), 1.0);
    graph.Backward(ad::Dot(out, projection_));
    const std::map<std::string, Matrix> grads = ctx.Gradients();

    for (const auto& [name, grad] : grads) {
      Tensor& t = params_.Mutable(name);
      // Gradients are matrix views of the row-major tensor.
      Tensor view = t;
      view.AssignFrom(grad);
      CheckEntries(name, &t.data, view.data, inputs, fn, result);
    }
    for (size_t i = 0; i < inputs.size(); ++i) {
      const Matrix g = graph.grad(vars[i]);
      std::vector<double> flat(g.data(), g.data() + g.size());
      CheckEntries("input" + std::to_string(i), nullptr, flat, inputs, fn, result,
                   i);
    }
    result.passed = result.max_relative_error < options_.tolerance;
    return result;
  }

 private:
  double Objective(const std::vector<Matrix>& inputs, const BlockFn& fn) {
    ad::Graph graph(/*record_gradients=*/false);
    ForwardContext ctx(graph, params_);
    std::vector<ad::Var> vars;
    for (const Matrix& m : inputs) vars.push_back(graph.Constant(m));
    return (fn(ctx, vars).value().array() * projection_.array()).sum();
  }

  // Perturbs either a parameter tensor (data != nullptr) or input
  // input_index (column-major storage, matching Eigen).
  void CheckEntries(const std::string& label, std::vector<double>* data,
                    const std::vector<double>& analytic,
                    std::vector<Matrix>& inputs, const BlockFn& fn,
                    BlockAuditResult& result, size_t input_index = 0) {
    const auto count = static_cast<int64_t>(analytic.size());
    std::vector<int64_t> entries(count);
    std::iota(entries.begin(), entries.end(), 0);
    if (count > options_.max_entries_per_tensor) {
      RandomStream rng(seed_, "entries/" + result.block + "/" + label);
      for (int64_t i = 0; i < options_.max_entries_per_tensor; ++i) {
        std::swap(entries[i], entries[rng.UniformInt(i, count - 1)]);
      }
      entries.resize(options_.max_entries_per_tensor);
    }
    for (int64_t idx : entries) {
      double& x = data != nullptr ? (*data)[idx] : inputs[input_index].data()[idx];
      const double saved = x;
      x = saved + options_.step;
      const double plus = Objective(inputs, fn);
      x = saved - options_.step;
      const double minus = Objective(inputs, fn);
      x = saved;
      const double numeric = (plus - minus) / (2.0 * options_.step);
      const double a = analytic[idx];
      const double denom =
          std::max({std::abs(a), std::abs(numeric), options_.relative_floor});
      const double rel = std::abs(a - numeric) / denom;
      ++result.entries_checked;
      if (result.worst_entry.empty() || rel > result.max_relative_error) {
        result.max_relative_error = rel;
        result.worst_entry = label + "[" + std::to_string(idx) + "]";
      }
    }
  }

  ParameterStore& params_;
  const GradientAuditOptions& options_;
  uint64_t seed_;
  Matrix projection_;
};

}  // namespace

bool GradientAuditReport::all_passed() const {
  return !blocks.empty() &&
         std::all_of(blocks.begin(), blocks.end(),
                     [](const BlockAuditResult& b) { return b.passed; });
}

const BlockAuditResult* GradientAuditReport::Find(std::string_view block) const {
  for (const BlockAuditResult& b : blocks) {
    if (b.block == block) return &b;
  }
  return nullptr;
}

ModelConfig GradientAuditConfig() {
  ModelConfig cfg;
  cfg.n_speakers = 3;
  cfg.c_ema = 5;
  cfg.d_hidden = 16;
  cfg.d_style = 8;
  cfg.n_mels = 6;
  cfg.n_conformer_blocks = 2;
  cfg.n_attn_heads = 2;
  cfg.conv_kernel = 3;
  cfg.predictor_kernel = 3;
  cfg.d_ff = 32;
  cfg.n_baseline_conv_blocks = 1;
  cfg.n_baseline_layers = 1;
  return cfg;
}

GradientAuditReport RunGradientAudit(const ModelConfig& cfg, uint64_t seed,
                                     const GradientAuditOptions& options) {
  cfg.Validate();
  ModelConfig c = cfg;
  c.dropout = 0.0;
  ParameterStore params = InitParameters(c);
  {
    const ParameterStore baseline = InitBaselineParameters(c);
    for (const std::string& name : baseline.names()) {
      const Tensor& t = baseline.Get(name);
      params.Add(name, t.shape, t.data);
    }
  }
  Randomize(params, seed);

  RandomStream rng(seed, "inputs");
  const Eigen::Index t = options.frames;
  const Matrix hidden = RandomMatrix(rng, t, c.d_hidden, 1.0);
  const Matrix style = RandomMatrix(rng, t, c.d_style, 1.0);
  const Matrix ema = RandomMatrix(rng, t, c.c_ema, 1.0);
  const Eigen::RowVectorXd speaker = OneHotSpeaker(1 % c.n_speakers, c.n_speakers);
  Matrix ema_speaker(t, c.c_ema + c.n_speakers);
  ema_speaker << ema, speaker.replicate(t, 1);
  const Matrix mel_target = RandomMatrix(rng, t, c.n_mels, 2.0);
  const Matrix pitch_target = RandomMatrix(rng, t, 1, 50.0);
  const Matrix energy_target = RandomMatrix(rng, t, 1, 30.0);

  BlockAuditor auditor(params, options, seed);
  GradientAuditReport report;
  auto run = [&](const std::string& name, std::vector<Matrix> inputs,
                 const BlockFn& fn) {
    report.blocks.push_back(auditor.Run(name, std::move(inputs), fn));
  };
  const std::string style_prefix = kStylePrefix;
  const std::string integration = kIntegrationPrefix;

  run("linear", {hidden}, [&](ForwardContext& ctx, const std::vector<ad::Var>& in) {
    return Linear(ctx, style_prefix + ".input", in[0]);
  });
  run("conv", {ema_speaker}, [&](ForwardContext& ctx, const std::vector<ad::Var>& in) {
    return Conv(ctx, integration + ".conv", in[0], c.conv_kernel);
  });
  run("layer_norm", {hidden}, [&](ForwardContext& ctx, const std::vector<ad::Var>& in) {
    return Norm(ctx, std::string(kGeneratorPrefix) + ".block0.conv_norm", in[0]);
  });
  run("gru", {hidden}, [&](ForwardContext& ctx, const std::vector<ad::Var>& in) {
    const std::string g = integration + ".gru.";
    return ad::Gru(in[0], ctx.Param(g + "weight_ih"), ctx.Param(g + "weight_hh"),
                   ctx.Param(g + "bias_ih"), ctx.Param(g + "bias_hh"));
  });
  run("attention", {style}, [&](ForwardContext& ctx, const std::vector<ad::Var>& in) {
    const Matrix positions = SinusoidalPositions(in[0].rows(), in[0].cols());
    return SelfAttention(ctx, style_prefix + ".attn", in[0], c.n_attn_heads,
                         &positions);
  });
  run("integration", {ema}, [&](ForwardContext& ctx, const std::vector<ad::Var>& in) {
    return IntegrationBlock(ctx, in[0], speaker, c);
  });
  run("style", {hidden}, [&](ForwardContext& ctx, const std::vector<ad::Var>& in) {
    return StyleEncoder(ctx, in[0], c);
  });
  run("pitch_predictor", {style},
      [&](ForwardContext& ctx, const std::vector<ad::Var>& in) {
        return VariancePredictor(ctx, in[0], ProsodyKind::kPitch, c);
      });
  run("energy_predictor", {style},
      [&](ForwardContext& ctx, const std::vector<ad::Var>& in) {
        return VariancePredictor(ctx, in[0], ProsodyKind::kEnergy, c);
      });
  run("conformer", {hidden}, [&](ForwardContext& ctx, const std::vector<ad::Var>& in) {
    return ConformerBlock(ctx, std::string(kGeneratorPrefix) + ".block0", in[0], c);
  });
  run("generator", {hidden, style},
      [&](ForwardContext& ctx, const std::vector<ad::Var>& in) {
        return MelGenerator(ctx, in[0], in[1], c);
      });
  run("baseline", {ema}, [&](ForwardContext& ctx, const std::vector<ad::Var>& in) {
    return BaselineForward(ctx, in[0], c);
  });
  run("full_loss", {ema}, [&](ForwardContext& ctx, const std::vector<ad::Var>& in) {
    ad::Var h = IntegrationBlock(ctx, in[0], speaker, c);
    ad::Var s = StyleEncoder(ctx, h, c);
    ad::Var mel = MelGenerator(ctx, h, s, c);
    ad::Var pitch = VariancePredictor(ctx, s, ProsodyKind::kPitch, c);
    ad::Var energy = VariancePredictor(ctx, s, ProsodyKind::kEnergy, c);
    return ad::Add(
        ad::Add(ad::Scale(ad::MeanAbsError(mel, mel_target), c.lambda_mel),
                ad::Scale(ad::MeanAbsError(pitch, pitch_target), c.lambda_pitch)),
        ad::Scale(ad::MeanAbsError(energy, energy_target), c.lambda_energy));
  });
  return report;
}

std::string FormatAuditReport(const GradientAuditReport& report) {
  std::string out;
  char line[256];
  for (const BlockAuditResult& b : report.blocks) {
    std::snprintf(line, sizeof(line), "%-18s max_rel_err=%.3e entries=%lld worst=%s %s\n",
                  b.block.c_str(), b.max_relative_error,
                  static_cast<long long>(b.entries_checked), b.worst_entry.c_str(),
                  b.passed ? "ok" : "FAIL");
    out += line;
  }
  return out;
}

}  // namespace ats
