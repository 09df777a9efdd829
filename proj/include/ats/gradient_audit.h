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

// Finite-difference check of every model block's analytic gradients.
//
// Each block's output is reduced to a scalar by a fixed random projection
// <R, output>, then every bound parameter and the block input are compared
// against central differences. The relative error of one entry is
//   |analytic - numeric| / max(|analytic|, |numeric|, relative_floor).

#ifndef ATS_GRADIENT_AUDIT_H_
#define ATS_GRADIENT_AUDIT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ats/model_config.h"

namespace ats {

struct GradientAuditOptions {
  double step = 1e-5;
  double relative_floor = 1e-4;
  double tolerance = 1e-4;
  int frames = 6;
  // Entries checked per parameter tensor; tensors at most this large are
  // checked exhaustively, larger ones at random positions.
  int max_entries_per_tensor = 48;
};

struct BlockAuditResult {
  std::string block;
  double max_relative_error = 0.0;
  std::string worst_entry;  // "<tensor>[<flat index>]"
  int64_t entries_checked = 0;
  bool passed = false;
};

struct GradientAuditReport {
  std::vector<BlockAuditResult> blocks;

  bool all_passed() const;
  // nullptr when no block has that name.
  const BlockAuditResult* Find(std::string_view block) const;
};

// Reduced dimensions: d_hidden 16, d_style 8, d_ff 32, two heads, small
// kernel widths and block counts.
ModelConfig GradientAuditConfig();

// Blocks: linear, conv, layer_norm, gru, attention, integration, style,
// pitch_predictor, energy_predictor, conformer, generator, baseline,
// full_loss. Parameters, biases and norm gains are randomized.
GradientAuditReport RunGradientAudit(const ModelConfig& cfg, uint64_t seed,
                                     const GradientAuditOptions& options = {});

std::string FormatAuditReport(const GradientAuditReport& report);

}  // namespace ats

#endif  // ATS_GRADIENT_AUDIT_H_
