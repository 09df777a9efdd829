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

#include "ats/checkpoint.h"

#include <string_view>

#include "ats/errors.h"

namespace ats {

namespace {

constexpr std::string_view kFormat = "ats-checkpoint";
constexpr std::string_view kMomentPrefix = "adam.m/";
constexpr std::string_view kVelocityPrefix = "adam.v/";

std::vector<double> Flatten(const Eigen::MatrixXd& m) {
  Tensor t;
  t.shape = {m.rows(), m.cols()};
  t.data.resize(m.size());
  t.AssignFrom(m);
  return t.data;
}

[[noreturn]] void Bad(const std::string& what) {
  throw DataError(DataErrorCode::kMalformedHeader, "checkpoint " + what);
}

}  // namespace

ArrayBundle CheckpointToBundle(const Checkpoint& ckpt) {
  ArrayBundle b;
  b.meta["format"] = kFormat;
  b.meta["step"] = ckpt.optimizer.step;
  b.meta["model_config"] = ckpt.model_config;
  b.meta["train_config"] = ckpt.train_config;
  for (const std::string& name : ckpt.params.names()) {
    const Tensor& t = ckpt.params.Get(name);
    b.arrays.push_back({name, t.shape, t.data});
  }
  for (const std::string& name : ckpt.params.names()) {
    const auto m = ckpt.optimizer.m.find(name);
    const auto v = ckpt.optimizer.v.find(name);
    if (m == ckpt.optimizer.m.end() || v == ckpt.optimizer.v.end()) continue;
    const std::vector<int64_t>& shape = ckpt.params.Get(name).shape;
    b.arrays.push_back({std::string(kMomentPrefix) + name, shape, Flatten(m->second)});
    b.arrays.push_back({std::string(kVelocityPrefix) + name, shape, Flatten(v->second)});
  }
  return b;
}

Checkpoint CheckpointFromBundle(const ArrayBundle& bundle) {
  Checkpoint ckpt;
  try {
    if (bundle.meta.at("format").get<std::string>() != kFormat) Bad("format tag");
    ckpt.optimizer.step = bundle.meta.at("step").get<int64_t>();
    ckpt.model_config = bundle.meta.at("model_config").get<ModelConfig>();
    ckpt.train_config = bundle.meta.at("train_config").get<TrainConfig>();
  } catch (const nlohmann::json::exception& e) {
    Bad(e.what());
  }
  for (const NamedArray& a : bundle.arrays) {
    const std::string_view name = a.name;
    if (name.starts_with(kMomentPrefix) || name.starts_with(kVelocityPrefix)) continue;
    ckpt.params.Add(a.name, a.shape, a.data);
  }
  for (const NamedArray& a : bundle.arrays) {
    const std::string_view name = a.name;
    const bool is_m = name.starts_with(kMomentPrefix);
    if (!is_m && !name.starts_with(kVelocityPrefix)) continue;
    const std::string param(name.substr(kMomentPrefix.size()));
    if (!ckpt.params.Contains(param)) Bad("moment for unknown parameter " + param);
    Tensor t = ckpt.params.Get(param);
    if (t.data.size() != a.data.size()) Bad("moment size for " + param);
    t.data = a.data;
    (is_m ? ckpt.optimizer.m : ckpt.optimizer.v)[param] = t.ToMatrix();
  }
  return ckpt;
}

void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  WriteBundleFile(path, CheckpointToBundle(ckpt));
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw DataError(DataErrorCode::kMissingFile, path.string());
  }
  return CheckpointFromBundle(ReadBundleFile(path));
}

}  // namespace ats
