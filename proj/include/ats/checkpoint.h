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

// Checkpoint files: the model and training configs in the header, every
// parameter as an array, and Adam moments under "adam.m/<name>" and
// "adam.v/<name>".

#ifndef ATS_CHECKPOINT_H_
#define ATS_CHECKPOINT_H_

#include <filesystem>

#include "ats/array_file.h"
#include "ats/model_config.h"
#include "ats/parameter_store.h"
#include "ats/training.h"

namespace ats {

struct Checkpoint {
  ModelConfig model_config;
  TrainConfig train_config;
  ParameterStore params;
  AdamState optimizer;  // optimizer.step is the number of completed steps
};

ArrayBundle CheckpointToBundle(const Checkpoint& ckpt);
// Throws DataError(kMalformedHeader) on missing or inconsistent content.
Checkpoint CheckpointFromBundle(const ArrayBundle& bundle);

void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
// Throws DataError(kMissingFile) when the path does not exist.
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

}  // namespace ats

#endif  // ATS_CHECKPOINT_H_
