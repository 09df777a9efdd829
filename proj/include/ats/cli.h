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

// Command-line workflows: preprocess, synthdata, train, synthesize, evaluate.
//
// Exit codes: 0 success, 1 unexpected failure, 2 configuration error,
// 3 data error, 4 training divergence, 5 endpoint error.

#ifndef ATS_CLI_H_
#define ATS_CLI_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "ats/model_config.h"
#include "ats/training.h"

namespace ats {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitData = 3,
  kExitDivergence = 4,
  kExitEndpoint = 5,
};

struct CliConfig {
  ModelConfig model;
  TrainConfig train;
  struct Paths {
    std::string manifest;
    std::string workdir = "work";
    std::string checkpoint;
  } paths;
  struct Endpoints {
    std::string vocoder_url;
    std::string asr_url;
    double timeout_s = 30.0;
  } endpoints;
  struct Synth {
    int n_speakers = 2;
    int n_utterances = 4;
    uint64_t seed = 42;
  } synth;
  bool fallback_vocoder = true;
  bool normalize_text = true;
  int griffin_lim_iters = 60;

  // Throws ConfigError.
  void Validate() const;
};

void to_json(nlohmann::json& j, const CliConfig& c);
void from_json(const nlohmann::json& j, CliConfig& c);

// Replaces every ${NAME} with the environment variable's value. Throws
// ConfigError for unset variables or an unterminated reference.
std::string SubstituteEnv(const std::string& text);

// Sets a dotted key ("model.d_hidden") in a config object. The value is
// parsed as JSON when possible and taken as a string otherwise. Throws
// ConfigError unless the key already exists.
void ApplyOverride(nlohmann::json& config, const std::string& assignment);

// Defaults, then the config file, then overrides, then the seed (applied to
// the model, training and synthetic-data seeds), then environment
// substitution in endpoint URLs.
CliConfig ResolveConfig(const std::string& config_path,
                        const std::vector<std::string>& overrides,
                        std::optional<uint64_t> seed);

// Full CLI entry point; returns the process exit code.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ats

#endif  // ATS_CLI_H_
