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

#include "ats/cli.h"

#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "ats/array_file.h"
#include "ats/checkpoint.h"
#include "ats/data_pipeline.h"
#include "ats/dataset_io.h"
#include "ats/errors.h"
#include "ats/evaluation.h"
#include "ats/griffin_lim.h"
#include "ats/inference.h"
#include "ats/model.h"
#include "ats/vocoder_client.h"
#include "json_field.h"

namespace ats {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void RequireExists(const std::string& path, const std::string& what) {
  if (path.empty()) throw ConfigError(what + " path not set");
  if (!fs::exists(path)) throw ConfigError(what + " not found: " + path);
}

void EchoConfig(const CliConfig& cfg, std::ostream& out) {
  out << "config: " << json(cfg).dump() << "\n";
}

struct LoadedCorpus {
  DatasetManifest manifest;
  std::vector<UtteranceSample> samples;
  std::vector<std::string> failures;
};

// Reads and preprocesses every manifest entry. With strict set, the first
// failure propagates; otherwise failures are collected.
LoadedCorpus LoadCorpus(const std::string& manifest_path, const ModelConfig& model,
                        bool strict) {
  LoadedCorpus c;
  c.manifest = LoadManifest(manifest_path);
  if (c.manifest.num_speakers() > model.n_speakers) {
    throw ConfigError("manifest has " + std::to_string(c.manifest.num_speakers()) +
                      " speakers but model.n_speakers is " +
                      std::to_string(model.n_speakers));
  }
  for (const ManifestEntry& e : c.manifest.entries) {
    try {
      const AlignedPair pair = ReadUtterance(c.manifest, e);
      c.samples.push_back(BuildSample(pair.ema, pair.audio,
                                      c.manifest.SpeakerIndex(e.speaker_label),
                                      model, e.utterance_id));
    } catch (const DataError& err) {
      if (strict) throw;
      c.failures.push_back(e.utterance_id + ": " + err.what());
    }
  }
  return c;
}

int CmdPreprocess(const CliConfig& cfg, const std::string& out_dir,
                  std::ostream& out, std::ostream& err) {
  RequireExists(cfg.paths.manifest, "manifest");
  const fs::path dir = out_dir.empty() ? fs::path(cfg.paths.workdir) / "cache"
                                       : fs::path(out_dir);
  EchoConfig(cfg, out);
  const DatasetManifest manifest = LoadManifest(cfg.paths.manifest);
  int failures = 0;
  out << "utterance_id,frames,duration_s\n";
  for (const ManifestEntry& e : manifest.entries) {
    try {
      const AlignedPair pair = ReadUtterance(manifest, e);
      const UtteranceSample sample =
          BuildSample(pair.ema, pair.audio, manifest.SpeakerIndex(e.speaker_label),
                      cfg.model, e.utterance_id);
      WriteSampleCache(dir / (e.utterance_id + ".cache"), sample);
      out << e.utterance_id << "," << sample.num_frames() << ","
          << pair.audio.duration_s() << "\n";
    } catch (const DataError& ex) {
      ++failures;
      err << "warning: skipped " << e.utterance_id << ": " << ex.what() << "\n";
    }
  }
  if (failures > 0) {
    err << "error: " << failures << " of " << manifest.entries.size()
        << " utterances failed\n";
    return kExitData;
  }
  return kExitOk;
}

int CmdSynthdata(const CliConfig& cfg, const std::string& out_dir, std::ostream& out) {
  const fs::path dir = out_dir.empty() ? fs::path(cfg.paths.workdir) / "synth"
                                       : fs::path(out_dir);
  EchoConfig(cfg, out);
  const std::vector<SyntheticRecording> recs = GenerateSyntheticRecordings(
      cfg.synth.n_speakers, cfg.synth.n_utterances, cfg.synth.seed, cfg.model);
  DatasetManifest manifest;
  for (int s = 0; s < cfg.synth.n_speakers; ++s) {
    manifest.speaker_labels.push_back("spk" + std::to_string(s));
  }
  for (const SyntheticRecording& r : recs) {
    const std::string ema_rel = "ema/" + r.utterance_id + ".ema";
    const std::string wav_rel = "wav/" + r.utterance_id + ".wav";
    WriteEma(dir / ema_rel, r.ema);
    WriteWav(dir / wav_rel, r.audio, WavFormat::kFloat32);
    manifest.entries.push_back({r.utterance_id, ema_rel, wav_rel,
                                manifest.speaker_labels[r.speaker_index]});
  }
  WriteManifest(dir / "manifest.json", manifest);
  out << "wrote " << recs.size() << " utterances from " << cfg.synth.n_speakers
      << " speakers to " << (dir / "manifest.json").string() << "\n";
  return kExitOk;
}

int CmdTrain(const CliConfig& cfg, const std::string& resume, std::ostream& out) {
  RequireExists(cfg.paths.manifest, "manifest");
  if (!resume.empty()) RequireExists(resume, "resume checkpoint");
  EchoConfig(cfg, out);
  const LoadedCorpus corpus = LoadCorpus(cfg.paths.manifest, cfg.model, true);
  if (corpus.samples.empty()) throw DataError(DataErrorCode::kInvalidData, "empty corpus");

  const fs::path workdir(cfg.paths.workdir);
  TrainLoopOptions options;
  options.checkpoint_dir = workdir / "checkpoints";
  options.resume_from = resume;
  const int64_t every = cfg.train.checkpoint_every;
  options.on_step = [&](const LossRecord& r) {
    if (r.step == 1 || r.step % every == 0 || r.step == cfg.train.max_steps) {
      out << "step " << r.step << " l_mel " << r.loss.l_mel << " l_pitch "
          << r.loss.l_pitch << " l_energy " << r.loss.l_energy << " l_total "
          << r.loss.l_total << "\n";
    }
  };
  const TrainResult result = TrainLoop(corpus.samples, InitParameters(cfg.model),
                                       cfg.model, cfg.train, options);
  WriteLossHistoryCsv(workdir / "loss_history.csv", result.history);
  out << "final checkpoint: " << result.final_checkpoint.string() << "\n";
  out << "loss history: " << (workdir / "loss_history.csv").string() << "\n";
  return kExitOk;
}

int ResolveSpeaker(const std::string& speaker, const CliConfig& cfg) {
  if (speaker.empty()) throw ConfigError("--speaker is required");
  char* end = nullptr;
  const long index = std::strtol(speaker.c_str(), &end, 10);
  if (end != speaker.c_str() && *end == '\0') return static_cast<int>(index);
  if (cfg.paths.manifest.empty() || !fs::exists(cfg.paths.manifest)) {
    throw ConfigError("speaker label '" + speaker +
                      "' needs a manifest to resolve; pass an index instead");
  }
  return LoadManifest(cfg.paths.manifest).SpeakerIndex(speaker);
}

int CmdSynthesize(CliConfig cfg, const std::string& ema_path,
                  const std::string& speaker, const std::string& out_wav,
                  int64_t frames, std::ostream& out, std::ostream& err) {
  RequireExists(cfg.paths.checkpoint, "checkpoint");
  if (out_wav.empty()) throw ConfigError("--out is required");
  const Checkpoint ckpt = LoadCheckpoint(cfg.paths.checkpoint);
  cfg.model = ckpt.model_config;
  const int speaker_index = ResolveSpeaker(speaker, cfg);
  if (speaker_index < 0 || speaker_index >= cfg.model.n_speakers) {
    throw ConfigError("speaker index " + std::to_string(speaker_index) +
                      " outside [0, " + std::to_string(cfg.model.n_speakers) + ")");
  }
  EchoConfig(cfg, out);

  const EmaRecording ema = ReadEma(ema_path);
  VocoderRequest request;
  request.mel = SynthesizeMel(ema, speaker_index, ckpt.params, cfg.model, frames);
  request.speaker_label = speaker;
  request.request_id = fs::path(out_wav).stem().string();

  VocoderResult result;
  if (cfg.endpoints.vocoder_url.empty()) {
    if (!cfg.fallback_vocoder) {
      throw ConfigError("no vocoder endpoint configured and fallback disabled");
    }
    GriffinLimOptions gl;
    gl.n_iters = cfg.griffin_lim_iters;
    result.audio = GriffinLim(request.mel, cfg.model, gl);
    result.used_fallback = true;
    result.warning = "no vocoder endpoint configured; rendered with Griffin-Lim";
  } else {
    VocoderOptions options;
    options.endpoint = {cfg.endpoints.vocoder_url, cfg.endpoints.timeout_s};
    options.fallback_to_griffin_lim = cfg.fallback_vocoder;
    options.griffin_lim_iters = cfg.griffin_lim_iters;
    result = Vocode(request, cfg.model, options);
  }
  if (!result.warning.empty()) err << "warning: " << result.warning << "\n";
  if (!result.wav_bytes.empty()) {
    WriteFileBytes(out_wav, result.wav_bytes);
  } else {
    WriteWav(out_wav, result.audio, WavFormat::kFloat32);
  }
  out << "wrote " << out_wav << " (" << request.mel.num_frames() << " frames, "
      << result.audio.samples.size() << " samples"
      << (result.used_fallback ? ", griffin-lim" : "") << ")\n";
  return kExitOk;
}

int CmdEvaluate(CliConfig cfg, const std::string& transcripts_path,
                std::ostream& out, std::ostream& err) {
  RequireExists(cfg.paths.checkpoint, "checkpoint");
  RequireExists(cfg.paths.manifest, "manifest");
  if (!transcripts_path.empty()) RequireExists(transcripts_path, "transcripts");
  const Checkpoint ckpt = LoadCheckpoint(cfg.paths.checkpoint);
  cfg.model = ckpt.model_config;
  EchoConfig(cfg, out);
  const LoadedCorpus corpus = LoadCorpus(cfg.paths.manifest, cfg.model, true);

  const fs::path workdir(cfg.paths.workdir);
  EvalOptions options;
  options.trajectory_dir = workdir / "trajectories";
  options.normalize_text = cfg.normalize_text;
  options.griffin_lim_iters = cfg.griffin_lim_iters;
  std::map<std::string, std::string> transcripts;
  std::unique_ptr<HttpAsrClient> asr;
  if (!cfg.endpoints.asr_url.empty() && !transcripts_path.empty()) {
    try {
      transcripts = json::parse(ReadFileBytes(transcripts_path))
                        .get<std::map<std::string, std::string>>();
    } catch (const json::exception& e) {
      throw ConfigError("transcripts " + transcripts_path + ": " + e.what());
    }
    asr = std::make_unique<HttpAsrClient>(
        HttpEndpoint{cfg.endpoints.asr_url, cfg.endpoints.timeout_s});
    options.asr = asr.get();
    options.transcript_for = [&](const std::string& id) -> std::optional<std::string> {
      const auto it = transcripts.find(id);
      if (it == transcripts.end()) return std::nullopt;
      return it->second;
    };
  }
  const EvalReport report = EvaluateCorpus(ckpt.params, corpus.samples, cfg.model, options);
  for (const std::string& w : report.warnings) err << "warning: " << w << "\n";
  WriteFileBytes(workdir / "eval_report.csv", report.ToCsv());
  out << report.ToCsv();
  out << "report: " << (workdir / "eval_report.csv").string() << "\n";
  return kExitOk;
}

}  // namespace

void CliConfig::Validate() const {
  model.Validate();
  train.Validate();
  if (synth.n_speakers < 1 || synth.n_utterances < 1) {
    throw ConfigError("invalid config: synth counts must be positive");
  }
  if (endpoints.timeout_s <= 0.0) {
    throw ConfigError("invalid config: endpoints.timeout_s must be positive");
  }
  if (griffin_lim_iters < 1) {
    throw ConfigError("invalid config: griffin_lim_iters must be positive");
  }
}

void to_json(json& j, const CliConfig& c) {
  j = json{{"model", c.model},
           {"train", c.train},
           {"paths",
            {{"manifest", c.paths.manifest},
             {"workdir", c.paths.workdir},
             {"checkpoint", c.paths.checkpoint}}},
           {"endpoints",
            {{"vocoder_url", c.endpoints.vocoder_url},
             {"asr_url", c.endpoints.asr_url},
             {"timeout_s", c.endpoints.timeout_s}}},
           {"synth",
            {{"n_speakers", c.synth.n_speakers},
             {"n_utterances", c.synth.n_utterances},
             {"seed", c.synth.seed}}},
           {"fallback_vocoder", c.fallback_vocoder},
           {"normalize_text", c.normalize_text},
           {"griffin_lim_iters", c.griffin_lim_iters}};
}

void from_json(const json& j, CliConfig& c) {
  ReadField(j, "model", c.model);
  ReadField(j, "train", c.train);
  if (j.contains("paths")) {
    const json& p = j.at("paths");
    ReadField(p, "manifest", c.paths.manifest);
    ReadField(p, "workdir", c.paths.workdir);
    ReadField(p, "checkpoint", c.paths.checkpoint);
  }
  if (j.contains("endpoints")) {
    const json& e = j.at("endpoints");
    ReadField(e, "vocoder_url", c.endpoints.vocoder_url);
    ReadField(e, "asr_url", c.endpoints.asr_url);
    ReadField(e, "timeout_s", c.endpoints.timeout_s);
  }
  if (j.contains("synth")) {
    const json& s = j.at("synth");
    ReadField(s, "n_speakers", c.synth.n_speakers);
    ReadField(s, "n_utterances", c.synth.n_utterances);
    ReadField(s, "seed", c.synth.seed);
  }
  ReadField(j, "fallback_vocoder", c.fallback_vocoder);
  ReadField(j, "normalize_text", c.normalize_text);
  ReadField(j, "griffin_lim_iters", c.griffin_lim_iters);
}

std::string SubstituteEnv(const std::string& text) {
  std::string out;
  size_t pos = 0;
  while (pos < text.size()) {
    const size_t start = text.find("${", pos);
    if (start == std::string::npos) {
      out += text.substr(pos);
      break;
    }
    const size_t end = text.find('}', start + 2);
    if (end == std::string::npos) {
      throw ConfigError("unterminated ${ in '" + text + "'");
    }
    const std::string name = text.substr(start + 2, end - start - 2);
    const char* value = std::getenv(name.c_str());
    if (value == nullptr) {
      throw ConfigError("environment variable " + name + " is not set");
    }
    out += text.substr(pos, start - pos);
    out += value;
    pos = end + 1;
  }
  return out;
}

void ApplyOverride(json& config, const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json* node = &config;
  std::stringstream parts(key);
  std::string part;
  std::vector<std::string> path;
  while (std::getline(parts, part, '.')) path.push_back(part);
  for (size_t i = 0; i < path.size(); ++i) {
    if (!node->is_object() || !node->contains(path[i])) {
      throw ConfigError("unknown config key '" + key + "'");
    }
    node = &(*node)[path[i]];
  }
  if (node->is_object()) {
    throw ConfigError("config key '" + key + "' is a section, not a value");
  }
  json value = json::parse(raw, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = raw;
  *node = std::move(value);
}

CliConfig ResolveConfig(const std::string& config_path,
                        const std::vector<std::string>& overrides,
                        std::optional<uint64_t> seed) {
  json merged = CliConfig{};
  if (!config_path.empty()) {
    if (!fs::exists(config_path)) throw ConfigError("config not found: " + config_path);
    json file;
    try {
      file = json::parse(ReadFileBytes(config_path));
    } catch (const json::exception& e) {
      throw ConfigError("config " + config_path + ": " + e.what());
    }
    if (!file.is_object()) throw ConfigError("config " + config_path + " is not an object");
    merged.merge_patch(file);
  }
  for (const std::string& o : overrides) ApplyOverride(merged, o);
  CliConfig cfg = merged.get<CliConfig>();
  if (seed) {
    cfg.model.seed = *seed;
    cfg.train.seed = *seed;
    cfg.synth.seed = *seed;
  }
  cfg.endpoints.vocoder_url = SubstituteEnv(cfg.endpoints.vocoder_url);
  cfg.endpoints.asr_url = SubstituteEnv(cfg.endpoints.asr_url);
  cfg.Validate();
  return cfg;
}

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Articulation-to-speech toolkit"};
  app.fallthrough();
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<uint64_t> seed;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--set", overrides, "Override config values, key=value ...")
      ->expected(1, CLI::detail::expected_max_vector_size);
  app.add_option("--seed", seed, "Seed for model, training and synthetic data");

  std::string out_dir, resume, ema_path, speaker, out_wav, transcripts;
  int64_t frames = 0;
  CLI::App* preprocess = app.add_subcommand("preprocess", "Cache aligned samples");
  preprocess->add_option("--out", out_dir, "Cache directory");
  CLI::App* synthdata = app.add_subcommand("synthdata", "Write a synthetic corpus");
  synthdata->add_option("--out", out_dir, "Output directory");
  CLI::App* train = app.add_subcommand("train", "Train the model");
  train->add_option("--resume", resume, "Checkpoint to continue from");
  CLI::App* synthesize = app.add_subcommand("synthesize", "EMA to waveform");
  synthesize->add_option("--ema", ema_path, "EMA file")->required();
  synthesize->add_option("--speaker", speaker, "Speaker index or label")->required();
  synthesize->add_option("--out", out_wav, "Output WAV")->required();
  synthesize->add_option("--frames", frames, "Mel frame count (default: from duration)");
  CLI::App* evaluate = app.add_subcommand("evaluate", "Objective metrics");
  evaluate->add_option("--transcripts", transcripts, "JSON map of reference texts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const CliConfig cfg = ResolveConfig(config_path, overrides, seed);
    if (preprocess->parsed()) return CmdPreprocess(cfg, out_dir, out, err);
    if (synthdata->parsed()) return CmdSynthdata(cfg, out_dir, out);
    if (train->parsed()) return CmdTrain(cfg, resume, out);
    if (synthesize->parsed()) {
      return CmdSynthesize(cfg, ema_path, speaker, out_wav, frames, out, err);
    }
    if (evaluate->parsed()) return CmdEvaluate(cfg, transcripts, out, err);
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const EndpointError& e) {
    err << "endpoint error: " << e.what() << "\n";
    return kExitEndpoint;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace ats
