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

#include "ats/dataset_io.h"

#include <set>

#include "ats/errors.h"

namespace ats {

namespace {

using nlohmann::json;

std::filesystem::path SidecarPath(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".json");
}

json ParseJson(const std::filesystem::path& path) {
  const std::string text = ReadFileBytes(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(DataErrorCode::kMalformedHeader,
                    path.string() + ": " + e.what());
  }
}

std::vector<double> MatrixData(const Eigen::MatrixXd& m) {
  std::vector<double> out(m.size());
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      out.data(), m.rows(), m.cols()) = m;
  return out;
}

Eigen::MatrixXd ToMatrix(const NamedArray& a, Eigen::Index rows, Eigen::Index cols) {
  if (static_cast<Eigen::Index>(a.data.size()) != rows * cols) {
    throw DataError(DataErrorCode::kMalformedHeader, "array '" + a.name + "' size");
  }
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                        Eigen::RowMajor>>(a.data.data(), rows, cols);
}

}  // namespace

int DatasetManifest::SpeakerIndex(const std::string& label) const {
  for (size_t i = 0; i < speaker_labels.size(); ++i) {
    if (speaker_labels[i] == label) return static_cast<int>(i);
  }
  throw DataError(DataErrorCode::kMalformedHeader, "unknown speaker '" + label + "'");
}

std::filesystem::path DatasetManifest::Resolve(const std::string& path) const {
  const std::filesystem::path p(path);
  return p.is_absolute() ? p : base_dir / p;
}

void DatasetManifest::Validate() const {
  const std::set<std::string> labels(speaker_labels.begin(), speaker_labels.end());
  if (labels.size() != speaker_labels.size()) {
    throw DataError(DataErrorCode::kMalformedHeader, "duplicate speaker label");
  }
  std::set<std::string> ids;
  for (const ManifestEntry& e : entries) {
    if (!labels.count(e.speaker_label)) {
      throw DataError(DataErrorCode::kMalformedHeader,
                      "entry '" + e.utterance_id + "' has unknown speaker '" +
                          e.speaker_label + "'");
    }
    if (!ids.insert(e.utterance_id).second) {
      throw DataError(DataErrorCode::kMalformedHeader,
                      "duplicate utterance id '" + e.utterance_id + "'");
    }
  }
}

DatasetManifest LoadManifest(const std::filesystem::path& path) {
  const json j = ParseJson(path);
  DatasetManifest m;
  m.base_dir = path.parent_path();
  try {
    m.speaker_labels = j.at("speaker_labels").get<std::vector<std::string>>();
    for (const json& e : j.at("entries")) {
      m.entries.push_back({e.at("utterance_id").get<std::string>(),
                           e.at("ema_path").get<std::string>(),
                           e.at("audio_path").get<std::string>(),
                           e.at("speaker_label").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw DataError(DataErrorCode::kMalformedHeader,
                    path.string() + ": " + e.what());
  }
  m.Validate();
  return m;
}

void WriteManifest(const std::filesystem::path& path,
                   const DatasetManifest& manifest) {
  manifest.Validate();
  json j;
  j["speaker_labels"] = manifest.speaker_labels;
  j["entries"] = json::array();
  for (const ManifestEntry& e : manifest.entries) {
    j["entries"].push_back({{"utterance_id", e.utterance_id},
                            {"ema_path", e.ema_path},
                            {"audio_path", e.audio_path},
                            {"speaker_label", e.speaker_label}});
  }
  WriteFileBytes(path, j.dump(2) + "\n");
}

EmaRecording ReadEma(const std::filesystem::path& path) {
  const std::filesystem::path sidecar = SidecarPath(path);
  if (!std::filesystem::exists(path)) {
    throw DataError(DataErrorCode::kMissingFile, path.string());
  }
  if (!std::filesystem::exists(sidecar)) {
    throw DataError(DataErrorCode::kMissingFile, sidecar.string());
  }
  const json header = ParseJson(sidecar);
  EmaRecording ema;
  int64_t declared_frames = -1;
  try {
    ema.sample_rate_hz = header.at("sample_rate_hz").get<double>();
    ema.channel_names = header.at("channel_names").get<std::vector<std::string>>();
    if (header.contains("num_frames")) {
      declared_frames = header.at("num_frames").get<int64_t>();
    }
  } catch (const json::exception& e) {
    throw DataError(DataErrorCode::kMalformedHeader,
                    sidecar.string() + ": " + e.what());
  }
  const auto channels = static_cast<int64_t>(ema.channel_names.size());
  if (channels < 1) {
    throw DataError(DataErrorCode::kMalformedHeader,
                    sidecar.string() + ": no channel names");
  }
  const std::string bytes = ReadFileBytes(path);
  const auto values = static_cast<int64_t>(bytes.size() / 4);
  const bool whole = bytes.size() % 4 == 0;
  const bool fits = declared_frames >= 0 ? values == declared_frames * channels
                                         : values % channels == 0;
  if (!whole || !fits) {
    throw DataError(DataErrorCode::kChannelCountMismatch,
                    path.string() + ": " + std::to_string(bytes.size()) +
                        " bytes do not hold " + std::to_string(channels) +
                        "-channel float32 rows" +
                        (declared_frames >= 0
                             ? " x " + std::to_string(declared_frames) + " frames"
                             : std::string()));
  }
  const int64_t frames = values / channels;
  ema.samples.resize(frames, channels);
  for (int64_t r = 0; r < frames; ++r) {
    for (int64_t c = 0; c < channels; ++c) {
      ema.samples(r, c) = ReadF32(bytes.data() + 4 * (r * channels + c));
    }
  }
  ema.Validate();
  return ema;
}

void WriteEma(const std::filesystem::path& path, const EmaRecording& ema) {
  ema.Validate();
  std::string bytes;
  bytes.reserve(ema.samples.size() * 4);
  for (Eigen::Index r = 0; r < ema.samples.rows(); ++r) {
    for (Eigen::Index c = 0; c < ema.samples.cols(); ++c) {
      AppendF32(&bytes, static_cast<float>(ema.samples(r, c)));
    }
  }
  WriteFileBytes(path, bytes);
  json header;
  header["sample_rate_hz"] = ema.sample_rate_hz;
  header["channel_names"] = ema.channel_names;
  header["num_frames"] = ema.samples.rows();
  WriteFileBytes(SidecarPath(path), header.dump(2) + "\n");
}

AlignedPair ReadUtterance(const DatasetManifest& manifest,
                          const ManifestEntry& entry) {
  AlignedPair pair;
  pair.ema = ReadEma(manifest.Resolve(entry.ema_path));
  pair.audio = ReadWav(manifest.Resolve(entry.audio_path));
  pair.audio.Validate();
  return pair;
}

ArrayBundle SampleToBundle(const UtteranceSample& sample) {
  ArrayBundle b;
  b.meta["utterance_id"] = sample.utterance_id;
  b.meta["speaker_index"] = sample.speaker_index;
  b.meta["hop_samples"] = sample.mel.hop_samples;
  b.meta["win_samples"] = sample.mel.win_samples;
  b.meta["audio_rate_hz"] = sample.mel.audio_rate_hz;
  const int64_t t = sample.num_frames();
  b.arrays.push_back({"ema", {t, sample.ema.cols()}, MatrixData(sample.ema)});
  b.arrays.push_back(
      {"mel", {t, sample.mel.frames.cols()}, MatrixData(sample.mel.frames)});
  b.arrays.push_back({"pitch_db", {t}, sample.prosody.pitch_db});
  b.arrays.push_back({"energy_db", {t}, sample.prosody.energy_db});
  std::vector<double> voiced(sample.prosody.voiced.begin(),
                             sample.prosody.voiced.end());
  b.arrays.push_back({"voiced", {t}, std::move(voiced)});
  return b;
}

UtteranceSample SampleFromBundle(const ArrayBundle& bundle) {
  UtteranceSample s;
  try {
    s.utterance_id = bundle.meta.at("utterance_id").get<std::string>();
    s.speaker_index = bundle.meta.at("speaker_index").get<int>();
    s.mel.hop_samples = bundle.meta.at("hop_samples").get<int>();
    s.mel.win_samples = bundle.meta.at("win_samples").get<int>();
    s.mel.audio_rate_hz = bundle.meta.at("audio_rate_hz").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(DataErrorCode::kMalformedHeader, e.what());
  }
  const NamedArray& ema = bundle.Get("ema");
  const NamedArray& mel = bundle.Get("mel");
  if (ema.shape.size() != 2 || mel.shape.size() != 2) {
    throw DataError(DataErrorCode::kMalformedHeader, "cache array rank");
  }
  s.ema = ToMatrix(ema, ema.shape[0], ema.shape[1]);
  s.mel.frames = ToMatrix(mel, mel.shape[0], mel.shape[1]);
  s.prosody.pitch_db = bundle.Get("pitch_db").data;
  s.prosody.energy_db = bundle.Get("energy_db").data;
  for (double v : bundle.Get("voiced").data) s.prosody.voiced.push_back(v != 0.0);
  s.Validate();
  return s;
}

void WriteSampleCache(const std::filesystem::path& path,
                      const UtteranceSample& sample) {
  WriteBundleFile(path, SampleToBundle(sample));
}

UtteranceSample ReadSampleCache(const std::filesystem::path& path) {
  return SampleFromBundle(ReadBundleFile(path));
}

}  // namespace ats
