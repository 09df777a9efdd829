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

// On-disk formats for recordings, manifests and preprocessed samples.
//
// EMA: "<name>.ema" holds little-endian float32 values in row-major
// [T_ema x C_ema] order; "<name>.ema.json" holds
//   {"sample_rate_hz": 100, "channel_names": [...], "num_frames": T_ema}.
//
// Manifest (JSON):
//   {"speaker_labels": ["spk0", ...],
//    "entries": [{"utterance_id": "...", "ema_path": "...",
//                 "audio_path": "...", "speaker_label": "..."}]}
// Relative paths are resolved against the manifest's directory. The order of
// speaker_labels defines the speaker index.

#ifndef ATS_DATASET_IO_H_
#define ATS_DATASET_IO_H_

#include <filesystem>
#include <string>
#include <vector>

#include "ats/array_file.h"
#include "ats/data_pipeline.h"

namespace ats {

struct ManifestEntry {
  std::string utterance_id;
  std::string ema_path;
  std::string audio_path;
  std::string speaker_label;
};

struct DatasetManifest {
  std::vector<std::string> speaker_labels;
  std::vector<ManifestEntry> entries;
  // Directory that relative entry paths refer to.
  std::filesystem::path base_dir;

  int num_speakers() const { return static_cast<int>(speaker_labels.size()); }
  // Throws DataError(kMalformedHeader) for an unknown label.
  int SpeakerIndex(const std::string& label) const;
  std::filesystem::path Resolve(const std::string& path) const;
  // Distinct labels, known entry labels, unique ids; throws
  // DataError(kMalformedHeader).
  void Validate() const;
};

DatasetManifest LoadManifest(const std::filesystem::path& path);
void WriteManifest(const std::filesystem::path& path,
                   const DatasetManifest& manifest);

// Throws DataError: kMissingFile for an absent data or sidecar file,
// kMalformedHeader for an unreadable sidecar, kChannelCountMismatch when the
// data size disagrees with the declared channels.
EmaRecording ReadEma(const std::filesystem::path& path);
void WriteEma(const std::filesystem::path& path, const EmaRecording& ema);

AlignedPair ReadUtterance(const DatasetManifest& manifest,
                          const ManifestEntry& entry);

// Preprocessed sample cache in the array-bundle container.
ArrayBundle SampleToBundle(const UtteranceSample& sample);
UtteranceSample SampleFromBundle(const ArrayBundle& bundle);
void WriteSampleCache(const std::filesystem::path& path,
                      const UtteranceSample& sample);
UtteranceSample ReadSampleCache(const std::filesystem::path& path);

}  // namespace ats

#endif  // ATS_DATASET_IO_H_
