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

#include "ats/array_file.h"
#include "ats/errors.h"
#include "json.hpp"
#include "test_util.h"

namespace ats {
namespace {

using nlohmann::json;
using testing::RandomEma;
using testing::Sine;
using testing::TempDir;

TEST(ManifestTest, EightLabelsMapToIndicesInOrder) {
  TempDir dir("manifest");
  json j;
  j["speaker_labels"] = json::array();
  j["entries"] = json::array();
  for (int i = 0; i < 8; ++i) j["speaker_labels"].push_back("S" + std::to_string(7 - i));
  j["entries"].push_back({{"utterance_id", "a"},
                          {"ema_path", "a.ema"},
                          {"audio_path", "a.wav"},
                          {"speaker_label", "S3"}});
  WriteFileBytes(dir.path() / "m.json", j.dump());
  const DatasetManifest m = LoadManifest(dir.path() / "m.json");
  EXPECT_EQ(m.num_speakers(), 8);
  for (int i = 0; i < 8; ++i) EXPECT_EQ(m.SpeakerIndex("S" + std::to_string(7 - i)), i);
  EXPECT_EQ(m.Resolve("a.ema"), dir.path() / "a.ema");
  EXPECT_THROW(m.SpeakerIndex("nobody"), DataError);
}

TEST(ManifestTest, RoundTrip) {
  TempDir dir("manifest_rt");
  DatasetManifest m;
  m.speaker_labels = {"x", "y"};
  m.entries = {{"u1", "e/u1.ema", "w/u1.wav", "y"}, {"u2", "e/u2.ema", "w/u2.wav", "x"}};
  WriteManifest(dir.path() / "m.json", m);
  const DatasetManifest back = LoadManifest(dir.path() / "m.json");
  EXPECT_EQ(back.speaker_labels, m.speaker_labels);
  ASSERT_EQ(back.entries.size(), 2u);
  EXPECT_EQ(back.entries[1].utterance_id, "u2");
  EXPECT_EQ(back.entries[1].speaker_label, "x");
}

TEST(ManifestTest, UnknownEntryLabelIsMalformed) {
  DatasetManifest m;
  m.speaker_labels = {"x"};
  m.entries = {{"u1", "a", "b", "z"}};
  EXPECT_THROW(m.Validate(), DataError);
}

TEST(EmaFileTest, MissingFileNamesPath) {
  TempDir dir("ema_missing");
  DatasetManifest m;
  m.base_dir = dir.path();
  m.speaker_labels = {"s"};
  m.entries = {{"u", "nothere.ema", "nothere.wav", "s"}};
  try {
    ReadUtterance(m, m.entries[0]);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_EQ(e.code(), DataErrorCode::kMissingFile);
    const std::string what = e.what();
    EXPECT_NE(what.find("missing file"), std::string::npos);
    EXPECT_NE(what.find((dir.path() / "nothere.ema").string()), std::string::npos);
  }
}

TEST(EmaFileTest, SeventeenColumnsDeclaredAsEighteen) {
  TempDir dir("ema_mismatch");
  WriteEma(dir.path() / "u.ema", RandomEma(10, 17, 3));
  json sidecar = json::parse(ReadFileBytes(dir.path() / "u.ema.json"));
  sidecar["channel_names"] = HaskinsChannelNames();
  WriteFileBytes(dir.path() / "u.ema.json", sidecar.dump());
  try {
    ReadEma(dir.path() / "u.ema");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_EQ(e.code(), DataErrorCode::kChannelCountMismatch);
    EXPECT_NE(std::string(e.what()).find("channel-count mismatch"), std::string::npos);
  }
  sidecar.erase("num_frames");
  WriteFileBytes(dir.path() / "u.ema.json", sidecar.dump());
  EXPECT_THROW(ReadEma(dir.path() / "u.ema"), DataError);
}

TEST(EmaFileTest, RoundTripWithinFloat32) {
  TempDir dir("ema_rt");
  const EmaRecording ema = RandomEma(57, 18, 4);
  WriteEma(dir.path() / "u.ema", ema);
  const EmaRecording back = ReadEma(dir.path() / "u.ema");
  EXPECT_EQ(back.channel_names, ema.channel_names);
  EXPECT_EQ(back.sample_rate_hz, ema.sample_rate_hz);
  ASSERT_EQ(back.samples.rows(), 57);
  EXPECT_LE((back.samples - ema.samples).cwiseAbs().maxCoeff(), 1e-6 * 5.0);
}

TEST(EmaFileTest, MalformedSidecar) {
  TempDir dir("ema_bad");
  WriteEma(dir.path() / "u.ema", RandomEma(5, 18, 3));
  WriteFileBytes(dir.path() / "u.ema.json", "{not json");
  try {
    ReadEma(dir.path() / "u.ema");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_EQ(e.code(), DataErrorCode::kMalformedHeader);
  }
}

TEST(SampleCacheTest, RoundTripIsExact) {
  TempDir dir("cache");
  const ModelConfig cfg;
  const UtteranceSample s =
      BuildSample(RandomEma(100, 18, 6), Sine(180, 0.4, 44100), 1, cfg, "utt9");
  WriteSampleCache(dir.path() / "utt9.cache", s);
  const UtteranceSample back = ReadSampleCache(dir.path() / "utt9.cache");
  EXPECT_EQ(back.utterance_id, "utt9");
  EXPECT_EQ(back.speaker_index, 1);
  EXPECT_EQ(back.ema, s.ema);
  EXPECT_EQ(back.mel.frames, s.mel.frames);
  EXPECT_EQ(back.mel.hop_samples, 768);
  EXPECT_EQ(back.prosody.pitch_db, s.prosody.pitch_db);
  EXPECT_EQ(back.prosody.energy_db, s.prosody.energy_db);
  EXPECT_EQ(back.prosody.voiced, s.prosody.voiced);
}

TEST(ArrayBundleTest, RejectsTruncatedBytes) {
  ArrayBundle b;
  b.meta["k"] = 1;
  b.arrays.push_back({"a", {2, 2}, {1, 2, 3, 4}});
  const std::string bytes = EncodeBundle(b);
  const ArrayBundle back = DecodeBundle(bytes);
  EXPECT_EQ(back.Get("a").data, b.arrays[0].data);
  EXPECT_THROW(DecodeBundle(bytes.substr(0, bytes.size() - 8)), DataError);
  EXPECT_THROW(DecodeBundle("garbage"), DataError);
}

}  // namespace
}  // namespace ats
