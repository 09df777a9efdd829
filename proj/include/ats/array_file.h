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

// Binary container shared by checkpoints, preprocessing caches and the
// vocoder wire format.
//
// Layout:
//   bytes 0..7    magic "ATSARR01"
//   bytes 8..15   header length H, uint64 little-endian
//   next H bytes  JSON header: caller metadata plus
//                 "arrays": {name: {"offset": bytes, "shape": [..]}}
//   zero padding up to a multiple of 8 bytes
//   data block    little-endian float64 values, offsets relative to its start

#ifndef ATS_ARRAY_FILE_H_
#define ATS_ARRAY_FILE_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace ats {

struct NamedArray {
  std::string name;
  std::vector<int64_t> shape;
  std::vector<double> data;
};

struct ArrayBundle {
  nlohmann::json meta = nlohmann::json::object();
  std::vector<NamedArray> arrays;

  const NamedArray* Find(std::string_view name) const;
  // Throws DataError(kMalformedHeader) when absent.
  const NamedArray& Get(std::string_view name) const;
};

std::string EncodeBundle(const ArrayBundle& bundle);
// Throws DataError(kMalformedHeader) on any structural problem.
ArrayBundle DecodeBundle(std::string_view bytes);

void WriteBundleFile(const std::filesystem::path& path,
                     const ArrayBundle& bundle);
ArrayBundle ReadBundleFile(const std::filesystem::path& path);

// Whole-file helpers used by the on-disk formats.
std::string ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes);

// Little-endian scalar codecs.
void AppendLe64(std::string* out, uint64_t value);
uint64_t ReadLe64(const char* p);
void AppendF64(std::string* out, double value);
double ReadF64(const char* p);
void AppendF32(std::string* out, float value);
float ReadF32(const char* p);

}  // namespace ats

#endif  // ATS_ARRAY_FILE_H_
