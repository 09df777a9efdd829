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

#include "ats/array_file.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "ats/errors.h"

namespace ats {

namespace {

constexpr std::string_view kMagic = "ATSARR01";

int64_t ElementCount(const std::vector<int64_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), int64_t{1},
                         std::multiplies<int64_t>());
}

[[noreturn]] void Malformed(const std::string& detail) {
  throw DataError(DataErrorCode::kMalformedHeader, detail);
}

}  // namespace

void AppendLe64(std::string* out, uint64_t value) {
  for (int i = 0; i < 8; ++i) {
    out->push_back(static_cast<char>((value >> (8 * i)) & 0xff));
  }
}

uint64_t ReadLe64(const char* p) {
  uint64_t value = 0;
  for (int i = 0; i < 8; ++i) {
    value |= static_cast<uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  }
  return value;
}

void AppendF64(std::string* out, double value) {
  AppendLe64(out, std::bit_cast<uint64_t>(value));
}

double ReadF64(const char* p) { return std::bit_cast<double>(ReadLe64(p)); }

void AppendF32(std::string* out, float value) {
  const auto bits = std::bit_cast<uint32_t>(value);
  for (int i = 0; i < 4; ++i) {
    out->push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  }
}

float ReadF32(const char* p) {
  uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) {
    bits |= static_cast<uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  }
  return std::bit_cast<float>(bits);
}

const NamedArray* ArrayBundle::Find(std::string_view name) const {
  for (const auto& a : arrays) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

const NamedArray& ArrayBundle::Get(std::string_view name) const {
  const NamedArray* a = Find(name);
  if (a == nullptr) Malformed("missing array '" + std::string(name) + "'");
  return *a;
}

std::string EncodeBundle(const ArrayBundle& bundle) {
  nlohmann::json header = bundle.meta.is_object() ? bundle.meta
                                                  : nlohmann::json::object();
  nlohmann::json index = nlohmann::json::object();
  uint64_t offset = 0;
  for (const auto& a : bundle.arrays) {
    if (ElementCount(a.shape) != static_cast<int64_t>(a.data.size())) {
      throw std::invalid_argument("array '" + a.name +
                                  "' shape does not match its data size");
    }
    if (index.contains(a.name)) {
      throw std::invalid_argument("duplicate array name '" + a.name + "'");
    }
    index[a.name] = {{"offset", offset}, {"shape", a.shape}};
    offset += 8 * a.data.size();
  }
  header["arrays"] = std::move(index);
  const std::string text = header.dump();

  std::string out;
  out.reserve(16 + text.size() + 8 + offset);
  out.append(kMagic);
  AppendLe64(&out, text.size());
  out.append(text);
  while (out.size() % 8 != 0) out.push_back('\0');
  for (const auto& a : bundle.arrays) {
    for (double v : a.data) AppendF64(&out, v);
  }
  return out;
}

ArrayBundle DecodeBundle(std::string_view bytes) {
  if (bytes.size() < 16 || bytes.substr(0, 8) != kMagic) {
    Malformed("bad magic");
  }
  const uint64_t header_len = ReadLe64(bytes.data() + 8);
  if (header_len > bytes.size() - 16) Malformed("truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(16, header_len));
  } catch (const nlohmann::json::exception& e) {
    Malformed(std::string("header is not JSON: ") + e.what());
  }
  if (!header.is_object() || !header.contains("arrays") ||
      !header["arrays"].is_object()) {
    Malformed("header lacks an 'arrays' index");
  }
  uint64_t data_start = 16 + header_len;
  data_start = (data_start + 7) / 8 * 8;
  if (data_start > bytes.size()) Malformed("truncated padding");
  const std::string_view data = bytes.substr(data_start);

  // Keep on-disk order: sort the index by offset.
  std::multimap<uint64_t, std::string> by_offset;
  for (const auto& [name, entry] : header["arrays"].items()) {
    if (!entry.contains("offset") || !entry.contains("shape")) {
      Malformed("array '" + name + "' lacks offset or shape");
    }
    by_offset.emplace(entry["offset"].get<uint64_t>(), name);
  }

  ArrayBundle bundle;
  for (const auto& [offset, name] : by_offset) {
    NamedArray a;
    a.name = name;
    a.shape = header["arrays"][name]["shape"].get<std::vector<int64_t>>();
    const int64_t count = ElementCount(a.shape);
    if (count < 0 || offset % 8 != 0 ||
        offset + 8 * static_cast<uint64_t>(count) > data.size()) {
      Malformed("array '" + name + "' exceeds the data block");
    }
    a.data.resize(count);
    for (int64_t i = 0; i < count; ++i) {
      a.data[i] = ReadF64(data.data() + offset + 8 * i);
    }
    bundle.arrays.push_back(std::move(a));
  }
  header.erase("arrays");
  bundle.meta = std::move(header);
  return bundle;
}

std::string ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError(DataErrorCode::kMissingFile, path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("short write to " + path.string());
}

void WriteBundleFile(const std::filesystem::path& path,
                     const ArrayBundle& bundle) {
  WriteFileBytes(path, EncodeBundle(bundle));
}

ArrayBundle ReadBundleFile(const std::filesystem::path& path) {
  return DecodeBundle(ReadFileBytes(path));
}

}  // namespace ats
