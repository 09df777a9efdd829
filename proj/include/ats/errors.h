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

#ifndef ATS_ERRORS_H_
#define ATS_ERRORS_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ats {

// Invalid configuration values or unresolvable paths named by a config.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class DataErrorCode {
  kMissingFile,
  kMalformedHeader,
  kChannelCountMismatch,
  kAllSilent,
  kUnalignedPair,
  kAudioTooShort,
  kInvalidData,
};

const char* ToString(DataErrorCode code);

// Errors raised while reading or transforming recordings. The message always
// starts with the short code phrase (e.g. "missing file: /a/b.ema").
class DataError : public std::runtime_error {
 public:
  DataError(DataErrorCode code, const std::string& detail)
      : std::runtime_error(detail.empty()
                               ? std::string(ToString(code))
                               : std::string(ToString(code)) + ": " + detail),
        code_(code) {}

  DataErrorCode code() const { return code_; }

 private:
  DataErrorCode code_;
};

// Non-finite training loss.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(int64_t step)
      : std::runtime_error("divergence: non-finite loss at step " +
                           std::to_string(step)),
        step_(step) {}

  int64_t step() const { return step_; }

 private:
  int64_t step_;
};

enum class EndpointErrorCode { kTransport, kTimeout, kStatus, kMalformedResponse };

const char* ToString(EndpointErrorCode code);

class EndpointError : public std::runtime_error {
 public:
  EndpointError(EndpointErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(ToString(code)) + ": " + detail),
        code_(code) {}

  EndpointErrorCode code() const { return code_; }

 private:
  EndpointErrorCode code_;
};

}  // namespace ats

#endif  // ATS_ERRORS_H_
