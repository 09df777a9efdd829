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

#include "ats/errors.h"

namespace ats {

const char* ToString(DataErrorCode code) {
  switch (code) {
    case DataErrorCode::kMissingFile:
      return "missing file";
    case DataErrorCode::kMalformedHeader:
      return "malformed header";
    case DataErrorCode::kChannelCountMismatch:
      return "channel-count mismatch";
    case DataErrorCode::kAllSilent:
      return "all-silent utterance";
    case DataErrorCode::kUnalignedPair:
      return "unaligned pair";
    case DataErrorCode::kAudioTooShort:
      return "audio too short";
    case DataErrorCode::kInvalidData:
      return "invalid data";
  }
  return "data error";
}

const char* ToString(EndpointErrorCode code) {
  switch (code) {
    case EndpointErrorCode::kTransport:
      return "transport error";
    case EndpointErrorCode::kTimeout:
      return "timeout";
    case EndpointErrorCode::kStatus:
      return "non-success status";
    case EndpointErrorCode::kMalformedResponse:
      return "malformed response";
  }
  return "endpoint error";
}

}  // namespace ats
