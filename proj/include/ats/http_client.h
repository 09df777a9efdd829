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

// Minimal blocking HTTP POST used by the vocoder and ASR clients.

#ifndef ATS_HTTP_CLIENT_H_
#define ATS_HTTP_CLIENT_H_

#include <string>
#include <string_view>
#include <utility>

namespace ats {

struct HttpEndpoint {
  std::string url;  // "http://host[:port][/path]"
  double timeout_s = 30.0;
};

// Splits a URL into "scheme://host[:port]" and "/path". Throws
// EndpointError(kTransport) when the URL has no scheme or host.
std::pair<std::string, std::string> SplitUrl(const std::string& url);

// Returns the body of a 2xx response. Throws EndpointError: kTimeout when
// the connection or read timed out, kTransport for other connection
// failures, kStatus for a non-2xx status.
std::string HttpPost(const HttpEndpoint& endpoint, std::string_view body,
                     const std::string& content_type);

}  // namespace ats

#endif  // ATS_HTTP_CLIENT_H_
