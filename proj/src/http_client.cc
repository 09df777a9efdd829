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

#include "ats/http_client.h"

#include <chrono>
#include <cmath>

#include "httplib.h"
#include "ats/errors.h"

namespace ats {

std::pair<std::string, std::string> SplitUrl(const std::string& url) {
  const size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos || scheme_end + 3 >= url.size()) {
    throw EndpointError(EndpointErrorCode::kTransport, "invalid URL '" + url + "'");
  }
  const size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string HttpPost(const HttpEndpoint& endpoint, std::string_view body,
                     const std::string& content_type) {
  const auto [origin, path] = SplitUrl(endpoint.url);
  httplib::Client client(origin);
  if (!client.is_valid()) {
    throw EndpointError(EndpointErrorCode::kTransport,
                        "unsupported URL '" + endpoint.url + "'");
  }
  const auto seconds = static_cast<time_t>(std::floor(endpoint.timeout_s));
  const auto micros = static_cast<time_t>((endpoint.timeout_s - seconds) * 1e6);
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);

  const auto start = std::chrono::steady_clock::now();
  httplib::Result res =
      client.Post(path, body.data(), body.size(), content_type);
  if (!res) {
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const httplib::Error err = res.error();
    const std::string what = endpoint.url + ": " + httplib::to_string(err);
    if (err == httplib::Error::ConnectionTimeout ||
        (err == httplib::Error::Read && elapsed >= 0.9 * endpoint.timeout_s)) {
      throw EndpointError(EndpointErrorCode::kTimeout, what);
    }
    throw EndpointError(EndpointErrorCode::kTransport, what);
  }
  if (res->status < 200 || res->status >= 300) {
    throw EndpointError(EndpointErrorCode::kStatus,
                        endpoint.url + ": HTTP " + std::to_string(res->status));
  }
  return res->body;
}

}  // namespace ats
