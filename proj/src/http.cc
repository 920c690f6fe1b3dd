// Copyright 2026 The Atlas Authors.
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
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "atlas/http.h"

#include <cctype>
#include <thread>

namespace atlas {

HttpTransport::HttpTransport(std::string user_agent) : user_agent_(std::move(user_agent)) {}

HttpResponse HttpTransport::get(const std::string &url) {
  // Split "scheme://host[:port]" from the path and query.
  auto scheme_end = url.find("://");
  auto path_start = scheme_end == std::string::npos ? std::string::npos
                                                     : url.find('/', scheme_end + 3);
  std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(origin);
  client.set_follow_location(true);
  client.set_connection_timeout(10, 0);
  client.set_read_timeout(60, 0);
  httplib::Headers headers = {{"User-Agent", user_agent_},
                              {"Accept", "application/sparql-results+json, application/json, text/html"}};
  auto res = client.Get(path, headers);
  if (!res) return {0, ""};
  return {res->status, res->body};
}

void RateLimiter::wait() {
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto now = std::chrono::steady_clock::now();
    slot = std::max(now, next_);
    next_ = slot + delay_;
  }
  std::this_thread::sleep_until(slot);
}

std::string url_encode(const std::string &s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
    }
  }
  return out;
}

}  // namespace atlas
