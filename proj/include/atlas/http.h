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
#ifndef ATLAS_HTTP_H_
#define ATLAS_HTTP_H_

#include <chrono>
#include <memory>
#include <mutex>
#include <string>

namespace atlas {

struct HttpResponse {
  int status = 0;  // 0 means the connection itself failed
  std::string body;
};

// Minimal GET transport. Tests substitute counting or canned fakes.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse get(const std::string &url) = 0;
};

// cpp-httplib backed transport; handles http and https URLs.
class HttpTransport : public Transport {
 public:
  explicit HttpTransport(std::string user_agent = "atlas/1.0 (batch research pipeline)");
  HttpResponse get(const std::string &url) override;

 private:
  std::string user_agent_;
};

// Enforces a minimum spacing between successive calls across threads.
class RateLimiter {
 public:
  explicit RateLimiter(std::chrono::milliseconds delay) : delay_(delay) {}
  void wait();

 private:
  std::chrono::milliseconds delay_;
  std::mutex mu_;
  std::chrono::steady_clock::time_point next_{};
};

std::string url_encode(const std::string &s);

}  // namespace atlas

#endif  // ATLAS_HTTP_H_
