// Copyright 2026 The lmpoll Authors.
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

#pragma once

#include <chrono>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "lmpoll/error.hpp"
#include "lmpoll/lm/backend.hpp"

namespace lmpoll {

/// Splits "http://host:port/base" into the scheme-host-port part accepted by
/// httplib::Client and a path prefix without trailing slash.
struct Endpoint {
  std::string origin;
  std::string base_path;

  static Endpoint parse(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos || url.substr(0, scheme_end) != "http")
      throw ArgumentError("endpoint must be an http:// URL: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    Endpoint e;
    e.origin = url.substr(0, path_start);
    if (e.origin.size() <= scheme_end + 3)
      throw ArgumentError("endpoint has no host: " + url);
    if (path_start != std::string::npos) {
      e.base_path = url.substr(path_start);
      while (!e.base_path.empty() && e.base_path.back() == '/')
        e.base_path.pop_back();
    }
    return e;
  }
};

/// Client for a remote generation service.
///
///   POST /generate {"prompt","n","max_tokens","temperature","seed"}
///        -> 200 {"model": string, "texts": [string, ...]}
///   GET  /health   -> 200 {"status": "ok", "model": string}
///
/// Transport failures and 5xx responses are retried; the request is
/// idempotent because all randomness comes from its seed.
class RemoteBackend final : public GenerationBackend {
 public:
  struct Options {
    int retries = 3;
    std::chrono::milliseconds retry_delay{100};
    std::chrono::seconds timeout{600};
    CompletionMode mode = CompletionMode::kContinuation;
  };

  explicit RemoteBackend(std::string url) : RemoteBackend(std::move(url), Options{}) {}
  RemoteBackend(std::string url, Options opts)
      : url_(std::move(url)), endpoint_(Endpoint::parse(url_)), opts_(opts) {}

  std::vector<std::string> generate(
      const GenerationRequest& request) const override {
    validate(request);
    nlohmann::ordered_json body;
    body["prompt"] = request.prompt;
    body["n"] = request.n;
    body["max_tokens"] = request.max_tokens;
    body["temperature"] = request.temperature;
    body["seed"] = request.seed;
    auto res = call("POST", "/generate",
                    body.dump(-1, ' ', false,
                              nlohmann::json::error_handler_t::replace));
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(res);
    } catch (const nlohmann::json::exception&) {
      throw ProtocolError("generate: response is not JSON");
    }
    if (!j.is_object() || !j.contains("texts") || !j["texts"].is_array())
      throw ProtocolError("generate: response lacks a texts array");
    if (j.contains("model") && !j["model"].is_string())
      throw ProtocolError("generate: model must be a string");
    std::vector<std::string> texts;
    for (const auto& t : j["texts"]) {
      if (!t.is_string()) throw ProtocolError("generate: texts must be strings");
      texts.push_back(t.get<std::string>());
    }
    if (texts.size() != request.n)
      throw ProtocolError("generate: expected " + std::to_string(request.n) +
                          " texts, got " + std::to_string(texts.size()));
    return texts;
  }

  /// Model name reported by GET /health.
  std::string health() const {
    auto res = call("GET", "/health", {});
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(res);
    } catch (const nlohmann::json::exception&) {
      throw ProtocolError("health: response is not JSON");
    }
    if (!j.is_object() || j.value("status", "") != "ok" ||
        !j.contains("model") || !j["model"].is_string())
      throw ProtocolError("health: unexpected body " + res);
    return j["model"].get<std::string>();
  }

  std::string name() const override { return "remote(" + url_ + ")"; }
  CompletionMode mode() const override { return opts_.mode; }

 private:
  std::string call(const std::string& method, const std::string& path,
                   const std::string& body) const {
    httplib::Client client(endpoint_.origin);
    client.set_connection_timeout(opts_.timeout);
    client.set_read_timeout(opts_.timeout);
    client.set_write_timeout(opts_.timeout);
    const std::string full = endpoint_.base_path + path;
    int last_status = 0;
    std::string last_body;
    std::string last_transport;
    for (int attempt = 0; attempt <= opts_.retries; ++attempt) {
      if (attempt > 0) std::this_thread::sleep_for(opts_.retry_delay * attempt);
      auto res = method == "POST"
                     ? client.Post(full, body, "application/json")
                     : client.Get(full);
      if (!res) {
        last_transport = httplib::to_string(res.error());
        last_status = 0;
        continue;
      }
      if (res->status >= 200 && res->status < 300) return res->body;
      if (res->status >= 500) {
        last_status = res->status;
        last_body = res->body;
        continue;
      }
      throw HttpStatusError(res->status, res->body);
    }
    if (last_status == 0) throw BackendUnavailable(last_transport);
    if (last_status == 503) throw BackendUnavailable(last_status, last_body);
    throw HttpStatusError(last_status, last_body);
  }

  std::string url_;
  Endpoint endpoint_;
  Options opts_;
};

}  // namespace lmpoll
