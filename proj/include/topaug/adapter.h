// Copyright 2026 The topaug Authors.
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

// Line-delimited JSON protocol spoken with external generator and parser
// processes.
//
// The child is started through /bin/sh -c and receives one JSON request per
// line on stdin; every request carries an integer "id". For each request the
// child writes a fixed number of JSON response lines carrying the same id.
// Responses for one id may arrive in any order. The client closes stdin
// after the last request and expects the child to exit with status 0.

#ifndef TOPAUG_ADAPTER_H_
#define TOPAUG_ADAPTER_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace topaug {

enum class AdapterErrorKind {
  kSpawnFailed,
  kAdapterCrashed,
  kProtocolViolation,
  kTimeout,
};

const char *AdapterErrorKindName(AdapterErrorKind kind);

struct AdapterError {
  AdapterErrorKind kind = AdapterErrorKind::kProtocolViolation;
  std::optional<int64_t> request_id;
  std::string message;

  std::string ToString() const;
};

struct AdapterOptions {
  std::string command;
  // Maximum silence while responses are still outstanding.
  std::chrono::milliseconds timeout{30000};
};

// Returns an error message for a bad response object, or "" if it is fine.
// The id has already been checked.
using ResponseValidator = std::function<std::string(const nlohmann::json &)>;

struct AdapterRun {
  // Responses of every request that received exactly the expected number.
  std::map<int64_t, std::vector<nlohmann::json>> complete;
  std::optional<AdapterError> error;
  size_t lines_read = 0;

  bool ok() const { return !error.has_value(); }
};

// Runs one adapter session. Every request must hold a distinct integer "id".
// Never throws on adapter misbehavior; failures land in AdapterRun::error
// with whatever completed before them.
AdapterRun RunLineProtocol(const AdapterOptions &options,
                           const std::vector<nlohmann::json> &requests,
                           size_t responses_per_request,
                           const ResponseValidator &validate);

}  // namespace topaug

#endif  // TOPAUG_ADAPTER_H_
