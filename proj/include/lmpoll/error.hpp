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

#include <stdexcept>
#include <string>

namespace lmpoll {

// Base of every error raised by the library. The CLI maps the subclasses
// onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller supplied an invalid argument or violated a precondition.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Input data failed validation, or a file could not be read or written.
class DataError : public Error {
 public:
  using Error::Error;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

// The experiment store is held by another writer.
class BusyError : public DataError {
 public:
  using DataError::DataError;
};

// A generation backend failed.
class BackendError : public Error {
 public:
  using Error::Error;
};

class BackendUnavailable : public BackendError {
 public:
  BackendUnavailable(int status, std::string body)
      : BackendError("backend unavailable: HTTP " + std::to_string(status) +
                     (body.empty() ? "" : ": " + body)),
        status_(status),
        body_(std::move(body)) {}
  explicit BackendUnavailable(const std::string& what)
      : BackendError("backend unavailable: " + what) {}

  int status() const { return status_; }
  const std::string& body() const { return body_; }

 private:
  int status_ = 0;
  std::string body_;
};

// Non-2xx response, with its status and body.
class HttpStatusError : public BackendError {
 public:
  HttpStatusError(int status, std::string body)
      : BackendError("backend returned HTTP " + std::to_string(status) + ": " +
                     body),
        status_(status),
        body_(std::move(body)) {}

  int status() const { return status_; }
  const std::string& body() const { return body_; }

 private:
  int status_;
  std::string body_;
};

// The backend answered 2xx with a body that does not follow the wire protocol.
class ProtocolError : public BackendError {
 public:
  using BackendError::BackendError;
};

}  // namespace lmpoll
