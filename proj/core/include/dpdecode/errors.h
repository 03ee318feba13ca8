// Copyright 2026 The dp-decode Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPDECODE_ERRORS_H_
#define DPDECODE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace dpdecode {

// A caller-supplied argument or configuration value is out of range.
class InvalidParameterError : public std::invalid_argument {
 public:
  explicit InvalidParameterError(const std::string& message)
      : std::invalid_argument(message) {}
};

// A numeric routine failed to converge or left its supported domain.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& message)
      : std::runtime_error(message) {}
};

// I/O failure while talking to a remote logits server (connect, timeout,
// peer hangup). Retryable: the request can be re-issued on a new connection.
class TransportError : public std::runtime_error {
 public:
  explicit TransportError(const std::string& message)
      : std::runtime_error(message) {}
};

// The remote peer sent a frame that does not parse or does not belong to any
// outstanding request. Carries the offending line verbatim.
class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(const std::string& message, std::string offending_line)
      : std::runtime_error(message + ": " + offending_line),
        offending_line_(std::move(offending_line)) {}

  const std::string& offending_line() const { return offending_line_; }

 private:
  std::string offending_line_;
};

// The remote peer answered with data that violates its advertised contract,
// e.g. a logits vector whose length differs from the handshake vocabulary.
class ContractViolationError : public std::runtime_error {
 public:
  explicit ContractViolationError(const std::string& message)
      : std::runtime_error(message) {}
};

// Failure while reading or parsing an input file; carries the 1-based line.
class DataFormatError : public std::runtime_error {
 public:
  DataFormatError(const std::string& message, int line)
      : std::runtime_error(message + " (line " + std::to_string(line) + ")"),
        line_(line) {}
  explicit DataFormatError(const std::string& message)
      : std::runtime_error(message), line_(0) {}

  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace dpdecode

#endif  // DPDECODE_ERRORS_H_
