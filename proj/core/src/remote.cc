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

#include "dpdecode/remote.h"

#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <unordered_map>

#include "json.hpp"

#include "dpdecode/errors.h"

namespace dpdecode {

using nlohmann::json;

// Owns the file descriptors (and the child process in stdio mode) and frames
// the byte stream into lines with a poll-based timeout.
class RemoteClient::Transport {
 public:
  static std::unique_ptr<Transport> ConnectTcp(const std::string& host,
                                               const std::string& port,
                                               int timeout_ms);
  static std::unique_ptr<Transport> SpawnChild(const std::string& command,
                                               int timeout_ms);

  ~Transport() {
    if (write_fd_ >= 0) ::close(write_fd_);
    if (read_fd_ >= 0 && read_fd_ != write_fd_) ::close(read_fd_);
    if (child_pid_ > 0) {
      int status = 0;
      if (::waitpid(child_pid_, &status, WNOHANG) == 0) {
        ::kill(child_pid_, SIGTERM);
        ::waitpid(child_pid_, &status, 0);
      }
    }
  }

  void WriteAll(const std::string& data) {
    size_t sent = 0;
    while (sent < data.size()) {
      const ssize_t n =
          ::write(write_fd_, data.data() + sent, data.size() - sent);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw TransportError(std::string("write failed: ") +
                             std::strerror(errno));
      }
      sent += static_cast<size_t>(n);
    }
  }

  // Next newline-terminated line (newline stripped). Throws TransportError
  // on timeout or peer hangup.
  std::string ReadLine() {
    while (true) {
      const size_t pos = buffer_.find('\n');
      if (pos != std::string::npos) {
        std::string line = buffer_.substr(0, pos);
        buffer_.erase(0, pos + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      struct pollfd pfd = {read_fd_, POLLIN, 0};
      const int ready = ::poll(&pfd, 1, timeout_ms_);
      if (ready < 0) {
        if (errno == EINTR) continue;
        throw TransportError(std::string("poll failed: ") +
                             std::strerror(errno));
      }
      if (ready == 0) {
        throw TransportError("timed out waiting for server response");
      }
      char chunk[4096];
      const ssize_t n = ::read(read_fd_, chunk, sizeof(chunk));
      if (n < 0) {
        if (errno == EINTR) continue;
        throw TransportError(std::string("read failed: ") +
                             std::strerror(errno));
      }
      if (n == 0) {
        throw TransportError("server closed the connection mid-stream");
      }
      buffer_.append(chunk, static_cast<size_t>(n));
    }
  }

 private:
  Transport(int read_fd, int write_fd, pid_t child_pid, int timeout_ms)
      : read_fd_(read_fd),
        write_fd_(write_fd),
        child_pid_(child_pid),
        timeout_ms_(timeout_ms) {}

  int read_fd_ = -1;
  int write_fd_ = -1;
  pid_t child_pid_ = -1;
  int timeout_ms_;
  std::string buffer_;
};

std::unique_ptr<RemoteClient::Transport> RemoteClient::Transport::ConnectTcp(
    const std::string& host, const std::string& port, int timeout_ms) {
  struct addrinfo hints = {};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  struct addrinfo* result = nullptr;
  const int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &result);
  if (rc != 0) {
    throw TransportError("cannot resolve " + host + ":" + port + ": " +
                         gai_strerror(rc));
  }
  int fd = -1;
  for (struct addrinfo* ai = result; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(result);
  if (fd < 0) {
    throw TransportError("cannot connect to " + host + ":" + port);
  }
  return std::unique_ptr<Transport>(new Transport(fd, fd, -1, timeout_ms));
}

std::unique_ptr<RemoteClient::Transport> RemoteClient::Transport::SpawnChild(
    const std::string& command, int timeout_ms) {
  int to_child[2];   // parent writes requests
  int from_child[2]; // parent reads responses
  if (::pipe(to_child) != 0 || ::pipe(from_child) != 0) {
    throw TransportError(std::string("pipe failed: ") + std::strerror(errno));
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    throw TransportError(std::string("fork failed: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), nullptr);
    _exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  return std::unique_ptr<Transport>(
      new Transport(from_child[0], to_child[1], pid, timeout_ms));
}

namespace {

Vocabulary ParseHandshake(const std::string& line) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::parse_error&) {
    throw ProtocolError("handshake line is not valid JSON", line);
  }
  if (!doc.is_object() || !doc.contains("hello") ||
      !doc["hello"].is_object()) {
    throw ProtocolError("expected a hello handshake", line);
  }
  const json& hello = doc["hello"];
  if (!hello.contains("vocab_size") || !hello.contains("eos_id") ||
      !hello["vocab_size"].is_number_integer() ||
      !hello["eos_id"].is_number_integer()) {
    throw ProtocolError("handshake missing vocab_size/eos_id", line);
  }
  const long long v = hello["vocab_size"].get<long long>();
  const long long eos = hello["eos_id"].get<long long>();
  if (v < 2 || eos < 0 || eos >= v) {
    throw ContractViolationError("handshake advertised an invalid vocabulary");
  }
  // The protocol carries no token strings, so synthesize stable names; text
  // rendering for remote runs joins these ids.
  std::vector<std::string> tokens;
  tokens.reserve(static_cast<size_t>(v));
  for (long long i = 0; i < v; ++i) tokens.push_back(std::to_string(i));
  return Vocabulary(std::move(tokens), static_cast<TokenId>(eos));
}

}  // namespace

std::unique_ptr<RemoteClient> RemoteClient::Connect(
    const RemoteBackendConfig& config) {
  if (config.timeout_ms <= 0) {
    throw InvalidParameterError("timeout must be positive");
  }
  if (config.max_batch < 1) {
    throw InvalidParameterError("max_batch must be >= 1");
  }
  std::unique_ptr<Transport> transport;
  if (config.endpoint.rfind("stdio:", 0) == 0) {
    transport = Transport::SpawnChild(config.endpoint.substr(6),
                                      config.timeout_ms);
  } else {
    std::string address = config.endpoint;
    if (address.rfind("tcp:", 0) == 0) address = address.substr(4);
    const size_t colon = address.rfind(':');
    if (colon == std::string::npos) {
      throw InvalidParameterError("endpoint must look like host:port");
    }
    transport = Transport::ConnectTcp(address.substr(0, colon),
                                      address.substr(colon + 1),
                                      config.timeout_ms);
  }
  Vocabulary vocabulary = ParseHandshake(transport->ReadLine());
  return std::unique_ptr<RemoteClient>(new RemoteClient(
      std::move(transport), std::move(vocabulary), config.max_batch));
}

RemoteClient::RemoteClient(std::unique_ptr<Transport> transport,
                           Vocabulary vocabulary, int max_batch)
    : transport_(std::move(transport)),
      vocabulary_(std::move(vocabulary)),
      max_batch_(max_batch) {}

RemoteClient::~RemoteClient() = default;

const Vocabulary& RemoteClient::vocabulary() const { return vocabulary_; }

LogitVector RemoteClient::Logits(const TokenSequence& context) {
  return ExchangeChunk({context})[0];
}

std::vector<LogitVector> RemoteClient::LogitsMany(
    const std::vector<TokenSequence>& contexts) {
  std::vector<LogitVector> out;
  out.reserve(contexts.size());
  for (size_t start = 0; start < contexts.size();
       start += static_cast<size_t>(max_batch_)) {
    const size_t stop =
        std::min(contexts.size(), start + static_cast<size_t>(max_batch_));
    std::vector<TokenSequence> chunk(contexts.begin() + start,
                                     contexts.begin() + stop);
    std::vector<LogitVector> part = ExchangeChunk(chunk);
    for (LogitVector& z : part) out.push_back(std::move(z));
  }
  return out;
}

std::vector<LogitVector> RemoteClient::ExchangeChunk(
    const std::vector<TokenSequence>& contexts) {
  if (contexts.empty()) return {};

  // One request line per context; ids map responses back to slots.
  std::unordered_map<std::uint64_t, size_t> slot_of;
  std::string outgoing;
  for (size_t i = 0; i < contexts.size(); ++i) {
    const std::uint64_t id = next_request_id_++;
    slot_of.emplace(id, i);
    json request;
    request["id"] = id;
    request["context"] = contexts[i];
    outgoing += request.dump();
    outgoing += '\n';
  }
  transport_->WriteAll(outgoing);

  std::vector<LogitVector> results(contexts.size());
  std::vector<bool> filled(contexts.size(), false);
  size_t remaining = contexts.size();
  while (remaining > 0) {
    const std::string line = transport_->ReadLine();
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error&) {
      throw ProtocolError("response line is not valid JSON", line);
    }
    if (!doc.is_object() || !doc.contains("id") ||
        !doc["id"].is_number_integer() || !doc.contains("logits") ||
        !doc["logits"].is_array()) {
      throw ProtocolError("response missing id or logits", line);
    }
    const std::uint64_t id = doc["id"].get<std::uint64_t>();
    const auto it = slot_of.find(id);
    if (it == slot_of.end()) {
      throw ProtocolError("response id matches no outstanding request", line);
    }
    if (filled[it->second]) {
      throw ProtocolError("duplicate response id", line);
    }
    LogitVector z;
    z.values.reserve(doc["logits"].size());
    for (const json& value : doc["logits"]) {
      if (!value.is_number()) {
        throw ProtocolError("non-numeric logit entry", line);
      }
      z.values.push_back(value.get<double>());
    }
    if (z.size() != vocabulary_.size()) {
      throw ContractViolationError(
          "logits length " + std::to_string(z.size()) +
          " does not match vocabulary size " +
          std::to_string(vocabulary_.size()));
    }
    results[it->second] = std::move(z);
    filled[it->second] = true;
    --remaining;
  }
  return results;
}

}  // namespace dpdecode
