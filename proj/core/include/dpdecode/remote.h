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

#ifndef DPDECODE_REMOTE_H_
#define DPDECODE_REMOTE_H_

#include <memory>
#include <string>
#include <vector>

#include "dpdecode/core.h"

namespace dpdecode {

// Connection settings for an external inference server speaking the
// newline-delimited JSON protocol:
//
//   server -> client   {"hello": {"vocab_size": <v>, "eos_id": <e>}}
//   client -> server   {"context": [<token ids>], "id": <uint64>}
//   server -> client   {"id": <uint64>, "logits": [<v doubles>]}
//
// One handshake line precedes all traffic. Responses may arrive in any
// order; they are matched to requests by id.
struct RemoteBackendConfig {
  // "host:port" or "tcp:host:port" for TCP; "stdio:<command>" runs the
  // command as a child process and speaks the protocol over its stdin/stdout.
  std::string endpoint;
  int timeout_ms = 10000;
  int max_batch = 64;
};

// Client side of the protocol. One connection serves one decoding worker;
// workers needing parallelism open independent connections.
class RemoteClient : public LogitsProvider {
 public:
  // Connects (or spawns) and consumes the handshake. Throws TransportError
  // on connection failure and ProtocolError on a bad handshake.
  static std::unique_ptr<RemoteClient> Connect(
      const RemoteBackendConfig& config);

  ~RemoteClient() override;

  const Vocabulary& vocabulary() const override;
  LogitVector Logits(const TokenSequence& context) override;

  // Pipelines up to max_batch requests at a time; output order matches input
  // order regardless of the order responses arrive in. Any transport or
  // protocol failure throws and surfaces no partial results.
  std::vector<LogitVector> LogitsMany(
      const std::vector<TokenSequence>& contexts) override;

 private:
  class Transport;

  RemoteClient(std::unique_ptr<Transport> transport, Vocabulary vocabulary,
               int max_batch);

  std::vector<LogitVector> ExchangeChunk(
      const std::vector<TokenSequence>& contexts);

  std::unique_ptr<Transport> transport_;
  Vocabulary vocabulary_;
  int max_batch_;
  std::uint64_t next_request_id_ = 0;
};

}  // namespace dpdecode

#endif  // DPDECODE_REMOTE_H_
