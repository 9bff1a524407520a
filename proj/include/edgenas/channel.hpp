/* Copyright 2026 The edgenas Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <chrono>
#include <set>
#include <string>
#include <sys/types.h>

#include <json.hpp>

namespace edgenas {

// Bidirectional newline-delimited text stream.
class MessageChannel {
 public:
  virtual ~MessageChannel() = default;
  virtual void send_line(const std::string& line) = 0;
  // Throws TimeoutError when no complete line arrives in time and
  // ChannelError when the peer has gone away.
  virtual std::string receive_line(std::chrono::milliseconds timeout) = 0;
};

// Runs `/bin/sh -c command_line` with its stdin/stdout bound to one end of a
// socket pair. The child's stderr is inherited.
class ProcessChannel final : public MessageChannel {
 public:
  explicit ProcessChannel(const std::string& command_line);
  ~ProcessChannel() override;
  ProcessChannel(const ProcessChannel&) = delete;
  ProcessChannel& operator=(const ProcessChannel&) = delete;

  void send_line(const std::string& line) override;
  std::string receive_line(std::chrono::milliseconds timeout) override;

 private:
  int fd_ = -1;
  pid_t pid_ = -1;
  std::string buffer_;
};

// One in-flight request at a time over a channel. Assigns increasing ids,
// checks that each reply carries the matching id, and turns {"error":...}
// replies into EvaluationError. Replies to requests that previously timed
// out are discarded.
class RpcClient {
 public:
  RpcClient(MessageChannel& channel, std::chrono::milliseconds timeout)
      : channel_(channel), timeout_(timeout) {}

  nlohmann::json call(nlohmann::json request);

  std::chrono::milliseconds timeout() const { return timeout_; }

 private:
  MessageChannel& channel_;
  std::chrono::milliseconds timeout_;
  long long next_id_ = 1;
  std::set<long long> abandoned_;
};

}  // namespace edgenas
