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

#include "edgenas/channel.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <poll.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>

#include "edgenas/errors.hpp"

namespace edgenas {

ProcessChannel::ProcessChannel(const std::string& command_line) {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) {
    throw ChannelError(std::string("socketpair failed: ") + std::strerror(errno));
  }
  pid_ = ::fork();
  if (pid_ < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    throw ChannelError(std::string("fork failed: ") + std::strerror(errno));
  }
  if (pid_ == 0) {
    // dup2 clears FD_CLOEXEC on the duplicates.
    ::dup2(fds[1], STDIN_FILENO);
    ::dup2(fds[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command_line.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(fds[1]);
  fd_ = fds[0];
}

ProcessChannel::~ProcessChannel() {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_WR);
    ::close(fd_);
  }
  if (pid_ > 0) {
    for (int i = 0; i < 100; ++i) {
      if (::waitpid(pid_, nullptr, WNOHANG) != 0) return;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
  }
}

void ProcessChannel::send_line(const std::string& line) {
  std::string data = line + "\n";
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ChannelError(std::string("write to peer process failed: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }
}

std::string ProcessChannel::receive_line(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    if (auto pos = buffer_.find('\n'); pos != std::string::npos) {
      std::string line = buffer_.substr(0, pos);
      buffer_.erase(0, pos + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw TimeoutError("timed out waiting for peer response");
    pollfd p{fd_, POLLIN, 0};
    const int ready = ::poll(&p, 1, static_cast<int>(left.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw ChannelError(std::string("poll failed: ") + std::strerror(errno));
    }
    if (ready == 0) continue;
    char chunk[4096];
    const ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ChannelError(std::string("read from peer process failed: ") + std::strerror(errno));
    }
    if (n == 0) throw ChannelError("peer process closed the channel");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

nlohmann::json RpcClient::call(nlohmann::json request) {
  const long long id = next_id_++;
  request["id"] = id;
  channel_.send_line(request.dump());
  for (;;) {
    std::string line;
    try {
      line = channel_.receive_line(timeout_);
    } catch (const TimeoutError&) {
      abandoned_.insert(id);
      throw;
    }
    nlohmann::json reply;
    try {
      reply = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ProtocolError(std::string("malformed response: ") + e.what(), line);
    }
    if (!reply.is_object() || !reply.contains("id") || !reply["id"].is_number_integer()) {
      throw ProtocolError("response without integer id", line);
    }
    const long long got = reply["id"].get<long long>();
    if (got != id) {
      if (abandoned_.erase(got) != 0) continue;
      throw ProtocolError("response id " + std::to_string(got) + " does not match request id " +
                              std::to_string(id),
                          line);
    }
    if (reply.contains("error")) {
      const auto& err = reply["error"];
      throw EvaluationError("peer reported error: " + (err.is_string() ? err.get<std::string>()
                                                                      : err.dump()));
    }
    return reply;
  }
}

}  // namespace edgenas
