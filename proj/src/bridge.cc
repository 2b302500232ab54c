/*
 * Copyright 2026 The freqcause Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "freqcause/bridge.h"

#include <fcntl.h>
#include <netdb.h>
#include <openssl/evp.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <sstream>

#include "json.hpp"

extern char** environ;

namespace freqcause {

namespace {

using nlohmann::json;

std::string Errno(const std::string& what) {
  return what + ": " + std::strerror(errno);
}

// Buffered line reader/writer over a pair of file descriptors.
class FdChannel : public LineChannel {
 public:
  FdChannel(int read_fd, int write_fd) : read_fd_(read_fd), write_fd_(write_fd) {}

  void WriteLine(const std::string& line) override {
    std::string data = line;
    data.push_back('\n');
    size_t written = 0;
    while (written < data.size()) {
      const ssize_t n = Send(data.data() + written, data.size() - written);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw BridgeError(Errno("bridge write failed"));
      }
      written += static_cast<size_t>(n);
    }
  }

  std::string ReadLine(std::chrono::milliseconds timeout) override {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (true) {
      if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return line;
      }
      const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (remaining.count() <= 0) throw BridgeError("bridge response timed out");
      pollfd pfd{read_fd_, POLLIN, 0};
      const int ready = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
      if (ready < 0) {
        if (errno == EINTR) continue;
        throw BridgeError(Errno("poll failed"));
      }
      if (ready == 0) throw BridgeError("bridge response timed out");
      char chunk[65536];
      const ssize_t n = ::read(read_fd_, chunk, sizeof(chunk));
      if (n < 0) {
        if (errno == EINTR) continue;
        throw BridgeError(Errno("bridge read failed"));
      }
      if (n == 0) throw BridgeError("bridge closed the connection");
      buffer_.append(chunk, static_cast<size_t>(n));
    }
  }

 protected:
  virtual ssize_t Send(const char* data, size_t size) {
    return ::write(write_fd_, data, size);
  }

  int read_fd_;
  int write_fd_;
  std::string buffer_;
};

class SubprocessChannel : public FdChannel {
 public:
  SubprocessChannel(pid_t pid, int read_fd, int write_fd)
      : FdChannel(read_fd, write_fd), pid_(pid) {}

  ~SubprocessChannel() override {
    ::close(write_fd_);
    ::close(read_fd_);
    int status = 0;
    // Closing stdin asks a well-behaved bridge to exit; give it a moment.
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(pid_, &status, WNOHANG) != 0) return;
      ::usleep(10000);
    }
    ::kill(pid_, SIGTERM);
    ::waitpid(pid_, &status, 0);
  }

 private:
  pid_t pid_;
};

class SocketChannel : public FdChannel {
 public:
  explicit SocketChannel(int fd) : FdChannel(fd, fd) {}
  ~SocketChannel() override { ::close(read_fd_); }

 protected:
  ssize_t Send(const char* data, size_t size) override {
    return ::send(write_fd_, data, size, MSG_NOSIGNAL);
  }
};

std::unique_ptr<LineChannel> Spawn(const std::vector<std::string>& argv) {
  if (argv.empty()) throw InvalidArgument("empty bridge command line");
  // A bridge that dies mid-write must surface as an error, not kill us.
  ::signal(SIGPIPE, SIG_IGN);
  int to_child[2];
  int from_child[2];
  if (::pipe2(to_child, O_CLOEXEC) != 0) throw BridgeError(Errno("pipe"));
  if (::pipe2(from_child, O_CLOEXEC) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw BridgeError(Errno("pipe"));
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, to_child[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, from_child[1], STDOUT_FILENO);

  std::vector<char*> args;
  for (const std::string& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);
  pid_t pid = 0;
  const int rc = ::posix_spawnp(&pid, args[0], &actions, nullptr, args.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(to_child[0]);
  ::close(from_child[1]);
  if (rc != 0) {
    ::close(to_child[1]);
    ::close(from_child[0]);
    throw BridgeError("cannot spawn '" + argv[0] + "': " + std::strerror(rc));
  }
  return std::make_unique<SubprocessChannel>(pid, from_child[0], to_child[1]);
}

std::unique_ptr<LineChannel> ConnectTcp(const std::string& host, uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* result = nullptr;
  const std::string service = std::to_string(port);
  if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &result); rc != 0) {
    throw BridgeError("cannot resolve " + host + ": " + ::gai_strerror(rc));
  }
  int fd = -1;
  for (addrinfo* ai = result; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(result);
  if (fd < 0) throw BridgeError("cannot connect to " + host + ":" + service);
  return std::make_unique<SocketChannel>(fd);
}

const json& Require(const json& object, const char* key) {
  auto it = object.find(key);
  if (it == object.end()) {
    throw ProtocolError(std::string("bridge response missing '") + key + "'");
  }
  return *it;
}

double RequireScore(const json& value, const std::string& what) {
  if (!value.is_number()) throw ProtocolError(what + " is not a number");
  const double score = value.get<double>();
  if (!std::isfinite(score) || score < 0.0 || score > 1.0) {
    throw ProtocolError(what + " out of [0, 1]: " + value.dump());
  }
  return score;
}

}  // namespace

BridgeEndpoint ParseEndpoint(std::string_view spec) {
  BridgeEndpoint endpoint;
  if (spec.starts_with("cmd:")) {
    endpoint.transport = BridgeEndpoint::Transport::kSubprocess;
    std::istringstream words{std::string(spec.substr(4))};
    for (std::string word; words >> word;) endpoint.argv.push_back(word);
    if (endpoint.argv.empty()) throw InvalidArgument("empty bridge command");
    return endpoint;
  }
  if (spec.starts_with("tcp:")) {
    endpoint.transport = BridgeEndpoint::Transport::kTcp;
    const std::string_view address = spec.substr(4);
    const size_t colon = address.rfind(':');
    if (colon == std::string_view::npos || colon == 0) {
      throw InvalidArgument("tcp endpoint must be tcp:<host>:<port>");
    }
    endpoint.host = std::string(address.substr(0, colon));
    const std::string port(address.substr(colon + 1));
    try {
      const int value = std::stoi(port);
      if (value <= 0 || value > 65535) throw std::out_of_range("port");
      endpoint.port = static_cast<uint16_t>(value);
    } catch (const std::exception&) {
      throw InvalidArgument("invalid tcp port '" + port + "'");
    }
    return endpoint;
  }
  throw InvalidArgument("bridge endpoint must start with cmd: or tcp:");
}

std::string Base64Encode(std::span<const uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                bytes.data(), static_cast<int>(bytes.size()));
  out.resize(static_cast<size_t>(n));
  return out;
}

std::vector<uint8_t> Base64Decode(std::string_view text) {
  if (text.size() % 4 != 0) throw ProtocolError("base64 length not a multiple of 4");
  std::vector<uint8_t> out(3 * (text.size() / 4));
  if (text.empty()) return out;
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw ProtocolError("malformed base64");
  size_t padding = 0;
  if (text.back() == '=') ++padding;
  if (text.size() >= 2 && text[text.size() - 2] == '=') ++padding;
  out.resize(static_cast<size_t>(n) - padding);
  return out;
}

std::string EncodeSamples(std::span<const float> samples) {
  static_assert(sizeof(float) == 4);
  return Base64Encode(std::span<const uint8_t>(
      reinterpret_cast<const uint8_t*>(samples.data()), samples.size() * 4));
}

std::vector<float> DecodeSamples(std::string_view b64) {
  const std::vector<uint8_t> bytes = Base64Decode(b64);
  if (bytes.size() % 4 != 0) throw ProtocolError("sample payload not a multiple of 4 bytes");
  std::vector<float> samples(bytes.size() / 4);
  std::memcpy(samples.data(), bytes.data(), bytes.size());
  return samples;
}

std::unique_ptr<LineChannel> Connect(const BridgeEndpoint& endpoint) {
  if (endpoint.transport == BridgeEndpoint::Transport::kSubprocess) {
    return Spawn(endpoint.argv);
  }
  return ConnectTcp(endpoint.host, endpoint.port);
}

Classification ParseClassifyResponse(const std::string& line, uint64_t expected_id,
                                     const std::vector<std::string>& labels) {
  json response;
  try {
    response = json::parse(line);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed bridge response: ") + e.what());
  }
  if (!response.is_object()) throw ProtocolError("bridge response is not an object");
  const json& id = Require(response, "id");
  if (!id.is_number_unsigned() || id.get<uint64_t>() != expected_id) {
    throw ProtocolError("bridge response id " + id.dump() + " does not match request " +
                        std::to_string(expected_id));
  }
  if (auto err = response.find("error"); err != response.end()) {
    throw BridgeError("bridge reported error: " + err->dump());
  }
  const json& label = Require(response, "label");
  if (!label.is_string()) throw ProtocolError("label is not a string");

  Classification out;
  out.label = label.get<std::string>();
  out.score = RequireScore(Require(response, "score"), "score");
  if (auto scores = response.find("scores"); scores != response.end() && !scores->is_null()) {
    if (!scores->is_object()) throw ProtocolError("scores is not an object");
    std::map<std::string, double> full;
    for (const auto& [name, value] : scores->items()) {
      full[name] = RequireScore(value, "score for '" + name + "'");
    }
    if (full.empty()) throw ProtocolError("empty scores map");
    const Classification top = FromScores(full);
    if (top.label != out.label) {
      throw ProtocolError("label '" + out.label + "' is not the argmax of scores ('" +
                          top.label + "')");
    }
    out.full_scores = std::move(full);
  }
  if (!labels.empty() && std::find(labels.begin(), labels.end(), out.label) == labels.end()) {
    throw ProtocolError("label '" + out.label + "' not advertised in handshake");
  }
  return out;
}

BridgeModel::BridgeModel(BridgeEndpoint endpoint)
    : endpoint_(std::move(endpoint)), channel_(Connect(endpoint_)) {
  channel_->WriteLine(json{{"op", "hello"}, {"version", kBridgeProtocolVersion}}.dump());
  json hello;
  try {
    hello = json::parse(channel_->ReadLine(endpoint_.timeout));
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed handshake: ") + e.what());
  }
  if (!hello.is_object()) throw ProtocolError("handshake is not an object");
  const json& version = Require(hello, "version");
  if (!version.is_number_integer() || version.get<int>() != kBridgeProtocolVersion) {
    throw ProtocolError("bridge protocol version mismatch: got " + version.dump() +
                        ", expected " + std::to_string(kBridgeProtocolVersion));
  }
  const json& labels = Require(hello, "labels");
  if (!labels.is_array()) throw ProtocolError("handshake labels is not an array");
  for (const json& l : labels) {
    if (!l.is_string()) throw ProtocolError("handshake label is not a string");
    labels_.push_back(l.get<std::string>());
  }
}

Classification BridgeModel::Predict(const TimeSignal& signal) {
  const uint64_t id = next_id_++;
  json request = {{"id", id},
                  {"op", "classify"},
                  {"sample_rate", signal.sample_rate},
                  {"samples_b64", EncodeSamples(signal.samples)}};
  channel_->WriteLine(request.dump());
  return ParseClassifyResponse(channel_->ReadLine(endpoint_.timeout), id, labels_);
}

std::unique_ptr<Model> BridgeModel::Clone() const {
  return std::make_unique<BridgeModel>(endpoint_);
}

ClassifierHandle BridgeClassifier(const BridgeEndpoint& endpoint) {
  return ClassifierHandle(std::make_unique<BridgeModel>(endpoint));
}

}  // namespace freqcause
