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

// Test double for a model bridge. Speaks the line protocol over stdio, or
// over TCP with --tcp (the bound port is written to --port-file).
//
//   --mode energy     "loud" if the RMS exceeds 0.1, else "quiet" (default)
//   --mode fixed      always --label with --score
//   --mode softmax    labels a and b with scores 0.6 and 0.4
//   --mode bad-score  score 1.5
//   --mode wrong-id   echoes id + 1
//   --mode error      {"id":..,"error":"..."}
//   --mode garbage    a line that is not JSON
//   --version N       version advertised in the handshake
//   --exit-after K    exit after answering K classify requests
//   --sleep-ms N      delay before every classify response

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "freqcause/bridge.h"

namespace {

using nlohmann::json;

struct Options {
  std::string mode = "energy";
  std::string label = "loud";
  double score = 0.9;
  int version = 1;
  long exit_after = -1;
  int sleep_ms = 0;
  bool tcp = false;
  std::string port_file;
};

std::string Respond(const Options& o, const json& request, long& answered) {
  const json id = request.value("id", json(nullptr));
  if (request.value("op", "") == "hello") {
    json labels = {"loud", "quiet"};
    if (o.mode == "fixed") labels = {o.label};
    if (o.mode == "softmax") labels = {"a", "b"};
    return json{{"version", o.version}, {"labels", labels}}.dump();
  }
  if (o.sleep_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(o.sleep_ms));
  ++answered;
  if (o.mode == "garbage") return "this is not json";
  if (o.mode == "error") return json{{"id", id}, {"error", "model failure"}}.dump();
  if (o.mode == "wrong-id") return json{{"id", id.get<uint64_t>() + 1}, {"label", "loud"}, {"score", 0.9}}.dump();
  if (o.mode == "bad-score") return json{{"id", id}, {"label", "loud"}, {"score", 1.5}}.dump();
  if (o.mode == "fixed") return json{{"id", id}, {"label", o.label}, {"score", o.score}}.dump();
  if (o.mode == "softmax") {
    return json{{"id", id}, {"label", "a"}, {"score", 0.6}, {"scores", {{"a", 0.6}, {"b", 0.4}}}}
        .dump();
  }

  std::vector<float> samples;
  try {
    samples = freqcause::DecodeSamples(request.at("samples_b64").get<std::string>());
  } catch (const std::exception& e) {
    return json{{"id", id}, {"error", e.what()}}.dump();
  }
  double energy = 0.0;
  for (float s : samples) energy += static_cast<double>(s) * s;
  const double rms = samples.empty() ? 0.0 : std::sqrt(energy / samples.size());
  const bool loud = rms > 0.1;
  return json{{"id", id},
              {"label", loud ? "loud" : "quiet"},
              {"score", 0.75},
              {"scores", {{"loud", loud ? 0.75 : 0.25}, {"quiet", loud ? 0.25 : 0.75}}}}
      .dump();
}

void Serve(const Options& o, FILE* in, FILE* out) {
  long answered = 0;
  char* line = nullptr;
  size_t capacity = 0;
  while (getline(&line, &capacity, in) > 0) {
    std::string response;
    try {
      response = Respond(o, json::parse(line), answered);
    } catch (const std::exception& e) {
      response = json{{"id", nullptr}, {"error", e.what()}}.dump();
    }
    std::fputs((response + "\n").c_str(), out);
    std::fflush(out);
    if (o.exit_after >= 0 && answered >= o.exit_after) std::exit(0);
  }
  std::free(line);
}

int ServeTcp(const Options& o) {
  const int listener = socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in address{};
  address.sin_family = AF_INET;
  address.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  address.sin_port = 0;
  if (bind(listener, reinterpret_cast<sockaddr*>(&address), sizeof(address)) != 0 ||
      listen(listener, 8) != 0) {
    std::perror("stub_bridge");
    return 1;
  }
  socklen_t length = sizeof(address);
  getsockname(listener, reinterpret_cast<sockaddr*>(&address), &length);
  {
    const std::string temporary = o.port_file + ".tmp";
    std::ofstream(temporary) << ntohs(address.sin_port) << "\n";
    std::rename(temporary.c_str(), o.port_file.c_str());
  }
  for (;;) {
    const int client = accept(listener, nullptr, nullptr);
    if (client < 0) continue;
    std::thread([o, client] {
      FILE* in = fdopen(client, "r");
      FILE* out = fdopen(dup(client), "w");
      Serve(o, in, out);
      std::fclose(in);
      std::fclose(out);
    }).detach();
  }
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    auto next = [&]() -> std::string {
      if (i + 1 >= argc) {
        std::cerr << "missing value for " << arg << "\n";
        std::exit(2);
      }
      return argv[++i];
    };
    if (arg == "--mode") {
      o.mode = next();
    } else if (arg == "--label") {
      o.label = next();
    } else if (arg == "--score") {
      o.score = std::stod(next());
    } else if (arg == "--version") {
      o.version = std::stoi(next());
    } else if (arg == "--exit-after") {
      o.exit_after = std::stol(next());
    } else if (arg == "--sleep-ms") {
      o.sleep_ms = std::stoi(next());
    } else if (arg == "--tcp") {
      o.tcp = true;
    } else if (arg == "--port-file") {
      o.port_file = next();
    } else {
      std::cerr << "unknown argument " << arg << "\n";
      return 2;
    }
  }
  if (o.tcp) return ServeTcp(o);
  Serve(o, stdin, stdout);
  return 0;
}
