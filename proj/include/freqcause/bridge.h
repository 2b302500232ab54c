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

// Client for external model processes speaking newline-delimited JSON, over
// the stdio of a spawned subprocess or a TCP connection.
//
//   -> {"op":"hello","version":1}
//   <- {"version":1,"labels":[...]}
//   -> {"id":7,"op":"classify","sample_rate":16000,"samples_b64":"..."}
//   <- {"id":7,"label":"jazz","score":0.7,"scores":{"jazz":0.7,...}}
//
// samples_b64 is the base64 encoding of the samples as float32 little
// endian, exactly 4 * n bytes. A response carrying "error" instead of a
// label is surfaced as BridgeError.

#ifndef FREQCAUSE_BRIDGE_H_
#define FREQCAUSE_BRIDGE_H_

#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "freqcause/classifier.h"

namespace freqcause {

inline constexpr int kBridgeProtocolVersion = 1;

struct BridgeEndpoint {
  enum class Transport { kSubprocess, kTcp };
  Transport transport = Transport::kSubprocess;
  std::vector<std::string> argv;  // kSubprocess
  std::string host;               // kTcp
  uint16_t port = 0;              // kTcp
  std::chrono::milliseconds timeout{30000};
};

// Accepts "cmd:<argv...>" (whitespace separated) or "tcp:<host>:<port>".
BridgeEndpoint ParseEndpoint(std::string_view spec);

std::string Base64Encode(std::span<const uint8_t> bytes);
// Throws ProtocolError on malformed input.
std::vector<uint8_t> Base64Decode(std::string_view text);

std::string EncodeSamples(std::span<const float> samples);
std::vector<float> DecodeSamples(std::string_view b64);

// One line-oriented connection to a bridge.
class LineChannel {
 public:
  virtual ~LineChannel() = default;
  virtual void WriteLine(const std::string& line) = 0;
  // Throws BridgeError on timeout or closed stream.
  virtual std::string ReadLine(std::chrono::milliseconds timeout) = 0;
};

std::unique_ptr<LineChannel> Connect(const BridgeEndpoint& endpoint);

// Parses and validates one classify response line against `expected_id`.
Classification ParseClassifyResponse(const std::string& line, uint64_t expected_id,
                                     const std::vector<std::string>& labels);

class BridgeModel : public Model {
 public:
  // Connects and performs the handshake. Throws ProtocolError on version
  // mismatch and BridgeError on transport failure.
  explicit BridgeModel(BridgeEndpoint endpoint);
  Classification Predict(const TimeSignal& signal) override;
  ClassifierKind kind() const override { return ClassifierKind::kBridge; }
  // Opens a new connection (a new process for subprocess endpoints).
  std::unique_ptr<Model> Clone() const override;
  std::vector<std::string> labels() const override { return labels_; }

 private:
  BridgeEndpoint endpoint_;
  std::unique_ptr<LineChannel> channel_;
  std::vector<std::string> labels_;
  uint64_t next_id_ = 1;
};

ClassifierHandle BridgeClassifier(const BridgeEndpoint& endpoint);

}  // namespace freqcause

#endif  // FREQCAUSE_BRIDGE_H_
