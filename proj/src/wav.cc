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

#include "freqcause/wav.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

namespace freqcause {

namespace {

constexpr uint16_t kFormatPcm = 0x0001;
constexpr uint16_t kFormatFloat = 0x0003;
constexpr uint16_t kFormatExtensible = 0xFFFE;

static_assert(std::endian::native == std::endian::little,
              "wav codec assumes a little-endian host");

uint16_t ReadU16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

uint32_t ReadU32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

void WriteU16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v & 0xFF));
  out.push_back(static_cast<uint8_t>(v >> 8));
}

void WriteU32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void WriteTag(std::vector<uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

struct Format {
  uint16_t tag = 0;
  uint16_t channels = 0;
  uint32_t sample_rate = 0;
  uint16_t bits = 0;
};

double DecodeSample(const uint8_t* p, const Format& format) {
  if (format.tag == kFormatFloat) {
    if (format.bits == 32) {
      float v;
      std::memcpy(&v, p, sizeof(v));
      return v;
    }
    double v;
    std::memcpy(&v, p, sizeof(v));
    return v;
  }
  switch (format.bits) {
    case 8:
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16:
      return static_cast<int16_t>(ReadU16(p)) / 32768.0;
    case 24: {
      int32_t v = static_cast<int32_t>(p[0] | (p[1] << 8) | (p[2] << 16));
      if (v & 0x800000) v |= ~0xFFFFFF;
      return v / 8388608.0;
    }
    case 32:
      return static_cast<int32_t>(ReadU32(p)) / 2147483648.0;
  }
  return 0.0;
}

}  // namespace

std::string_view ToString(WavEncoding encoding) {
  return encoding == WavEncoding::kPcm16 ? "pcm16" : "float32";
}

WavEncoding ParseWavEncoding(std::string_view name) {
  if (name == "pcm16") return WavEncoding::kPcm16;
  if (name == "float32") return WavEncoding::kFloat32;
  throw InvalidArgument("unknown wav encoding '" + std::string(name) + "'");
}

TimeSignal LoadWav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  const std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw IoError(path + ": not a RIFF/WAVE file");
  }

  Format format;
  bool have_format = false;
  const uint8_t* data = nullptr;
  size_t data_size = 0;
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint8_t* chunk = bytes.data() + pos;
    const uint32_t size = ReadU32(chunk + 4);
    const size_t body = pos + 8;
    const size_t available = std::min<size_t>(size, bytes.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (available < 16) throw IoError(path + ": truncated fmt chunk");
      const uint8_t* f = bytes.data() + body;
      format.tag = ReadU16(f);
      format.channels = ReadU16(f + 2);
      format.sample_rate = ReadU32(f + 4);
      format.bits = ReadU16(f + 14);
      if (format.tag == kFormatExtensible) {
        if (available < 26) throw IoError(path + ": truncated extensible fmt");
        format.tag = ReadU16(f + 24);
      }
      have_format = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = available;
    }
    pos = body + size + (size & 1);
  }
  if (!have_format) throw IoError(path + ": missing fmt chunk");
  if (data == nullptr) throw IoError(path + ": missing data chunk");

  const bool supported =
      (format.tag == kFormatPcm &&
       (format.bits == 8 || format.bits == 16 || format.bits == 24 ||
        format.bits == 32)) ||
      (format.tag == kFormatFloat && (format.bits == 32 || format.bits == 64));
  if (!supported) {
    throw IoError(path + ": unsupported codec (format tag " +
                  std::to_string(format.tag) + ", " +
                  std::to_string(format.bits) + " bits)");
  }
  if (format.channels == 0 || format.sample_rate == 0) {
    throw IoError(path + ": invalid channel count or sample rate");
  }

  const size_t frame_bytes = static_cast<size_t>(format.bits / 8) * format.channels;
  const size_t frames = data_size / frame_bytes;
  if (frames == 0) throw IoError(path + ": no audio samples");

  TimeSignal signal;
  signal.sample_rate = format.sample_rate;
  signal.samples.resize(frames);
  for (size_t i = 0; i < frames; ++i) {
    const uint8_t* frame = data + i * frame_bytes;
    if (format.channels == 1) {
      signal.samples[i] = static_cast<float>(DecodeSample(frame, format));
      continue;
    }
    double sum = 0.0;
    for (uint16_t c = 0; c < format.channels; ++c) {
      sum += DecodeSample(frame + c * (format.bits / 8), format);
    }
    signal.samples[i] = static_cast<float>(sum / format.channels);
  }
  return signal;
}

int16_t ToPcm16(float sample) {
  const double scaled = std::round(static_cast<double>(sample) * 32768.0);
  return static_cast<int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

TimeSignal RoundTrip(const TimeSignal& signal, WavEncoding encoding) {
  TimeSignal out = signal;
  if (encoding == WavEncoding::kPcm16) {
    for (float& s : out.samples) s = static_cast<float>(ToPcm16(s) / 32768.0);
  }
  return out;
}

size_t SaveWav(const TimeSignal& signal, const std::string& path,
               WavEncoding encoding) {
  Validate(signal);
  const uint16_t bits = encoding == WavEncoding::kPcm16 ? 16 : 32;
  const uint16_t tag = encoding == WavEncoding::kPcm16 ? kFormatPcm : kFormatFloat;
  const uint32_t data_bytes = static_cast<uint32_t>(signal.size() * (bits / 8));

  std::vector<uint8_t> out;
  out.reserve(44 + data_bytes);
  WriteTag(out, "RIFF");
  WriteU32(out, 36 + data_bytes);
  WriteTag(out, "WAVE");
  WriteTag(out, "fmt ");
  WriteU32(out, 16);
  WriteU16(out, tag);
  WriteU16(out, 1);
  WriteU32(out, signal.sample_rate);
  WriteU32(out, signal.sample_rate * (bits / 8));
  WriteU16(out, bits / 8);
  WriteU16(out, bits);
  WriteTag(out, "data");
  WriteU32(out, data_bytes);

  size_t out_of_range = 0;
  for (float s : signal.samples) {
    if (s > 1.0f || s < -1.0f) ++out_of_range;
    if (encoding == WavEncoding::kFloat32) {
      std::array<uint8_t, 4> raw;
      std::memcpy(raw.data(), &s, 4);
      out.insert(out.end(), raw.begin(), raw.end());
    } else {
      WriteU16(out, static_cast<uint16_t>(ToPcm16(s)));
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write " + path);
  file.write(reinterpret_cast<const char*>(out.data()),
             static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("write failed for " + path);

  if (out_of_range > 0) {
    spdlog::warn("{}: {} samples outside [-1, 1]{}", path, out_of_range,
                 encoding == WavEncoding::kPcm16 ? " were clipped" : "");
  }
  return out_of_range;
}

}  // namespace freqcause
