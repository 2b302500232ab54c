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

#ifndef FREQCAUSE_WAV_H_
#define FREQCAUSE_WAV_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "freqcause/signal.h"

namespace freqcause {

enum class WavEncoding { kPcm16, kFloat32 };

std::string_view ToString(WavEncoding encoding);
WavEncoding ParseWavEncoding(std::string_view name);

// Reads RIFF/WAVE files holding 8/16/24/32-bit integer PCM or 32/64-bit IEEE
// float samples (plain or WAVE_FORMAT_EXTENSIBLE). Integer samples are scaled
// by 1/2^(bits-1); multichannel audio is averaged down to mono.
TimeSignal LoadWav(const std::string& path);

int16_t ToPcm16(float sample);

// The samples a SaveWav/LoadWav cycle in `encoding` produces, without disk
// access.
TimeSignal RoundTrip(const TimeSignal& signal, WavEncoding encoding);

// Writes a mono wav. pcm16 hard-clips to [-1, 1]; float32 stores the samples
// unchanged. Returns the number of samples outside [-1, 1], which is also
// logged when nonzero.
size_t SaveWav(const TimeSignal& signal, const std::string& path,
               WavEncoding encoding);

}  // namespace freqcause

#endif  // FREQCAUSE_WAV_H_
