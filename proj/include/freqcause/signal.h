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

// Time-domain signals and their invertible frequency-domain representations.
//
// Conventions:
//  - Forward transforms are the one-sided DFT of a real signal and are
//    unnormalized. The inverse scales by 1/n. For an n-sample signal the
//    spectrum has n/2 + 1 bins and bin k sits at k * sample_rate / n Hz.
//  - The STFT uses a periodic Hann window with hop = frame_size / 2. The
//    signal is zero padded by frame_size / 2 on both sides so every sample is
//    covered by two frames, and inversion is a weighted overlap-add
//    (least-squares) normalized by the summed squared window.

#ifndef FREQCAUSE_SIGNAL_H_
#define FREQCAUSE_SIGNAL_H_

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "freqcause/error.h"

namespace freqcause {

using Complex = std::complex<double>;

// Mono audio. Samples are stored as float so that a float32 wav export is
// lossless with respect to what the classifier saw.
struct TimeSignal {
  std::vector<float> samples;
  uint32_t sample_rate = 0;

  size_t size() const { return samples.size(); }
  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// Throws InvalidArgument if the signal is empty, has a zero sample rate or
// non-finite samples.
void Validate(const TimeSignal& signal);

struct Spectrum {
  std::vector<Complex> bins;
  size_t original_length = 0;
  uint32_t sample_rate = 0;

  size_t size() const { return bins.size(); }
  double FrequencyOf(size_t bin) const {
    return static_cast<double>(bin) * sample_rate / original_length;
  }
};

// Complex STFT coefficients stored frame-major: frame t, bin k lives at
// frames[t * num_bins() + k].
struct Spectrogram {
  std::vector<Complex> frames;
  size_t frame_size = 0;
  size_t hop = 0;
  size_t num_frames = 0;
  size_t original_length = 0;
  uint32_t sample_rate = 0;

  size_t num_bins() const { return frame_size / 2 + 1; }
  Complex& at(size_t frame, size_t bin) {
    return frames[frame * num_bins() + bin];
  }
  const Complex& at(size_t frame, size_t bin) const {
    return frames[frame * num_bins() + bin];
  }
  double FrequencyOf(size_t bin) const {
    return static_cast<double>(bin) * sample_rate / frame_size;
  }
};

// A strictly increasing set of bin indices.
class BinSet {
 public:
  BinSet() = default;
  // Sorts and deduplicates.
  explicit BinSet(std::vector<size_t> indices);
  BinSet(std::initializer_list<size_t> indices)
      : BinSet(std::vector<size_t>(indices)) {}

  static BinSet All(size_t size);

  const std::vector<size_t>& indices() const { return indices_; }
  size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  bool Contains(size_t index) const;
  // True when every index is below `size`.
  bool FitsWithin(size_t size) const;

  BinSet Union(const BinSet& other) const;
  // Indices in [0, size) that are not in this set.
  BinSet Complement(size_t size) const;
  bool IsSubsetOf(const BinSet& other) const;

  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  friend bool operator==(const BinSet&, const BinSet&) = default;

 private:
  std::vector<size_t> indices_;
};

Spectrum Forward(const TimeSignal& signal);
TimeSignal Inverse(const Spectrum& spectrum);

// Bins outside `keep` are set to zero, bins inside are copied unchanged.
Spectrum Mask(const Spectrum& spectrum, const BinSet& keep);

constexpr size_t kDefaultHopDivisor = 2;

// hop == 0 selects frame_size / 2. Only frame_size / 2 hops satisfy the
// reconstruction guarantee for the Hann window; other hops are accepted and
// inverted by least squares.
Spectrogram Stft(const TimeSignal& signal, size_t frame_size, size_t hop = 0);
TimeSignal Istft(const Spectrogram& spectrogram);

// Maps full-spectrum bin indices (of a spectrum with `spectrum_length`
// original samples) to the STFT bins with the nearest center frequency.
// Exact ties go to the lower STFT bin.
BinSet MapBins(const BinSet& spectrum_bins, size_t spectrum_length,
               const Spectrogram& spectrogram);

// Periodic Hann window of length n.
std::vector<double> HannWindow(size_t n);

// sum_t x[t]^2 and its frequency-domain counterpart
// (|X_0|^2 + 2 sum |X_k|^2 + |X_{n/2}|^2) / n for a one-sided spectrum.
double TimeEnergy(const TimeSignal& signal);
double SpectralEnergy(const Spectrum& spectrum);

double MaxAbsDifference(std::span<const float> a, std::span<const float> b);
double L2Difference(std::span<const float> a, std::span<const float> b);

}  // namespace freqcause

#endif  // FREQCAUSE_SIGNAL_H_
