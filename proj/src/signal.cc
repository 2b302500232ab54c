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

#include "freqcause/signal.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

namespace freqcause {

namespace {

// FFTW's planner is not thread safe but executing an existing plan on new
// arrays is, provided the arrays share the planning alignment. All buffers
// come from fftw_malloc, so one plan per (size, direction) is shared.
class PlanCache {
 public:
  static PlanCache& Get() {
    static PlanCache* cache = new PlanCache();
    return *cache;
  }

  fftw_plan RealToComplex(size_t n) { return Lookup(n, /*forward=*/true); }
  fftw_plan ComplexToReal(size_t n) { return Lookup(n, /*forward=*/false); }

 private:
  fftw_plan Lookup(size_t n, bool forward) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(n, forward);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const int size = static_cast<int>(n);
    double* real = fftw_alloc_real(n);
    fftw_complex* spec = fftw_alloc_complex(n / 2 + 1);
    fftw_plan plan =
        forward ? fftw_plan_dft_r2c_1d(size, real, spec, FFTW_ESTIMATE)
                : fftw_plan_dft_c2r_1d(size, spec, real, FFTW_ESTIMATE);
    fftw_free(real);
    fftw_free(spec);
    if (plan == nullptr) {
      throw Error("fftw failed to plan a transform of size " +
                  std::to_string(n));
    }
    plans_.emplace(key, plan);
    return plan;
  }

  std::mutex mutex_;
  std::map<std::pair<size_t, bool>, fftw_plan> plans_;
};

struct RealBuffer {
  explicit RealBuffer(size_t n) : data(fftw_alloc_real(std::max<size_t>(n, 1))) {}
  ~RealBuffer() { fftw_free(data); }
  RealBuffer(const RealBuffer&) = delete;
  RealBuffer& operator=(const RealBuffer&) = delete;
  double* data;
};

struct ComplexBuffer {
  explicit ComplexBuffer(size_t n)
      : data(fftw_alloc_complex(std::max<size_t>(n, 1))) {}
  ~ComplexBuffer() { fftw_free(data); }
  ComplexBuffer(const ComplexBuffer&) = delete;
  ComplexBuffer& operator=(const ComplexBuffer&) = delete;
  fftw_complex* data;
};

// One-sided unnormalized DFT of `input` written to `output`.
void RealDft(std::span<const double> input, std::span<Complex> output) {
  const size_t n = input.size();
  RealBuffer in(n);
  ComplexBuffer out(n / 2 + 1);
  std::copy(input.begin(), input.end(), in.data);
  fftw_execute_dft_r2c(PlanCache::Get().RealToComplex(n), in.data, out.data);
  for (size_t k = 0; k < n / 2 + 1; ++k) {
    output[k] = Complex(out.data[k][0], out.data[k][1]);
  }
}

// Inverse of RealDft including the 1/n scale.
void InverseRealDft(std::span<const Complex> input, std::span<double> output) {
  const size_t n = output.size();
  ComplexBuffer in(n / 2 + 1);
  RealBuffer out(n);
  for (size_t k = 0; k < n / 2 + 1; ++k) {
    in.data[k][0] = input[k].real();
    in.data[k][1] = input[k].imag();
  }
  fftw_execute_dft_c2r(PlanCache::Get().ComplexToReal(n), in.data, out.data);
  const double scale = 1.0 / static_cast<double>(n);
  for (size_t i = 0; i < n; ++i) output[i] = out.data[i] * scale;
}

bool IsPowerOfTwo(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

void Validate(const TimeSignal& signal) {
  if (signal.samples.empty()) throw InvalidArgument("empty signal");
  if (signal.sample_rate == 0) throw InvalidArgument("zero sample rate");
  for (float s : signal.samples) {
    if (!std::isfinite(s)) throw InvalidArgument("non-finite sample");
  }
}

BinSet::BinSet(std::vector<size_t> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
}

BinSet BinSet::All(size_t size) {
  BinSet set;
  set.indices_.resize(size);
  for (size_t i = 0; i < size; ++i) set.indices_[i] = i;
  return set;
}

bool BinSet::Contains(size_t index) const {
  return std::binary_search(indices_.begin(), indices_.end(), index);
}

bool BinSet::FitsWithin(size_t size) const {
  return indices_.empty() || indices_.back() < size;
}

BinSet BinSet::Union(const BinSet& other) const {
  BinSet out;
  std::set_union(indices_.begin(), indices_.end(), other.indices_.begin(),
                 other.indices_.end(), std::back_inserter(out.indices_));
  return out;
}

BinSet BinSet::Complement(size_t size) const {
  BinSet out;
  out.indices_.reserve(size > indices_.size() ? size - indices_.size() : 0);
  size_t next = 0;
  for (size_t i = 0; i < size; ++i) {
    if (next < indices_.size() && indices_[next] == i) {
      ++next;
      continue;
    }
    out.indices_.push_back(i);
  }
  return out;
}

bool BinSet::IsSubsetOf(const BinSet& other) const {
  return std::includes(other.indices_.begin(), other.indices_.end(),
                       indices_.begin(), indices_.end());
}

Spectrum Forward(const TimeSignal& signal) {
  Validate(signal);
  const size_t n = signal.size();
  std::vector<double> input(signal.samples.begin(), signal.samples.end());
  Spectrum spectrum;
  spectrum.bins.resize(n / 2 + 1);
  spectrum.original_length = n;
  spectrum.sample_rate = signal.sample_rate;
  RealDft(input, spectrum.bins);
  return spectrum;
}

TimeSignal Inverse(const Spectrum& spectrum) {
  const size_t n = spectrum.original_length;
  if (n == 0 || spectrum.bins.size() != n / 2 + 1) {
    throw InvalidArgument("spectrum has " + std::to_string(spectrum.size()) +
                          " bins, inconsistent with original length " +
                          std::to_string(n));
  }
  std::vector<double> output(n);
  InverseRealDft(spectrum.bins, output);
  TimeSignal signal;
  signal.sample_rate = spectrum.sample_rate;
  signal.samples.assign(output.begin(), output.end());
  return signal;
}

Spectrum Mask(const Spectrum& spectrum, const BinSet& keep) {
  if (!keep.FitsWithin(spectrum.size())) {
    throw InvalidArgument("bin index " + std::to_string(keep.indices().back()) +
                          " out of range for " +
                          std::to_string(spectrum.size()) + " bins");
  }
  Spectrum out;
  out.original_length = spectrum.original_length;
  out.sample_rate = spectrum.sample_rate;
  out.bins.assign(spectrum.size(), Complex(0.0, 0.0));
  for (size_t k : keep) out.bins[k] = spectrum.bins[k];
  return out;
}

std::vector<double> HannWindow(size_t n) {
  std::vector<double> window(n);
  for (size_t i = 0; i < n; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  }
  return window;
}

Spectrogram Stft(const TimeSignal& signal, size_t frame_size, size_t hop) {
  Validate(signal);
  if (!IsPowerOfTwo(frame_size)) {
    throw InvalidArgument("frame size must be a power of two, got " +
                          std::to_string(frame_size));
  }
  if (frame_size > signal.size()) {
    throw InvalidArgument("frame size " + std::to_string(frame_size) +
                          " exceeds signal length " +
                          std::to_string(signal.size()));
  }
  if (hop == 0) hop = frame_size / kDefaultHopDivisor;
  const size_t n = signal.size();
  const size_t pad = frame_size / 2;
  // Enough frames that the last original sample is covered by a full
  // overlap, i.e. the padded tail is at least `pad` long.
  const size_t num_frames = (n + hop - 1) / hop + 1;
  const size_t padded_length = (num_frames - 1) * hop + frame_size;

  std::vector<double> padded(padded_length, 0.0);
  std::copy(signal.samples.begin(), signal.samples.end(),
            padded.begin() + static_cast<std::ptrdiff_t>(pad));

  Spectrogram out;
  out.frame_size = frame_size;
  out.hop = hop;
  out.num_frames = num_frames;
  out.original_length = n;
  out.sample_rate = signal.sample_rate;
  out.frames.resize(num_frames * out.num_bins());

  const std::vector<double> window = HannWindow(frame_size);
  std::vector<double> frame(frame_size);
  for (size_t t = 0; t < num_frames; ++t) {
    const size_t start = t * hop;
    for (size_t i = 0; i < frame_size; ++i) {
      frame[i] = padded[start + i] * window[i];
    }
    RealDft(frame, std::span<Complex>(out.frames).subspan(t * out.num_bins(),
                                                         out.num_bins()));
  }
  return out;
}

TimeSignal Istft(const Spectrogram& spectrogram) {
  const size_t w = spectrogram.frame_size;
  if (w == 0 || spectrogram.hop == 0 || spectrogram.num_frames == 0 ||
      spectrogram.frames.size() != spectrogram.num_frames * spectrogram.num_bins()) {
    throw InvalidArgument("inconsistent spectrogram shape");
  }
  const size_t padded_length = (spectrogram.num_frames - 1) * spectrogram.hop + w;
  std::vector<double> numerator(padded_length, 0.0);
  std::vector<double> denominator(padded_length, 0.0);
  const std::vector<double> window = HannWindow(w);
  std::vector<double> frame(w);
  for (size_t t = 0; t < spectrogram.num_frames; ++t) {
    InverseRealDft(std::span<const Complex>(spectrogram.frames)
                       .subspan(t * spectrogram.num_bins(), spectrogram.num_bins()),
                   frame);
    const size_t start = t * spectrogram.hop;
    for (size_t i = 0; i < w; ++i) {
      numerator[start + i] += window[i] * frame[i];
      denominator[start + i] += window[i] * window[i];
    }
  }
  TimeSignal out;
  out.sample_rate = spectrogram.sample_rate;
  out.samples.resize(spectrogram.original_length);
  const size_t pad = w / 2;
  for (size_t i = 0; i < spectrogram.original_length; ++i) {
    const size_t p = i + pad;
    if (p >= padded_length) break;
    out.samples[i] = denominator[p] > 1e-12
                         ? static_cast<float>(numerator[p] / denominator[p])
                         : 0.0f;
  }
  return out;
}

BinSet MapBins(const BinSet& spectrum_bins, size_t spectrum_length,
               const Spectrogram& spectrogram) {
  if (spectrum_length == 0) throw InvalidArgument("zero spectrum length");
  const size_t w = spectrogram.frame_size;
  std::vector<size_t> mapped;
  mapped.reserve(spectrum_bins.size());
  for (size_t k : spectrum_bins) {
    // Nearest j to k * w / n, computed exactly in integers.
    const size_t scaled = k * w;
    size_t j = scaled / spectrum_length;
    const size_t remainder = scaled % spectrum_length;
    if (2 * remainder > spectrum_length) ++j;
    mapped.push_back(std::min(j, w / 2));
  }
  return BinSet(std::move(mapped));
}

double TimeEnergy(const TimeSignal& signal) {
  double sum = 0.0;
  for (float s : signal.samples) sum += static_cast<double>(s) * s;
  return sum;
}

double SpectralEnergy(const Spectrum& spectrum) {
  const size_t n = spectrum.original_length;
  double sum = 0.0;
  for (size_t k = 0; k < spectrum.size(); ++k) {
    const bool unpaired = k == 0 || (n % 2 == 0 && k == n / 2);
    sum += (unpaired ? 1.0 : 2.0) * std::norm(spectrum.bins[k]);
  }
  return sum / static_cast<double>(n);
}

double MaxAbsDifference(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw InvalidArgument("length mismatch");
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(static_cast<double>(a[i]) - b[i]));
  }
  return worst;
}

double L2Difference(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw InvalidArgument("length mismatch");
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace freqcause
