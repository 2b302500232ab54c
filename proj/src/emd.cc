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

#include "freqcause/emd.h"

#include <cmath>
#include <string>

#include "freqcause/error.h"

namespace freqcause {

namespace {

double Mass(std::span<const double> v, const char* name) {
  double total = 0.0;
  for (double x : v) {
    if (!std::isfinite(x) || x < 0.0) {
      throw InvalidArgument(std::string("EMD input '") + name +
                            "' has a negative or non-finite entry");
    }
    total += x;
  }
  if (total <= 0.0) {
    throw InvalidArgument(std::string("EMD input '") + name + "' has zero mass");
  }
  return total;
}

}  // namespace

double EarthMoversDistance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("EMD inputs differ in length");
  const double mass_a = Mass(a, "a");
  const double mass_b = Mass(b, "b");
  double carried = 0.0;
  double cost = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    carried += a[i] / mass_a - b[i] / mass_b;
    cost += std::abs(carried);
  }
  return cost;
}

}  // namespace freqcause
