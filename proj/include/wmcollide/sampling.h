//
// Copyright 2026 The wmcollide Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef WMCOLLIDE_SAMPLING_H_
#define WMCOLLIDE_SAMPLING_H_

#include <cstdint>
#include <random>
#include <span>

#include "wmcollide/vocabulary.h"

namespace wmcollide {

// Per-worker generator. mt19937_64 is bit-specified by the standard; draws are
// converted to doubles by NextUnit rather than std distributions, whose output
// is implementation-defined.
using Rng = std::mt19937_64;

inline double NextUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Draws from softmax(logits / temperature) by inverse CDF with one uniform
// draw. Throws kBadConfig for temperature <= 0 or empty logits and
// kNumericalError for any non-finite logit.
TokenId SampleToken(std::span<const double> logits, double temperature, Rng& rng);

// In-place log-softmax; returns the log normalizer.
double LogSoftmaxInPlace(std::span<double> logits);

}  // namespace wmcollide

#endif  // WMCOLLIDE_SAMPLING_H_
