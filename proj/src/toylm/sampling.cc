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

#include "wmcollide/sampling.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "wmcollide/error.h"

namespace wmcollide {

TokenId SampleToken(std::span<const double> logits, double temperature, Rng& rng) {
  if (!(temperature > 0.0)) {
    throw Error(ErrorCode::kBadConfig, "temperature must be > 0");
  }
  if (logits.empty()) throw Error(ErrorCode::kBadConfig, "empty logits");
  double max_logit = -INFINITY;
  for (double l : logits) {
    if (!std::isfinite(l)) {
      throw Error(ErrorCode::kNumericalError, "non-finite logit");
    }
    max_logit = std::max(max_logit, l);
  }
  thread_local std::vector<double> weights;
  weights.resize(logits.size());
  double total = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    weights[i] = std::exp((logits[i] - max_logit) / temperature);
    total += weights[i];
  }
  const double target = NextUnit(rng) * total;
  double acc = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (target < acc) return static_cast<TokenId>(i);
  }
  // Rounding can leave target == total; fall back to the last positive weight.
  for (size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return static_cast<TokenId>(i);
  }
  return 0;
}

double LogSoftmaxInPlace(std::span<double> logits) {
  double max_logit = -INFINITY;
  for (double l : logits) max_logit = std::max(max_logit, l);
  double sum = 0.0;
  for (double l : logits) sum += std::exp(l - max_logit);
  const double log_z = max_logit + std::log(sum);
  for (double& l : logits) l -= log_z;
  return log_z;
}

}  // namespace wmcollide
