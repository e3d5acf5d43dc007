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

#ifndef WMCOLLIDE_PARALLEL_H_
#define WMCOLLIDE_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace wmcollide {

// Worker count used when a caller passes 0: the hardware concurrency, at
// least 1.
int DefaultWorkers();

// Calls fn(i) for every i in [0, n) on at most `workers` threads. Each index
// runs exactly once; callers write results into slot i, so the output does
// not depend on scheduling. If any call throws, the remaining indices are
// skipped and the exception from the lowest failing index is rethrown.
void ParallelFor(size_t n, int workers, const std::function<void(size_t)>& fn);

}  // namespace wmcollide

#endif  // WMCOLLIDE_PARALLEL_H_
