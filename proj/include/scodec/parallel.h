// Copyright (c) the scodec authors
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

#ifndef SCODEC_PARALLEL_H_
#define SCODEC_PARALLEL_H_

#include <cstdint>
#include <functional>

namespace scodec {

// Caps the worker count used by ParallelFor. 0 restores the default
// (logical core count).
void SetThreadLimit(int threads);
int ThreadLimit();

// Runs body(i) for i in [begin, end). Iterations must write disjoint
// outputs; results never depend on the thread count.
void ParallelFor(int64_t begin, int64_t end,
                 const std::function<void(int64_t)>& body);

}  // namespace scodec

#endif  // SCODEC_PARALLEL_H_
