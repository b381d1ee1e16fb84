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

#include "scodec/parallel.h"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace scodec {
namespace {

std::atomic<int> g_thread_limit{0};

}  // namespace

void SetThreadLimit(int threads) { g_thread_limit = std::max(0, threads); }

int ThreadLimit() {
  int limit = g_thread_limit.load();
  if (limit > 0) return limit;
  return std::max(1u, std::thread::hardware_concurrency());
}

void ParallelFor(int64_t begin, int64_t end,
                 const std::function<void(int64_t)>& body) {
  const int64_t count = end - begin;
  if (count <= 0) return;
  const int workers =
      static_cast<int>(std::min<int64_t>(ThreadLimit(), count));
  if (workers <= 1) {
    for (int64_t i = begin; i < end; ++i) body(i);
    return;
  }
  std::atomic<int64_t> next{begin};
  auto worker = [&] {
    for (int64_t i = next++; i < end; i = next++) body(i);
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
}

}  // namespace scodec
