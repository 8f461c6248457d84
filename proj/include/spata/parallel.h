// Copyright 2026 The spata Authors
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

#ifndef SPATA_PARALLEL_H_
#define SPATA_PARALLEL_H_

#include <cstddef>
#include <functional>
#include <optional>

namespace spata {

// Runs fn(i) for every i in [0, n) on up to `threads` workers. Each index
// is processed exactly once; callers write results into per-index slots so
// output never depends on scheduling. If any call throws, the exception of
// the lowest failing index is rethrown after all workers join.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

// Explicit value wins, then the SPATA_THREADS environment variable, then
// std::thread::hardware_concurrency(). Always at least 1.
unsigned resolve_thread_count(std::optional<unsigned> requested);

}  // namespace spata

#endif  // SPATA_PARALLEL_H_
