// Copyright 2026 The Collapse Lab Authors
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

#ifndef COLLAPSE_LAB_ENSEMBLE_H
#define COLLAPSE_LAB_ENSEMBLE_H

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace collapse_lab {

/// Worker count from COLLAPSE_LAB_THREADS, else the hardware count (at least 1).
size_t default_worker_count();

/// Calls f(run_index) for every run in [0, count) across `workers` threads.
///
/// Runs are split into contiguous blocks; callers write results into slots
/// indexed by run, so merged output does not depend on the worker count.
/// The exception from the lowest-indexed failing block is rethrown.
template <typename F>
void for_each_run(size_t count, size_t workers, F &&f) {
    if (workers == 0) {
        workers = default_worker_count();
    }
    if (workers > count) {
        workers = count == 0 ? 1 : count;
    }
    if (workers <= 1) {
        for (size_t i = 0; i < count; i++) {
            f(i);
        }
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (size_t w = 0; w < workers; w++) {
        size_t begin = count * w / workers;
        size_t end = count * (w + 1) / workers;
        threads.emplace_back([&, w, begin, end] {
            try {
                for (size_t i = begin; i < end; i++) {
                    f(i);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto &t : threads) {
        t.join();
    }
    for (auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace collapse_lab

#endif
