// Copyright 2026 The pwdyn Authors
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

#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pwdyn {

/// 0 means "use hardware concurrency".
inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(chunk_begin, chunk_end, chunk_index) over [0, count) split into
/// `chunks` contiguous ranges whose boundaries depend only on (count, chunks),
/// never on the thread count. The first exception thrown is rethrown.
template <class Fn>
void parallel_chunks(std::size_t count, std::size_t chunks, unsigned threads,
                     Fn&& fn) {
  if (count == 0) return;
  chunks = std::max<std::size_t>(1, std::min(chunks, count));
  auto bounds = [&](std::size_t c) { return count * c / chunks; };
  threads = std::min<unsigned>(resolve_threads(threads), unsigned(chunks));
  if (threads <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) fn(bounds(c), bounds(c + 1), c);
    return;
  }
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t c = w; c < chunks; c += threads) {
        try {
          fn(bounds(c), bounds(c + 1), c);
        } catch (...) {
          std::lock_guard lk(mu);
          if (!err) err = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

/// fn(i) for each i in [0, count); results must go to disjoint slots.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  parallel_chunks(count, count, threads,
                  [&](std::size_t b, std::size_t e, std::size_t) {
                    for (std::size_t i = b; i < e; ++i) fn(i);
                  });
}

}  // namespace pwdyn
