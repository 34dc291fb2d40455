#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

#include "errors.hpp"

namespace jtail {

/// Runs body(k) for k in [0, count) on `workers` threads, each owning one
/// contiguous block. Results must be written to index-addressed storage so the
/// outcome does not depend on the worker count. The exception of the
/// lowest-numbered failing block is rethrown.
template <typename Body>
void parallel_for(std::size_t count, int workers, Body&& body) {
  if (workers < 1) throw UsageError("workers must be >= 1");
  const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(workers),
                                                     std::max<std::size_t>(count, 1));
  if (nthreads <= 1) {
    for (std::size_t k = 0; k < count; ++k) body(k);
    return;
  }
  std::vector<std::exception_ptr> errors(nthreads);
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  const std::size_t chunk = (count + nthreads - 1) / nthreads;
  for (std::size_t t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t] {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(count, begin + chunk);
      try {
        for (std::size_t k = begin; k < end; ++k) body(k);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace jtail
