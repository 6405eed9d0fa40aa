#include "afem/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace afem {
namespace {

std::size_t default_threads() {
  std::size_t n = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("AFEM2D_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1) n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
    } catch (...) {
      // ignore malformed values
    }
  }
  return n;
}

std::atomic<std::size_t>& cap() {
  static std::atomic<std::size_t> c{default_threads()};
  return c;
}

}  // namespace

std::size_t max_threads() { return cap().load(); }

void set_max_threads(std::size_t n) { cap().store(std::max<std::size_t>(1, n)); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk) {
  if (n == 0) return;
  const std::size_t workers = std::min(max_threads(), (n + min_chunk - 1) / min_chunk);
  if (workers <= 1) {
    body(0, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(workers);
  auto run = [&](std::size_t w) {
    const std::size_t b = w * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b >= e) return;
    try {
      body(b, e);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run, w);
  run(0);
  for (auto& t : pool) t.join();
  // lowest chunk first, so the reported error does not depend on timing
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace afem
