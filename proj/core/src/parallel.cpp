#include <mmr/parallel.hpp>

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace mmr {

std::size_t default_workers() {
  if (const char* env = std::getenv("MMR_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      // fall through to hardware concurrency
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  const std::size_t blocks = std::clamp<std::size_t>(workers, 1, n);
  if (blocks == 1) {
    body(0, n);
    return;
  }

  std::vector<std::exception_ptr> errors(blocks);
  auto run_block = [&](std::size_t b) {
    const std::size_t begin = n * b / blocks;
    const std::size_t end = n * (b + 1) / blocks;
    try {
      body(begin, end);
    } catch (...) {
      errors[b] = std::current_exception();
    }
  };

  {
    std::vector<std::jthread> threads;
    threads.reserve(blocks - 1);
    for (std::size_t b = 1; b < blocks; ++b) threads.emplace_back(run_block, b);
    run_block(0);
  }

  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace mmr
