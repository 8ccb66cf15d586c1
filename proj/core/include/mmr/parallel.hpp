#pragma once

#include <cstddef>
#include <functional>

namespace mmr {

/// Hardware concurrency, or the MMR_THREADS environment variable when set to a positive integer.
std::size_t default_workers();

/// Runs `body(begin, end)` over a static partition of [0, n) into at most `workers`
/// contiguous blocks. Blocks are executed concurrently; the calling thread takes the first.
/// Exceptions thrown by any block are rethrown on the calling thread.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t, std::size_t)>& body);

/// Fixed-shape pairwise summation of `term(i)` over i in [begin, end).
/// The split points depend only on the range, never on the caller's thread layout,
/// so the result is bitwise reproducible.
template <typename Acc, typename Term>
Acc pairwise_sum(std::size_t begin, std::size_t end, const Term& term) {
  constexpr std::size_t kLeaf = 16;
  if (end - begin <= kLeaf) {
    Acc acc{};
    for (std::size_t i = begin; i < end; ++i) acc += term(i);
    return acc;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  Acc left = pairwise_sum<Acc>(begin, mid, term);
  left += pairwise_sum<Acc>(mid, end, term);
  return left;
}

}  // namespace mmr
