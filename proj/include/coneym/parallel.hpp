#pragma once

// Grid-point parallelism with thread-count-independent results.
//
// Maps are split across threads freely. Reductions are always evaluated over
// fixed-size blocks of the index range; block partials are then added in block
// order. The block layout depends only on the range length, so sums are
// bit-identical for every thread count.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace coneym::parallel {

inline constexpr std::size_t kReductionBlock = 4096;
inline constexpr std::size_t kMinParallelRange = 1 << 14;

namespace detail {
inline std::atomic<unsigned>& thread_setting() {
  static std::atomic<unsigned> threads{0};
  return threads;
}
}  // namespace detail

/// Number of worker threads; 0 selects hardware concurrency.
inline void set_threads(unsigned n) { detail::thread_setting() = n; }

inline unsigned threads() {
  unsigned n = detail::thread_setting();
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

/// Calls fn(begin, end) on disjoint chunks covering [0, n).
template <class Fn>
void for_chunks(std::size_t n, Fn&& fn) {
  const unsigned nt = threads();
  if (nt <= 1 || n < kMinParallelRange) {
    fn(std::size_t{0}, n);
    return;
  }
  const std::size_t chunk = (n + nt - 1) / nt;
  std::vector<std::jthread> workers;
  workers.reserve(nt);
  for (unsigned t = 0; t < nt; ++t) {
    const std::size_t b = t * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    workers.emplace_back([&fn, b, e] { fn(b, e); });
  }
}

/// Calls fn(i) for every i in [0, n).
template <class Fn>
void for_each(std::size_t n, Fn&& fn) {
  for_chunks(n, [&fn](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) fn(i);
  });
}

/// Deterministic sum of term(i) over [0, n).
template <class Fn>
double sum(std::size_t n, Fn&& term) {
  const std::size_t nblocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(nblocks, 0.0);
  auto block = [&](std::size_t bi) {
    const std::size_t b = bi * kReductionBlock;
    const std::size_t e = std::min(n, b + kReductionBlock);
    double s = 0.0;
    for (std::size_t i = b; i < e; ++i) s += term(i);
    partial[bi] = s;
  };
  if (n >= kMinParallelRange) {
    for_each(nblocks, block);
  } else {
    for (std::size_t bi = 0; bi < nblocks; ++bi) block(bi);
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

/// Deterministic maximum of term(i) over [0, n); 0 for an empty range.
template <class Fn>
double max(std::size_t n, Fn&& term) {
  const std::size_t nblocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(nblocks, 0.0);
  for_each(nblocks, [&](std::size_t bi) {
    const std::size_t b = bi * kReductionBlock;
    const std::size_t e = std::min(n, b + kReductionBlock);
    double m = 0.0;
    for (std::size_t i = b; i < e; ++i) m = std::max(m, term(i));
    partial[bi] = m;
  });
  double total = 0.0;
  for (double p : partial) total = std::max(total, p);
  return total;
}

}  // namespace coneym::parallel
