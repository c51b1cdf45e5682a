#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace circlepoll::par {

// threads == 1 selects the serial reference path, 0 the library default,
// any other value requests exactly that many workers.
inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

template <class Fn>
void for_each_index(std::size_t n, int threads, Fn&& fn) {
  if (threads == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
#ifdef _OPENMP
  const int workers = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (long long i = 0; i < static_cast<long long>(n); ++i) fn(static_cast<std::size_t>(i));
#else
  for (std::size_t i = 0; i < n; ++i) fn(i);
#endif
}

// Block map-reduce: each block produces an independent partial state (any
// thread may run it), and partials are folded in block order.  The result is
// therefore identical for every thread count, including the serial path.
template <class State, class BlockFn, class CombineFn>
State block_reduce(std::size_t blocks, int threads, State init, BlockFn&& block, CombineFn&& combine) {
  std::vector<State> parts(blocks);
  for_each_index(blocks, threads, [&](std::size_t b) { parts[b] = block(b); });
  State acc = std::move(init);
  for (std::size_t b = 0; b < blocks; ++b) acc = combine(std::move(acc), std::move(parts[b]));
  return acc;
}

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Generator for (seed, stream); streams are decorrelated so per-item work is
// reproducible independently of how items are scheduled onto threads.
inline std::mt19937_64 substream_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{mix64(seed), mix64(stream + 0x51ed27f4a0d3c961ULL), mix64(seed ^ (stream * 0xd1342543de82ef95ULL)),
                    mix64(stream)};
  return std::mt19937_64(seq);
}

}  // namespace circlepoll::par
