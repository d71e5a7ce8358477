#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace svolterra::parallel {

/// Worker count used by all ensemble loops. Defaults to 1.
void set_threads(std::size_t threads);
std::size_t threads();

/// Calls fn(i) for i in [0, count), distributing indices over the worker pool.
/// fn must only write to state owned by index i.
void for_each_index(std::size_t count, const std::function<void(std::size_t)>& fn);

/// Paths are grouped in fixed-size blocks so the reduction order, and hence
/// every floating-point result, is independent of the thread count.
inline constexpr std::size_t kReductionBlock = 32;

/// Ordered block reduction over paths. `accumulate(p, acc)` adds path p into
/// acc; `merge(into, from)` folds a finished block. Blocks merge in index
/// order.
template <class Acc, class Accumulate, class Merge>
Acc reduce_paths(std::size_t paths, const Acc& init, Accumulate accumulate, Merge merge) {
  const std::size_t blocks = (paths + kReductionBlock - 1) / kReductionBlock;
  std::vector<Acc> partial(blocks, init);
  for_each_index(blocks, [&](std::size_t b) {
    const std::size_t begin = b * kReductionBlock;
    const std::size_t end = begin + kReductionBlock < paths ? begin + kReductionBlock : paths;
    for (std::size_t p = begin; p < end; ++p) accumulate(p, partial[b]);
  });
  Acc total = init;
  for (const auto& block : partial) merge(total, block);
  return total;
}

}  // namespace svolterra::parallel
