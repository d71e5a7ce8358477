#pragma once

#include <array>
#include <cstdint>

namespace svolterra::rng {

/// Philox4x32 with 10 rounds (Salmon et al., SC'11). Pure function of
/// (counter, key); no state.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Box-Muller pair from one Philox block; steps 2*pair and 2*pair + 1 of a
/// (seed, path, mode) stream.
std::array<double, 2> standard_normal_pair(std::uint64_t seed, std::uint64_t path,
                                           std::uint32_t mode, std::uint32_t pair);

/// Standard normal variate addressed by (seed, path, mode, step). Distinct
/// addresses give independent draws.
double standard_normal(std::uint64_t seed, std::uint64_t path, std::uint32_t mode,
                       std::uint32_t step);

}  // namespace svolterra::rng
