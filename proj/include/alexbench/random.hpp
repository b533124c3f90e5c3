#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace alexbench {

using Rng = std::mt19937_64;

// SplitMix64 finaliser; used to derive independent stream seeds from a base
// seed plus a list of tags (repetition, iteration, purpose).
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base,
                                    std::initializer_list<std::uint64_t> tags) noexcept {
  std::uint64_t s = mix64(base);
  for (std::uint64_t t : tags) s = mix64(s ^ mix64(t + 0x632BE59BD9B4E019ull));
  return s;
}

}  // namespace alexbench
