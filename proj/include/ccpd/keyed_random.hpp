#pragma once

// Counter-based randomness: every draw is a pure function of its key, so
// results do not depend on evaluation order or threading.

#include <cstddef>
#include <cstdint>
#include <initializer_list>

namespace ccpd {

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t keyed_hash(std::initializer_list<std::uint64_t> key) noexcept {
  std::uint64_t h = 0x6A09E667F3BCC909ull;
  for (std::uint64_t k : key) h = mix64(h ^ mix64(k));
  return h;
}

// Uniform in [0, 1).
constexpr double keyed_uniform(std::initializer_list<std::uint64_t> key) noexcept {
  return static_cast<double>(keyed_hash(key) >> 11) * 0x1.0p-53;
}

// Uniform in [0, n), n > 0.
constexpr std::size_t keyed_index(std::initializer_list<std::uint64_t> key, std::size_t n) noexcept {
  return static_cast<std::size_t>(keyed_uniform(key) * static_cast<double>(n));
}

}  // namespace ccpd
