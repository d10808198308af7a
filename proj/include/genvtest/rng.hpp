// Copyright (C) 2026 genvtest authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace genvtest {

using RngEngine = std::mt19937_64;

namespace detail {

// splitmix64 finalizer; full-period mixing of a 64-bit state.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Derives an independent child seed from a master seed and a stream index.
/// Streams are stable: the same (seed, index) pair always yields the same
/// child, regardless of which worker consumes it.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return detail::splitmix64(detail::splitmix64(master) ^ detail::splitmix64(stream * 0xd1342543de82ef95ull + 1));
}

inline RngEngine make_stream(std::uint64_t master, std::uint64_t stream) {
  const std::uint64_t s = derive_seed(master, stream);
  std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                    static_cast<std::uint32_t>(detail::splitmix64(s)),
                    static_cast<std::uint32_t>(detail::splitmix64(s) >> 32)};
  return RngEngine(seq);
}

}  // namespace genvtest
