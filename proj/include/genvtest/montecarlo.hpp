// Copyright (C) 2026 genvtest authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "genvtest/envelopes.hpp"
#include "genvtest/rng.hpp"

namespace genvtest {

enum class Ordering {
  ExtremeRank,   // minimum two-sided pointwise rank
  RankCount,     // extreme-rank test refined by rank-count tie-breaking
  Mhrd,          // modified half-region depth
  Mbd,           // modified band depth
  Deviation,     // scalar deviation measure, kind/scaling from the config
};

enum class TieStrategy {
  Interval,   // report the (p-, p+) interval, three-way decision
  RankCount,  // break extreme-rank ties by rank counts, report p_N as well
  Randomize,  // break ties by auxiliary uniforms, single exact p
};

struct TestConfig {
  Ordering ordering = Ordering::ExtremeRank;
  TieStrategy ties = TieStrategy::Interval;
  DeviationKind deviation_kind = DeviationKind::Max;
  DeviationScaling deviation_scaling = DeviationScaling::None;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct TestReport {
  Ordering ordering = Ordering::ExtremeRank;
  TieStrategy ties = TieStrategy::Interval;
  double alpha = 0.05;
  std::size_t s = 0;
  std::uint64_t seed = 0;

  std::optional<double> p;                 // single Monte Carlo p-value
  std::optional<PInterval> interval;       // liberal/conservative pair
  std::optional<double> p_rank_count;      // refinement p_N, inside the interval
  std::optional<int> k_alpha;
  std::optional<double> u_alpha;
  std::optional<Envelope> envelope;
  std::optional<EnvelopeDecision> decision;
  bool reject = false;
  std::vector<double> observed;            // copy of the observed curve, for emission
  std::vector<std::string> warnings;
};

/// Monte Carlo p-value for a strictly ordered set of measures:
/// p = (1 + #{i >= 2 : measure i more extreme than measure 1}) / (s+1).
/// `larger_is_more_extreme` selects the direction. Any tie among the
/// measures raises errc::ties_present; break ties first.
double monte_carlo_p(std::span<const double> measures, bool larger_is_more_extreme);

/// Generic variant: `more_extreme(a, b)` returns <0 when item a is more
/// extreme than item b, >0 for the opposite and 0 for a tie.
double monte_carlo_p(std::size_t count, const std::function<int(std::size_t, std::size_t)>& compare);

/// Strict extremeness ranks 1..n (1 = most extreme) obtained by attaching an
/// i.i.d. continuous auxiliary variable to each item and ordering the pairs
/// lexicographically. Comparisons that were already strict are unchanged.
std::vector<int> break_ties(std::size_t count, const std::function<int(std::size_t, std::size_t)>& compare,
                            RngEngine& rng);

/// Runs the configured global test on an assembled curve bundle.
TestReport global_envelope_test(const FunctionalSample& sample, const TestConfig& config);

/// Draws s simulated curves from the generator (replicate index 1..s, each
/// with its own derived RNG stream, possibly in parallel) and runs the test.
using CurveGenerator = std::function<std::vector<double>(std::size_t replicate, RngEngine& rng)>;

TestReport global_envelope_test(std::span<const double> observed, const Grid& grid,
                                const CurveGenerator& generate, std::size_t s, const TestConfig& config);

/// Parallel replicate farm used by the generator overload; exposed for
/// callers that need the raw curves.
std::vector<std::vector<double>> simulate_curves(const CurveGenerator& generate, std::size_t s,
                                                 std::uint64_t seed, int workers);

}  // namespace genvtest
