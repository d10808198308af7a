// Copyright (C) 2026 genvtest authors
// SPDX-License-Identifier: Apache-2.0

#include "genvtest/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "genvtest/errors.hpp"
#include "genvtest/parallel.hpp"

namespace genvtest {

namespace {

// Stream 0 of the master seed is reserved for tie-breaking; replicates use
// streams 1..s.
constexpr std::uint64_t kTieStream = 0;

int compare_doubles(double a, double b, bool larger_is_more_extreme) {
  if (a == b) return 0;
  const bool a_more = larger_is_more_extreme ? (a > b) : (a < b);
  return a_more ? -1 : 1;
}

}  // namespace

double monte_carlo_p(std::span<const double> measures, bool larger_is_more_extreme) {
  return monte_carlo_p(measures.size(), [&](std::size_t a, std::size_t b) {
    return compare_doubles(measures[a], measures[b], larger_is_more_extreme);
  });
}

double monte_carlo_p(std::size_t count, const std::function<int(std::size_t, std::size_t)>& compare) {
  if (count < 2) raise(errc::invalid_input, "need at least two measures");
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return compare(a, b) < 0; });
  // Ties not involving the observed measure do not change p, but they break
  // the strict-ordering contract all the same.
  for (std::size_t pos = 0; pos + 1 < count; ++pos)
    if (compare(order[pos], order[pos + 1]) == 0)
      raise(errc::ties_present, "tied measures; break ties before computing the p-value");
  const auto pos = std::find(order.begin(), order.end(), std::size_t{0}) - order.begin();
  return static_cast<double>(pos + 1) / static_cast<double>(count);
}

std::vector<int> break_ties(std::size_t count, const std::function<int(std::size_t, std::size_t)>& compare,
                            RngEngine& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> aux(count);
  for (auto& a : aux) a = unif(rng);
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const int c = compare(a, b);
    if (c != 0) return c < 0;
    if (aux[a] != aux[b]) return aux[a] < aux[b];
    return a < b;
  });
  std::vector<int> ranks(count);
  for (std::size_t pos = 0; pos < count; ++pos) ranks[order[pos]] = static_cast<int>(pos) + 1;
  return ranks;
}

namespace {

double p_from_strict_ranks(const std::vector<int>& ranks) {
  return static_cast<double>(ranks.at(0)) / static_cast<double>(ranks.size());
}

void run_extreme_rank_test(const FunctionalSample& sample, const TestConfig& config, TestReport& report) {
  const RankTableau tableau = pointwise_ranks(sample, TiePolicy::MidRank);
  const ExtremeRanks ranks = extreme_rank(tableau);
  const PInterval interval = p_interval(ranks);
  report.interval = interval;

  const int k_alpha = critical_rank(ranks, config.alpha);
  report.k_alpha = k_alpha;
  if (static_cast<std::size_t>(k_alpha) > sample.num_curves() / 2)
    raise(errc::invalid_input,
          "alpha = " + std::to_string(config.alpha) + " needs envelope order k = " +
              std::to_string(k_alpha) + ", deeper than the bundle supports; increase s or lower alpha");
  Envelope env = kth_envelope(sample, k_alpha);
  // Central curve for plotting: pointwise mean of the simulated rows.
  env.central.resize(sample.grid_size());
  for (std::size_t j = 0; j < sample.grid_size(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 1; i < sample.num_curves(); ++i) acc += sample.value(i, j);
    env.central[j] = acc / static_cast<double>(sample.num_curves() - 1);
  }
  const EnvelopeDecision decision = classify(sample.observed(), env);
  report.envelope = std::move(env);
  report.decision = decision;

  if (config.ties == TieStrategy::Interval) {
    report.reject = interval.upper <= config.alpha;
    return;
  }

  RngEngine tie_rng = make_stream(config.seed, kTieStream);
  if (config.ties == TieStrategy::Randomize) {
    const auto ranks_strict = break_ties(
        ranks.size(),
        [&](std::size_t a, std::size_t b) { return ranks.doubled[a] - ranks.doubled[b]; }, tie_rng);
    report.p = p_from_strict_ranks(ranks_strict);
    report.reject = *report.p <= config.alpha;
    return;
  }

  // Rank-count refinement: residual ties (identical count vectors) are
  // broken by the same auxiliary-variable device.
  const auto counts = rank_counts(tableau, sample.grid());
  const auto ranks_strict = break_ties(
      counts.size(), [&](std::size_t a, std::size_t b) { return compare_rank_counts(counts[a], counts[b]); },
      tie_rng);
  const double p_n = p_from_strict_ranks(ranks_strict);
  if (!(interval.lower < p_n && p_n <= interval.upper))
    raise(errc::internal, "rank-count refinement left the p-interval");
  report.p_rank_count = p_n;
  report.reject = p_n <= config.alpha;
}

void run_depth_test(const FunctionalSample& sample, const TestConfig& config, TestReport& report) {
  std::vector<double> depth;
  if (config.ordering == Ordering::Mhrd) {
    const RankTableau tableau = pointwise_ranks(sample, TiePolicy::MaxRank);
    depth = modified_half_region_depth(tableau, sample.grid());
  } else {
    depth = modified_band_depth(sample);
  }
  // Depth sums over a finite grid tie easily; resolve by randomization.
  RngEngine tie_rng = make_stream(config.seed, kTieStream);
  const auto ranks_strict = break_ties(
      depth.size(), [&](std::size_t a, std::size_t b) { return compare_doubles(depth[a], depth[b], false); },
      tie_rng);
  report.p = p_from_strict_ranks(ranks_strict);
  report.reject = *report.p <= config.alpha;
}

void run_deviation_test(const FunctionalSample& sample, const TestConfig& config, TestReport& report) {
  const ReferenceCurves reference = estimate_reference(sample);
  const DeviationSpec spec =
      make_deviation_spec(config.deviation_kind, config.deviation_scaling, reference);
  const std::vector<double> u = deviation(sample, spec);
  report.p = monte_carlo_p(u, /*larger_is_more_extreme=*/true);
  report.reject = *report.p <= config.alpha;
  if (config.deviation_kind == DeviationKind::Max) {
    Envelope env = scaled_mad_envelope(sample, spec, config.alpha);
    report.u_alpha = env.u_critical;
    const EnvelopeDecision decision = classify(sample.observed(), env);
    report.envelope = std::move(env);
    report.decision = decision;
  }
}

}  // namespace

TestReport global_envelope_test(const FunctionalSample& sample, const TestConfig& config) {
  TestReport report;
  report.ordering = config.ordering;
  report.ties = config.ties;
  report.alpha = config.alpha;
  report.s = sample.s();
  report.seed = config.seed;
  report.observed.assign(sample.observed().begin(), sample.observed().end());

  const double k_real = config.alpha * static_cast<double>(sample.num_curves());
  if (std::abs(k_real - std::round(k_real)) > 1e-9)
    report.warnings.push_back("alpha*(s+1) = " + std::to_string(k_real) +
                              " is not an integer; the test is conservative");

  switch (config.ordering) {
    case Ordering::ExtremeRank:
      if (sample.s() < 2499)
        report.warnings.push_back("extreme-rank tests are imprecise below s = 2499 simulations");
      run_extreme_rank_test(sample, config, report);
      break;
    case Ordering::RankCount: {
      TestConfig refined = config;
      refined.ties = TieStrategy::RankCount;
      report.ties = TieStrategy::RankCount;
      run_extreme_rank_test(sample, refined, report);
      break;
    }
    case Ordering::Mhrd:
    case Ordering::Mbd:
      run_depth_test(sample, config, report);
      break;
    case Ordering::Deviation:
      run_deviation_test(sample, config, report);
      break;
  }
  return report;
}

std::vector<std::vector<double>> simulate_curves(const CurveGenerator& generate, std::size_t s,
                                                 std::uint64_t seed, int workers) {
  std::vector<std::vector<double>> curves(s);
  parallel_for(s, workers, [&](std::size_t i) {
    RngEngine rng = make_stream(seed, i + 1);
    curves[i] = generate(i + 1, rng);
  });
  return curves;
}

TestReport global_envelope_test(std::span<const double> observed, const Grid& grid,
                                const CurveGenerator& generate, std::size_t s, const TestConfig& config) {
  const auto simulated = simulate_curves(generate, s, config.seed, config.workers);
  const FunctionalSample sample = FunctionalSample::from_observed_and_simulated(grid, observed, simulated);
  return global_envelope_test(sample, config);
}

}  // namespace genvtest
