// Copyright (C) 2026 genvtest authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <random>

#include "genvtest/envelopes.hpp"
#include "genvtest/errors.hpp"
#include "oracles.hpp"

using namespace genvtest;

TEST_CASE("kth envelope order statistics") {
  const auto sample = oracles::five_curve_fixture();
  const Envelope e1 = kth_envelope(sample, 1);
  // k = 1 is the pointwise min/max.
  CHECK(e1.lower == std::vector<double>{1.0, 1.0, 1.0});
  CHECK(e1.upper == std::vector<double>{5.0, 5.0, 5.0});
  const Envelope e2 = kth_envelope(sample, 2);
  CHECK(e2.lower[0] == 2.0);
  CHECK(e2.upper[0] == 4.0);

  CHECK_THROWS_AS(kth_envelope(sample, 0), Error);
  CHECK_THROWS_AS(kth_envelope(sample, 3), Error);

  // Deepest order against a full-sort reference.
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto s = oracles::random_sample(9, 7, seed);
    const int k = 4;  // floor((s+1)/2) with nine curves
    const Envelope env = kth_envelope(s, k);
    for (std::size_t j = 0; j < s.grid_size(); ++j) {
      std::vector<double> column(9);
      for (std::size_t i = 0; i < 9; ++i) column[i] = s.value(i, j);
      std::sort(column.begin(), column.end());
      CHECK(env.lower[j] == column[k - 1]);
      CHECK(env.upper[j] == column[9 - k]);
    }
  }
}

TEST_CASE("critical rank") {
  ExtremeRanks r;
  r.doubled = {2, 4, 2, 2, 2};  // ranks 1, 2, 1, 1, 1
  CHECK(critical_rank(r, 0.2) == 1);  // budget 1, but four curves sit below rank 2

  ExtremeRanks distinct;
  for (int k = 1; k <= 10; ++k) distinct.doubled.push_back(2 * k);
  CHECK(critical_rank(distinct, 0.2) == 3);  // budget 2 among ranks 1..10

  // Large-scale shape: 2500 curves, 20 curves at each rank 1..4 and 50 at
  // rank 5 put the critical rank at exactly 5 for a budget of 125.
  ExtremeRanks big;
  for (int rank = 1; rank <= 4; ++rank)
    for (int c = 0; c < 20; ++c) big.doubled.push_back(2 * rank);
  for (int c = 0; c < 50; ++c) big.doubled.push_back(2 * 5);
  while (big.doubled.size() < 2500) big.doubled.push_back(2 * 6);
  CHECK(critical_rank(big, 0.05) == 5);

  CHECK_THROWS_AS(critical_rank(r, 0.0), Error);
  CHECK_THROWS_AS(critical_rank(r, 1.0), Error);
}

TEST_CASE("p-interval") {
  ExtremeRanks r;
  r.doubled = {2, 4, 2, 2, 2};
  const PInterval p = p_interval(r);
  CHECK(p.lower == 0.0);
  CHECK(p.upper == doctest::Approx(0.8));

  // Observed strictly most typical.
  ExtremeRanks top;
  top.doubled = {8, 2, 4, 6};
  const PInterval pt = p_interval(top);
  CHECK(pt.lower == doctest::Approx(3.0 / 4.0));
  CHECK(pt.upper == 1.0);

  // Width bound: at most two curves per grid point can share each extreme rank.
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto sample = oracles::random_sample(5 + seed % 20, 1 + seed % 6, seed ^ 0xabcd);
    const ExtremeRanks ranks = extreme_rank(pointwise_ranks(sample));
    const PInterval pi = p_interval(ranks);
    const double n = static_cast<double>(ranks.size());
    CHECK((pi.upper - pi.lower) * n <= 2.0 * static_cast<double>(sample.grid_size()) + 1e-9);
    CHECK(pi.lower < pi.upper);
  }
}

TEST_CASE("classification against a band") {
  Envelope env{Grid({1.0, 2.0, 3.0}), {0.0, 0.0, 0.0}, {2.0, 2.0, 2.0}, {}};
  CHECK(classify(std::vector<double>{1.0, 1.5, 0.5}, env) == EnvelopeDecision::NoEvidence);
  CHECK(classify(std::vector<double>{0.0, 1.0, 1.0}, env) == EnvelopeDecision::Boundary);
  CHECK(classify(std::vector<double>{1.0, 2.0 + 1e-12, 1.0}, env) == EnvelopeDecision::Reject);
  CHECK_THROWS_AS(classify(std::vector<double>{1.0}, env), Error);

  CHECK(decision_rejects(EnvelopeDecision::Boundary, BandStrictness::Liberal));
  CHECK_FALSE(decision_rejects(EnvelopeDecision::Boundary, BandStrictness::Conservative));
  CHECK(decision_rejects(EnvelopeDecision::Reject, BandStrictness::Conservative));
}

TEST_CASE("rank envelope matches the p-interval rule") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> alpha_draw(0.02, 0.3);
  int boundary_seen = 0, reject_seen = 0, clear_seen = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 6 + static_cast<std::size_t>(trial % 20);
    const auto sample = oracles::random_sample(n, 2 + trial % 8, 1000 + static_cast<std::uint64_t>(trial));
    const ExtremeRanks ranks = extreme_rank(pointwise_ranks(sample));
    const PInterval p = p_interval(ranks);
    const double alpha = alpha_draw(rng);
    const int k_alpha = critical_rank(ranks, alpha);
    if (static_cast<std::size_t>(k_alpha) > n / 2) continue;  // band undefined this deep
    const EnvelopeDecision d = classify(sample.observed(), kth_envelope(sample, k_alpha));
    if (p.upper <= alpha) {
      CHECK(d == EnvelopeDecision::Reject);
      ++reject_seen;
    } else if (p.lower > alpha) {
      CHECK(d == EnvelopeDecision::NoEvidence);
      ++clear_seen;
    } else {
      CHECK(d == EnvelopeDecision::Boundary);
      ++boundary_seen;
    }
  }
  CHECK(reject_seen > 0);
  CHECK(clear_seen > 0);
  CHECK(boundary_seen > 0);
}

TEST_CASE("scaled MAD envelope") {
  // All curves equal to the expectation: the band collapses onto it.
  Matrix<double> flat(5, 2, 3.0);
  const FunctionalSample sample(Grid({1.0, 2.0}), std::move(flat));
  DeviationSpec spec;
  spec.kind = DeviationKind::Max;
  spec.expectation = {3.0, 3.0};
  const Envelope collapsed = scaled_mad_envelope(sample, spec, 0.2);
  CHECK(collapsed.u_critical == 0.0);
  CHECK(collapsed.lower == std::vector<double>{3.0, 3.0});
  CHECK(collapsed.upper == std::vector<double>{3.0, 3.0});

  // Unit variance: the studentized band equals the classical band.
  const auto random = oracles::random_sample(10, 6, 31);
  DeviationSpec classical;
  classical.kind = DeviationKind::Max;
  classical.expectation.assign(6, 0.0);
  DeviationSpec studentized = classical;
  studentized.scaling = DeviationScaling::Studentized;
  studentized.variance.assign(6, 1.0);
  const Envelope ec = scaled_mad_envelope(random, classical, 0.2);
  const Envelope es = scaled_mad_envelope(random, studentized, 0.2);
  for (std::size_t j = 0; j < 6; ++j) {
    CHECK(ec.lower[j] == doctest::Approx(es.lower[j]));
    CHECK(ec.upper[j] == doctest::Approx(es.upper[j]));
  }

  // alpha*(s+1) must be an integer.
  CHECK_THROWS_AS(scaled_mad_envelope(random, classical, 0.17), Error);
}

TEST_CASE("deviation rejection equals closed-band exit") {
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    const std::size_t n = 10 * (1 + seed % 4);  // alpha*(s+1) stays integral
    const double alpha = 0.1;
    const auto sample = oracles::random_sample(n, 5, seed * 17);
    const ReferenceCurves ref = estimate_reference(sample);
    for (DeviationScaling scaling :
         {DeviationScaling::None, DeviationScaling::Studentized, DeviationScaling::DirectionalQuantile}) {
      const DeviationSpec spec = make_deviation_spec(DeviationKind::Max, scaling, ref);
      const auto u = deviation(sample, spec);
      const double u_alpha = mad_critical_value(u, alpha);
      const Envelope env = scaled_mad_envelope(sample, spec, alpha);
      const bool dev_rejects = u[0] >= u_alpha;
      const bool exits = classify(sample.observed(), env) != EnvelopeDecision::NoEvidence;
      CHECK(dev_rejects == exits);
    }
  }
}

TEST_CASE("envelopes nest") {
  const auto sample = oracles::random_sample(12, 6, 77);
  const Envelope outer = kth_envelope(sample, 2);
  const Envelope inner = kth_envelope(sample, 5);
  for (std::size_t j = 0; j < 6; ++j) {
    CHECK(outer.lower[j] <= inner.lower[j]);
    CHECK(outer.upper[j] >= inner.upper[j]);
  }

  DeviationSpec spec = make_deviation_spec(DeviationKind::Max, DeviationScaling::Studentized,
                                           estimate_reference(sample));
  const Envelope wide = scaled_mad_envelope(sample, spec, 1.0 / 12.0);
  const Envelope narrow = scaled_mad_envelope(sample, spec, 6.0 / 12.0);
  for (std::size_t j = 0; j < 6; ++j) {
    CHECK(wide.lower[j] <= narrow.lower[j]);
    CHECK(wide.upper[j] >= narrow.upper[j]);
  }
}

TEST_CASE("liberal and conservative empirical size under exchangeability") {
  // With iid curves the conservative test cannot exceed the level and the
  // liberal one must exceed it; checked within Monte Carlo slack.
  std::mt19937_64 rng(2026);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t n = 10;
  const double alpha = 0.2;  // budget 2
  int lib = 0, cons = 0;
  const int trials = 4000;
  for (int t = 0; t < trials; ++t) {
    Matrix<double> values(n, 4);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < 4; ++j) values(i, j) = gauss(rng);
    const FunctionalSample sample(Grid({1, 2, 3, 4}), std::move(values));
    const PInterval p = p_interval(extreme_rank(pointwise_ranks(sample)));
    if (p.lower <= alpha) ++lib;
    if (p.upper <= alpha) ++cons;
  }
  const double se = std::sqrt(alpha * (1 - alpha) / trials);  // ~0.0063
  CHECK(static_cast<double>(cons) / trials <= alpha + 3 * se);
  CHECK(static_cast<double>(lib) / trials > alpha - 3 * se);
  CHECK(lib > cons);
}
