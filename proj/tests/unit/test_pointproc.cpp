// Copyright (C) 2026 genvtest authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>

#include "genvtest/errors.hpp"
#include "genvtest/pointproc.hpp"
#include "genvtest/summaries.hpp"

using namespace genvtest;

namespace {

double min_pair_distance(const PointPattern& p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      const double dx = p.x[i] - p.x[j], dy = p.y[i] - p.y[j];
      best = std::min(best, std::sqrt(dx * dx + dy * dy));
    }
  return best;
}

}  // namespace

TEST_CASE("binomial simulator") {
  RngEngine rng = make_stream(1, 1);
  const Window w;
  CHECK(simulate_binomial(0, w, rng).size() == 0);
  const PointPattern p = simulate_binomial(200, w, rng);
  CHECK(p.size() == 200);
  validate_pattern(p);

  // Quadrant counts over replicates are multinomial with equal cells.
  std::array<double, 4> counts{};
  const int reps = 100;
  for (int t = 0; t < reps; ++t) {
    RngEngine r2 = make_stream(2, static_cast<std::uint64_t>(t));
    const PointPattern q = simulate_binomial(200, w, r2);
    for (std::size_t i = 0; i < q.size(); ++i) {
      const int cell = (q.x[i] < 0.5 ? 0 : 1) + (q.y[i] < 0.5 ? 0 : 2);
      counts[static_cast<std::size_t>(cell)] += 1.0;
    }
  }
  const double expected = 200.0 * reps / 4.0;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 16.27);  // chi-square(3), 0.1% point
}

TEST_CASE("poisson simulator moments") {
  const Window w;
  RngEngine rng = make_stream(3, 0);
  CHECK(simulate_poisson(0.0, w, rng).size() == 0);

  const int reps = 400;
  double sum = 0.0, sum2 = 0.0;
  for (int t = 0; t < reps; ++t) {
    RngEngine r2 = make_stream(4, static_cast<std::uint64_t>(t));
    const double n = static_cast<double>(simulate_poisson(200.0, w, r2).size());
    sum += n;
    sum2 += n * n;
  }
  const double mean = sum / reps;
  const double var = sum2 / reps - mean * mean;
  CHECK(std::abs(mean - 200.0) < 3.0 * std::sqrt(200.0 / reps));
  // Variance of the sample variance of a Poisson(200): roughly 2*lambda^2/n.
  CHECK(std::abs(var - 200.0) < 4.0 * std::sqrt(2.0 * 200.0 * 200.0 / reps));
}

TEST_CASE("inhomogeneous poisson via thinning") {
  const Window w;
  const auto intensity = [](double x, double y) { return std::exp(5.0 + 0.5 * (x + y)); };
  const double bound = std::exp(6.0);

  // Expected total from a midpoint quadrature of the intensity.
  double expected = 0.0;
  const int cells = 400;
  for (int gx = 0; gx < cells; ++gx)
    for (int gy = 0; gy < cells; ++gy)
      expected += intensity((gx + 0.5) / cells, (gy + 0.5) / cells);
  expected /= static_cast<double>(cells) * cells;
  CHECK(expected == doctest::Approx(249.83).epsilon(1e-3));

  const int reps = 300;
  double sum = 0.0;
  for (int t = 0; t < reps; ++t) {
    RngEngine r2 = make_stream(5, static_cast<std::uint64_t>(t));
    const PointPattern p = simulate_poisson(intensity, bound, w, r2);
    validate_pattern(p);
    sum += static_cast<double>(p.size());
  }
  const double mean = sum / reps;
  CHECK(std::abs(mean - expected) < 3.0 * std::sqrt(expected / reps));

  RngEngine rng = make_stream(5, 9999);
  CHECK_THROWS_AS(simulate_poisson([](double, double) { return -1.0; }, 10.0, w, rng), Error);
  CHECK_THROWS_AS(simulate_poisson(intensity, 1.0, w, rng), Error);
}

TEST_CASE("strauss simulator") {
  const Window w;
  StraussSpec spec;
  spec.beta = 100.0;
  spec.gamma = 1.0;
  spec.radius = 0.05;

  // gamma = 1 is a Poisson process with intensity beta.
  double sum = 0.0;
  const int reps = 200;
  for (int t = 0; t < reps; ++t) {
    RngEngine rng = make_stream(6, static_cast<std::uint64_t>(t));
    sum += static_cast<double>(simulate_strauss(spec, w, rng).size());
  }
  const double mean = sum / reps;
  CHECK(std::abs(mean - 100.0) < 4.0 * std::sqrt(100.0 / reps));

  // gamma = 0 forbids close pairs outright.
  StraussSpec hard = spec;
  hard.beta = 200.0;
  hard.gamma = 0.0;
  for (int t = 0; t < 10; ++t) {
    RngEngine rng = make_stream(7, static_cast<std::uint64_t>(t));
    const PointPattern p = simulate_strauss(hard, w, rng);
    CHECK(p.size() > 0);
    CHECK(min_pair_distance(p) >= hard.radius);
    validate_pattern(p);
  }

  RngEngine rng = make_stream(8, 0);
  StraussSpec bad = spec;
  bad.gamma = 1.5;
  CHECK_THROWS_AS(simulate_strauss(bad, w, rng), Error);
}

TEST_CASE("strauss chain agrees with a long-run reference") {
  const Window w;
  StraussSpec spec;
  spec.beta = 350.0;
  spec.gamma = 0.4;
  spec.radius = 0.03;

  // Reference: one long chain, sampled sparsely after an extended warm-up.
  double ref_sum = 0.0;
  const int ref_samples = 150;
  {
    RngEngine rng = make_stream(9, 0);
    StraussMcmc long_run{1000000};
    const PointPattern warm = simulate_strauss(spec, w, rng, long_run);
    ref_sum += static_cast<double>(warm.size());
    // Continue from fresh chains with doubled burn-in as sparse samples.
    for (int t = 1; t < ref_samples; ++t) {
      RngEngine r2 = make_stream(9, static_cast<std::uint64_t>(t));
      ref_sum += static_cast<double>(simulate_strauss(spec, w, r2, StraussMcmc{200000}).size());
    }
  }
  const double reference = ref_sum / ref_samples;

  double sum = 0.0;
  const int reps = 150;
  for (int t = 0; t < reps; ++t) {
    RngEngine rng = make_stream(10, static_cast<std::uint64_t>(t));
    sum += static_cast<double>(simulate_strauss(spec, w, rng).size());
  }
  const double mean = sum / reps;
  CHECK(std::abs(mean - reference) < 0.02 * reference);
}

TEST_CASE("fixed-count strauss keeps its count and hard core") {
  const Window w;
  StraussSpec spec;
  spec.gamma = 0.0;
  spec.radius = 0.04;
  spec.fixed_n = 120;
  for (int t = 0; t < 5; ++t) {
    RngEngine rng = make_stream(11, static_cast<std::uint64_t>(t));
    const PointPattern p = simulate_strauss(spec, w, rng);
    CHECK(p.size() == 120);
    CHECK(min_pair_distance(p) >= spec.radius);
  }
}

TEST_CASE("matern cluster simulator") {
  const Window w;
  const MatClustSpec spec{50.0, 0.06, 4.0};

  double sum = 0.0;
  const int reps = 300;
  for (int t = 0; t < reps; ++t) {
    RngEngine rng = make_stream(12, static_cast<std::uint64_t>(t));
    const PointPattern p = simulate_matern_cluster(spec, w, rng);
    validate_pattern(p);
    sum += static_cast<double>(p.size());
  }
  const double mean = sum / reps;
  // Edge effects handled by the parent extension: mean is lambda_p * mu.
  const double sd_total = std::sqrt(200.0 * (1.0 + 4.0));  // Poisson cluster overdispersion
  CHECK(std::abs(mean - 200.0) < 3.0 * sd_total / std::sqrt(static_cast<double>(reps)));

  // Nearly-zero daughter mean: empty with high probability.
  const MatClustSpec sparse{2.0, 0.05, 1e-4};
  int occupied = 0;
  for (int t = 0; t < 200; ++t) {
    RngEngine rng = make_stream(13, static_cast<std::uint64_t>(t));
    occupied += simulate_matern_cluster(sparse, w, rng).size() > 0 ? 1 : 0;
  }
  CHECK(occupied <= 2);

  RngEngine rng = make_stream(13, 999);
  CHECK_THROWS_AS(simulate_matern_cluster(MatClustSpec{0.0, 0.1, 1.0}, w, rng), Error);
}

TEST_CASE("matern cluster K matches the closed form") {
  const Window w;
  const MatClustSpec spec{50.0, 0.06, 4.0};
  const Grid grid = Grid::regular(0.01, 0.15, 15);

  std::vector<double> mean_k(grid.size(), 0.0);
  int used = 0;
  const int reps = 300;
  for (int t = 0; t < reps; ++t) {
    RngEngine rng = make_stream(14, static_cast<std::uint64_t>(t));
    const PointPattern p = simulate_matern_cluster(spec, w, rng);
    if (p.size() < 2) continue;
    const auto k = ripley_k(p, grid);
    for (std::size_t j = 0; j < grid.size(); ++j) mean_k[j] += k[j];
    ++used;
  }
  for (auto& v : mean_k) v /= static_cast<double>(used);

  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double analytic = matern_cluster_k(grid[j], spec);
    // Clustering signature below the cluster diameter.
    if (grid[j] < 2 * spec.cluster_radius)
      CHECK(mean_k[j] > std::numbers::pi * grid[j] * grid[j]);
    CHECK(mean_k[j] == doctest::Approx(analytic).epsilon(0.08));
  }

  // Beyond the cluster diameter the correction term is flat.
  CHECK(matern_cluster_k(0.13, spec) ==
        doctest::Approx(std::numbers::pi * 0.13 * 0.13 + 1.0 / 50.0));
  CHECK(matern_cluster_k(0.0, spec) == doctest::Approx(0.0));
}

TEST_CASE("non-overlapping and mixed cluster variants") {
  const Window w;
  RngEngine rng = make_stream(15, 0);
  const NoOMatClustSpec noo{{30.0, 0.03, 4.0}, 0.1};
  const PointPattern p = simulate_matern_cluster(noo, w, rng);
  validate_pattern(p);
  CHECK(p.size() > 0);

  const MixMatClustSpec mix{{10.0, 0.06, 30.0}, {10.0, 0.03, 30.0}};
  double total = 0.0;
  for (int t = 0; t < 50; ++t) {
    RngEngine r2 = make_stream(16, static_cast<std::uint64_t>(t));
    total += static_cast<double>(simulate_matern_cluster(mix, w, r2).size());
  }
  CHECK(total / 50.0 == doctest::Approx(600.0).epsilon(0.15));
}

TEST_CASE("mark permutation") {
  PointPattern p;
  p.window = Window{0, 1, 0, 1};
  p.push_back(0.1, 0.1);
  p.push_back(0.2, 0.8);
  p.push_back(0.9, 0.4);
  p.push_back(0.6, 0.6);
  RngEngine rng = make_stream(17, 0);
  CHECK_THROWS_AS(permute_marks(p, rng), Error);

  p.marks = {1.0, 2.0, 3.0, 4.0};
  const PointPattern q = permute_marks(p, rng);
  CHECK(q.x == p.x);
  auto sorted = q.marks;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == p.marks);

  // Every one of the 24 permutations appears with equal frequency.
  std::map<std::array<int, 4>, int> freq;
  const int reps = 24000;
  for (int t = 0; t < reps; ++t) {
    RngEngine r2 = make_stream(18, static_cast<std::uint64_t>(t));
    const PointPattern s = permute_marks(p, r2);
    std::array<int, 4> key{};
    for (int i = 0; i < 4; ++i) key[static_cast<std::size_t>(i)] = static_cast<int>(s.marks[static_cast<std::size_t>(i)]);
    ++freq[key];
  }
  CHECK(freq.size() == 24);
  double chi2 = 0.0;
  const double expected = reps / 24.0;
  for (const auto& [key, count] : freq) chi2 += (count - expected) * (count - expected) / expected;
  CHECK(chi2 < 49.73);  // chi-square(23), 0.1% point

  // Single-mark pattern is unchanged.
  PointPattern single;
  single.window = p.window;
  single.push_back(0.5, 0.5);
  single.marks = {7.0};
  RngEngine r3 = make_stream(19, 0);
  CHECK(permute_marks(single, r3).marks == std::vector<double>{7.0});
}

TEST_CASE("simulators are deterministic under a fixed seed") {
  const Window w;
  const ModelSpec models[] = {BinomialSpec{50}, PoissonSpec{80.0},
                              ModelSpec{MatClustSpec{20.0, 0.05, 3.0}},
                              ModelSpec{StraussSpec{150.0, nullptr, 0.5, 0.04, {}, 0.25}}};
  for (const auto& spec : models) {
    RngEngine a = make_stream(21, 4);
    RngEngine b = make_stream(21, 4);
    const PointPattern pa = simulate(spec, w, a);
    const PointPattern pb = simulate(spec, w, b);
    CHECK(pa.x == pb.x);
    CHECK(pa.y == pb.y);
  }
}
