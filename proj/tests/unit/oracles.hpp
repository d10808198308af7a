// Copyright (C) 2026 genvtest authors
// SPDX-License-Identifier: Apache-2.0

// Brute-force reference implementations used only to check the library.
// They share no code with the production paths: ranks come from direct
// pairwise comparisons, depths from full pair enumeration, and summary
// statistics from direct per-distance sums.

#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "genvtest/curves.hpp"
#include "genvtest/pointproc.hpp"

namespace oracles {

struct ColumnRanks {
  std::vector<double> up, down;
};

/// Ranks one column of values by counting comparisons.
inline ColumnRanks rank_column(const std::vector<double>& values, genvtest::TiePolicy policy) {
  const std::size_t n = values.size();
  ColumnRanks out{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t below = 0, above = 0, tied = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (values[j] < values[i]) ++below;
      else if (values[j] > values[i]) ++above;
      else ++tied;  // includes j == i
    }
    if (policy == genvtest::TiePolicy::MidRank) {
      out.up[i] = static_cast<double>(below) + (static_cast<double>(tied) + 1.0) / 2.0;
      out.down[i] = static_cast<double>(above) + (static_cast<double>(tied) + 1.0) / 2.0;
    } else {
      out.up[i] = static_cast<double>(below + tied);
      out.down[i] = static_cast<double>(above + tied);
    }
  }
  return out;
}

/// Per-curve two-sided pointwise ranks of a whole bundle.
inline std::vector<std::vector<double>> two_sided_ranks(const genvtest::FunctionalSample& sample,
                                                        genvtest::TiePolicy policy) {
  const std::size_t n = sample.num_curves(), m = sample.grid_size();
  std::vector<std::vector<double>> rstar(n, std::vector<double>(m));
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> column(n);
    for (std::size_t i = 0; i < n; ++i) column[i] = sample.value(i, j);
    const ColumnRanks ranks = rank_column(column, policy);
    for (std::size_t i = 0; i < n; ++i) rstar[i][j] = std::min(ranks.up[i], ranks.down[i]);
  }
  return rstar;
}

inline std::vector<double> extreme_ranks(const genvtest::FunctionalSample& sample) {
  const auto rstar = two_sided_ranks(sample, genvtest::TiePolicy::MidRank);
  std::vector<double> out(rstar.size());
  for (std::size_t i = 0; i < rstar.size(); ++i)
    out[i] = *std::min_element(rstar[i].begin(), rstar[i].end());
  return out;
}

/// Band depth by full enumeration of unordered curve pairs.
inline std::vector<double> band_depth(const genvtest::FunctionalSample& sample) {
  const std::size_t n = sample.num_curves(), m = sample.grid_size();
  std::vector<double> depth(n, 0.0);
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      ++pairs;
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t inside = 0;
        for (std::size_t j = 0; j < m; ++j) {
          const double lo = std::min(sample.value(a, j), sample.value(b, j));
          const double hi = std::max(sample.value(a, j), sample.value(b, j));
          if (sample.value(i, j) >= lo && sample.value(i, j) <= hi) ++inside;
        }
        depth[i] += static_cast<double>(inside) / static_cast<double>(m);
      }
    }
  for (auto& d : depth) d /= static_cast<double>(pairs);
  return depth;
}

/// Translational-correction K by direct summation at each r separately.
inline std::vector<double> ripley_k_direct(const genvtest::PointPattern& p,
                                           const std::vector<double>& r_values) {
  const std::size_t n = p.size();
  const double a = p.window.width(), b = p.window.height(), area = p.window.area();
  std::vector<double> out(r_values.size(), 0.0);
  for (std::size_t t = 0; t < r_values.size(); ++t) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double hx = std::abs(p.x[i] - p.x[j]);
        const double hy = std::abs(p.y[i] - p.y[j]);
        if (std::sqrt(hx * hx + hy * hy) <= r_values[t]) acc += area / ((a - hx) * (b - hy));
      }
    out[t] = acc * area / (static_cast<double>(n) * static_cast<double>(n - 1)) / area;
  }
  return out;
}

/// Mark-weighted centred L by direct summation.
inline std::vector<double> mark_weighted_l_direct(const genvtest::PointPattern& p,
                                                  const std::vector<double>& r_values) {
  const std::size_t n = p.size();
  double gamma_bar = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) gamma_bar += 0.5 * (p.marks[i] - p.marks[j]) * (p.marks[i] - p.marks[j]);
  gamma_bar /= static_cast<double>(n) * static_cast<double>(n - 1);
  std::vector<double> out(r_values.size());
  for (std::size_t t = 0; t < r_values.size(); ++t) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double dx = p.x[i] - p.x[j], dy = p.y[i] - p.y[j];
        if (std::sqrt(dx * dx + dy * dy) <= r_values[t])
          acc += 0.5 * (p.marks[i] - p.marks[j]) * (p.marks[i] - p.marks[j]);
      }
    const double k = p.window.area() * acc /
                     (static_cast<double>(n) * static_cast<double>(n - 1) * gamma_bar);
    out[t] = std::sqrt(k / std::acos(-1.0)) - r_values[t];
  }
  return out;
}

/// Random bundle of iid normal curves on a unit-spaced grid.
inline genvtest::FunctionalSample random_sample(std::size_t curves, std::size_t grid_points,
                                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> r(grid_points);
  for (std::size_t j = 0; j < grid_points; ++j) r[j] = static_cast<double>(j + 1);
  genvtest::Matrix<double> values(curves, grid_points);
  for (std::size_t i = 0; i < curves; ++i)
    for (std::size_t j = 0; j < grid_points; ++j) values(i, j) = gauss(rng);
  return {genvtest::Grid(std::move(r)), std::move(values)};
}

/// The worked 5-curve bundle used across the suites.
inline genvtest::FunctionalSample five_curve_fixture() {
  genvtest::Matrix<double> values(5, 3);
  const double rows[5][3] = {{1, 5, 3}, {2, 4, 4}, {3, 3, 5}, {4, 2, 1}, {5, 1, 2}};
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 3; ++j) values(i, j) = rows[i][j];
  return {genvtest::Grid({1.0, 2.0, 3.0}), std::move(values)};
}

}  // namespace oracles
