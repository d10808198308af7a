// Copyright (C) 2026 genvtest authors
// SPDX-License-Identifier: Apache-2.0

#include "genvtest/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "genvtest/errors.hpp"

namespace genvtest {

ExtremeRanks extreme_rank(const RankTableau& tableau) {
  const std::size_t n = tableau.num_curves();
  const std::size_t m = tableau.grid_size();
  ExtremeRanks out;
  out.doubled.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    int best = tableau.two_sided2(i, 0);
    for (std::size_t j = 1; j < m; ++j) best = std::min(best, tableau.two_sided2(i, j));
    out.doubled[i] = best;
  }
  return out;
}

double RankCountVector::total() const {
  return std::accumulate(buckets.begin(), buckets.end(), 0.0);
}

std::vector<RankCountVector> rank_counts(const RankTableau& tableau, const Grid& grid) {
  const std::size_t n = tableau.num_curves();
  const std::size_t m = tableau.grid_size();
  if (grid.size() != m) raise(errc::grid_mismatch, "tableau and grid have different lengths");
  const std::vector<double> w = grid.ordering_weights();
  // Doubled two-sided ranks live in {2, ..., n+1}.
  const std::size_t buckets = n;
  std::vector<RankCountVector> out(n);
  for (auto& v : out) v.buckets.assign(buckets, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      out[i].buckets[static_cast<std::size_t>(tableau.two_sided2(i, j)) - 2] += w[j];
  return out;
}

int compare_rank_counts(const RankCountVector& a, const RankCountVector& b) {
  const std::size_t k = std::min(a.buckets.size(), b.buckets.size());
  for (std::size_t idx = 0; idx < k; ++idx) {
    if (a.buckets[idx] > b.buckets[idx]) return -1;
    if (a.buckets[idx] < b.buckets[idx]) return 1;
  }
  return 0;
}

std::vector<double> modified_half_region_depth(const RankTableau& tableau, const Grid& grid) {
  const std::size_t n = tableau.num_curves();
  const std::size_t m = tableau.grid_size();
  if (grid.size() != m) raise(errc::grid_mismatch, "tableau and grid have different lengths");
  const std::vector<double> w = grid.ordering_weights();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double up_sum = 0.0, down_sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      up_sum += w[j] * tableau.up2(i, j);
      down_sum += w[j] * tableau.down2(i, j);
    }
    out[i] = 0.5 * std::min(up_sum, down_sum);
  }
  return out;
}

std::vector<double> modified_band_depth(const FunctionalSample& sample) {
  const std::size_t n = sample.num_curves();
  const std::size_t m = sample.grid_size();
  if (n < 3) raise(errc::invalid_input, "band depth needs at least three curves");

  // Per grid point, a curve with `lo` strictly smaller and `hi` strictly
  // larger values is sandwiched by every pair except those entirely on one
  // side; pairs containing the curve itself always count.
  const double total_pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  auto pairs2 = [](std::size_t k) { return 0.5 * static_cast<double>(k) * static_cast<double>(k - 1); };

  std::vector<double> depth(n, 0.0);
  std::vector<std::pair<double, std::size_t>> column(n);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) column[i] = {sample.value(i, j), i};
    std::sort(column.begin(), column.end());
    std::size_t b = 0;
    while (b < n) {
      std::size_t e = b + 1;
      while (e < n && column[e].first == column[b].first) ++e;
      const std::size_t lo = b, hi = n - e;
      const double inside = pairs2(n - 1) - pairs2(lo) - pairs2(hi) + static_cast<double>(n - 1);
      for (std::size_t k = b; k < e; ++k) depth[column[k].second] += inside;
      b = e;
    }
  }
  for (auto& d : depth) d /= total_pairs * static_cast<double>(m);
  return depth;
}

std::vector<double> scaled_residual(std::span<const double> curve, const DeviationSpec& spec,
                                    const Grid& grid) {
  const std::size_t m = grid.size();
  if (curve.size() != m || spec.expectation.size() != m)
    raise(errc::grid_mismatch, "curve, reference and grid lengths differ");
  std::vector<double> res(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double raw = curve[j] - spec.expectation[j];
    switch (spec.scaling) {
      case DeviationScaling::None:
        res[j] = raw;
        break;
      case DeviationScaling::Studentized: {
        const double sd = std::sqrt(spec.variance.at(j));
        if (!(sd > 0.0))
          raise(errc::degenerate_scale, "zero variance at r = " + std::to_string(grid[j]));
        res[j] = raw / sd;
        break;
      }
      case DeviationScaling::DirectionalQuantile: {
        // The residual is scaled by the distance from the expectation to the
        // quantile on its own side, so the band width may differ above and
        // below the central curve.
        const double scale = raw >= 0.0 ? std::abs(spec.upper_quantile.at(j) - spec.expectation[j])
                                        : std::abs(spec.lower_quantile.at(j) - spec.expectation[j]);
        if (!(scale > 0.0))
          raise(errc::degenerate_scale, "zero quantile range at r = " + std::to_string(grid[j]));
        res[j] = raw / scale;
        break;
      }
    }
  }
  return res;
}

std::vector<double> deviation(const FunctionalSample& sample, const DeviationSpec& spec) {
  const std::size_t n = sample.num_curves();
  const Grid& grid = sample.grid();
  std::vector<double> u(n, 0.0);
  const std::vector<double> w = grid.trapezoid_weights();
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> res = scaled_residual(sample.curve(i), spec, grid);
    if (spec.kind == DeviationKind::Max) {
      double best = 0.0;
      for (double v : res) best = std::max(best, std::abs(v));
      u[i] = best;
    } else {
      double acc = 0.0;
      for (std::size_t j = 0; j < res.size(); ++j) acc += w[j] * res[j] * res[j];
      u[i] = acc;
    }
  }
  return u;
}

ReferenceCurves estimate_reference(const FunctionalSample& sample) {
  const std::size_t n = sample.num_curves();
  const std::size_t m = sample.grid_size();
  if (n < 3) raise(errc::invalid_input, "reference estimation needs at least two simulated curves");
  ReferenceCurves ref;
  ref.expectation.resize(m);
  ref.variance.resize(m);
  ref.lower_quantile.resize(m);
  ref.upper_quantile.resize(m);
  std::vector<double> column(n - 1);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 1; i < n; ++i) column[i - 1] = sample.value(i, j);
    const double mean = std::accumulate(column.begin(), column.end(), 0.0) / static_cast<double>(n - 1);
    double ss = 0.0;
    for (double v : column) ss += (v - mean) * (v - mean);
    ref.expectation[j] = mean;
    ref.variance[j] = ss / static_cast<double>(n - 2);
    ref.lower_quantile[j] = empirical_quantile(column, 0.025);
    ref.upper_quantile[j] = empirical_quantile(column, 0.975);
  }
  return ref;
}

DeviationSpec make_deviation_spec(DeviationKind kind, DeviationScaling scaling,
                                  const ReferenceCurves& reference) {
  DeviationSpec spec;
  spec.kind = kind;
  spec.scaling = scaling;
  spec.expectation = reference.expectation;
  if (scaling == DeviationScaling::Studentized) spec.variance = reference.variance;
  if (scaling == DeviationScaling::DirectionalQuantile) {
    spec.lower_quantile = reference.lower_quantile;
    spec.upper_quantile = reference.upper_quantile;
  }
  return spec;
}

double empirical_quantile(std::vector<double> values, double p) {
  if (values.empty()) raise(errc::invalid_input, "quantile of empty sample");
  std::sort(values.begin(), values.end());
  if (p <= 0.0) return values.front();
  if (p >= 1.0) return values.back();
  const double h = p * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

}  // namespace genvtest
