// Copyright (C) 2026 genvtest authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "genvtest/curves.hpp"

namespace genvtest {

/// Per-curve extreme ranks: the minimum two-sided pointwise rank over the
/// grid. Stored doubled so half-integer ranks stay exact. Smaller is more
/// extreme.
struct ExtremeRanks {
  std::vector<int> doubled;

  std::size_t size() const { return doubled.size(); }
  double value(std::size_t i) const { return doubled[i] / 2.0; }
};

ExtremeRanks extreme_rank(const RankTableau& tableau);

/// Histogram of two-sided pointwise ranks of one curve. Bucket b counts
/// (or weight-sums, on non-uniform grids) the grid points whose doubled
/// two-sided rank equals b + 2, so bucket 0 holds rank 1, bucket 2 holds
/// rank 2, and odd buckets hold the half-integer mid-ranks between them.
struct RankCountVector {
  std::vector<double> buckets;

  double total() const;
};

std::vector<RankCountVector> rank_counts(const RankTableau& tableau, const Grid& grid);

/// Reverse lexical three-way comparison: a curve that piles more weight on
/// the smallest ranks is more extreme. Returns -1 when `a` is more extreme
/// than `b`, +1 for the opposite, 0 when the vectors are identical.
int compare_rank_counts(const RankCountVector& a, const RankCountVector& b);

/// Half-region depth of each curve: the smaller of the (weighted) sums of
/// its ascending and descending pointwise ranks. Smaller is more extreme.
/// Callers wanting the conventional treatment should build the tableau
/// with TiePolicy::MaxRank.
std::vector<double> modified_half_region_depth(const RankTableau& tableau, const Grid& grid);

/// Band depth with pairs: the average over all unordered curve pairs of the
/// fraction of grid points where the curve lies inside the pair's band
/// (inclusive). Smaller is more extreme. Requires at least three curves.
std::vector<double> modified_band_depth(const FunctionalSample& sample);

enum class DeviationKind { Max, Integral };
enum class DeviationScaling { None, Studentized, DirectionalQuantile };

/// Reference curves a deviation measure is computed against. The scale
/// curves are only consulted by the scaling that needs them.
struct DeviationSpec {
  DeviationKind kind = DeviationKind::Max;
  DeviationScaling scaling = DeviationScaling::None;
  std::vector<double> expectation;      // T0
  std::vector<double> variance;         // pointwise variance, Studentized only
  std::vector<double> lower_quantile;   // pointwise lower quantile, DirectionalQuantile only
  std::vector<double> upper_quantile;   // pointwise upper quantile, DirectionalQuantile only
};

/// One deviation measure per curve; larger is more extreme. Max kind takes
/// the largest scaled absolute residual over the grid; Integral kind the
/// trapezoid-weighted sum of squared scaled residuals.
std::vector<double> deviation(const FunctionalSample& sample, const DeviationSpec& spec);

/// Scaled residual curve of a single function against the spec's reference;
/// positive above the expectation, negative below, magnitude in scale units.
std::vector<double> scaled_residual(std::span<const double> curve, const DeviationSpec& spec,
                                    const Grid& grid);

/// Pointwise mean, unbiased variance and empirical 2.5%/97.5% quantiles of
/// the simulated rows only (the observed curve never contaminates the
/// reference).
struct ReferenceCurves {
  std::vector<double> expectation;
  std::vector<double> variance;
  std::vector<double> lower_quantile;
  std::vector<double> upper_quantile;
};

ReferenceCurves estimate_reference(const FunctionalSample& sample);

DeviationSpec make_deviation_spec(DeviationKind kind, DeviationScaling scaling,
                                  const ReferenceCurves& reference);

/// Linear-interpolation (type 7) empirical quantile of unsorted values.
double empirical_quantile(std::vector<double> values, double p);

}  // namespace genvtest
