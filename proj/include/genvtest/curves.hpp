// Copyright (C) 2026 genvtest authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "genvtest/grid.hpp"
#include "genvtest/matrix.hpp"

namespace genvtest {

/// Bundle of s+1 curves evaluated on a shared grid. Row 0 is the observed
/// curve; rows 1..s are simulated. Immutable after construction.
class FunctionalSample {
 public:
  FunctionalSample(Grid grid, Matrix<double> curves);

  static FunctionalSample from_observed_and_simulated(Grid grid, std::span<const double> observed,
                                                      const std::vector<std::vector<double>>& simulated);

  const Grid& grid() const { return grid_; }
  std::size_t num_curves() const { return curves_.rows(); }
  std::size_t grid_size() const { return grid_.size(); }
  /// Number of simulated curves (bundle size minus the observed one).
  std::size_t s() const { return curves_.rows() - 1; }

  std::span<const double> curve(std::size_t i) const { return curves_.row(i); }
  std::span<const double> observed() const { return curves_.row(0); }
  double value(std::size_t i, std::size_t j) const { return curves_(i, j); }
  const Matrix<double>& matrix() const { return curves_; }

 private:
  Grid grid_;
  Matrix<double> curves_;
};

enum class TiePolicy {
  MidRank,  // tied values share the mean of their ranks (default)
  MaxRank,  // tied values all take the largest rank of the group
};

/// Pointwise one-sided and two-sided ranks of every curve at every grid
/// point. Ranks are half-integers under MidRank ties, so they are stored
/// exactly as doubled integers: a stored value of 5 means rank 2.5.
class RankTableau {
 public:
  RankTableau(Matrix<int> up2, Matrix<int> down2, TiePolicy policy);

  std::size_t num_curves() const { return up2_.rows(); }
  std::size_t grid_size() const { return up2_.cols(); }
  TiePolicy tie_policy() const { return policy_; }

  // Doubled ranks (exact).
  int up2(std::size_t i, std::size_t j) const { return up2_(i, j); }
  int down2(std::size_t i, std::size_t j) const { return down2_(i, j); }
  int two_sided2(std::size_t i, std::size_t j) const { return two_sided2_(i, j); }

  // Ranks as real numbers, for reporting.
  double up(std::size_t i, std::size_t j) const { return up2_(i, j) / 2.0; }
  double down(std::size_t i, std::size_t j) const { return down2_(i, j) / 2.0; }
  double two_sided(std::size_t i, std::size_t j) const { return two_sided2_(i, j) / 2.0; }

  const Matrix<int>& two_sided2_matrix() const { return two_sided2_; }

 private:
  Matrix<int> up2_, down2_, two_sided2_;
  TiePolicy policy_;
};

/// Ranks every curve at every grid point: ascending ranks (smallest value
/// gets rank 1), descending ranks, and their minimum as the two-sided rank.
/// A smaller two-sided rank means the curve is more extreme at that point.
RankTableau pointwise_ranks(const FunctionalSample& sample, TiePolicy policy = TiePolicy::MidRank);

/// Elementwise minimum of ascending and descending ranks, as doubled ints.
Matrix<int> two_sided_ranks(const RankTableau& tableau);

}  // namespace genvtest
