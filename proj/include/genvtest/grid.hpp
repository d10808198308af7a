// Copyright (C) 2026 genvtest authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

namespace genvtest {

/// Strictly increasing sequence of distance arguments shared by a curve
/// bundle. Spacing may be non-uniform; quadrature weights are derived.
class Grid {
 public:
  explicit Grid(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }

  /// Trapezoid quadrature weights; a single-point grid gets weight 1.
  std::vector<double> trapezoid_weights() const;

  /// Weights for rank-based integral orderings: unit weights on uniform
  /// grids (so sums are exact counts) and trapezoid weights otherwise.
  std::vector<double> ordering_weights() const;

  bool is_uniform(double rel_tol = 1e-9) const;

  static Grid regular(double r_min, double r_max, std::size_t steps);

  bool operator==(const Grid& other) const { return values_ == other.values_; }

 private:
  std::vector<double> values_;
};

}  // namespace genvtest
