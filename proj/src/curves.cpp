// Copyright (C) 2026 genvtest authors
// SPDX-License-Identifier: Apache-2.0

#include "genvtest/curves.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "genvtest/errors.hpp"

namespace genvtest {

FunctionalSample::FunctionalSample(Grid grid, Matrix<double> curves)
    : grid_(std::move(grid)), curves_(std::move(curves)) {
  if (curves_.rows() < 2) raise(errc::invalid_input, "need an observed curve plus at least one simulated curve");
  if (curves_.cols() != grid_.size()) raise(errc::invalid_input, "curve length does not match grid length");
  for (double v : curves_.data())
    if (!std::isfinite(v)) raise(errc::invalid_input, "curve values must be finite");
}

FunctionalSample FunctionalSample::from_observed_and_simulated(
    Grid grid, std::span<const double> observed, const std::vector<std::vector<double>>& simulated) {
  const std::size_t m = grid.size();
  if (observed.size() != m) raise(errc::invalid_input, "observed curve length does not match grid");
  Matrix<double> curves(simulated.size() + 1, m);
  std::copy(observed.begin(), observed.end(), curves.row(0).begin());
  for (std::size_t i = 0; i < simulated.size(); ++i) {
    if (simulated[i].size() != m) raise(errc::invalid_input, "simulated curve length does not match grid");
    std::copy(simulated[i].begin(), simulated[i].end(), curves.row(i + 1).begin());
  }
  return FunctionalSample(std::move(grid), std::move(curves));
}

RankTableau::RankTableau(Matrix<int> up2, Matrix<int> down2, TiePolicy policy)
    : up2_(std::move(up2)), down2_(std::move(down2)), policy_(policy) {
  two_sided2_ = Matrix<int>(up2_.rows(), up2_.cols());
  for (std::size_t i = 0; i < up2_.rows(); ++i)
    for (std::size_t j = 0; j < up2_.cols(); ++j)
      two_sided2_(i, j) = std::min(up2_(i, j), down2_(i, j));
}

RankTableau pointwise_ranks(const FunctionalSample& sample, TiePolicy policy) {
  const std::size_t n = sample.num_curves();
  const std::size_t m = sample.grid_size();
  Matrix<int> up2(n, m), down2(n, m);

  std::vector<std::size_t> order(n);
  for (std::size_t j = 0; j < m; ++j) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return sample.value(a, j) < sample.value(b, j);
    });
    // Walk tie groups over sorted positions [b, e).
    std::size_t b = 0;
    while (b < n) {
      std::size_t e = b + 1;
      while (e < n && sample.value(order[e], j) == sample.value(order[b], j)) ++e;
      int u2, d2;
      if (policy == TiePolicy::MidRank) {
        // Mean of ranks b+1..e, doubled; the matching descending group
        // spans ranks n-e+1..n-b.
        u2 = static_cast<int>(b + 1 + e);
        d2 = static_cast<int>(2 * n + 1 - b - e);
      } else {
        u2 = static_cast<int>(2 * e);
        d2 = static_cast<int>(2 * (n - b));
      }
      for (std::size_t k = b; k < e; ++k) {
        up2(order[k], j) = u2;
        down2(order[k], j) = d2;
      }
      b = e;
    }
  }
  return RankTableau(std::move(up2), std::move(down2), policy);
}

Matrix<int> two_sided_ranks(const RankTableau& tableau) { return tableau.two_sided2_matrix(); }

}  // namespace genvtest
