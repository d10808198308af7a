// Copyright (C) 2026 genvtest authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "genvtest/grid.hpp"
#include "genvtest/pointproc.hpp"

namespace genvtest {

/// Ripley K estimate with translational edge correction: each ordered pair
/// within distance r contributes |W| / ((a-|hx|)(b-|hy|)), normalized by
/// n(n-1)/|W|. Requires at least two points.
std::vector<double> ripley_k(const PointPattern& pattern, const Grid& grid);

/// Centred L: sqrt(K(r)/pi) - r, zero in expectation under complete spatial
/// randomness.
std::vector<double> centred_l(const PointPattern& pattern, const Grid& grid);

/// Empty-space, nearest-neighbour and J curves. The J value is NaN wherever
/// the empty-space estimate reaches 1; raises errc::empty_j when that
/// happens at every grid point.
struct FgjCurves {
  std::vector<double> empty_space;        // F
  std::vector<double> nearest_neighbour;  // G
  std::vector<double> j;                  // (1-G)/(1-F), NaN where undefined
};

/// Uncorrected estimators: G from data-point nearest-neighbour distances,
/// F from a deterministic lattice of test locations (lattice_per_side >= 32).
FgjCurves estimate_f_g_j(const PointPattern& pattern, const Grid& grid, int lattice_per_side = 128);

/// Mark-weighted centred L with the variogram-type test function
/// (m1-m2)^2/2, normalized by the mean over all ordered pairs. No edge
/// correction; observed and simulated patterns must be estimated alike.
std::vector<double> mark_weighted_centred_l(const PointPattern& pattern, const Grid& grid);

}  // namespace genvtest
