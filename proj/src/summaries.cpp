// Copyright (C) 2026 genvtest authors
// SPDX-License-Identifier: Apache-2.0

#include "genvtest/summaries.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "genvtest/errors.hpp"

namespace genvtest {

namespace {

// Accumulates per-pair weights into the histogram bin of the smallest grid
// value >= pair distance; prefix sums then give the cumulative statistic.
class PairHistogram {
 public:
  explicit PairHistogram(const Grid& grid) : grid_(grid), bins_(grid.size() + 1, 0.0) {
    r_max_ = grid[grid.size() - 1];
  }

  void add(double distance, double weight) {
    if (distance > r_max_) return;
    const auto values = grid_.values();
    const auto it = std::lower_bound(values.begin(), values.end(), distance);
    bins_[static_cast<std::size_t>(it - values.begin())] += weight;
  }

  std::vector<double> cumulative() const {
    std::vector<double> out(grid_.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < grid_.size(); ++j) {
      acc += bins_[j];
      out[j] = acc;
    }
    return out;
  }

 private:
  const Grid& grid_;
  std::vector<double> bins_;
  double r_max_;
};

}  // namespace

std::vector<double> ripley_k(const PointPattern& pattern, const Grid& grid) {
  const std::size_t n = pattern.size();
  if (n < 2) raise(errc::insufficient_points, "pair statistics need at least two points");
  const double a = pattern.window.width(), b = pattern.window.height();
  const double area = pattern.window.area();
  const double r_max = grid[grid.size() - 1];
  const double r_max2 = r_max * r_max;

  PairHistogram hist(grid);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double hx = std::abs(pattern.x[i] - pattern.x[j]);
      const double hy = std::abs(pattern.y[i] - pattern.y[j]);
      const double d2 = hx * hx + hy * hy;
      if (d2 > r_max2) continue;
      // Ordered pairs count twice; the set covariance (a-hx)(b-hy) is the
      // translational correction denominator.
      hist.add(std::sqrt(d2), 2.0 * area / ((a - hx) * (b - hy)));
    }
  }
  std::vector<double> k = hist.cumulative();
  const double norm = area / (static_cast<double>(n) * static_cast<double>(n - 1));
  for (auto& v : k) v *= norm;
  return k;
}

std::vector<double> centred_l(const PointPattern& pattern, const Grid& grid) {
  std::vector<double> curve = ripley_k(pattern, grid);
  for (std::size_t j = 0; j < curve.size(); ++j)
    curve[j] = std::sqrt(curve[j] / std::numbers::pi) - grid[j];
  return curve;
}

FgjCurves estimate_f_g_j(const PointPattern& pattern, const Grid& grid, int lattice_per_side) {
  const std::size_t n = pattern.size();
  if (n < 2) raise(errc::insufficient_points, "nearest-neighbour statistics need at least two points");
  if (lattice_per_side < 32) raise(errc::invalid_input, "test lattice needs at least 32 points per side");

  // Nearest-neighbour distance of every data point.
  std::vector<double> nn(n, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = pattern.x[i] - pattern.x[j];
      const double dy = pattern.y[i] - pattern.y[j];
      const double d2 = dx * dx + dy * dy;
      if (d2 < nn[i]) nn[i] = d2;
      if (d2 < nn[j]) nn[j] = d2;
    }
  for (auto& d : nn) d = std::sqrt(d);
  std::sort(nn.begin(), nn.end());

  // Empty-space distances from a fixed lattice of cell centres.
  const auto m = static_cast<std::size_t>(lattice_per_side);
  std::vector<double> empty(m * m, std::numeric_limits<double>::infinity());
  const Window& w = pattern.window;
  for (std::size_t gy = 0; gy < m; ++gy) {
    const double ty = w.y0 + (static_cast<double>(gy) + 0.5) * w.height() / static_cast<double>(m);
    for (std::size_t gx = 0; gx < m; ++gx) {
      const double tx = w.x0 + (static_cast<double>(gx) + 0.5) * w.width() / static_cast<double>(m);
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        const double dx = pattern.x[i] - tx, dy = pattern.y[i] - ty;
        best = std::min(best, dx * dx + dy * dy);
      }
      empty[gy * m + gx] = std::sqrt(best);
    }
  }
  std::sort(empty.begin(), empty.end());

  FgjCurves out;
  out.empty_space.resize(grid.size());
  out.nearest_neighbour.resize(grid.size());
  out.j.resize(grid.size());
  bool any_defined = false;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double r = grid[j];
    const auto g_count = std::upper_bound(nn.begin(), nn.end(), r) - nn.begin();
    const auto f_count = std::upper_bound(empty.begin(), empty.end(), r) - empty.begin();
    const double g = static_cast<double>(g_count) / static_cast<double>(n);
    const double f = static_cast<double>(f_count) / static_cast<double>(empty.size());
    out.nearest_neighbour[j] = g;
    out.empty_space[j] = f;
    if (f < 1.0) {
      out.j[j] = (1.0 - g) / (1.0 - f);
      any_defined = true;
    } else {
      out.j[j] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  if (!any_defined) raise(errc::empty_j, "empty-space estimate reaches 1 on the whole grid");
  return out;
}

std::vector<double> mark_weighted_centred_l(const PointPattern& pattern, const Grid& grid) {
  const std::size_t n = pattern.size();
  if (!pattern.marked()) raise(errc::invalid_input, "mark-weighted statistics need marks");
  if (n < 2) raise(errc::insufficient_points, "pair statistics need at least two points");

  double weight_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dm = pattern.marks[i] - pattern.marks[j];
      weight_sum += dm * dm;  // both ordered pairs of the 0.5*dm^2 weight
    }
  const double mean_weight = weight_sum / (static_cast<double>(n) * static_cast<double>(n - 1));
  if (!(mean_weight > 0.0)) raise(errc::degenerate_marks, "marks are constant");

  const double r_max = grid[grid.size() - 1];
  const double r_max2 = r_max * r_max;
  PairHistogram hist(grid);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = pattern.x[i] - pattern.x[j];
      const double dy = pattern.y[i] - pattern.y[j];
      const double d2 = dx * dx + dy * dy;
      if (d2 > r_max2) continue;
      const double dm = pattern.marks[i] - pattern.marks[j];
      hist.add(std::sqrt(d2), dm * dm);  // 2 * (dm^2 / 2)
    }
  std::vector<double> curve = hist.cumulative();
  const double norm =
      pattern.window.area() / (static_cast<double>(n) * static_cast<double>(n - 1) * mean_weight);
  for (std::size_t j = 0; j < curve.size(); ++j)
    curve[j] = std::sqrt(curve[j] * norm / std::numbers::pi) - grid[j];
  return curve;
}

}  // namespace genvtest
