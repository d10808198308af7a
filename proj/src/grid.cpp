// Copyright (C) 2026 genvtest authors
// SPDX-License-Identifier: Apache-2.0

#include "genvtest/grid.hpp"

#include <cmath>
#include <utility>

#include "genvtest/errors.hpp"

namespace genvtest {

Grid::Grid(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) raise(errc::invalid_input, "grid must contain at least one point");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) raise(errc::invalid_input, "grid values must be finite");
    if (i > 0 && values_[i] <= values_[i - 1])
      raise(errc::invalid_input, "grid values must be strictly increasing");
  }
}

std::vector<double> Grid::trapezoid_weights() const {
  const std::size_t m = values_.size();
  if (m == 1) return {1.0};
  std::vector<double> w(m, 0.0);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double h = values_[i + 1] - values_[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

std::vector<double> Grid::ordering_weights() const {
  if (is_uniform()) return std::vector<double>(values_.size(), 1.0);
  return trapezoid_weights();
}

bool Grid::is_uniform(double rel_tol) const {
  if (values_.size() < 3) return true;
  const double h0 = values_[1] - values_[0];
  for (std::size_t i = 1; i + 1 < values_.size(); ++i) {
    const double h = values_[i + 1] - values_[i];
    if (std::abs(h - h0) > rel_tol * std::max(std::abs(h0), std::abs(h))) return false;
  }
  return true;
}

Grid Grid::regular(double r_min, double r_max, std::size_t steps) {
  if (steps < 1) raise(errc::invalid_input, "grid needs at least one step");
  if (!(r_min < r_max) && steps > 1) raise(errc::invalid_input, "r_min must be below r_max");
  std::vector<double> v(steps);
  if (steps == 1) {
    v[0] = r_min;
  } else {
    const double h = (r_max - r_min) / static_cast<double>(steps - 1);
    for (std::size_t i = 0; i < steps; ++i) v[i] = r_min + h * static_cast<double>(i);
    v.back() = r_max;
  }
  return Grid(std::move(v));
}

}  // namespace genvtest
