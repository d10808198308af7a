// Copyright (C) 2026 genvtest authors
// SPDX-License-Identifier: Apache-2.0

#include "genvtest/pointproc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "genvtest/errors.hpp"

namespace genvtest {

void validate_pattern(const PointPattern& pattern) {
  if (!(pattern.window.x1 > pattern.window.x0) || !(pattern.window.y1 > pattern.window.y0))
    raise(errc::invalid_input, "window must have positive extent");
  if (pattern.x.size() != pattern.y.size()) raise(errc::invalid_input, "coordinate arrays differ in length");
  if (pattern.marked() && pattern.marks.size() != pattern.size())
    raise(errc::invalid_input, "marks length does not match point count");
  for (std::size_t i = 0; i < pattern.size(); ++i)
    if (!pattern.window.contains(pattern.x[i], pattern.y[i]))
      raise(errc::invalid_input, "point " + std::to_string(i) + " lies outside the window");
}

PointPattern simulate_binomial(int n, const Window& window, RngEngine& rng) {
  if (n < 0) raise(errc::invalid_model, "point count must be nonnegative");
  PointPattern out;
  out.window = window;
  std::uniform_real_distribution<double> ux(window.x0, window.x1), uy(window.y0, window.y1);
  out.x.reserve(static_cast<std::size_t>(n));
  out.y.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(ux(rng), uy(rng));
  return out;
}

PointPattern simulate_poisson(double intensity, const Window& window, RngEngine& rng) {
  if (intensity < 0.0) raise(errc::invalid_model, "intensity must be nonnegative");
  std::poisson_distribution<int> count(intensity * window.area());
  return simulate_binomial(count(rng), window, rng);
}

PointPattern simulate_poisson(const std::function<double(double, double)>& intensity,
                              double max_intensity, const Window& window, RngEngine& rng) {
  if (!(max_intensity >= 0.0)) raise(errc::invalid_model, "intensity bound must be nonnegative");
  PointPattern proposal = simulate_poisson(max_intensity, window, rng);
  PointPattern out;
  out.window = window;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t i = 0; i < proposal.size(); ++i) {
    const double lambda = intensity(proposal.x[i], proposal.y[i]);
    if (lambda < 0.0) raise(errc::invalid_model, "intensity function is negative inside the window");
    if (lambda > max_intensity)
      raise(errc::invalid_model, "intensity function exceeds its stated bound");
    if (unif(rng) * max_intensity < lambda) out.push_back(proposal.x[i], proposal.y[i]);
  }
  return out;
}

namespace {

// Bucket grid for O(1) close-pair counting; cell size >= interaction radius
// so neighbours within the radius live in the 3x3 cell block.
class CellGrid {
 public:
  CellGrid(const Window& window, double radius)
      : window_(window), radius_(radius), radius2_(radius * radius) {
    nx_ = std::max<std::size_t>(1, static_cast<std::size_t>(window.width() / std::max(radius, 1e-12)));
    ny_ = std::max<std::size_t>(1, static_cast<std::size_t>(window.height() / std::max(radius, 1e-12)));
    nx_ = std::min<std::size_t>(nx_, 512);
    ny_ = std::min<std::size_t>(ny_, 512);
    cells_.assign(nx_ * ny_, {});
  }

  std::size_t size() const { return xs_.size(); }
  double x(std::size_t i) const { return xs_[i]; }
  double y(std::size_t i) const { return ys_[i]; }

  void insert(double px, double py) {
    const std::size_t idx = xs_.size();
    xs_.push_back(px);
    ys_.push_back(py);
    cell_of_.push_back(cell_index(px, py));
    cells_[cell_of_.back()].push_back(idx);
  }

  // Removes point i by swapping with the last point.
  void erase(std::size_t i) {
    remove_from_cell(i);
    const std::size_t last = xs_.size() - 1;
    if (i != last) {
      remove_from_cell(last);
      xs_[i] = xs_[last];
      ys_[i] = ys_[last];
      cell_of_[i] = cell_of_[last];
      cells_[cell_of_[i]].push_back(i);
    }
    xs_.pop_back();
    ys_.pop_back();
    cell_of_.pop_back();
  }

  void move(std::size_t i, double px, double py) {
    remove_from_cell(i);
    xs_[i] = px;
    ys_[i] = py;
    cell_of_[i] = cell_index(px, py);
    cells_[cell_of_[i]].push_back(i);
  }

  /// Number of points strictly within the interaction radius of (px, py),
  /// excluding index `skip` when given.
  int close_count(double px, double py, std::size_t skip = static_cast<std::size_t>(-1)) const {
    const auto [cx, cy] = cell_coords(px, py);
    int count = 0;
    for (std::size_t gx = (cx == 0 ? 0 : cx - 1); gx <= std::min(cx + 1, nx_ - 1); ++gx)
      for (std::size_t gy = (cy == 0 ? 0 : cy - 1); gy <= std::min(cy + 1, ny_ - 1); ++gy)
        for (std::size_t idx : cells_[gy * nx_ + gx]) {
          if (idx == skip) continue;
          const double dx = xs_[idx] - px, dy = ys_[idx] - py;
          if (dx * dx + dy * dy <= radius2_) ++count;
        }
    return count;
  }

 private:
  std::pair<std::size_t, std::size_t> cell_coords(double px, double py) const {
    const double fx = (px - window_.x0) / window_.width();
    const double fy = (py - window_.y0) / window_.height();
    const auto cx = std::min(nx_ - 1, static_cast<std::size_t>(std::max(0.0, fx * static_cast<double>(nx_))));
    const auto cy = std::min(ny_ - 1, static_cast<std::size_t>(std::max(0.0, fy * static_cast<double>(ny_))));
    return {cx, cy};
  }

  std::size_t cell_index(double px, double py) const {
    const auto [cx, cy] = cell_coords(px, py);
    return cy * nx_ + cx;
  }

  void remove_from_cell(std::size_t i) {
    auto& bucket = cells_[cell_of_[i]];
    bucket.erase(std::find(bucket.begin(), bucket.end(), i));
  }

  Window window_;
  double radius_, radius2_;
  std::size_t nx_ = 1, ny_ = 1;
  std::vector<double> xs_, ys_;
  std::vector<std::size_t> cell_of_;
  std::vector<std::vector<std::size_t>> cells_;
};

double gamma_power(double gamma, int t) {
  if (t == 0) return 1.0;
  if (gamma == 0.0) return 0.0;
  return std::pow(gamma, t);
}

}  // namespace

PointPattern simulate_strauss(const StraussSpec& spec, const Window& window, RngEngine& rng,
                              const StraussMcmc& mcmc) {
  if (spec.gamma < 0.0 || spec.gamma > 1.0)
    raise(errc::invalid_model, "interaction parameter must lie in [0, 1]");
  if (!(spec.radius > 0.0)) raise(errc::invalid_model, "interaction radius must be positive");
  if (!spec.beta_fn && !(spec.beta > 0.0) && !spec.fixed_n)
    raise(errc::invalid_model, "first-order term must be positive");

  const bool fixed_n = spec.fixed_n.has_value();
  const Window sim_window = fixed_n ? window : window.extended(spec.margin);
  const double area = sim_window.area();
  auto beta_at = [&](double px, double py) {
    return spec.beta_fn ? spec.beta_fn(px, py) : spec.beta;
  };

  CellGrid grid(sim_window, spec.radius);
  std::uniform_real_distribution<double> ux(sim_window.x0, sim_window.x1);
  std::uniform_real_distribution<double> uy(sim_window.y0, sim_window.y1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  if (fixed_n) {
    const int n = *spec.fixed_n;
    if (n < 0) raise(errc::invalid_model, "conditioned point count must be nonnegative");
    if (spec.gamma == 0.0) {
      // Sequential placement respecting the hard core; gives a legal start.
      long attempts = 0;
      const long max_attempts = 1000000L + 10000L * n;
      while (grid.size() < static_cast<std::size_t>(n)) {
        if (++attempts > max_attempts)
          raise(errc::invalid_model, "cannot place the requested number of hard core points");
        const double px = ux(rng), py = uy(rng);
        if (grid.close_count(px, py) == 0) grid.insert(px, py);
      }
    } else {
      for (int i = 0; i < n; ++i) grid.insert(ux(rng), uy(rng));
    }
  }

  for (long step = 0; step < mcmc.burn_in; ++step) {
    const std::size_t n = grid.size();
    if (fixed_n) {
      if (n == 0) break;
      const auto i = static_cast<std::size_t>(unif(rng) * static_cast<double>(n));
      const double px = ux(rng), py = uy(rng);
      const int t_new = grid.close_count(px, py, i);
      const int t_old = grid.close_count(grid.x(i), grid.y(i), i);
      // A constant first-order term cancels in displacement moves.
      const double beta_ratio =
          spec.beta_fn ? spec.beta_fn(px, py) / spec.beta_fn(grid.x(i), grid.y(i)) : 1.0;
      const double old_factor = gamma_power(spec.gamma, t_old);
      const double ratio =
          old_factor == 0.0 ? 1.0 : beta_ratio * gamma_power(spec.gamma, t_new) / old_factor;
      if (unif(rng) < ratio) grid.move(i, px, py);
      continue;
    }
    if (unif(rng) < 0.5) {
      const double px = ux(rng), py = uy(rng);
      const int t = grid.close_count(px, py);
      const double ratio =
          beta_at(px, py) * area * gamma_power(spec.gamma, t) / static_cast<double>(n + 1);
      if (unif(rng) < ratio) grid.insert(px, py);
    } else if (n > 0) {
      const auto i = static_cast<std::size_t>(unif(rng) * static_cast<double>(n));
      const int t = grid.close_count(grid.x(i), grid.y(i), i);
      const double denom = beta_at(grid.x(i), grid.y(i)) * area * gamma_power(spec.gamma, t);
      if (denom == 0.0 || unif(rng) < static_cast<double>(n) / denom) grid.erase(i);
    }
  }

  PointPattern out;
  out.window = window;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (window.contains(grid.x(i), grid.y(i))) out.push_back(grid.x(i), grid.y(i));
  return out;
}

namespace {

void add_daughters(const MatClustSpec& spec, const PointPattern& parents, const Window& window,
                   RngEngine& rng, PointPattern& out) {
  std::poisson_distribution<int> litter(spec.mean_daughters);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t p = 0; p < parents.size(); ++p) {
    const int kids = litter(rng);
    for (int d = 0; d < kids; ++d) {
      const double rad = spec.cluster_radius * std::sqrt(unif(rng));
      const double ang = 2.0 * std::numbers::pi * unif(rng);
      const double px = parents.x[p] + rad * std::cos(ang);
      const double py = parents.y[p] + rad * std::sin(ang);
      if (window.contains(px, py)) out.push_back(px, py);
    }
  }
}

void check_matclust(const MatClustSpec& spec) {
  if (!(spec.parent_intensity > 0.0) || !(spec.cluster_radius > 0.0) || !(spec.mean_daughters > 0.0))
    raise(errc::invalid_model, "cluster process parameters must be positive");
}

}  // namespace

PointPattern simulate_matern_cluster(const MatClustSpec& spec, const Window& window, RngEngine& rng) {
  check_matclust(spec);
  // Parents beyond the cluster radius cannot contribute daughters inside.
  const Window parent_window = window.extended(spec.cluster_radius);
  const PointPattern parents = simulate_poisson(spec.parent_intensity, parent_window, rng);
  PointPattern out;
  out.window = window;
  add_daughters(spec, parents, window, rng, out);
  return out;
}

PointPattern simulate_matern_cluster(const NoOMatClustSpec& spec, const Window& window, RngEngine& rng) {
  check_matclust(spec.base);
  if (!(spec.hard_core > 0.0)) raise(errc::invalid_model, "hard core distance must be positive");
  const Window parent_window = window.extended(spec.base.cluster_radius);
  StraussSpec parents_spec;
  parents_spec.beta = spec.base.parent_intensity;
  parents_spec.gamma = 0.0;
  parents_spec.radius = spec.hard_core;
  const PointPattern parents = simulate_strauss(parents_spec, parent_window, rng);
  PointPattern out;
  out.window = window;
  add_daughters(spec.base, parents, window, rng, out);
  return out;
}

PointPattern simulate_matern_cluster(const MixMatClustSpec& spec, const Window& window, RngEngine& rng) {
  PointPattern out = simulate_matern_cluster(spec.first, window, rng);
  const PointPattern second = simulate_matern_cluster(spec.second, window, rng);
  for (std::size_t i = 0; i < second.size(); ++i) out.push_back(second.x[i], second.y[i]);
  return out;
}

PointPattern simulate(const ModelSpec& spec, const Window& window, RngEngine& rng) {
  return std::visit(
      [&](const auto& s) -> PointPattern {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BinomialSpec>) return simulate_binomial(s.n, window, rng);
        else if constexpr (std::is_same_v<T, PoissonSpec>) return simulate_poisson(s.intensity, window, rng);
        else if constexpr (std::is_same_v<T, InhomPoissonSpec>)
          return simulate_poisson(s.intensity, s.max_intensity, window, rng);
        else if constexpr (std::is_same_v<T, StraussSpec>) return simulate_strauss(s, window, rng);
        else return simulate_matern_cluster(s, window, rng);
      },
      spec);
}

PointPattern permute_marks(const PointPattern& pattern, RngEngine& rng) {
  if (!pattern.marked()) raise(errc::invalid_input, "pattern carries no marks to permute");
  PointPattern out = pattern;
  std::shuffle(out.marks.begin(), out.marks.end(), rng);
  return out;
}

double matern_cluster_k(double r, const MatClustSpec& spec) {
  check_matclust(spec);
  if (r < 0.0) raise(errc::invalid_input, "distance must be nonnegative");
  const double z = r / (2.0 * spec.cluster_radius);
  double h = 1.0;
  if (z < 1.0) {
    const double s = std::sqrt(1.0 - z * z);
    h = 2.0 + ((8.0 * z * z - 4.0) * std::acos(z) - 2.0 * std::asin(z) + 4.0 * z * s * s * s -
               6.0 * z * s) /
                  std::numbers::pi;
  }
  return std::numbers::pi * r * r + h / spec.parent_intensity;
}

}  // namespace genvtest
