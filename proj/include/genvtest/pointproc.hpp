// Copyright (C) 2026 genvtest authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "genvtest/rng.hpp"

namespace genvtest {

/// Axis-aligned rectangular observation window.
struct Window {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
  Window extended(double margin) const { return {x0 - margin, x1 + margin, y0 - margin, y1 + margin}; }

  bool operator==(const Window&) const = default;
};

/// Finite planar point set with optional real marks.
struct PointPattern {
  std::vector<double> x, y;
  std::vector<double> marks;  // empty when unmarked
  Window window;

  std::size_t size() const { return x.size(); }
  bool marked() const { return !marks.empty(); }
  void push_back(double px, double py) {
    x.push_back(px);
    y.push_back(py);
  }
};

/// Validates window bounds, point membership and mark length.
void validate_pattern(const PointPattern& pattern);

// --- Model specifications -------------------------------------------------

struct BinomialSpec {
  int n = 0;
};

struct PoissonSpec {
  double intensity = 0.0;
};

struct InhomPoissonSpec {
  std::function<double(double, double)> intensity;
  double max_intensity = 0.0;
};

/// Pairwise-interaction process with unnormalized density beta^n *
/// gamma^(number of point pairs closer than radius). gamma = 0 forbids
/// close pairs entirely (hard core). An inhomogeneous first-order term may
/// be supplied instead of the constant beta.
struct StraussSpec {
  double beta = 0.0;
  std::function<double(double, double)> beta_fn;  // overrides beta when set
  double gamma = 1.0;
  double radius = 0.0;
  std::optional<int> fixed_n;  // conditioned point count; displacement moves only
  double margin = 0.25;        // simulation window extension (ignored when fixed_n)
};

struct MatClustSpec {
  double parent_intensity = 0.0;
  double cluster_radius = 0.0;
  double mean_daughters = 0.0;
};

struct NoOMatClustSpec {
  MatClustSpec base;
  double hard_core = 0.0;  // minimum parent separation
};

struct MixMatClustSpec {
  MatClustSpec first, second;
};

using ModelSpec = std::variant<BinomialSpec, PoissonSpec, InhomPoissonSpec, StraussSpec, MatClustSpec,
                               NoOMatClustSpec, MixMatClustSpec>;

// --- Simulators -------------------------------------------------------------

PointPattern simulate_binomial(int n, const Window& window, RngEngine& rng);

PointPattern simulate_poisson(double intensity, const Window& window, RngEngine& rng);

/// Inhomogeneous Poisson process via thinning of a dominating homogeneous
/// proposal. `max_intensity` must bound the intensity over the window.
PointPattern simulate_poisson(const std::function<double(double, double)>& intensity,
                              double max_intensity, const Window& window, RngEngine& rng);

struct StraussMcmc {
  long burn_in = 100000;  // birth/death/move proposals before the sample is taken
};

/// Birth-death(-displacement) Metropolis-Hastings targeting the Strauss
/// density. Variable-n chains run on the window extended by spec.margin and
/// the result is clipped back; fixed-n chains run on the window itself with
/// displacement proposals only. With gamma = 0 the output never contains a
/// pair closer than the interaction radius.
PointPattern simulate_strauss(const StraussSpec& spec, const Window& window, RngEngine& rng,
                              const StraussMcmc& mcmc = {});

/// Parent-daughter cluster process: Poisson parents on the window extended
/// by the cluster radius, Poisson(mu) daughters uniform in a disc around
/// each parent, clipped to the window.
PointPattern simulate_matern_cluster(const MatClustSpec& spec, const Window& window, RngEngine& rng);

/// Matern cluster variant whose parents form a hard core process.
PointPattern simulate_matern_cluster(const NoOMatClustSpec& spec, const Window& window, RngEngine& rng);

/// Superposition of two independent Matern cluster processes.
PointPattern simulate_matern_cluster(const MixMatClustSpec& spec, const Window& window, RngEngine& rng);

PointPattern simulate(const ModelSpec& spec, const Window& window, RngEngine& rng);

/// Uniformly random permutation of the marks; locations unchanged.
PointPattern permute_marks(const PointPattern& pattern, RngEngine& rng);

/// Closed-form K-function of the Matern cluster process.
double matern_cluster_k(double r, const MatClustSpec& spec);

}  // namespace genvtest
