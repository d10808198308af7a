// Copyright (C) 2026 genvtest authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "genvtest/envelopes.hpp"
#include "genvtest/montecarlo.hpp"
#include "genvtest/pointproc.hpp"
#include "genvtest/summaries.hpp"

namespace genvtest {

/// A null model with estimated parameters: how to fit it to a pattern and
/// how to simulate from a fit.
struct FittableModel {
  std::string name;
  std::function<ModelSpec(const PointPattern&)> fit;
  std::function<PointPattern(const ModelSpec&, const Window&, RngEngine&)> simulate;
};

using SummaryFn = std::function<std::vector<double>(const PointPattern&, const Grid&)>;

/// Outcome of a size-corrected composite test. Exactly one of the rank pair
/// (k_alpha, k_alpha_star) and the deviation pair (u_alpha, u_alpha_star)
/// is populated, depending on the procedure.
struct AdjustedResult {
  double alpha = 0.05;
  double alpha_star = 0.05;
  std::optional<int> k_alpha, k_alpha_star;
  std::optional<double> u_alpha, u_alpha_star;
  std::optional<Envelope> plug_in;
  std::optional<Envelope> adjusted;
  PInterval plug_in_interval;
  double plug_in_p = 1.0;            // plug-in p (p_N for the rank path)
  EnvelopeDecision decision = EnvelopeDecision::NoEvidence;  // against the adjusted envelope
  bool reject = false;               // plug-in p <= alpha_star
  std::vector<double> observed;
  std::size_t failed_replicates = 0;
  std::size_t simulations_used = 0;  // simulator invocations, for bookkeeping
};

/// Rank-envelope test with the critical rank recalibrated against refitted
/// replicates: fit, simulate s patterns, then refit and re-simulate s times
/// for each of them; the adjusted critical rank is the largest k whose
/// strict-exceedance count among the replicate plug-in ranks stays within
/// alpha*s.
AdjustedResult adjusted_rank_envelope(const PointPattern& data, const FittableModel& model,
                                      const SummaryFn& summary, const Grid& grid, std::size_t s,
                                      double alpha, std::uint64_t seed, int workers = 1);

/// Deviation-test recalibration: the adjusted level alpha_star is the
/// empirical alpha-quantile of the replicate plug-in p-values, and the
/// adjusted band uses the alpha_star*(s+1)-th largest deviation measure.
AdjustedResult adjusted_alpha(DeviationKind kind, DeviationScaling scaling, const PointPattern& data,
                              const FittableModel& model, const SummaryFn& summary, const Grid& grid,
                              std::size_t s, double alpha, std::uint64_t seed, int workers = 1);

/// Cheap approximation of the adjusted rank envelope: replicate p-values
/// come from rank-count tests with only s2 < s inner simulations;
/// alpha_star is their empirical alpha-quantile and the adjusted critical
/// rank is read off the first-stage extreme ranks at level alpha_star.
AdjustedResult approx_adjusted_rank_envelope(const PointPattern& data, const FittableModel& model,
                                             const SummaryFn& summary, const Grid& grid, std::size_t s,
                                             std::size_t s2, double alpha, std::uint64_t seed,
                                             int workers = 1);

/// Minimum-contrast fit of the Matern cluster process: matches the
/// fourth-root of the empirical K curve against the closed-form model K
/// over the given grid; the daughter mean comes from the observed count.
MatClustSpec fit_matern_cluster(const PointPattern& pattern, const Grid& r_grid);

/// Same contrast on an externally supplied K curve; `point_count` and
/// `window_area` pin the daughter mean.
MatClustSpec fit_matern_cluster_to_k(const std::vector<double>& k_curve, const Grid& r_grid,
                                     std::size_t point_count, double window_area);

/// Ready-made fittable Matern cluster model using fit_matern_cluster.
FittableModel fittable_matern_cluster(const Grid& fit_grid);

/// Sorted-order empirical quantile used for alpha_star: the ceil(p*m)-th
/// smallest of m values.
double lower_empirical_quantile(std::vector<double> values, double p);

}  // namespace genvtest
