// Copyright (C) 2026 genvtest authors
// SPDX-License-Identifier: Apache-2.0

#include "genvtest/envelopes.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "genvtest/errors.hpp"

namespace genvtest {

namespace {
constexpr double kAlphaCountEps = 1e-9;  // absorbs float fuzz in alpha*(s+1)
}

const char* decision_name(EnvelopeDecision d) {
  switch (d) {
    case EnvelopeDecision::Reject: return "reject";
    case EnvelopeDecision::NoEvidence: return "no_evidence";
    case EnvelopeDecision::Boundary: return "boundary";
  }
  return "?";
}

bool decision_rejects(EnvelopeDecision decision, BandStrictness strictness) {
  if (strictness == BandStrictness::Liberal) return decision != EnvelopeDecision::NoEvidence;
  return decision == EnvelopeDecision::Reject;
}

Envelope kth_envelope(const FunctionalSample& sample, int k) {
  const std::size_t n = sample.num_curves();
  const std::size_t m = sample.grid_size();
  if (k < 1 || static_cast<std::size_t>(k) > n / 2)
    raise(errc::invalid_input, "envelope order k = " + std::to_string(k) +
                                   " out of range 1.." + std::to_string(n / 2));
  Envelope env{sample.grid(), std::vector<double>(m), std::vector<double>(m), {},
               EnvelopeConstruction::RankEnvelope};
  env.k = k;
  std::vector<double> column(n);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) column[i] = sample.value(i, j);
    std::nth_element(column.begin(), column.begin() + (k - 1), column.end());
    env.lower[j] = column[static_cast<std::size_t>(k - 1)];
    std::nth_element(column.begin(), column.end() - k, column.end());
    env.upper[j] = column[n - static_cast<std::size_t>(k)];
  }
  return env;
}

int critical_rank(const ExtremeRanks& ranks, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) raise(errc::invalid_input, "alpha must lie in (0, 1)");
  const double budget = alpha * static_cast<double>(ranks.size()) + kAlphaCountEps;
  int k = 1;
  for (;;) {
    std::size_t exceed = 0;
    for (int r2 : ranks.doubled) exceed += (r2 < 2 * (k + 1)) ? 1 : 0;
    if (static_cast<double>(exceed) > budget) return k;
    ++k;
  }
}

PInterval p_interval(const ExtremeRanks& ranks) {
  const int r1 = ranks.doubled.at(0);
  std::size_t below = 0, at_most = 0;
  for (int r2 : ranks.doubled) {
    below += (r2 < r1) ? 1 : 0;
    at_most += (r2 <= r1) ? 1 : 0;
  }
  const double n = static_cast<double>(ranks.size());
  return {static_cast<double>(below) / n, static_cast<double>(at_most) / n};
}

EnvelopeDecision classify(std::span<const double> observed, const Envelope& envelope) {
  if (observed.size() != envelope.grid.size())
    raise(errc::grid_mismatch, "observed curve and envelope grids differ");
  bool touched = false;
  for (std::size_t j = 0; j < observed.size(); ++j) {
    if (observed[j] < envelope.lower[j] || observed[j] > envelope.upper[j])
      return EnvelopeDecision::Reject;
    if (observed[j] == envelope.lower[j] || observed[j] == envelope.upper[j]) touched = true;
  }
  return touched ? EnvelopeDecision::Boundary : EnvelopeDecision::NoEvidence;
}

double mad_critical_value(std::span<const double> measures, double alpha) {
  const std::size_t n = measures.size();
  const double k_real = alpha * static_cast<double>(n);
  const long k = std::lround(k_real);
  if (std::abs(k_real - static_cast<double>(k)) > kAlphaCountEps || k < 1)
    raise(errc::nonconforming_alpha,
          "alpha*(s+1) = " + std::to_string(k_real) + " must be a positive integer");
  std::vector<double> sorted(measures.begin(), measures.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  return sorted[static_cast<std::size_t>(k - 1)];
}

namespace {

// Float-exact replica of the residual scaling in scaled_residual(); the
// bounds below are snapped so that "curve value outside the closed band at
// r" and "scaled absolute residual at r reaches u_alpha" are the same
// predicate down to the last bit.
double abs_residual_at(double value, std::size_t j, const DeviationSpec& spec) {
  const double raw = value - spec.expectation[j];
  double res = raw;
  if (spec.scaling == DeviationScaling::Studentized) {
    res = raw / std::sqrt(spec.variance[j]);
  } else if (spec.scaling == DeviationScaling::DirectionalQuantile) {
    const double scale = raw >= 0.0 ? std::abs(spec.upper_quantile[j] - spec.expectation[j])
                                    : std::abs(spec.lower_quantile[j] - spec.expectation[j]);
    res = raw / scale;
  }
  return std::abs(res);
}

double snap_bound(double candidate, double centre, std::size_t j, const DeviationSpec& spec,
                  double u_alpha, bool upper_side) {
  const double toward_exit = upper_side ? std::numeric_limits<double>::infinity()
                                        : -std::numeric_limits<double>::infinity();
  const double toward_centre = upper_side ? -std::numeric_limits<double>::infinity()
                                          : std::numeric_limits<double>::infinity();
  double bound = upper_side ? std::max(candidate, centre) : std::min(candidate, centre);
  int guard = 0;
  while (abs_residual_at(bound, j, spec) < u_alpha && guard++ < 256)
    bound = std::nextafter(bound, toward_exit);
  for (guard = 0; guard < 256; ++guard) {
    const double inner = std::nextafter(bound, toward_centre);
    const bool inner_valid = upper_side ? inner >= centre : inner <= centre;
    if (!inner_valid || abs_residual_at(inner, j, spec) < u_alpha) break;
    bound = inner;
  }
  return bound;
}

}  // namespace

Envelope scaled_mad_envelope(const FunctionalSample& sample, const DeviationSpec& spec, double alpha) {
  if (spec.kind != DeviationKind::Max)
    raise(errc::invalid_input, "envelopes exist only for max-type deviation measures");
  const std::vector<double> u = deviation(sample, spec);
  const double u_alpha = mad_critical_value(u, alpha);

  const std::size_t m = sample.grid_size();
  Envelope env{sample.grid(), std::vector<double>(m), std::vector<double>(m), spec.expectation,
               spec.scaling == DeviationScaling::None ? EnvelopeConstruction::ClassicalMAD
                                                      : EnvelopeConstruction::ScaledMAD};
  env.u_critical = u_alpha;
  env.scaling = spec.scaling;
  for (std::size_t j = 0; j < m; ++j) {
    double down_scale = 1.0, up_scale = 1.0;
    if (spec.scaling == DeviationScaling::Studentized)
      down_scale = up_scale = std::sqrt(spec.variance.at(j));
    else if (spec.scaling == DeviationScaling::DirectionalQuantile) {
      down_scale = std::abs(spec.lower_quantile.at(j) - spec.expectation[j]);
      up_scale = std::abs(spec.upper_quantile.at(j) - spec.expectation[j]);
    }
    // Upper bound adds the scaled critical value; a curve attains u >= u_alpha
    // exactly when it leaves the closed band somewhere.
    const double t0 = spec.expectation[j];
    env.lower[j] = snap_bound(t0 - u_alpha * down_scale, t0, j, spec, u_alpha, false);
    env.upper[j] = snap_bound(t0 + u_alpha * up_scale, t0, j, spec, u_alpha, true);
  }
  return env;
}

}  // namespace genvtest
