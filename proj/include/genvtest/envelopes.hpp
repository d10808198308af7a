// Copyright (C) 2026 genvtest authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "genvtest/curves.hpp"
#include "genvtest/measures.hpp"

namespace genvtest {

enum class EnvelopeConstruction { RankEnvelope, ScaledMAD, ClassicalMAD };

/// A band (lower, upper) on the grid, with how it was built. `central` is
/// for plotting only and may be empty.
struct Envelope {
  Grid grid;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> central;
  EnvelopeConstruction construction = EnvelopeConstruction::RankEnvelope;
  int k = 0;                                            // rank envelopes
  double u_critical = 0.0;                              // MAD envelopes
  DeviationScaling scaling = DeviationScaling::None;    // MAD envelopes
};

enum class EnvelopeDecision {
  Reject,      // strictly outside the band somewhere
  NoEvidence,  // strictly inside everywhere
  Boundary,    // touches a bound somewhere but never exits
};

const char* decision_name(EnvelopeDecision d);

/// How touching the band boundary is treated when mapping a three-way
/// decision to a binary rejection.
enum class BandStrictness {
  Liberal,       // touching the bound already rejects (exit of the open band)
  Conservative,  // only a strict exit of the closed band rejects
};

bool decision_rejects(EnvelopeDecision decision, BandStrictness strictness);

/// Pointwise k-th smallest / k-th largest of the whole bundle (observed
/// curve included). Requires 1 <= k <= floor((s+1)/2).
Envelope kth_envelope(const FunctionalSample& sample, int k);

/// Largest k whose strict-exceedance count stays within alpha*(s+1):
/// max{k : #(R_i < k) <= alpha*(s+1)}. Always >= 1.
int critical_rank(const ExtremeRanks& ranks, double alpha);

/// Liberal and conservative Monte Carlo p-values induced by extreme-rank
/// ties; the observed curve is counted on both sides.
struct PInterval {
  double lower = 0.0;  // p-
  double upper = 1.0;  // p+
};

PInterval p_interval(const ExtremeRanks& ranks);

/// Three-way geometric position of a curve relative to a band.
EnvelopeDecision classify(std::span<const double> observed, const Envelope& envelope);

/// Band whose half-width at each r is u_alpha times the local scale, where
/// u_alpha is the alpha*(s+1)-th largest deviation measure of the bundle
/// (observed included). Requires alpha*(s+1) to be a positive integer.
/// With DeviationScaling::None the band has constant width u_alpha.
Envelope scaled_mad_envelope(const FunctionalSample& sample, const DeviationSpec& spec, double alpha);

/// The alpha*(s+1)-th largest of the deviation measures.
double mad_critical_value(std::span<const double> measures, double alpha);

}  // namespace genvtest
