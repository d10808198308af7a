// Copyright (C) 2026 genvtest authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "genvtest/curves.hpp"
#include "genvtest/envelopes.hpp"
#include "genvtest/pointproc.hpp"

namespace genvtest::cli {

/// Everything a test run needs, assembled from flags and/or a config file.
struct RunConfig {
  enum class Mode { Curves, Pattern };

  Mode mode = Mode::Pattern;
  std::string input;
  std::string test = "rank";       // rank|max|max_st|max_qdir|int|int_st|int_qdir|mbd|mhrd
  std::string ties = "interval";   // interval|rankcount|randomize (rank test only)
  double alpha = 0.05;
  int nsim = 2499;
  std::optional<int> nsim_inner;   // approximation budget for adjusted rank tests
  double r_min = 0.0;
  double r_max = 0.0;
  int r_steps = 0;
  std::string model;               // e.g. csr, binomial(200), fit:matclust
  std::string summary = "L";       // L|J|Lmark
  std::uint64_t seed = 20260809;
  int workers = 1;
  std::string out_dir = ".";
  bool allow_nonconforming_alpha = false;
};

/// Text pattern format: '#' comments, one `window x0 x1 y0 y1` header line,
/// then one `x y [mark]` line per point.
PointPattern ingest_pattern(const std::string& path);
void emit_pattern(const PointPattern& pattern, const std::string& path);

/// CSV with header `r,obs,sim1,...,simS`; the first column is the grid.
FunctionalSample ingest_curves(const std::string& path);
void emit_curves(const FunctionalSample& sample, const std::string& path);

void emit_envelope_csv(const Envelope& envelope, std::span<const double> observed,
                       const std::string& path);
void emit_envelope_svg(const Envelope& envelope, std::span<const double> observed,
                       const std::string& path);

/// Executes the configured run and writes report.json (and envelope.csv /
/// envelope.svg when the test has an envelope) into out_dir. Returns 0 when
/// the run completed, regardless of the test decision; nonzero only for
/// operational errors.
int run(const RunConfig& config);

}  // namespace genvtest::cli
