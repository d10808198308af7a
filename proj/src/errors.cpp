// Copyright (C) 2026 genvtest authors
// SPDX-License-Identifier: Apache-2.0

#include "genvtest/errors.hpp"

namespace genvtest {

const char* errc_name(errc code) {
  switch (code) {
    case errc::invalid_input: return "invalid-input";
    case errc::grid_mismatch: return "grid-mismatch";
    case errc::degenerate_scale: return "degenerate-scale";
    case errc::degenerate_marks: return "degenerate-marks";
    case errc::ties_present: return "ties-present";
    case errc::invalid_model: return "invalid-model";
    case errc::insufficient_points: return "insufficient-points";
    case errc::empty_j: return "empty-j";
    case errc::fit_failure: return "fit-failure";
    case errc::nonconforming_alpha: return "nonconforming-alpha";
    case errc::io_error: return "io-error";
    case errc::bad_format: return "bad-format";
    case errc::internal: return "internal";
  }
  return "unknown";
}

}  // namespace genvtest
