// Copyright (C) 2026 genvtest authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace genvtest {

// Machine-readable error codes surfaced by the CLI.
enum class errc {
  invalid_input,
  grid_mismatch,
  degenerate_scale,
  degenerate_marks,
  ties_present,
  invalid_model,
  insufficient_points,
  empty_j,
  fit_failure,
  nonconforming_alpha,
  io_error,
  bad_format,
  internal,
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace genvtest
