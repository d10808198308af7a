// Copyright (C) 2026 genvtest authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "genvtest/cli.hpp"
#include "genvtest/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Global envelope tests for curve bundles and spatial point patterns"};
  app.set_config("--config", "", "Key-value config file; command-line flags take precedence");

  genvtest::cli::RunConfig config;
  std::string mode = "pattern";

  app.add_option("--mode", mode, "curves (test a saved curve bundle) or pattern (simulate a null model)")
      ->check(CLI::IsMember({"curves", "pattern"}))
      ->capture_default_str();
  app.add_option("--input", config.input, "Input file: point pattern or curve CSV")->required();
  app.add_option("--test", config.test,
                 "rank, max, max_st, max_qdir, int, int_st, int_qdir, mbd or mhrd")
      ->capture_default_str();
  app.add_option("--ties", config.ties, "Rank-test tie handling: interval, rankcount or randomize")
      ->capture_default_str();
  app.add_option("--alpha", config.alpha, "Significance level")->capture_default_str();
  app.add_option("--nsim", config.nsim, "Number of null simulations s")->capture_default_str();
  int nsim_inner = 0;
  auto* inner_opt = app.add_option("--nsim-inner", nsim_inner,
                                   "Inner simulation budget for the approximate adjusted rank test");
  app.add_option("--rmin", config.r_min, "Lower end of the distance interval");
  app.add_option("--rmax", config.r_max, "Upper end of the distance interval");
  app.add_option("--rsteps", config.r_steps, "Number of grid points (pattern mode)");
  app.add_option("--model", config.model,
                 "Null model, e.g. csr, binomial(200), poisson(200), strauss(350,0.4,0.03), "
                 "hardcore_fixedn(0.05), matclust(50,0.06,4), noomatclust(250,0.02,4,0.06), "
                 "mixmatclust(...), ipp_linear(5,0.5), ipp_wavy(5.2,0.5,10), permute_marks, fit:matclust");
  app.add_option("--summary", config.summary, "Summary curve: L, J or Lmark")->capture_default_str();
  app.add_option("--seed", config.seed, "Master seed (GENVTEST_SEED overrides)")->capture_default_str();
  app.add_option("--workers", config.workers, "Simulation worker threads")->capture_default_str();
  app.add_option("--out-dir", config.out_dir, "Output directory")->capture_default_str();
  app.add_flag("--allow-nonconforming-alpha", config.allow_nonconforming_alpha,
               "Run even when alpha*(s+1) is not an integer");

  CLI11_PARSE(app, argc, argv);

  config.mode = mode == "curves" ? genvtest::cli::RunConfig::Mode::Curves
                                 : genvtest::cli::RunConfig::Mode::Pattern;
  if (inner_opt->count() > 0) config.nsim_inner = nsim_inner;
  if (const char* env_seed = std::getenv("GENVTEST_SEED")) {
    try {
      config.seed = std::stoull(env_seed);
    } catch (const std::exception&) {
      std::cerr << "error: bad-format: GENVTEST_SEED is not an integer\n";
      return 2;
    }
  }

  try {
    return genvtest::cli::run(config);
  } catch (const genvtest::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 3;
  }
}
