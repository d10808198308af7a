// Copyright (C) 2026 genvtest authors
// SPDX-License-Identifier: Apache-2.0

#include "genvtest/composite.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>

#include "genvtest/errors.hpp"
#include "genvtest/parallel.hpp"

namespace genvtest {

namespace {

constexpr double kMaxFailureFraction = 0.05;

struct FirstStage {
  ModelSpec fitted;
  std::vector<PointPattern> patterns;       // the s simulated patterns
  FunctionalSample sample;                  // observed + s curves
};

FirstStage run_first_stage(const PointPattern& data, const FittableModel& model,
                           const SummaryFn& summary, const Grid& grid, std::size_t s,
                           std::uint64_t seed, int workers, std::atomic<std::size_t>& sim_count) {
  ModelSpec fitted = model.fit(data);
  std::vector<PointPattern> patterns(s);
  std::vector<std::vector<double>> curves(s);
  parallel_for(s, workers, [&](std::size_t i) {
    RngEngine rng = make_stream(seed, i + 1);
    patterns[i] = model.simulate(fitted, data.window, rng);
    curves[i] = summary(patterns[i], grid);
  });
  sim_count += s;
  FunctionalSample sample =
      FunctionalSample::from_observed_and_simulated(grid, summary(data, grid), curves);
  return {std::move(fitted), std::move(patterns), std::move(sample)};
}

void check_failures(std::size_t failed, std::size_t total) {
  if (static_cast<double>(failed) > kMaxFailureFraction * static_cast<double>(total))
    raise(errc::fit_failure, std::to_string(failed) + " of " + std::to_string(total) +
                                 " replicate fits failed; the null model does not refit its own output");
}

std::vector<double> central_curve(const FunctionalSample& sample) {
  std::vector<double> central(sample.grid_size(), 0.0);
  for (std::size_t j = 0; j < sample.grid_size(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 1; i < sample.num_curves(); ++i) acc += sample.value(i, j);
    central[j] = acc / static_cast<double>(sample.num_curves() - 1);
  }
  return central;
}

/// Largest k with #(doubled ranks < k) <= budget; ranks that are absent
/// (failed replicates) are simply not counted.
int critical_rank_with_budget(const std::vector<int>& doubled, double budget) {
  int k = 1;
  for (;;) {
    std::size_t exceed = 0;
    for (int r2 : doubled) exceed += (r2 < 2 * (k + 1)) ? 1 : 0;
    if (static_cast<double>(exceed) > budget + 1e-9) return k;
    ++k;
  }
}

}  // namespace

double lower_empirical_quantile(std::vector<double> values, double p) {
  if (values.empty()) raise(errc::invalid_input, "quantile of empty sample");
  std::sort(values.begin(), values.end());
  const auto m = static_cast<double>(values.size());
  auto idx = static_cast<std::size_t>(std::ceil(p * m - 1e-9));
  if (idx < 1) idx = 1;
  if (idx > values.size()) idx = values.size();
  return values[idx - 1];
}

AdjustedResult adjusted_rank_envelope(const PointPattern& data, const FittableModel& model,
                                      const SummaryFn& summary, const Grid& grid, std::size_t s,
                                      double alpha, std::uint64_t seed, int workers) {
  std::atomic<std::size_t> sim_count{0};
  FirstStage stage = run_first_stage(data, model, summary, grid, s, seed, workers, sim_count);

  const RankTableau tableau = pointwise_ranks(stage.sample);
  const ExtremeRanks ranks = extreme_rank(tableau);
  const int k_alpha = critical_rank(ranks, alpha);

  // Each replicate becomes the data of its own plug-in test; its extreme
  // rank within the refitted bundle feeds the adjusted critical rank.
  std::vector<int> replicate_rank2(s, -1);
  std::atomic<std::size_t> failed{0};
  parallel_for(s, workers, [&](std::size_t i) {
    const std::uint64_t replicate_seed = derive_seed(seed, i + 1);
    try {
      const ModelSpec refit = model.fit(stage.patterns[i]);
      std::vector<std::vector<double>> inner(s);
      for (std::size_t j = 0; j < s; ++j) {
        RngEngine rng = make_stream(replicate_seed, j + 1);
        inner[j] = summary(model.simulate(refit, data.window, rng), grid);
      }
      sim_count += s;
      const FunctionalSample inner_sample = FunctionalSample::from_observed_and_simulated(
          grid, summary(stage.patterns[i], grid), inner);
      const ExtremeRanks inner_ranks = extreme_rank(pointwise_ranks(inner_sample));
      replicate_rank2[i] = inner_ranks.doubled[0];
    } catch (const Error&) {
      ++failed;
    }
  });
  check_failures(failed.load(), s);

  std::vector<int> ok_ranks;
  ok_ranks.reserve(s);
  for (int r2 : replicate_rank2)
    if (r2 >= 0) ok_ranks.push_back(r2);
  const double budget = alpha * static_cast<double>(ok_ranks.size());
  const int k_star = critical_rank_with_budget(ok_ranks, budget);

  AdjustedResult out;
  out.alpha = alpha;
  out.k_alpha = k_alpha;
  out.k_alpha_star = k_star;
  // The adjusted level is implied by the recalibrated rank; report the
  // share of replicate ranks below k_star.
  std::size_t below = 0;
  for (int r2 : ok_ranks) below += (r2 < 2 * k_star) ? 1 : 0;
  out.alpha_star = static_cast<double>(below) / static_cast<double>(ok_ranks.size());
  out.plug_in_interval = p_interval(ranks);
  out.plug_in = kth_envelope(stage.sample, k_alpha);
  out.plug_in->central = central_curve(stage.sample);

  RngEngine tie_rng = make_stream(seed, 0);
  const auto counts = rank_counts(tableau, grid);
  const auto strict = break_ties(
      counts.size(), [&](std::size_t a, std::size_t b) { return compare_rank_counts(counts[a], counts[b]); },
      tie_rng);
  out.plug_in_p = static_cast<double>(strict[0]) / static_cast<double>(stage.sample.num_curves());

  const std::size_t max_k = stage.sample.num_curves() / 2;
  const int k_draw = std::min<int>(k_star, static_cast<int>(max_k));
  out.adjusted = kth_envelope(stage.sample, k_draw);
  out.adjusted->central = out.plug_in->central;
  out.decision = classify(stage.sample.observed(), *out.adjusted);
  out.reject = out.decision == EnvelopeDecision::Reject;
  out.observed.assign(stage.sample.observed().begin(), stage.sample.observed().end());
  out.failed_replicates = failed.load();
  out.simulations_used = sim_count.load();
  return out;
}

AdjustedResult adjusted_alpha(DeviationKind kind, DeviationScaling scaling, const PointPattern& data,
                              const FittableModel& model, const SummaryFn& summary, const Grid& grid,
                              std::size_t s, double alpha, std::uint64_t seed, int workers) {
  if (kind != DeviationKind::Max)
    raise(errc::invalid_input, "adjusted envelopes need a max-type deviation measure");
  std::atomic<std::size_t> sim_count{0};
  FirstStage stage = run_first_stage(data, model, summary, grid, s, seed, workers, sim_count);

  const ReferenceCurves reference = estimate_reference(stage.sample);
  const DeviationSpec spec = make_deviation_spec(kind, scaling, reference);
  const std::vector<double> u = deviation(stage.sample, spec);
  const double p_data = monte_carlo_p(u, true);

  std::vector<double> replicate_p(s, -1.0);
  std::atomic<std::size_t> failed{0};
  parallel_for(s, workers, [&](std::size_t i) {
    const std::uint64_t replicate_seed = derive_seed(seed, i + 1);
    try {
      const ModelSpec refit = model.fit(stage.patterns[i]);
      std::vector<std::vector<double>> inner(s);
      for (std::size_t j = 0; j < s; ++j) {
        RngEngine rng = make_stream(replicate_seed, j + 1);
        inner[j] = summary(model.simulate(refit, data.window, rng), grid);
      }
      sim_count += s;
      const FunctionalSample inner_sample = FunctionalSample::from_observed_and_simulated(
          grid, summary(stage.patterns[i], grid), inner);
      const DeviationSpec inner_spec =
          make_deviation_spec(kind, scaling, estimate_reference(inner_sample));
      replicate_p[i] = monte_carlo_p(deviation(inner_sample, inner_spec), true);
    } catch (const Error&) {
      ++failed;
    }
  });
  check_failures(failed.load(), s);

  std::vector<double> ok_p;
  ok_p.reserve(s);
  for (double p : replicate_p)
    if (p >= 0.0) ok_p.push_back(p);
  const double alpha_star = lower_empirical_quantile(ok_p, alpha);

  AdjustedResult out;
  out.alpha = alpha;
  out.alpha_star = alpha_star;
  out.plug_in_p = p_data;
  out.u_alpha = mad_critical_value(u, alpha);
  out.plug_in = scaled_mad_envelope(stage.sample, spec, alpha);
  out.adjusted = scaled_mad_envelope(stage.sample, spec, alpha_star);
  out.u_alpha_star = out.adjusted->u_critical;
  out.plug_in_interval = {p_data, p_data};
  out.decision = classify(stage.sample.observed(), *out.adjusted);
  out.reject = p_data <= alpha_star;
  out.observed.assign(stage.sample.observed().begin(), stage.sample.observed().end());
  out.failed_replicates = failed.load();
  out.simulations_used = sim_count.load();
  return out;
}

AdjustedResult approx_adjusted_rank_envelope(const PointPattern& data, const FittableModel& model,
                                             const SummaryFn& summary, const Grid& grid, std::size_t s,
                                             std::size_t s2, double alpha, std::uint64_t seed,
                                             int workers) {
  if (s2 >= s) raise(errc::invalid_input, "inner simulation count must be below s");
  std::atomic<std::size_t> sim_count{0};
  FirstStage stage = run_first_stage(data, model, summary, grid, s, seed, workers, sim_count);

  const RankTableau tableau = pointwise_ranks(stage.sample);
  const ExtremeRanks ranks = extreme_rank(tableau);
  const int k_alpha = critical_rank(ranks, alpha);

  std::vector<double> replicate_p(s, -1.0);
  std::atomic<std::size_t> failed{0};
  parallel_for(s, workers, [&](std::size_t i) {
    const std::uint64_t replicate_seed = derive_seed(seed, i + 1);
    try {
      const ModelSpec refit = model.fit(stage.patterns[i]);
      std::vector<std::vector<double>> inner(s2);
      for (std::size_t j = 0; j < s2; ++j) {
        RngEngine rng = make_stream(replicate_seed, j + 1);
        inner[j] = summary(model.simulate(refit, data.window, rng), grid);
      }
      sim_count += s2;
      const FunctionalSample inner_sample = FunctionalSample::from_observed_and_simulated(
          grid, summary(stage.patterns[i], grid), inner);
      const auto inner_counts = rank_counts(pointwise_ranks(inner_sample), grid);
      RngEngine tie_rng = make_stream(replicate_seed, 0);
      const auto strict = break_ties(
          inner_counts.size(),
          [&](std::size_t a, std::size_t b) { return compare_rank_counts(inner_counts[a], inner_counts[b]); },
          tie_rng);
      replicate_p[i] = static_cast<double>(strict[0]) / static_cast<double>(inner_counts.size());
    } catch (const Error&) {
      ++failed;
    }
  });
  check_failures(failed.load(), s);

  std::vector<double> ok_p;
  ok_p.reserve(s);
  for (double p : replicate_p)
    if (p >= 0.0) ok_p.push_back(p);
  const double alpha_star = lower_empirical_quantile(ok_p, alpha);
  const int k_star = critical_rank(ranks, std::min(alpha_star, 0.999999));

  AdjustedResult out;
  out.alpha = alpha;
  out.alpha_star = alpha_star;
  out.k_alpha = k_alpha;
  out.k_alpha_star = k_star;
  out.plug_in_interval = p_interval(ranks);
  out.plug_in = kth_envelope(stage.sample, k_alpha);
  out.plug_in->central = central_curve(stage.sample);

  RngEngine tie_rng = make_stream(seed, 0);
  const auto counts = rank_counts(tableau, grid);
  const auto strict = break_ties(
      counts.size(), [&](std::size_t a, std::size_t b) { return compare_rank_counts(counts[a], counts[b]); },
      tie_rng);
  out.plug_in_p = static_cast<double>(strict[0]) / static_cast<double>(stage.sample.num_curves());

  const std::size_t max_k = stage.sample.num_curves() / 2;
  const int k_draw = std::min<int>(k_star, static_cast<int>(max_k));
  out.adjusted = kth_envelope(stage.sample, k_draw);
  out.adjusted->central = out.plug_in->central;
  out.decision = classify(stage.sample.observed(), *out.adjusted);
  out.reject = out.plug_in_p <= alpha_star;
  out.observed.assign(stage.sample.observed().begin(), stage.sample.observed().end());
  out.failed_replicates = failed.load();
  out.simulations_used = sim_count.load();
  return out;
}

namespace {

double matern_contrast(const std::vector<double>& k_hat, const Grid& grid, const MatClustSpec& spec) {
  const std::vector<double> w = grid.trapezoid_weights();
  double acc = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double diff = std::pow(k_hat[j], 0.25) - std::pow(matern_cluster_k(grid[j], spec), 0.25);
    acc += w[j] * diff * diff;
  }
  return acc;
}

// Nelder-Mead on (log parent intensity, log cluster radius).
struct Simplex2 {
  std::array<std::array<double, 2>, 3> x;
  std::array<double, 3> f;
};

}  // namespace

MatClustSpec fit_matern_cluster(const PointPattern& pattern, const Grid& r_grid) {
  const std::size_t n = pattern.size();
  if (n < 10) raise(errc::insufficient_points, "cluster fitting needs at least ten points");
  return fit_matern_cluster_to_k(ripley_k(pattern, r_grid), r_grid, n, pattern.window.area());
}

MatClustSpec fit_matern_cluster_to_k(const std::vector<double>& k_hat, const Grid& r_grid,
                                     std::size_t n, double area) {
  if (k_hat.size() != r_grid.size()) raise(errc::grid_mismatch, "K curve does not match the grid");

  auto objective = [&](double log_lambda, double log_radius) {
    MatClustSpec trial{std::exp(log_lambda), std::exp(log_radius), 1.0};
    trial.mean_daughters = static_cast<double>(n) / (trial.parent_intensity * area);
    return matern_contrast(k_hat, r_grid, trial);
  };

  // Coarse grid start, then a Nelder-Mead refinement in log space.
  const double r_hi = r_grid[r_grid.size() - 1];
  double best_ll = std::log(static_cast<double>(n) / (4.0 * area));
  double best_lr = std::log(std::max(r_hi / 4.0, 1e-6));
  double best_f = std::numeric_limits<double>::infinity();
  for (double mu : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
    for (double frac : {0.05, 0.1, 0.2, 0.35, 0.5, 0.8}) {
      const double ll = std::log(static_cast<double>(n) / (mu * area));
      const double lr = std::log(std::max(frac * r_hi, 1e-8));
      const double f = objective(ll, lr);
      if (std::isfinite(f) && f < best_f) {
        best_f = f;
        best_ll = ll;
        best_lr = lr;
      }
    }
  }
  if (!std::isfinite(best_f)) raise(errc::fit_failure, "contrast is non-finite for every start");

  Simplex2 sp;
  sp.x = {{{best_ll, best_lr}, {best_ll + 0.4, best_lr}, {best_ll, best_lr + 0.4}}};
  for (int i = 0; i < 3; ++i) sp.f[i] = objective(sp.x[i][0], sp.x[i][1]);

  for (int iter = 0; iter < 400; ++iter) {
    std::array<int, 3> ord{0, 1, 2};
    std::sort(ord.begin(), ord.end(), [&](int a, int b) { return sp.f[a] < sp.f[b]; });
    const auto& best = sp.x[ord[0]];
    auto& worst = sp.x[ord[2]];
    if (std::abs(sp.f[ord[2]] - sp.f[ord[0]]) <= 1e-12 * (1.0 + std::abs(sp.f[ord[0]]))) break;

    const std::array<double, 2> centroid{(sp.x[ord[0]][0] + sp.x[ord[1]][0]) / 2.0,
                                         (sp.x[ord[0]][1] + sp.x[ord[1]][1]) / 2.0};
    auto eval_at = [&](double t) {
      return std::array<double, 2>{centroid[0] + t * (centroid[0] - worst[0]),
                                   centroid[1] + t * (centroid[1] - worst[1])};
    };
    const auto refl = eval_at(1.0);
    const double f_refl = objective(refl[0], refl[1]);
    if (f_refl < sp.f[ord[0]]) {
      const auto exp_pt = eval_at(2.0);
      const double f_exp = objective(exp_pt[0], exp_pt[1]);
      if (f_exp < f_refl) {
        worst = exp_pt;
        sp.f[ord[2]] = f_exp;
      } else {
        worst = refl;
        sp.f[ord[2]] = f_refl;
      }
    } else if (f_refl < sp.f[ord[1]]) {
      worst = refl;
      sp.f[ord[2]] = f_refl;
    } else {
      const auto contr = eval_at(-0.5);
      const double f_contr = objective(contr[0], contr[1]);
      if (f_contr < sp.f[ord[2]]) {
        worst = contr;
        sp.f[ord[2]] = f_contr;
      } else {
        for (int i : {ord[1], ord[2]}) {
          sp.x[i][0] = 0.5 * (sp.x[i][0] + best[0]);
          sp.x[i][1] = 0.5 * (sp.x[i][1] + best[1]);
          sp.f[i] = objective(sp.x[i][0], sp.x[i][1]);
        }
      }
    }
  }

  int best_i = 0;
  for (int i = 1; i < 3; ++i)
    if (sp.f[i] < sp.f[best_i]) best_i = i;
  if (!std::isfinite(sp.f[best_i])) raise(errc::fit_failure, "contrast minimization diverged");

  MatClustSpec fitted{std::exp(sp.x[best_i][0]), std::exp(sp.x[best_i][1]), 1.0};
  fitted.mean_daughters = static_cast<double>(n) / (fitted.parent_intensity * area);
  return fitted;
}

FittableModel fittable_matern_cluster(const Grid& fit_grid) {
  FittableModel model;
  model.name = "matclust";
  model.fit = [fit_grid](const PointPattern& pattern) -> ModelSpec {
    return fit_matern_cluster(pattern, fit_grid);
  };
  model.simulate = [](const ModelSpec& spec, const Window& window, RngEngine& rng) {
    return simulate(spec, window, rng);
  };
  return model;
}

}  // namespace genvtest
