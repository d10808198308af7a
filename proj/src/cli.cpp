// Copyright (C) 2026 genvtest authors
// SPDX-License-Identifier: Apache-2.0

#include "genvtest/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "genvtest/composite.hpp"
#include "genvtest/errors.hpp"
#include "genvtest/montecarlo.hpp"
#include "genvtest/summaries.hpp"

namespace genvtest::cli {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double parse_double(const std::string& token, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) raise(errc::bad_format, "trailing characters in number at " + where);
    return v;
  } catch (const std::invalid_argument&) {
    raise(errc::bad_format, "expected a number at " + where + ", got '" + token + "'");
  } catch (const std::out_of_range&) {
    raise(errc::bad_format, "number out of range at " + where);
  }
}

}  // namespace

PointPattern ingest_pattern(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(errc::io_error, "cannot open " + path);
  PointPattern pattern;
  bool have_window = false;
  bool have_marks = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    const std::string where = path + ":" + std::to_string(line_no);
    if (!have_window) {
      std::string keyword;
      ss >> keyword;
      if (keyword != "window") raise(errc::bad_format, "expected 'window x0 x1 y0 y1' at " + where);
      if (!(ss >> pattern.window.x0 >> pattern.window.x1 >> pattern.window.y0 >> pattern.window.y1))
        raise(errc::bad_format, "malformed window line at " + where);
      if (!(pattern.window.x1 > pattern.window.x0) || !(pattern.window.y1 > pattern.window.y0))
        raise(errc::bad_format, "window must have positive extent at " + where);
      have_window = true;
      continue;
    }
    double x, y;
    if (!(ss >> x >> y)) raise(errc::bad_format, "malformed point line at " + where);
    double mark;
    const bool has_mark = static_cast<bool>(ss >> mark);
    std::string rest;
    if (ss >> rest) raise(errc::bad_format, "trailing tokens at " + where);
    if (pattern.size() == 0) {
      have_marks = has_mark;
    } else if (has_mark != have_marks) {
      raise(errc::bad_format, "inconsistent mark column at " + where);
    }
    if (!pattern.window.contains(x, y)) raise(errc::bad_format, "point outside window at " + where);
    pattern.push_back(x, y);
    if (has_mark) pattern.marks.push_back(mark);
  }
  if (!have_window) raise(errc::bad_format, "missing window line in " + path);
  validate_pattern(pattern);
  return pattern;
}

void emit_pattern(const PointPattern& pattern, const std::string& path) {
  std::ofstream out(path);
  if (!out) raise(errc::io_error, "cannot write " + path);
  out.precision(17);
  out << "window " << pattern.window.x0 << ' ' << pattern.window.x1 << ' ' << pattern.window.y0 << ' '
      << pattern.window.y1 << '\n';
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    out << pattern.x[i] << ' ' << pattern.y[i];
    if (pattern.marked()) out << ' ' << pattern.marks[i];
    out << '\n';
  }
}

FunctionalSample ingest_curves(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(errc::io_error, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) raise(errc::bad_format, "empty curve file " + path);
  const auto header = split(line, ',');
  if (header.size() < 3 || header[0] != "r" || header[1] != "obs")
    raise(errc::bad_format, "curve file header must be r,obs,sim1,... in " + path);
  const std::size_t columns = header.size();

  std::vector<double> r;
  std::vector<std::vector<double>> rows(columns - 1);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line, ',');
    const std::string where = path + ":" + std::to_string(line_no);
    if (cells.size() != columns) raise(errc::bad_format, "ragged row at " + where);
    r.push_back(parse_double(cells[0], where));
    for (std::size_t c = 1; c < columns; ++c) rows[c - 1].push_back(parse_double(cells[c], where));
  }
  Grid grid(std::move(r));
  Matrix<double> curves(columns - 1, grid.size());
  for (std::size_t i = 0; i + 1 < columns; ++i)
    std::copy(rows[i].begin(), rows[i].end(), curves.row(i).begin());
  return FunctionalSample(std::move(grid), std::move(curves));
}

void emit_curves(const FunctionalSample& sample, const std::string& path) {
  std::ofstream out(path);
  if (!out) raise(errc::io_error, "cannot write " + path);
  out.precision(17);
  out << "r,obs";
  for (std::size_t i = 1; i < sample.num_curves(); ++i) out << ",sim" << i;
  out << '\n';
  for (std::size_t j = 0; j < sample.grid_size(); ++j) {
    out << sample.grid()[j];
    for (std::size_t i = 0; i < sample.num_curves(); ++i) out << ',' << sample.value(i, j);
    out << '\n';
  }
}

void emit_envelope_csv(const Envelope& envelope, std::span<const double> observed,
                       const std::string& path) {
  if (observed.size() != envelope.grid.size())
    raise(errc::grid_mismatch, "observed curve does not match envelope grid");
  std::ofstream out(path);
  if (!out) raise(errc::io_error, "cannot write " + path);
  out.precision(17);
  out << "r,lower,central,upper,observed\n";
  for (std::size_t j = 0; j < envelope.grid.size(); ++j) {
    const double central = envelope.central.empty() ? 0.5 * (envelope.lower[j] + envelope.upper[j])
                                                    : envelope.central[j];
    out << envelope.grid[j] << ',' << envelope.lower[j] << ',' << central << ',' << envelope.upper[j]
        << ',' << observed[j] << '\n';
  }
}

namespace {

std::string svg_path(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::ostringstream ss;
  ss.precision(2);
  ss << std::fixed;
  for (std::size_t i = 0; i < xs.size(); ++i) ss << (i == 0 ? "M" : " L") << xs[i] << ' ' << ys[i];
  return ss.str();
}

}  // namespace

void emit_envelope_svg(const Envelope& envelope, std::span<const double> observed,
                       const std::string& path) {
  const std::size_t m = envelope.grid.size();
  if (observed.size() != m) raise(errc::grid_mismatch, "observed curve does not match envelope grid");

  const double width = 640, height = 420;
  const double left = 60, right = 610, top = 20, bottom = 380;
  const double r0 = envelope.grid[0], r1 = envelope.grid[m - 1];
  double y_min = observed[0], y_max = observed[0];
  auto widen = [&](const std::vector<double>& v) {
    for (double t : v) {
      y_min = std::min(y_min, t);
      y_max = std::max(y_max, t);
    }
  };
  widen(envelope.lower);
  widen(envelope.upper);
  if (!envelope.central.empty()) widen(envelope.central);
  for (double t : observed) {
    y_min = std::min(y_min, t);
    y_max = std::max(y_max, t);
  }
  if (y_max == y_min) y_max = y_min + 1.0;
  const double pad = 0.05 * (y_max - y_min);
  y_min -= pad;
  y_max += pad;

  auto sx = [&](double r) { return r1 == r0 ? left : left + (r - r0) / (r1 - r0) * (right - left); };
  auto sy = [&](double v) { return bottom - (v - y_min) / (y_max - y_min) * (bottom - top); };

  std::vector<double> px(m), band_x, band_y;
  for (std::size_t j = 0; j < m; ++j) px[j] = sx(envelope.grid[j]);
  for (std::size_t j = 0; j < m; ++j) {
    band_x.push_back(px[j]);
    band_y.push_back(sy(envelope.upper[j]));
  }
  for (std::size_t j = m; j-- > 0;) {
    band_x.push_back(px[j]);
    band_y.push_back(sy(envelope.lower[j]));
  }

  std::ofstream out(path);
  if (!out) raise(errc::io_error, "cannot write " + path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "  <rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << right - left << "\" height=\""
      << bottom - top << "\" fill=\"white\" stroke=\"black\"/>\n";
  out << "  <path d=\"" << svg_path(band_x, band_y) << " Z\" fill=\"#c8c8c8\" stroke=\"none\"/>\n";
  if (!envelope.central.empty()) {
    std::vector<double> cy(m);
    for (std::size_t j = 0; j < m; ++j) cy[j] = sy(envelope.central[j]);
    out << "  <path d=\"" << svg_path(px, cy)
        << "\" fill=\"none\" stroke=\"black\" stroke-dasharray=\"6 4\"/>\n";
  }
  std::vector<double> oy(m);
  for (std::size_t j = 0; j < m; ++j) oy[j] = sy(observed[j]);
  out << "  <path d=\"" << svg_path(px, oy) << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";

  out.precision(4);
  for (int t = 0; t <= 4; ++t) {
    const double r = r0 + (r1 - r0) * t / 4.0;
    const double v = y_min + (y_max - y_min) * t / 4.0;
    out << "  <line x1=\"" << sx(r) << "\" y1=\"" << bottom << "\" x2=\"" << sx(r) << "\" y2=\""
        << bottom + 5 << "\" stroke=\"black\"/>\n";
    out << "  <text x=\"" << sx(r) << "\" y=\"" << bottom + 18
        << "\" font-size=\"11\" text-anchor=\"middle\">" << r << "</text>\n";
    out << "  <line x1=\"" << left - 5 << "\" y1=\"" << sy(v) << "\" x2=\"" << left << "\" y2=\"" << sy(v)
        << "\" stroke=\"black\"/>\n";
    out << "  <text x=\"" << left - 8 << "\" y=\"" << sy(v) + 4
        << "\" font-size=\"11\" text-anchor=\"end\">" << v << "</text>\n";
  }
  out << "  <text x=\"" << (left + right) / 2 << "\" y=\"" << height - 8
      << "\" font-size=\"12\" text-anchor=\"middle\">r</text>\n";
  out << "</svg>\n";
}

namespace {

struct ParsedModel {
  std::string name;
  std::vector<double> params;
};

ParsedModel parse_model_string(const std::string& text) {
  ParsedModel out;
  const auto open = text.find('(');
  if (open == std::string::npos) {
    out.name = text;
    return out;
  }
  if (text.back() != ')') raise(errc::bad_format, "unbalanced parentheses in model '" + text + "'");
  out.name = text.substr(0, open);
  const std::string args = text.substr(open + 1, text.size() - open - 2);
  if (!args.empty())
    for (const auto& token : split(args, ','))
      out.params.push_back(parse_double(token, "model '" + text + "'"));
  return out;
}

void need_params(const ParsedModel& m, std::size_t count) {
  if (m.params.size() != count)
    raise(errc::bad_format, "model '" + m.name + "' expects " + std::to_string(count) + " parameters");
}

/// Null models addressable from the command line. `csr` conditions on the
/// observed point count; `permute_marks` reshuffles the data marks.
ModelSpec make_model_spec(const ParsedModel& m, const PointPattern& data) {
  if (m.name == "csr") {
    need_params(m, 0);
    return BinomialSpec{static_cast<int>(data.size())};
  }
  if (m.name == "binomial") {
    need_params(m, 1);
    return BinomialSpec{static_cast<int>(m.params[0])};
  }
  if (m.name == "poisson") {
    need_params(m, 1);
    return PoissonSpec{m.params[0]};
  }
  if (m.name == "ipp_linear") {
    need_params(m, 2);
    const double a = m.params[0], b = m.params[1];
    InhomPoissonSpec spec;
    spec.intensity = [a, b](double x, double y) { return std::exp(a + b * (x + y)); };
    const Window& w = data.window;
    const double cx = b >= 0 ? w.x1 : w.x0, cy = b >= 0 ? w.y1 : w.y0;
    spec.max_intensity = std::exp(a + b * (cx + cy));
    return spec;
  }
  if (m.name == "ipp_wavy") {
    need_params(m, 3);
    const double a = m.params[0], b = m.params[1], c = m.params[2];
    InhomPoissonSpec spec;
    spec.intensity = [a, b, c](double x, double y) {
      return std::exp(a + b * (std::sin(c * x) + std::sin(c * y)));
    };
    spec.max_intensity = std::exp(a + 2.0 * std::abs(b));
    return spec;
  }
  if (m.name == "strauss") {
    need_params(m, 3);
    StraussSpec spec;
    spec.beta = m.params[0];
    spec.gamma = m.params[1];
    spec.radius = m.params[2];
    return spec;
  }
  if (m.name == "hardcore_fixedn") {
    need_params(m, 1);
    StraussSpec spec;
    spec.gamma = 0.0;
    spec.radius = m.params[0];
    spec.fixed_n = static_cast<int>(data.size());
    return spec;
  }
  if (m.name == "matclust") {
    need_params(m, 3);
    return MatClustSpec{m.params[0], m.params[1], m.params[2]};
  }
  if (m.name == "noomatclust") {
    need_params(m, 4);
    return NoOMatClustSpec{{m.params[0], m.params[1], m.params[2]}, m.params[3]};
  }
  if (m.name == "mixmatclust") {
    need_params(m, 6);
    return MixMatClustSpec{{m.params[0], m.params[1], m.params[2]},
                           {m.params[3], m.params[4], m.params[5]}};
  }
  raise(errc::bad_format, "unknown model '" + m.name + "'");
}

struct TestSelection {
  Ordering ordering;
  DeviationKind kind = DeviationKind::Max;
  DeviationScaling scaling = DeviationScaling::None;
  bool has_envelope = false;
};

TestSelection select_test(const std::string& name) {
  if (name == "rank") return {Ordering::ExtremeRank, {}, {}, true};
  if (name == "max") return {Ordering::Deviation, DeviationKind::Max, DeviationScaling::None, true};
  if (name == "max_st")
    return {Ordering::Deviation, DeviationKind::Max, DeviationScaling::Studentized, true};
  if (name == "max_qdir")
    return {Ordering::Deviation, DeviationKind::Max, DeviationScaling::DirectionalQuantile, true};
  if (name == "int") return {Ordering::Deviation, DeviationKind::Integral, DeviationScaling::None, false};
  if (name == "int_st")
    return {Ordering::Deviation, DeviationKind::Integral, DeviationScaling::Studentized, false};
  if (name == "int_qdir")
    return {Ordering::Deviation, DeviationKind::Integral, DeviationScaling::DirectionalQuantile, false};
  if (name == "mbd") return {Ordering::Mbd, {}, {}, false};
  if (name == "mhrd") return {Ordering::Mhrd, {}, {}, false};
  raise(errc::bad_format, "unknown test '" + name + "'");
}

TieStrategy select_ties(const std::string& name) {
  if (name == "interval") return TieStrategy::Interval;
  if (name == "rankcount") return TieStrategy::RankCount;
  if (name == "randomize") return TieStrategy::Randomize;
  raise(errc::bad_format, "unknown tie strategy '" + name + "'");
}

SummaryFn select_summary(const std::string& name) {
  if (name == "L")
    return [](const PointPattern& p, const Grid& g) { return centred_l(p, g); };
  if (name == "J")
    return [](const PointPattern& p, const Grid& g) { return estimate_f_g_j(p, g).j; };
  if (name == "Lmark")
    return [](const PointPattern& p, const Grid& g) { return mark_weighted_centred_l(p, g); };
  raise(errc::bad_format, "unknown summary '" + name + "'");
}

/// Drops the grid tail where any curve is undefined (the J statistic stops
/// being defined once the empty-space estimate reaches 1).
FunctionalSample assemble_trimmed(const Grid& grid, const std::vector<double>& observed,
                                  const std::vector<std::vector<double>>& simulated) {
  std::size_t keep = grid.size();
  auto first_bad = [&](const std::vector<double>& curve) {
    for (std::size_t j = 0; j < curve.size(); ++j)
      if (!std::isfinite(curve[j])) return j;
    return curve.size();
  };
  keep = std::min(keep, first_bad(observed));
  for (const auto& c : simulated) keep = std::min(keep, first_bad(c));
  if (keep == 0) raise(errc::empty_j, "summary undefined at the first grid point for some curve");
  if (keep == grid.size())
    return FunctionalSample::from_observed_and_simulated(grid, observed, simulated);
  std::vector<double> sub_r(grid.values().begin(), grid.values().begin() + static_cast<long>(keep));
  Grid sub(std::move(sub_r));
  std::vector<std::vector<double>> sims;
  sims.reserve(simulated.size());
  for (const auto& c : simulated) sims.emplace_back(c.begin(), c.begin() + static_cast<long>(keep));
  const std::vector<double> obs(observed.begin(), observed.begin() + static_cast<long>(keep));
  return FunctionalSample::from_observed_and_simulated(std::move(sub), obs, sims);
}

nlohmann::json report_to_json(const TestReport& report, const RunConfig& config) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["mode"] = config.mode == RunConfig::Mode::Curves ? "curves" : "pattern";
  j["test"] = config.test;
  j["alpha"] = report.alpha;
  j["s"] = report.s;
  j["seed"] = report.seed;
  j["reject"] = report.reject;
  if (report.p) j["p"] = *report.p;
  if (report.interval) {
    j["p_minus"] = report.interval->lower;
    j["p_plus"] = report.interval->upper;
  }
  if (report.p_rank_count) j["p_rank_count"] = *report.p_rank_count;
  if (report.k_alpha) j["k_alpha"] = *report.k_alpha;
  if (report.u_alpha) j["u_alpha"] = *report.u_alpha;
  j["decision"] = report.decision ? decision_name(*report.decision) : (report.reject ? "reject" : "no_evidence");
  j["has_envelope"] = report.envelope.has_value();
  j["warnings"] = report.warnings;
  return j;
}

nlohmann::json adjusted_to_json(const AdjustedResult& result, const RunConfig& config) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["mode"] = "pattern";
  j["test"] = config.test;
  j["model"] = config.model;
  j["alpha"] = result.alpha;
  j["alpha_star"] = result.alpha_star;
  j["s"] = config.nsim;
  if (config.nsim_inner) j["s_inner"] = *config.nsim_inner;
  j["seed"] = config.seed;
  j["p"] = result.plug_in_p;
  j["p_minus"] = result.plug_in_interval.lower;
  j["p_plus"] = result.plug_in_interval.upper;
  if (result.k_alpha) j["k_alpha"] = *result.k_alpha;
  if (result.k_alpha_star) j["k_alpha_star"] = *result.k_alpha_star;
  if (result.u_alpha) j["u_alpha"] = *result.u_alpha;
  if (result.u_alpha_star) j["u_alpha_star"] = *result.u_alpha_star;
  j["decision"] = decision_name(result.decision);
  j["reject"] = result.reject;
  j["failed_replicates"] = result.failed_replicates;
  j["has_envelope"] = true;
  j["warnings"] = nlohmann::json::array();
  return j;
}

void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) raise(errc::io_error, "cannot write " + path);
  out << j.dump(2) << '\n';
}

int run_composite(const RunConfig& config, const PointPattern& data, const Grid& grid,
                  const TestSelection& selection, const std::filesystem::path& out_dir,
                  std::chrono::steady_clock::time_point started) {
  const std::string fit_name = config.model.substr(4);
  if (fit_name != "matclust") raise(errc::bad_format, "unknown fittable model '" + fit_name + "'");
  const FittableModel model = fittable_matern_cluster(grid);
  const SummaryFn summary = select_summary(config.summary);
  const auto s = static_cast<std::size_t>(config.nsim);

  AdjustedResult result;
  if (selection.ordering == Ordering::ExtremeRank) {
    if (config.nsim_inner)
      result = approx_adjusted_rank_envelope(data, model, summary, grid, s,
                                             static_cast<std::size_t>(*config.nsim_inner), config.alpha,
                                             config.seed, config.workers);
    else
      result = adjusted_rank_envelope(data, model, summary, grid, s, config.alpha, config.seed,
                                      config.workers);
  } else if (selection.ordering == Ordering::Deviation && selection.kind == DeviationKind::Max) {
    result = adjusted_alpha(selection.kind, selection.scaling, data, model, summary, grid, s,
                            config.alpha, config.seed, config.workers);
  } else {
    raise(errc::invalid_input, "adjusted tests support the rank and max-type deviation orderings");
  }

  nlohmann::json j = adjusted_to_json(result, config);
  j["timing_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_json(j, (out_dir / "report.json").string());
  emit_envelope_csv(*result.adjusted, result.observed, (out_dir / "envelope.csv").string());
  emit_envelope_svg(*result.adjusted, result.observed, (out_dir / "envelope.svg").string());
  return 0;
}

}  // namespace

namespace {

void check_alpha_conformance(const RunConfig& config, std::size_t s) {
  const double k_real = config.alpha * static_cast<double>(s + 1);
  if (std::abs(k_real - std::round(k_real)) > 1e-9 && !config.allow_nonconforming_alpha)
    raise(errc::nonconforming_alpha,
          "alpha*(s+1) = " + std::to_string(k_real) +
              " is not an integer; pass --allow-nonconforming-alpha to proceed");
}

}  // namespace

int run(const RunConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  const std::filesystem::path out_dir(config.out_dir);
  std::filesystem::create_directories(out_dir);

  const TestSelection selection = select_test(config.test);
  if (config.nsim < 1) raise(errc::invalid_input, "nsim must be positive");

  TestConfig test_config;
  test_config.ordering = selection.ordering;
  test_config.ties = select_ties(config.ties);
  test_config.deviation_kind = selection.kind;
  test_config.deviation_scaling = selection.scaling;
  test_config.alpha = config.alpha;
  test_config.seed = config.seed;
  test_config.workers = config.workers;

  TestReport report;
  if (config.mode == RunConfig::Mode::Curves) {
    FunctionalSample sample = ingest_curves(config.input);
    check_alpha_conformance(config, sample.s());
    if (config.r_max > config.r_min && config.r_min >= 0.0 &&
        (config.r_min > sample.grid()[0] || config.r_max < sample.grid()[sample.grid_size() - 1])) {
      // Restrict to the requested distance interval.
      std::vector<double> sub_r;
      std::vector<std::size_t> keep;
      for (std::size_t j = 0; j < sample.grid_size(); ++j)
        if (sample.grid()[j] >= config.r_min && sample.grid()[j] <= config.r_max) {
          sub_r.push_back(sample.grid()[j]);
          keep.push_back(j);
        }
      if (sub_r.empty()) raise(errc::invalid_input, "no grid points inside [rmin, rmax]");
      Matrix<double> curves(sample.num_curves(), sub_r.size());
      for (std::size_t i = 0; i < sample.num_curves(); ++i)
        for (std::size_t j = 0; j < keep.size(); ++j) curves(i, j) = sample.value(i, keep[j]);
      sample = FunctionalSample(Grid(std::move(sub_r)), std::move(curves));
    }
    report = global_envelope_test(sample, test_config);
  } else {
    if (config.r_steps < 1 || !(config.r_max > config.r_min))
      raise(errc::invalid_input, "pattern mode needs --rmin < --rmax and --rsteps >= 1");
    check_alpha_conformance(config, static_cast<std::size_t>(config.nsim));
    const Grid grid = Grid::regular(config.r_min, config.r_max, static_cast<std::size_t>(config.r_steps));
    const PointPattern data = ingest_pattern(config.input);
    if (config.model.empty()) raise(errc::invalid_input, "pattern mode needs --model");

    if (config.model.rfind("fit:", 0) == 0)
      return run_composite(config, data, grid, selection, out_dir, started);

    const SummaryFn summary = select_summary(config.summary);
    const std::vector<double> observed = summary(data, grid);
    const auto s = static_cast<std::size_t>(config.nsim);

    std::vector<std::vector<double>> simulated;
    if (config.model == "permute_marks") {
      simulated = simulate_curves(
          [&](std::size_t, RngEngine& rng) { return summary(permute_marks(data, rng), grid); }, s,
          config.seed, config.workers);
    } else {
      const ModelSpec spec = make_model_spec(parse_model_string(config.model), data);
      simulated = simulate_curves(
          [&](std::size_t, RngEngine& rng) { return summary(simulate(spec, data.window, rng), grid); },
          s, config.seed, config.workers);
    }
    const FunctionalSample sample = assemble_trimmed(grid, observed, simulated);
    report = global_envelope_test(sample, test_config);
  }

  nlohmann::json j = report_to_json(report, config);
  j["timing_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_json(j, (out_dir / "report.json").string());
  if (report.envelope) {
    emit_envelope_csv(*report.envelope, report.observed, (out_dir / "envelope.csv").string());
    emit_envelope_svg(*report.envelope, report.observed, (out_dir / "envelope.svg").string());
  }
  return 0;
}

}  // namespace genvtest::cli
