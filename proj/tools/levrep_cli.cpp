// levrep: ensemble level statistics for integrable billiards.
//
//   levrep spacing  --out DIR [ensemble flags] [--bin --smax --s --fit-lo --fit-hi --no-fit]
//   levrep sweep    --out DIR [ensemble flags] --energies LIST [--s --no-fit]
//   levrep variance --out DIR [ensemble flags] [--L LIST --no-overlay --overlay-nodes --tail-tol]
//   levrep kernel   --out DIR [ensemble flags] [--omega LIST --bin --kepler-terms]
//   levrep fit      --out DIR (--histogram CSV [--fit-lo --fit-hi] | --sweep CSV --s S)
//
// Every run writes manifest.txt next to its outputs. Passing a manifest back
// through --config reproduces the run; flags given on the command line win.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "levrep/ensemble.hpp"
#include "levrep/fit.hpp"
#include "levrep/io.hpp"
#include "levrep/models.hpp"
#include "levrep/pipeline.hpp"
#include "levrep/stats.hpp"

namespace fs = std::filesystem;
using namespace levrep;

namespace {

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct ParamFlags {
  std::optional<double> mean, spread, lower, upper;
  bool any() const { return mean || spread || lower || upper; }
};

struct CommonFlags {
  std::string system = "rect";
  std::optional<double> energy, window;
  std::optional<std::uint64_t> members, seed;
  ParamFlags alpha, beta, param;
  std::optional<std::string> spread_kind;
  std::string out;
  unsigned threads = 0;
  std::string config_file;
  bool quiet = false;
};

void add_param_flags(CLI::App* sub, ParamFlags& f, const std::string& prefix, const std::string& group) {
  sub->add_option("--" + prefix + "-mean", f.mean, "mean of the parameter law")->group(group);
  sub->add_option("--" + prefix + "-spread", f.spread, "spread of the parameter law")->group(group);
  sub->add_option("--" + prefix + "-lower", f.lower, "lower truncation cut")->group(group);
  sub->add_option("--" + prefix + "-upper", f.upper, "upper truncation cut")->group(group);
}

void add_common(CLI::App* sub, CommonFlags& f, bool ensemble) {
  sub->add_option("--out", f.out, "output directory")->required();
  sub->add_option("--config", f.config_file, "key=value file (e.g. a previous manifest)");
  sub->add_flag("--quiet", f.quiet, "no progress on stderr");
  if (!ensemble) return;
  sub->add_option("--system", f.system, "rect or kepler")->check(CLI::IsMember({"rect", "kepler"}));
  sub->add_option("--energy", f.energy, "running energy in units of the mean spacing");
  sub->add_option("--window", f.window, "window width W");
  sub->add_option("--members", f.members, "ensemble size");
  sub->add_option("--seed", f.seed, "random seed");
  sub->add_option("--threads", f.threads, "worker threads (0 = all cores)");
  sub->add_option("--spread-kind", f.spread_kind, "std or hwhm")->check(CLI::IsMember({"std", "hwhm"}));
  add_param_flags(sub, f.alpha, "alpha", "Rectangle aspect ratio");
  add_param_flags(sub, f.beta, "beta", "Kepler beta");
  add_param_flags(sub, f.param, "param", "Either system");
}

void apply(ParamLaw& law, const ParamFlags& f) {
  if (f.mean) law.mean = *f.mean;
  if (f.spread) law.spread = *f.spread;
  if (f.lower) law.lower_cut = *f.lower;
  if (f.upper) law.upper_cut = *f.upper;
}

EnsembleConfig build_config(const CommonFlags& f) {
  const SystemKind system = parse_system(f.system);
  if (system == SystemKind::Rectangle && f.beta.any())
    throw UsageError("--beta-* flags apply to --system kepler only");
  if (system == SystemKind::Kepler && f.alpha.any())
    throw UsageError("--alpha-* flags apply to --system rect only");
  EnsembleConfig c = EnsembleConfig::defaults(system);
  if (f.energy) c.energy = *f.energy;
  if (f.window) c.window_width = *f.window;
  if (f.members) c.member_count = *f.members;
  if (f.seed) c.seed = *f.seed;
  apply(c.param_law, f.param);
  apply(c.param_law, system == SystemKind::Rectangle ? f.alpha : f.beta);
  if (f.spread_kind)
    c.param_law.spread_kind = *f.spread_kind == "std" ? SpreadKind::StdDev : SpreadKind::HalfWidthHalfMax;
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  return c;
}

double theory_t_min(const EnsembleConfig& c, double energy) {
  return c.system == SystemKind::Rectangle ? t_min_rectangle(energy)
                                           : t_min_kepler(energy, c.param_law.mean);
}

ProgressFn progress_for(const CommonFlags& f, std::string label) {
  if (f.quiet) return {};
  return [label = std::move(label)](std::uint64_t done, std::uint64_t total) {
    std::fprintf(stderr, "\r%s: %llu/%llu members", label.c_str(), static_cast<unsigned long long>(done),
                 static_cast<unsigned long long>(total));
    if (done == total) std::fputc('\n', stderr);
  };
}

void warn(const std::string& message) { std::fprintf(stderr, "warning: %s\n", message.c_str()); }

std::vector<double> number_list(const std::string& flag, const std::string& text) {
  try {
    return parse_number_list(text);
  } catch (const ConfigError& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + format_number(values[i]);
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

class Run {
public:
  Run(std::string command, const CommonFlags& flags, std::optional<EnsembleConfig> config)
      : dir_(flags.out), start_(std::chrono::steady_clock::now()) {
    manifest_.command = std::move(command);
    manifest_.config = std::move(config);
    manifest_.threads = flags.threads == 0 ? default_thread_count() : flags.threads;
    fs::create_directories(dir_);
  }

  fs::path path(const std::string& file) const { return dir_ / file; }
  void setting(const std::string& key, const std::string& value) { manifest_.settings[key] = value; }
  void output(const std::string& name, const std::string& file) { manifest_.outputs.emplace_back(name, file); }
  unsigned threads() const { return manifest_.threads; }

  void finish() {
    manifest_.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write_manifest(dir_ / "manifest.txt", manifest_);
  }

private:
  fs::path dir_;
  std::chrono::steady_clock::time_point start_;
  RunManifest manifest_;
};

struct SpacingRun {
  SpacingAccumulator spacings;
  LevelTally tally;
  void merge(const SpacingRun& o) {
    spacings.merge(o.spacings);
    tally.merge(o.tally);
  }
};

SpacingRun run_spacings(const EnsembleConfig& c, unsigned threads, double bin, double s_max,
                        const std::vector<double>& thresholds, const ProgressFn& progress) {
  return run_ensemble<SpacingRun>(
      c, threads, [&] { return SpacingRun{SpacingAccumulator(bin, s_max, thresholds), {}}; },
      [](SpacingRun& acc, const UnfoldedWindow& w) {
        acc.spacings.add_window(w);
        acc.tally.add_window(w);
      },
      progress);
}

void add_tally(std::ostringstream& out, const LevelTally& t, double window) {
  out << "members = " << t.members << '\n'
      << "levels = " << t.levels << '\n'
      << "mean_density = " << format_number(t.mean_density(window)) << '\n'
      << "stderr_density = " << format_number(t.stderr_density(window)) << '\n'
      << "degenerate_members = " << t.degenerate_members << '\n';
}

// --- spacing -----------------------------------------------------------------

struct SpacingFlags {
  double bin = 0.05;
  double s_max = 5;
  std::string s_list = "0.05";
  double fit_lo = 0;
  double fit_hi = 0.5;
  bool no_fit = false;
};

void add_fit_bracket(CLI::App* sub, double& lo, double& hi) {
  sub->add_option("--fit-lo", lo, "lower end of the t_min search bracket")->capture_default_str();
  sub->add_option("--fit-hi", hi, "upper end of the t_min search bracket (< pi)")->capture_default_str();
}

void check_bracket(double lo, double hi) {
  if (!(lo >= 0 && lo < hi && hi < std::numbers::pi))
    throw UsageError("fit bracket must satisfy 0 <= fit-lo < fit-hi < pi");
}

std::vector<std::vector<double>> model_curve_rows(double s_max, double t_theory, std::optional<double> t_fit) {
  std::vector<std::vector<double>> rows;
  constexpr int kPoints = 500;
  for (int i = 0; i <= kPoints; ++i) {
    const double s = s_max * i / kPoints;
    std::vector<double> row{s, poisson_spacing_pdf(s), ansatz_spacing_pdf(s, {t_theory})};
    if (t_fit) row.push_back(ansatz_spacing_pdf(s, {*t_fit}));
    rows.push_back(std::move(row));
  }
  return rows;
}

int cmd_spacing(const CommonFlags& cf, const SpacingFlags& sf) {
  const EnsembleConfig c = build_config(cf);
  if (!(sf.bin > 0) || !(sf.s_max >= sf.bin)) throw UsageError("need bin > 0 and smax >= bin");
  const auto thresholds = number_list("--s", sf.s_list);
  for (double s : thresholds)
    if (!(s > 0)) throw UsageError("--s values must be positive");
  if (!sf.no_fit) check_bracket(sf.fit_lo, sf.fit_hi);

  Run run("spacing", cf, c);
  run.setting("bin", format_number(sf.bin));
  run.setting("smax", format_number(sf.s_max));
  run.setting("s", join(thresholds));
  run.setting("fit-lo", format_number(sf.fit_lo));
  run.setting("fit-hi", format_number(sf.fit_hi));
  run.setting("no-fit", sf.no_fit ? "true" : "false");

  const SpacingRun result =
      run_spacings(c, run.threads(), sf.bin, sf.s_max, thresholds, progress_for(cf, "spacing"));
  if (result.spacings.total() == 0) throw StatsError("ensemble produced no spacings");
  const SpacingHistogram hist = result.spacings.histogram();
  const double t_theory = theory_t_min(c, c.energy);

  std::optional<FitResult> fit;
  if (!sf.no_fit) {
    try {
      fit = fit_t_min(hist, sf.fit_lo, sf.fit_hi);
      if (fit->at_bracket_edge) warn("fitted t_min sits on the bracket edge; widen --fit-lo/--fit-hi");
    } catch (const FitError& e) {
      warn(std::string("t_min fit skipped: ") + e.what());
    }
  }

  CsvTable table;
  table.header = {"s_lo", "s_hi", "s_mid", "count", "density", "stderr", "poisson_bin", "ansatz_bin"};
  if (fit) table.header.push_back("fitted_bin");
  for (std::size_t i = 0; i < hist.bins(); ++i) {
    const double a = hist.bin_edges[i], b = hist.bin_edges[i + 1];
    std::vector<double> row{a, b, hist.bin_mid(i), static_cast<double>(hist.counts[i]),
                            hist.density[i], hist.stderr_density[i],
                            (std::exp(-a) - std::exp(-b)) / (b - a), ansatz_bin_average(a, b, {t_theory})};
    if (fit) row.push_back(ansatz_bin_average(a, b, {fit->parameter}));
    table.rows.push_back(std::move(row));
  }
  write_csv(run.path("spacing_histogram.csv"), table);
  run.output("histogram", "spacing_histogram.csv");

  CsvTable models;
  models.header = {"s", "poisson", "ansatz"};
  if (fit) models.header.push_back("ansatz_fitted");
  models.rows = model_curve_rows(sf.s_max, t_theory, fit ? std::optional(fit->parameter) : std::nullopt);
  write_csv(run.path("spacing_models.csv"), models);
  run.output("models", "spacing_models.csv");

  std::ostringstream summary;
  add_tally(summary, result.tally, c.window_width);
  summary << "spacings = " << hist.total_spacings << '\n'
          << "t_min_theory = " << format_number(t_theory) << '\n';
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    const CumulativeEstimate e = result.spacings.cumulative(k);
    char label[64];
    std::snprintf(label, sizeof label, "P(%g)", e.s);
    const std::string tag = label;
    summary << tag << " = " << format_number(e.value) << '\n'
            << tag << ".stderr = " << format_number(e.stderr_value) << '\n'
            << tag << ".poisson = " << format_number(poisson_cumulative_P(e.s)) << '\n'
            << tag << ".ansatz = " << format_number(ansatz_cumulative_P(e.s, {t_theory})) << '\n';
  }
  if (fit) {
    summary << "t_min_fit = " << format_number(fit->parameter) << '\n'
            << "t_min_fit.stderr = " << format_number(fit->parameter_stderr) << '\n'
            << "t_min_fit.objective = " << format_number(fit->objective) << '\n'
            << "t_min_fit.at_bracket_edge = " << (fit->at_bracket_edge ? "true" : "false") << '\n';
  }
  write_text(run.path("spacing_summary.txt"), summary.str());
  run.output("summary", "spacing_summary.txt");
  run.finish();
  return 0;
}

// --- sweep -------------------------------------------------------------------

struct SweepFlags {
  std::string energies;
  double s = 0.05;
  bool no_fit = false;
};

int cmd_sweep(const CommonFlags& cf, const SweepFlags& wf) {
  if (cf.energy) throw UsageError("sweep takes --energies, not --energy");
  const auto energies = number_list("--energies", wf.energies);
  if (!(wf.s > 0)) throw UsageError("--s must be positive");
  if (wf.s >= 1) warn("s >= 1: the small-s asymptote column is not meaningful");
  CommonFlags probe = cf;
  probe.energy = energies.front();
  const EnsembleConfig base = build_config(probe);
  for (double e : energies) {
    EnsembleConfig c = base;
    c.energy = e;
    try {
      c.validate();
    } catch (const ConfigError& err) {
      throw UsageError("energy " + format_number(e) + ": " + err.what());
    }
  }

  Run run("sweep", cf, base);
  run.setting("energies", join(energies));
  run.setting("s", format_number(wf.s));
  run.setting("no-fit", wf.no_fit ? "true" : "false");

  std::vector<SweepPoint> points;
  for (double e : energies) {
    EnsembleConfig c = base;
    c.energy = e;
    const SpacingRun r = run_spacings(c, run.threads(), wf.s, wf.s, {wf.s},
                                      progress_for(cf, "sweep e=" + format_number(e)));
    if (r.spacings.total() == 0) throw StatsError("no spacings at energy " + format_number(e));
    const CumulativeEstimate est = r.spacings.cumulative(0);
    points.push_back({e, est.value, est.stderr_value});
  }

  std::optional<FitResult> fit;
  std::string fit_error;
  if (!wf.no_fit) {
    try {
      fit = fit_sqrt_coefficient(points, wf.s);
    } catch (const FitError& e) {
      fit_error = e.what();
    }
  }

  CsvTable table;
  table.header = {"energy", "P", "stderr", "poisson", "ansatz_exact", "ansatz_asymptote"};
  if (fit) table.header.push_back("fitted");
  const double pp = poisson_cumulative_P(wf.s);
  for (const auto& p : points) {
    const AnsatzParams t{theory_t_min(base, p.energy)};
    std::vector<double> row{p.energy, p.p_measured, p.stderr_p, pp, ansatz_cumulative_P(wf.s, t),
                            ansatz_cumulative_P_asymptote(wf.s, t)};
    if (fit) row.push_back(pp - fit->parameter / std::sqrt(p.energy));
    table.rows.push_back(std::move(row));
  }
  write_csv(run.path("sweep.csv"), table);
  run.output("sweep", "sweep.csv");
  if (fit) {
    write_text(run.path("sweep_fit.txt"), format_fit_report(*fit, "c"));
    run.output("fit", "sweep_fit.txt");
  }
  run.finish();
  if (!fit_error.empty()) {
    std::fprintf(stderr, "error: coefficient fit failed: %s (curves written)\n", fit_error.c_str());
    return 1;
  }
  return 0;
}

// --- variance ----------------------------------------------------------------

struct VarianceFlags {
  std::string L = "1:50:1";
  bool no_overlay = false;
  int overlay_nodes = 8;
  double tail_tol = 1e-3;
};

int cmd_variance(const CommonFlags& cf, const VarianceFlags& vf) {
  const EnsembleConfig c = build_config(cf);
  const auto grid = number_list("--L", vf.L);
  for (double L : grid)
    if (!(L > 0) || L > c.window_width) throw UsageError("--L values must lie in (0, window]");
  if (c.member_count < 2) throw UsageError("number variance needs --members >= 2");
  if (vf.overlay_nodes < 1 || !(vf.tail_tol > 0)) throw UsageError("need overlay-nodes >= 1 and tail-tol > 0");

  Run run("variance", cf, c);
  run.setting("L", join(grid));
  run.setting("no-overlay", vf.no_overlay ? "true" : "false");
  run.setting("overlay-nodes", std::to_string(vf.overlay_nodes));
  run.setting("tail-tol", format_number(vf.tail_tol));

  const VarianceAccumulator acc = run_ensemble<VarianceAccumulator>(
      c, run.threads(), [&] { return VarianceAccumulator(grid, c.window_width); },
      [](VarianceAccumulator& a, const UnfoldedWindow& w) { a.add_window(w); }, progress_for(cf, "variance"));
  const VarianceCurve curve = acc.curve();

  CsvTable table;
  table.header = {"L", "sigma2", "stderr"};
  for (std::size_t i = 0; i < grid.size(); ++i)
    table.rows.push_back({grid[i], curve.sigma2[i], curve.stderr_sigma2[i]});
  write_csv(run.path("variance.csv"), table);
  run.output("variance", "variance.csv");

  if (!vf.no_overlay) {
    const KernelModel ansatz = KernelModel::ansatz({theory_t_min(c, c.energy)});
    CsvTable model;
    model.header = {"L", "poisson", "ansatz"};
    if (c.system == SystemKind::Rectangle) model.header.insert(model.header.end(), {"rectangle_sum", "tail_bound"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double L = grid[i];
      std::vector<double> row{L, L, ansatz.number_variance(L)};
      if (c.system == SystemKind::Rectangle) {
        const SeriesValue v = rectangle_variance_ensemble(L, c.energy, c.param_law, vf.overlay_nodes, vf.tail_tol);
        row.push_back(v.value);
        row.push_back(v.tail_bound);
      }
      model.rows.push_back(std::move(row));
      if (!cf.quiet) std::fprintf(stderr, "\roverlay: %zu/%zu", i + 1, grid.size());
    }
    if (!cf.quiet) std::fputc('\n', stderr);
    write_csv(run.path("variance_model.csv"), model);
    run.output("model", "variance_model.csv");
  }
  run.finish();
  return 0;
}

// --- kernel ------------------------------------------------------------------

struct KernelFlags {
  std::string omega = "0.1:10:0.1";
  double bin = 0.1;
  std::int64_t kepler_terms = 200;
};

int cmd_kernel(const CommonFlags& cf, const KernelFlags& kf) {
  const EnsembleConfig c = build_config(cf);
  const auto grid = number_list("--omega", kf.omega);
  if (!(kf.bin > 0)) throw UsageError("--bin must be positive");
  if (!std::is_sorted(grid.begin(), grid.end()) || grid.front() - kf.bin / 2 < -1e-12)
    throw UsageError("--omega must be increasing with bins starting at or above zero");
  if (grid.back() + kf.bin > c.window_width / 2)
    throw UsageError("--omega grid plus one bin must not exceed half the window width");
  if (kf.kepler_terms < 1) throw UsageError("--kepler-terms must be >= 1");

  Run run("kernel", cf, c);
  run.setting("omega", join(grid));
  run.setting("bin", format_number(kf.bin));
  run.setting("kepler-terms", std::to_string(kf.kepler_terms));

  const PairAccumulator acc = run_ensemble<PairAccumulator>(
      c, run.threads(), [&] { return PairAccumulator(grid, kf.bin, c.window_width); },
      [](PairAccumulator& a, const UnfoldedWindow& w) { a.add_window(w); }, progress_for(cf, "kernel"));
  const CorrelationEstimate est = acc.estimate();

  CsvTable table;
  table.header = {"omega", "k_smooth", "stderr"};
  for (std::size_t i = 0; i < grid.size(); ++i) table.rows.push_back({grid[i], est.k_smooth[i], est.stderr_k[i]});
  write_csv(run.path("kernel.csv"), table);
  run.output("kernel", "kernel.csv");

  const AnsatzParams t{theory_t_min(c, c.energy)};
  CsvTable model;
  model.header = {"omega", "ansatz", "gue"};
  if (c.system == SystemKind::Kepler) model.header.push_back("kepler_sum");
  for (double w : grid) {
    std::vector<double> row{w, ansatz_kernel(w, t), gue_kernel(w)};
    if (c.system == SystemKind::Kepler)
      row.push_back(kepler_kernel(w, c.energy, c.param_law.mean, kf.kepler_terms).value);
    model.rows.push_back(std::move(row));
  }
  write_csv(run.path("kernel_model.csv"), model);
  run.output("model", "kernel_model.csv");
  run.finish();
  return 0;
}

// --- fit ---------------------------------------------------------------------

struct FitFlags {
  std::string histogram;
  std::string sweep;
  double s = 0.05;
  double fit_lo = 0;
  double fit_hi = 0.5;
};

std::size_t column(const CsvTable& t, const std::string& name, const std::string& file) {
  for (std::size_t i = 0; i < t.header.size(); ++i)
    if (t.header[i] == name) return i;
  throw IoError(file + " has no column '" + name + "'");
}

SpacingHistogram histogram_from_csv(const CsvTable& t, const std::string& file) {
  const auto lo = column(t, "s_lo", file), hi = column(t, "s_hi", file), n = column(t, "count", file);
  const auto d = column(t, "density", file), se = column(t, "stderr", file);
  if (t.rows.empty()) throw IoError(file + " has no rows");
  SpacingHistogram h;
  for (const auto& row : t.rows) {
    if (h.bin_edges.empty()) h.bin_edges.push_back(row[lo]);
    h.bin_edges.push_back(row[hi]);
    h.counts.push_back(static_cast<std::uint64_t>(std::llround(row[n])));
    h.density.push_back(row[d]);
    h.stderr_density.push_back(row[se]);
  }
  for (std::size_t i = 0; i < h.bins(); ++i)
    if (h.density[i] > 0) {
      h.total_spacings = static_cast<std::uint64_t>(std::llround(h.counts[i] / (h.density[i] * h.bin_width(i))));
      break;
    }
  return h;
}

int cmd_fit(const CommonFlags& cf, const FitFlags& ff) {
  if (ff.histogram.empty() == ff.sweep.empty()) throw UsageError("give exactly one of --histogram or --sweep");
  Run run("fit", cf, std::nullopt);
  if (!ff.histogram.empty()) {
    check_bracket(ff.fit_lo, ff.fit_hi);
    run.setting("histogram", fs::absolute(ff.histogram).string());
    run.setting("histogram.sha256", sha256_file(ff.histogram));
    run.setting("fit-lo", format_number(ff.fit_lo));
    run.setting("fit-hi", format_number(ff.fit_hi));
    const SpacingHistogram h = histogram_from_csv(read_csv(ff.histogram), ff.histogram);
    const FitResult fit = fit_t_min(h, ff.fit_lo, ff.fit_hi);
    if (fit.at_bracket_edge) warn("fitted t_min sits on the bracket edge; widen --fit-lo/--fit-hi");
    write_text(run.path("fit_t_min.txt"), format_fit_report(fit, "t_min"));
    run.output("fit", "fit_t_min.txt");
  } else {
    if (!(ff.s > 0)) throw UsageError("--s must be positive");
    run.setting("sweep", fs::absolute(ff.sweep).string());
    run.setting("sweep.sha256", sha256_file(ff.sweep));
    run.setting("s", format_number(ff.s));
    const CsvTable t = read_csv(ff.sweep);
    const auto e = column(t, "energy", ff.sweep), p = column(t, "P", ff.sweep), se = column(t, "stderr", ff.sweep);
    std::vector<SweepPoint> points;
    for (const auto& row : t.rows) points.push_back({row[e], row[p], row[se]});
    const FitResult fit = fit_sqrt_coefficient(points, ff.s);
    write_text(run.path("fit_sqrt.txt"), format_fit_report(fit, "c"));
    run.output("fit", "fit_sqrt.txt");
  }
  run.finish();
  return 0;
}

// Flags from --config become ordinary arguments placed before the user's own,
// so explicit flags override them (every option keeps its last value).
std::vector<std::string> expand_config(CLI::App& app, std::vector<std::string> args) {
  if (args.empty()) return args;
  CLI::App* sub = nullptr;
  try {
    sub = app.get_subcommand(args.front());
  } catch (const CLI::OptionNotFound&) {
    return args;
  }
  std::string file;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) file = args[i + 1];
    else if (args[i].starts_with("--config=")) file = args[i].substr(9);
  }
  if (file.empty()) return args;
  std::vector<std::string> injected;
  for (const auto& [key, value] : read_key_values(file)) {
    if (key == "out" || key == "config") continue;
    if (!sub->get_option_no_throw("--" + key)) continue;
    injected.push_back("--" + key + "=" + value);
  }
  args.insert(args.begin() + 1, injected.begin(), injected.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Level statistics of parametric ensembles of integrable billiards"};
  app.name("levrep");
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  CommonFlags common;
  SpacingFlags spacing;
  SweepFlags sweep;
  VarianceFlags variance;
  KernelFlags kernel;
  FitFlags fit;

  auto* sp = app.add_subcommand("spacing", "nearest-neighbour spacing histogram, P(s) and t_min fit");
  add_common(sp, common, true);
  sp->add_option("--bin", spacing.bin, "histogram bin width")->capture_default_str();
  sp->add_option("--smax", spacing.s_max, "histogram range [0, smax]")->capture_default_str();
  sp->add_option("--s", spacing.s_list, "P(s) thresholds (list)")->capture_default_str();
  add_fit_bracket(sp, spacing.fit_lo, spacing.fit_hi);
  sp->add_flag("--no-fit", spacing.no_fit, "skip the t_min fit");

  auto* sw = app.add_subcommand("sweep", "P(s) as a function of energy and the 1/sqrt(e) fit");
  add_common(sw, common, true);
  sw->add_option("--energies", sweep.energies, "energies (list)")->required();
  sw->add_option("--s", sweep.s, "threshold s")->capture_default_str();
  sw->add_flag("--no-fit", sweep.no_fit, "curves only");

  auto* va = app.add_subcommand("variance", "level number variance with analytic overlay");
  add_common(va, common, true);
  va->add_option("--L", variance.L, "interval lengths (list)")->capture_default_str();
  va->add_flag("--no-overlay", variance.no_overlay, "skip the analytic overlay");
  va->add_option("--overlay-nodes", variance.overlay_nodes, "quantile nodes for the parameter average")
      ->capture_default_str();
  va->add_option("--tail-tol", variance.tail_tol, "relative tail bound of the lattice sum")->capture_default_str();

  auto* ke = app.add_subcommand("kernel", "smooth pair-correlation kernel");
  add_common(ke, common, true);
  ke->add_option("--omega", kernel.omega, "bin centres (list)")->capture_default_str();
  ke->add_option("--bin", kernel.bin, "bin width")->capture_default_str();
  ke->add_option("--kepler-terms", kernel.kepler_terms, "terms of the Kepler sum overlay")->capture_default_str();

  auto* fi = app.add_subcommand("fit", "refit t_min or the sqrt coefficient from CSV output");
  add_common(fi, common, false);
  fi->add_option("--histogram", fit.histogram, "spacing_histogram.csv from a spacing run");
  fi->add_option("--sweep", fit.sweep, "sweep.csv from a sweep run");
  fi->add_option("--s", fit.s, "threshold s used by the sweep")->capture_default_str();
  add_fit_bracket(fi, fit.fit_lo, fit.fit_hi);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(app, std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  }

  try {
    if (*sp) return cmd_spacing(common, spacing);
    if (*sw) return cmd_sweep(common, sweep);
    if (*va) return cmd_variance(common, variance);
    if (*ke) return cmd_kernel(common, kernel);
    if (*fi) return cmd_fit(common, fit);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
