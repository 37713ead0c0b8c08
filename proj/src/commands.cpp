#include "zerohit/commands.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "zerohit/brownian_path.hpp"
#include "zerohit/complex_flow.hpp"
#include "zerohit/experiments.hpp"
#include "zerohit/io.hpp"
#include "zerohit/parallel.hpp"
#include "zerohit/special_functions.hpp"
#include "zerohit/welding.hpp"

namespace zerohit {

namespace {

using nlohmann::json;

struct Run {
  const RunConfig& cfg;
  const CommandContext& ctx;
  Provenance prov;

  Run(const char* command, const RunConfig& c, const CommandContext& x)
      : cfg(c), ctx(x), prov{command, c.seed, config_hash(c)} {
    std::filesystem::create_directories(ctx.out_dir);
  }

  std::filesystem::path file(const std::string& name) const {
    return ctx.out_dir / name;
  }

  void say(const std::string& line) const {
    if (ctx.log) *ctx.log << line << '\n';
  }

  json report_header() const {
    return {{"provenance",
             {{"command", prov.command},
              {"seed", prov.seed},
              {"config_hash", prov.config_hash}}},
            {"config", json::parse(canonical_json(cfg))}};
  }

  void write_report(const std::string& name, const json& report) const {
    write_text(file(name), report.dump(2) + "\n");
  }

  // Binary dump of the driving path, for replay elsewhere.
  json dump_path(const std::string& name, const BrownianPath& path) const {
    constexpr int kDumpLevel = 12;
    std::ostringstream buf(std::ios::binary);
    write_path_dump(buf, path, kDumpLevel);
    write_text(file(name), buf.str());
    return {{"file", name},
            {"master_seed", path.seed().master_seed},
            {"stream_id", path.seed().stream_id},
            {"level", kDumpLevel}};
  }
};

json number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

json hitting_json(const HittingTime& h) {
  return {{"point", number(h.point)},
          {"lo", number(h.bracket.lo)},
          {"hi", number(h.bracket.hi)},
          {"censored", h.censored},
          {"resolution_limited", h.resolution_limited}};
}

const char* verdict(bool pass) { return pass ? "PASS" : "FAIL"; }

}  // namespace

// ---------------------------------------------------------------------------

int cmd_verify_law(const RunConfig& cfg, const CommandContext& ctx) {
  Run run("verify-law", cfg, ctx);
  json report = run.report_header();
  json laws = json::array();
  bool all = true;
  CsvWriter csv(run.file("verify_law_samples.csv"),
                {"delta", "path", "point", "lo", "hi", "censored", "resolution_limited"},
                run.prov);
  for (double delta : cfg.verify_law.deltas) {
    const InverseGammaParams law = InverseGammaParams::for_bessel_dimension(delta);
    std::vector<double> points;
    for (double q : cfg.verify_law.probabilities) {
      points.push_back(inverse_gamma_quantile(law, q));
    }
    const ExactLawReport rep = verify_exact_law(delta, cfg.verify_law.n_paths, points,
                                                cfg.seed, cfg.flow, ctx.threads);
    for (std::size_t i = 0; i < rep.samples.size(); ++i) {
      const HittingTime& h = rep.samples[i];
      csv << delta << static_cast<std::uint64_t>(i) << h.point << h.bracket.lo
          << h.bracket.hi << h.censored << h.resolution_limited;
      csv.end_row();
    }
    json checks = json::array();
    for (std::size_t i = 0; i < rep.points.size(); ++i) {
      const CdfCheck& c = rep.points[i];
      checks.push_back({{"t", c.t},
                        {"probability", cfg.verify_law.probabilities[i]},
                        {"exact", c.exact},
                        {"empirical", c.empirical},
                        {"se", c.se},
                        {"straddling", c.straddling},
                        {"allowed", c.allowed},
                        {"pass", c.pass}});
      run.say("delta=" + format_number(delta) + " t=" + format_number(c.t) +
              " exact=" + format_number(c.exact) + " empirical=" +
              format_number(c.empirical) + " " + verdict(c.pass));
    }
    std::string note;
    if (!rep.mean.finite) {
      note = "infinite-mean regime: mean test skipped";
    } else if (!rep.mean.gated) {
      note = "finite mean but infinite variance: mean reported, not tested";
    } else {
      note = "mean compared within 3 standard errors";
    }
    laws.push_back({{"delta", delta},
                    {"alpha", rep.alpha},
                    {"beta", rep.beta},
                    {"n_paths", rep.n_paths},
                    {"censored", rep.censored},
                    {"resolution_limited", rep.resolution_limited},
                    {"cdf_checks", checks},
                    {"mean",
                     {{"finite", rep.mean.finite},
                      {"gated", rep.mean.gated},
                      {"expected", number(rep.mean.expected)},
                      {"sample_mean", rep.mean.sample.mean},
                      {"se", rep.mean.sample.se},
                      {"pass", rep.mean.pass},
                      {"note", note}}},
                    {"pass", rep.pass}});
    run.say("delta=" + format_number(delta) + " mean: " + note + " -> " +
            verdict(rep.mean.pass));
    all = all && rep.pass;
  }
  report["laws"] = laws;
  report["pass"] = all;
  run.write_report("verify_law_report.json", report);
  return all ? 0 : 1;
}

// ---------------------------------------------------------------------------

int cmd_field(const RunConfig& cfg, const CommandContext& ctx) {
  Run run("field", cfg, ctx);
  std::vector<double> xs = cfg.field.xs;
  std::vector<double> deltas = cfg.field.deltas;
  if (ctx.refine) {
    xs = refine_grid(xs);
    deltas = refine_grid(deltas);
  }
  CsvWriter csv(run.file("field.csv"),
                {"path", "delta", "x", "point", "lo", "hi", "censored", "resolution_limited"},
                run.prov);
  json per_path = json::array();
  std::size_t violations = 0;
  HeatMap map;
  for (std::size_t p = 0; p < cfg.field.paths; ++p) {
    const BrownianPath path({cfg.seed, p}, 1.0);
    const HittingTimeField f = compute_field(path, xs, deltas, cfg.flow, ctx.threads);
    for (std::size_t i = 0; i < deltas.size(); ++i) {
      for (std::size_t j = 0; j < xs.size(); ++j) {
        const HittingTime& h = f.at(i, j);
        csv << static_cast<std::uint64_t>(p) << deltas[i] << xs[j] << h.point
            << h.bracket.lo << h.bracket.hi << h.censored << h.resolution_limited;
        csv.end_row();
      }
    }
    violations += f.x_violations + f.delta_violations;
    per_path.push_back({{"path", p},
                        {"x_violations", f.x_violations},
                        {"delta_violations", f.delta_violations},
                        {"censored", f.censored},
                        {"resolution_limited", f.resolution_limited},
                        {"max_x_increment", f.max_x_increment},
                        {"max_delta_increment", f.max_delta_increment}});
    if (p == 0) {
      map.title = "zero-hitting time field, path 0 (log10 scale)";
      map.x_label = "x";
      map.y_label = "delta";
      map.xs = xs;
      map.ys = deltas;
      map.log_scale = true;
      for (std::size_t i = 0; i < deltas.size(); ++i) {
        std::vector<double> row;
        for (std::size_t j = 0; j < xs.size(); ++j) {
          const HittingTime& h = f.at(i, j);
          row.push_back(h.censored ? std::nan("") : h.point);
        }
        map.values.push_back(row);
      }
    }
  }
  const BrownianPath first({cfg.seed, 0}, 1.0);
  const std::vector<RefinementLevel> levels = field_refinement(
      first, xs, deltas, cfg.field.refine_levels, cfg.flow, ctx.threads);
  json lv = json::array();
  bool shrinking = true;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    lv.push_back({{"nx", levels[l].nx},
                  {"ndelta", levels[l].ndelta},
                  {"max_x_increment", levels[l].max_x_increment},
                  {"max_delta_increment", levels[l].max_delta_increment},
                  {"violations", levels[l].violations}});
    if (l > 0 && !(levels[l].max_x_increment < levels[l - 1].max_x_increment &&
                   levels[l].max_delta_increment < levels[l - 1].max_delta_increment)) {
      shrinking = false;
    }
  }
  json report = run.report_header();
  report["xs"] = xs;
  report["deltas"] = deltas;
  report["paths"] = per_path;
  report["monotonicity_violations"] = violations;
  report["continuity_diagnostic"] = {
      {"label", "diagnostic only: refinement stability of adjacent-cell increments, "
                "not a proof of continuity"},
      {"levels", lv},
      {"increments_shrink", shrinking}};
  report["pass"] = violations == 0;
  run.write_report("field_report.json", report);
  if (cfg.field.svg) write_heatmap_svg(run.file("field.svg"), map, run.prov);
  run.say("field: " + std::to_string(violations) + " monotonicity violations; "
          "increments shrink under refinement: " + (shrinking ? "yes" : "no"));
  return violations == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------

int cmd_weld(const RunConfig& cfg, const CommandContext& ctx) {
  Run run("weld", cfg, ctx);
  const BrownianPath path({cfg.seed, 0}, 1.0);
  WeldConfig wc;
  wc.flow = cfg.flow;
  wc.psi_tolerance = cfg.weld.psi_tolerance;
  const WeldingTable table = weld_field(path, cfg.weld.kappas, cfg.weld.xs, wc, ctx.threads);

  CsvWriter csv(run.file("weld.csv"),
                {"kappa", "x", "psi", "err", "mode", "residual", "solver_span"}, run.prov);
  std::size_t match_failures = 0;
  double identity_error = 0.0;
  json entries = json::array();
  LinePlot plot{"welding field psi(kappa, x)", "x", "psi", {}, true};
  for (std::size_t i = 0; i < table.kappas.size(); ++i) {
    Series s{"kappa=" + format_number(table.kappas[i]), {}, {}};
    for (std::size_t j = 0; j < table.xs.size(); ++j) {
      const PsiResult& r = table.at(i, j);
      csv << table.kappas[i] << table.xs[j] << r.value << r.error << to_string(r.mode)
          << r.residual << r.solver_span;
      csv.end_row();
      const MatchCheck m = check_matching(r);
      if (!m.pass) ++match_failures;
      if (table.kappas[i] == 0.0) {
        identity_error = std::max(identity_error, std::abs(r.value - r.x));
      }
      entries.push_back({{"kappa", table.kappas[i]},
                         {"x", table.xs[j]},
                         {"psi", r.value},
                         {"error", r.error},
                         {"mode", to_string(r.mode)},
                         {"x_hit", r.at_x.hit ? hitting_json({r.at_x.hit_bracket.mid(),
                                                              r.at_x.hit_bracket, false, 0.0,
                                                              r.at_x.resolution_limited})
                                              : json(nullptr)},
                         {"psi_hit", r.at_psi.hit ? hitting_json({r.at_psi.hit_bracket.mid(),
                                                                  r.at_psi.hit_bracket, false,
                                                                  0.0,
                                                                  r.at_psi.resolution_limited})
                                                  : json(nullptr)},
                         {"residual", r.residual},
                         {"solver_span", r.solver_span},
                         {"match_allowed", m.allowed},
                         {"match_pass", m.pass}});
      s.xs.push_back(table.xs[j]);
      s.ys.push_back(r.value);
    }
    plot.series.push_back(std::move(s));
  }

  // Continuity diagnostic: the same table on two successive midpoint
  // refinements of both grids.
  json lv = json::array();
  bool shrinking = true;
  std::vector<double> ks = cfg.weld.kappas;
  std::vector<double> xs = cfg.weld.xs;
  double prev_k = table.max_kappa_increment;
  double prev_x = table.max_x_increment;
  lv.push_back({{"nkappa", ks.size()}, {"nx", xs.size()},
                {"max_kappa_increment", prev_k}, {"max_x_increment", prev_x}});
  for (int l = 1; l < 3; ++l) {
    ks = refine_grid(ks);
    xs = refine_grid(xs);
    const WeldingTable t = weld_field(path, ks, xs, wc, ctx.threads);
    lv.push_back({{"nkappa", ks.size()}, {"nx", xs.size()},
                  {"max_kappa_increment", t.max_kappa_increment},
                  {"max_x_increment", t.max_x_increment}});
    if (!(t.max_kappa_increment < prev_k && t.max_x_increment < prev_x)) shrinking = false;
    prev_k = t.max_kappa_increment;
    prev_x = t.max_x_increment;
  }

  const bool identity_ok = identity_error <= 1e-6;
  const bool pass = table.rows_start_at_zero && table.total_row_violations() == 0 &&
                    match_failures == 0 && identity_ok;
  json report = run.report_header();
  report["entries"] = entries;
  report["rows_start_at_zero"] = table.rows_start_at_zero;
  report["row_violations"] = table.row_violations;
  report["match_failures"] = match_failures;
  report["identity_row_max_error"] = identity_error;
  report["max_kappa_increment"] = table.max_kappa_increment;
  report["max_x_increment"] = table.max_x_increment;
  report["continuity_diagnostic"] = {
      {"label", "diagnostic only: refinement stability of adjacent-cell increments, "
                "not a proof of continuity"},
      {"levels", lv},
      {"increments_shrink", shrinking}};
  report["path_dump"] = run.dump_path("weld_path.bin", path);
  report["pass"] = pass;
  run.write_report("weld_report.json", report);
  if (cfg.weld.svg) write_line_svg(run.file("weld.svg"), plot, run.prov);
  run.say(std::string("weld: rows increasing ") + verdict(table.total_row_violations() == 0) +
          ", matching " + verdict(match_failures == 0) + ", identity row " +
          verdict(identity_ok));
  return pass ? 0 : 1;
}

// ---------------------------------------------------------------------------

int cmd_walk(const RunConfig& cfg, const CommandContext& ctx) {
  Run run("walk", cfg, ctx);
  const WalkSettings& w = cfg.walk;
  std::vector<WalkRun> walks(w.paths);
  FlowConfig fc = cfg.flow;
  parallel_for(w.paths, ctx.threads, [&](std::size_t p) {
    const BrownianPath path({cfg.seed, p}, 1.0);
    walks[p] = bessel_walk(path, w.x, w.k, fc);
  });
  CsvWriter csv(run.file("walk.csv"), {"path", "step", "start", "time", "increment"}, run.prov);
  std::vector<std::vector<double>> sequences;
  std::vector<std::vector<double>> uniforms;
  std::size_t pooled = 0;
  std::size_t censored = 0;
  std::size_t limited = 0;
  bool ordered = true;
  for (std::size_t p = 0; p < walks.size(); ++p) {
    const WalkRun& r = walks[p];
    if (r.censored) ++censored;
    limited += r.resolution_limited;
    std::vector<double> u;
    for (std::size_t k = 0; k < r.increments.size(); ++k) {
      csv << static_cast<std::uint64_t>(p) << static_cast<std::uint64_t>(k)
          << r.times[k + 1] - r.increments[k] << r.times[k + 1] << r.increments[k];
      csv.end_row();
      if (!(r.increments[k] > 0.0) || !(r.times[k + 1] > r.times[k])) ordered = false;
      u.push_back(std::exp(-w.x * w.x / (2.0 * r.increments[k])));
    }
    pooled += r.increments.size();
    sequences.push_back(r.increments);
    uniforms.push_back(std::move(u));
  }

  bool pass = ordered && censored == 0;
  const double n = static_cast<double>(pooled);
  json cdf = json::array();
  for (double lambda : w.lambdas) {
    const double t = lambda * w.x * w.x;
    const double exact = std::exp(-1.0 / (2.0 * lambda));
    std::size_t below = 0;
    std::size_t straddle = 0;
    for (const WalkRun& r : walks) {
      for (std::size_t k = 0; k < r.increments.size(); ++k) {
        if (r.increments[k] <= t) ++below;
        if (r.brackets[k].lo <= t && r.brackets[k].hi > t) ++straddle;
      }
    }
    const double emp = static_cast<double>(below) / n;
    const double se = std::sqrt(exact * (1.0 - exact) / n);
    const double allowed = 3.0 * se + static_cast<double>(straddle) / n;
    const bool ok = std::abs(emp - exact) <= allowed;
    pass = pass && ok;
    cdf.push_back({{"lambda", lambda}, {"t", t}, {"exact", exact}, {"empirical", emp},
                   {"se", se}, {"allowed", allowed}, {"pass", ok}});
  }
  const double rho = lag1_autocorrelation(sequences);
  const double rho_u = lag1_autocorrelation(uniforms);
  const double rho_allowed = 3.0 / std::sqrt(n);
  const bool rho_ok = std::abs(rho) <= rho_allowed;
  pass = pass && rho_ok;

  CsvWriter sums(run.file("walk_sums.csv"), {"n", "replicate", "statistic"}, run.prov);
  json sum_rows = json::array();
  double prev_iqr = std::numeric_limits<double>::infinity();
  bool iqr_shrinks = true;
  double last_median = 0.0;
  for (std::size_t i = 0; i < w.sum_n.size(); ++i) {
    const std::size_t size = w.sum_n[i];
    const std::vector<double> stats =
        walk_sum_statistic(size, w.sum_replicates, cfg.seed + 1 + i, ctx.threads);
    for (std::size_t r = 0; r < stats.size(); ++r) {
      sums << static_cast<std::uint64_t>(size) << static_cast<std::uint64_t>(r) << stats[r];
      sums.end_row();
    }
    const double med = sample_quantile(stats, 0.5);
    const double iqr = sample_quantile(stats, 0.75) - sample_quantile(stats, 0.25);
    if (!(iqr < prev_iqr)) iqr_shrinks = false;
    prev_iqr = iqr;
    last_median = med;
    sum_rows.push_back({{"n", size}, {"median", med}, {"iqr", iqr}});
  }
  const bool median_ok = last_median >= 0.4 && last_median <= 0.6;
  pass = pass && median_ok && iqr_shrinks;

  json events = json::array();
  for (std::size_t i = 0; i < w.events.size(); ++i) {
    const EventSpec& e = w.events[i];
    const EventProbability ev =
        event_a_probability(e.x, e.k, e.lambda, w.event_replicates, cfg.seed + 1000 + i);
    pass = pass && ev.pass;
    events.push_back({{"x", e.x}, {"k", e.k}, {"lambda", e.lambda},
                      {"empirical", ev.empirical}, {"exact", ev.exact},
                      {"via_cdf", ev.via_cdf}, {"se", ev.se}, {"pass", ev.pass}});
  }

  json report = run.report_header();
  report["walk"] = {{"x", w.x}, {"k", w.k}, {"paths", w.paths},
                    {"pooled_increments", pooled}, {"censored_walks", censored},
                    {"resolution_limited", limited}, {"increasing", ordered},
                    {"cdf_checks", cdf},
                    {"lag1_autocorrelation", rho},
                    {"lag1_autocorrelation_uniform", rho_u},
                    {"autocorrelation_allowed", rho_allowed},
                    {"autocorrelation_pass", rho_ok}};
  report["sum_statistic"] = {{"rows", sum_rows},
                             {"replicates", w.sum_replicates},
                             {"median_in_range", median_ok},
                             {"iqr_shrinks", iqr_shrinks},
                             {"note", "medians and quartiles only; the mean is infinite"}};
  report["events"] = events;
  report["pass"] = pass;
  run.write_report("walk_report.json", report);
  run.say(std::string("walk: ") + verdict(pass) + " (lag-1 autocorrelation " +
          format_number(rho) + ", last median " + format_number(last_median) + ")");
  return pass ? 0 : 1;
}

// ---------------------------------------------------------------------------

int cmd_trace(const RunConfig& cfg, const CommandContext& ctx) {
  Run run("trace", cfg, ctx);
  const TraceSettings& ts = cfg.trace;
  const BrownianPath path({cfg.seed, 0}, 1.0);
  TraceConfig tc;
  tc.tolerance = ts.tolerance;
  tc.y_floor = ts.y_floor;
  tc.flow = cfg.complex_flow;
  std::vector<double> times(ts.points);
  for (std::size_t i = 0; i < ts.points; ++i) {
    times[i] = static_cast<double>(i) / static_cast<double>(ts.points - 1);
  }
  std::vector<TracePoint> points(ts.points);
  parallel_for(ts.points, ctx.threads, [&](std::size_t i) {
    points[i] = trace_point(path, ts.kappa, times[i], ts.y_probe, tc);
  });
  CsvWriter csv(run.file("trace.csv"),
                {"t", "re", "im", "increment", "converged", "y_used"}, run.prov);
  std::size_t unconverged = 0;
  std::size_t nonpositive = 0;
  double exact_error = 0.0;
  Series curve{"kappa=" + format_number(ts.kappa), {}, {}};
  for (std::size_t i = 0; i < ts.points; ++i) {
    const TracePoint& p = points[i];
    csv << times[i] << p.value.real() << p.value.imag() << p.increment << p.converged
        << p.y_used;
    csv.end_row();
    if (!p.converged) ++unconverged;
    if (times[i] > 0.0 && !(p.value.imag() > 0.0)) ++nonpositive;
    if (ts.kappa == 0.0) {
      exact_error = std::max(
          exact_error, std::abs(p.value - std::complex<double>(0.0, 2.0 * std::sqrt(times[i]))));
    }
    curve.xs.push_back(p.value.real());
    curve.ys.push_back(p.value.imag());
  }
  const bool pass = unconverged == 0 && nonpositive == 0 && exact_error <= 1e-12;
  json report = run.report_header();
  report["kappa"] = ts.kappa;
  report["points"] = ts.points;
  report["unconverged"] = unconverged;
  report["nonpositive_imaginary"] = nonpositive;
  if (ts.kappa == 0.0) report["max_error_vs_closed_form"] = exact_error;
  report["note"] = "points approximate the curve by probing from i*y and halving y";
  report["path_dump"] = run.dump_path("trace_path.bin", path);
  report["pass"] = pass;
  run.write_report("trace_report.json", report);
  if (ts.svg) {
    write_line_svg(run.file("trace.svg"),
                   {"curve points from probes", "Re", "Im", {curve}, true}, run.prov);
  }
  run.say("trace: " + std::to_string(unconverged) + " unconverged points, " +
          verdict(pass));
  return pass ? 0 : 1;
}

// ---------------------------------------------------------------------------

int cmd_selftest(const CommandContext& ctx) {
  int failures = 0;
  auto check = [&](const std::string& name, const std::function<bool()>& fn) {
    bool ok = false;
    std::string detail;
    try {
      ok = fn();
    } catch (const std::exception& e) {
      detail = std::string(" (") + e.what() + ")";
    }
    if (!ok) ++failures;
    if (ctx.log) *ctx.log << verdict(ok) << "  " << name << detail << '\n';
  };
  const BrownianPath path({1, 0}, 1.0);

  check("kappa=0 hitting time equals x^2/4", [&] {
    for (double x : {0.5, 1.0, 3.0}) {
      const HittingTime h = hitting_time(path, FlowParams::loewner(0.0), 0.0, x);
      if (std::abs(h.point - x * x / 4.0) > 1e-12 || h.bracket.width() != 0.0) return false;
    }
    return true;
  });
  check("x=0 is absorbed at the start", [&] {
    const Trajectory tr = integrate(path, FlowParams::loewner(4.0), 0.0, 0.0, 1.0);
    return tr.absorbed() && tr.hit_bracket.lo == 0.0 && tr.hit_bracket.hi == 0.0;
  });
  check("kappa=0 restart reproduces the hit", [&] {
    const HittingTime h =
        hitting_time(path, FlowParams::loewner(0.0), 0.0, std::sqrt(1.0 - 0.4));
    return std::abs(h.point - 0.15) < 1e-12;
  });
  check("delta/kappa conversion round trip", [] {
    for (double k : {0.5, 1.0, 2.0, 4.0}) {
      const FlowParams p = FlowParams::loewner(k).to_bessel().to_loewner();
      if (p.kappa() != k) return false;
    }
    return true;
  });
  check("kappa=0 complex flow from iy is i sqrt(y^2 + 4t)", [&] {
    const ComplexState z = integrate_complex(path, 0.0, 0.0, 0.5, {0.0, 0.3});
    return std::abs(z.im - std::sqrt(0.09 + 2.0)) < 1e-12 && std::abs(z.re) < 1e-12;
  });
  check("kappa=0 trace is 2i sqrt(t)", [&] {
    for (double t : {0.0, 0.25, 1.0}) {
      const TracePoint p = trace_point(path, 0.0, t, 0.1);
      if (std::abs(p.value - std::complex<double>(0.0, 2.0 * std::sqrt(t))) > 1e-12) return false;
    }
    return true;
  });
  check("extended boundary map closed forms", [&] {
    return h_tilde(path, 0.0, Side::plus, 0.0).value == -1.0 &&
           std::abs(h_tilde(path, 0.0, Side::plus, 1.0).value + 0.75) < 1e-12 &&
           std::abs(h_tilde(path, 0.0, Side::plus, 3.0).value - std::sqrt(5.0)) < 1e-12;
  });
  check("psi(kappa, 0) = 0 and psi(0, x) = x", [&] {
    if (psi(path, 2.0, 0.0).value != 0.0) return false;
    for (double x : {0.5, 1.0, 2.5}) {
      if (std::abs(psi(path, 0.0, x).value - x) > 1e-6) return false;
    }
    return true;
  });
  check("Inverse-Gamma(1, 1/2) CDF at 1 is exp(-1/2)", [] {
    return std::abs(inverse_gamma_cdf({1.0, 0.5}, 1.0) - std::exp(-0.5)) < 1e-14;
  });
  check("Inverse-Gamma(2, 1/2) CDF closed form", [] {
    for (double t : {0.1, 0.5, 2.0, 10.0}) {
      const double exact = (1.0 + 1.0 / (2.0 * t)) * std::exp(-1.0 / (2.0 * t));
      if (std::abs(inverse_gamma_cdf({2.0, 0.5}, t) - exact) > 1e-13) return false;
    }
    return true;
  });
  check("x K1(x) -> 1 as x -> 0", [] {
    return std::abs(1e-4 * bessel_k1(1e-4) - 1.0) < 1e-4;
  });
  check("event probability identity", [] {
    const EventProbability e = event_a_probability(0.1, 100, 1.0, 1, 1);
    return std::abs(e.exact - e.via_cdf) < 1e-12 && std::abs(e.exact - 0.393469340287) < 1e-9;
  });
  check("path values do not depend on query order", [] {
    const BrownianPath a({9, 3}, 1.0);
    const BrownianPath b({9, 3}, 1.0);
    const double a1 = a.value_at(0.375, 3);
    const double a2 = a.value_at(0.5, 1);
    const double b2 = b.value_at(0.5, 1);
    const double b1 = b.value_at(0.375, 3);
    return a1 == b1 && a2 == b2;
  });
  check("path dump round trip", [] {
    const BrownianPath a({5, 2}, 1.0);
    std::stringstream buf;
    write_path_dump(buf, a, 8);
    const PathDump d = read_path_dump(buf);
    const BrownianPath b = replay_path_dump(d);
    return b.value_at(0.5, 1) == a.value_at(0.5, 1);
  });
  check("config rejects delta > 0", [] {
    try {
      parse_config(R"({"schema_version": 1, "verify_law": {"deltas": [0.5]}})");
    } catch (const ConfigError& e) {
      return std::string(e.what()).find("verify_law.deltas[0]") != std::string::npos;
    }
    return false;
  });
  check("config rejects unknown keys", [] {
    try {
      parse_config(R"({"schema_version": 1, "flow": {"cap_typo": 3}})");
    } catch (const ConfigError& e) {
      return std::string(e.what()).find("flow.cap_typo") != std::string::npos;
    }
    return false;
  });
  if (ctx.log) {
    *ctx.log << (failures == 0 ? "selftest passed" : "selftest FAILED: " +
                                                        std::to_string(failures) + " checks")
             << '\n';
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace zerohit
