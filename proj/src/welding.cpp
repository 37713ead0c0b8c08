#include "zerohit/welding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "zerohit/parallel.hpp"

namespace zerohit {

const char* to_string(MatchMode mode) noexcept {
  switch (mode) {
    case MatchMode::zero: return "zero";
    case MatchMode::hit_time: return "hit_time";
    case MatchMode::endpoint: return "endpoint";
  }
  return "unknown";
}

namespace {

void check_kappa(double kappa) {
  if (!(kappa >= 0.0 && kappa <= 4.0)) {
    throw std::invalid_argument("welding: kappa must lie in [0, 4], got " +
                                std::to_string(kappa));
  }
}

// Flow from x (either sign) over [0, 1]. Reports the hit bracket, or the
// value at time 1.
Trajectory run_unit(const BrownianPath& path, double kappa, double x,
                    const FlowConfig& cfg) {
  FlowConfig quiet = cfg;
  quiet.record = false;
  return integrate(path, FlowParams::loewner(kappa), 0.0, x, 1.0, quiet);
}

BoundaryValue evaluate(const BrownianPath& path, double kappa, Side side,
                       double x, const FlowConfig& cfg, bool with_error) {
  BoundaryValue out;
  const double sign = side == Side::plus ? 1.0 : -1.0;
  if (x == 0.0) {
    out.value = -sign;
    out.hit = true;
    return out;
  }
  const Trajectory tr = run_unit(path, kappa, x, cfg);
  if (tr.absorbed()) {
    out.hit = true;
    out.hit_bracket = tr.hit_bracket;
    out.resolution_limited = tr.resolution_limited;
    out.value = sign * (tr.hit_bracket.mid() - 1.0);
    out.error = 0.5 * tr.hit_bracket.width();
    return out;
  }
  out.value = tr.end_value;
  if (with_error && kappa > 0.0) {
    FlowConfig coarse = cfg;
    coarse.max_step *= 2.0;
    coarse.step_factor = std::min(2.0 * cfg.step_factor, 0.2);
    const Trajectory other = run_unit(path, kappa, x, coarse);
    out.error = other.absorbed() ? std::abs(tr.end_value)
                                 : std::abs(other.end_value - tr.end_value);
  }
  return out;
}

}  // namespace

BoundaryValue h_tilde(const BrownianPath& path, double kappa, Side side,
                      double x, const WeldConfig& cfg) {
  check_kappa(kappa);
  if ((side == Side::plus && x < 0.0) || (side == Side::minus && x > 0.0)) {
    throw std::invalid_argument("h_tilde: sign of x does not match the side");
  }
  if (!std::isfinite(x)) throw std::invalid_argument("h_tilde: x must be finite");
  return evaluate(path, kappa, side, x, cfg.flow, true);
}

PsiResult psi(const BrownianPath& path, double kappa, double x,
              const WeldConfig& cfg) {
  check_kappa(kappa);
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw std::invalid_argument("psi: x must be finite and >= 0");
  }
  if (!(cfg.psi_tolerance > 0.0)) {
    throw std::invalid_argument("psi: tolerance must be positive");
  }
  PsiResult out;
  out.x = x;
  if (x == 0.0) {
    out.at_x = evaluate(path, kappa, Side::plus, 0.0, cfg.flow, false);
    out.at_psi = evaluate(path, kappa, Side::minus, 0.0, cfg.flow, false);
    out.target = 1.0;
    return out;
  }
  out.at_x = evaluate(path, kappa, Side::plus, x, cfg.flow, true);
  out.target = -out.at_x.value;
  out.mode = out.at_x.hit ? MatchMode::hit_time : MatchMode::endpoint;

  // g(y) = h_tilde(-, -y) falls from 1 at y = 0.
  auto g = [&](double y) {
    ++out.evaluations;
    return evaluate(path, kappa, Side::minus, -y, cfg.flow, false).value;
  };
  // Bisection on the fixed dyadic partition of [0, 2^m]: every x of a row
  // walks the same tree of midpoints, so roots for ordered targets come out
  // ordered even where g is nearly flat.
  double lo = 0.0;
  double g_lo = 1.0;
  double hi = 1.0;
  double g_hi = g(hi);
  int growth = 0;
  while (g_hi >= out.target) {
    if (++growth > cfg.max_growth) {
      throw std::runtime_error("psi: root interval growth cap exceeded at x = " +
                               std::to_string(x));
    }
    hi *= 2.0;
    g_hi = g(hi);
  }
  const double width = std::ldexp(1.0, std::ilogb(cfg.psi_tolerance));
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm >= out.target) {
      lo = mid;
      g_lo = gm;
    } else {
      hi = mid;
      g_hi = gm;
    }
  }
  out.lo = lo;
  out.hi = hi;
  // g(lo) >= target > g(hi); place the root by the secant of the interval.
  const double frac = std::clamp((g_lo - out.target) / (g_lo - g_hi), 0.0, 1.0);
  out.value = lo + frac * (hi - lo);
  out.solver_span = g_lo - g_hi;
  out.at_psi = evaluate(path, kappa, Side::minus, -out.value, cfg.flow, true);
  out.residual = out.at_psi.value - out.target;

  // Worst case: the whole root interval, plus the value-space uncertainty of
  // both sides carried through the secant slope of the final interval.
  out.error = hi - lo;
  const double slope = (g_lo - g_hi) / (hi - lo);
  if (slope > 0.0) {
    out.error += (out.at_x.error + out.at_psi.error) / slope;
  }
  return out;
}

MatchCheck check_matching(const PsiResult& r) {
  MatchCheck c;
  c.discrepancy = std::abs(r.residual);
  c.allowed = r.solver_span + 1e-12 * std::max(1.0, std::abs(r.target));
  if (r.mode == MatchMode::hit_time) {
    c.allowed += r.at_x.error + (r.at_psi.hit ? r.at_psi.error : 0.0);
  }
  c.pass = c.discrepancy <= c.allowed;
  return c;
}

std::size_t WeldingTable::total_row_violations() const noexcept {
  std::size_t total = 0;
  for (std::size_t v : row_violations) total += v;
  return total;
}

WeldingTable weld_field(const BrownianPath& path,
                        const std::vector<double>& kappas,
                        const std::vector<double>& xs, const WeldConfig& cfg,
                        unsigned threads) {
  if (kappas.empty() || xs.empty()) {
    throw std::invalid_argument("weld_field: grids must be non-empty");
  }
  if (!std::is_sorted(kappas.begin(), kappas.end()) ||
      !std::is_sorted(xs.begin(), xs.end())) {
    throw std::invalid_argument("weld_field: grids must be sorted");
  }
  for (double k : kappas) check_kappa(k);
  if (xs.front() < 0.0) {
    throw std::invalid_argument("weld_field: x grid must be >= 0");
  }
  WeldingTable table;
  table.kappas = kappas;
  table.xs = xs;
  const std::size_t nk = kappas.size();
  const std::size_t nx = xs.size();
  table.entries.resize(nk * nx);
  const BrownianPath window = path.extended_to(1.0);
  parallel_for(nk * nx, threads, [&](std::size_t n) {
    table.entries[n] = psi(window, kappas[n / nx], xs[n % nx], cfg);
  });

  table.row_violations.assign(nk, 0);
  for (std::size_t i = 0; i < nk; ++i) {
    for (std::size_t j = 0; j < nx; ++j) {
      const PsiResult& e = table.at(i, j);
      if (e.x == 0.0 && e.value != 0.0) table.rows_start_at_zero = false;
      if (j + 1 < nx) {
        const PsiResult& next = table.at(i, j + 1);
        if (xs[j + 1] > xs[j] && !(next.value > e.value)) {
          ++table.row_violations[i];
        }
        table.max_x_increment =
            std::max(table.max_x_increment, std::abs(next.value - e.value));
      }
      if (i + 1 < nk) {
        table.max_kappa_increment = std::max(
            table.max_kappa_increment, std::abs(table.at(i + 1, j).value - e.value));
      }
    }
  }
  return table;
}

}  // namespace zerohit
