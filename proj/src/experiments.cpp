#include "zerohit/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "zerohit/parallel.hpp"
#include "zerohit/random_stream.hpp"
#include "zerohit/special_functions.hpp"

namespace zerohit {

double sample_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("sample_quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("sample_quantile: p must lie in [0, 1]");
  }
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= values.size()) return values.back();
  const double frac = pos - static_cast<double>(i);
  return values[i] + frac * (values[i + 1] - values[i]);
}

MeanEstimate mean_estimate(const std::vector<double>& values) {
  MeanEstimate m;
  m.n = values.size();
  if (m.n == 0) return m;
  m.mean = std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(m.n);
  if (m.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.se = std::sqrt(ss / static_cast<double>(m.n - 1) / static_cast<double>(m.n));
  }
  return m;
}

double lag1_autocorrelation(const std::vector<std::vector<double>>& sequences) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& s : sequences) {
    sum = std::accumulate(s.begin(), s.end(), sum);
    count += s.size();
  }
  if (count < 2) throw std::invalid_argument("lag1_autocorrelation: too few values");
  const double mean = sum / static_cast<double>(count);
  double num = 0.0;
  double den = 0.0;
  for (const auto& s : sequences) {
    for (std::size_t k = 0; k < s.size(); ++k) {
      den += (s[k] - mean) * (s[k] - mean);
      if (k + 1 < s.size()) num += (s[k] - mean) * (s[k + 1] - mean);
    }
  }
  return den > 0.0 ? num / den : 0.0;
}

// ---------------------------------------------------------------------------

namespace {

// b surely hits later than a: a's bracket lies strictly below b's.
bool surely_before(const HittingTime& a, const HittingTime& b) {
  if (a.censored) return false;
  return a.bracket.hi < b.bracket.lo;
}

// a surely hits after b.
bool surely_after(const HittingTime& a, const HittingTime& b) {
  if (b.censored) return false;
  if (a.censored) return true;
  return a.bracket.lo > b.bracket.hi;
}

void check_sorted(const std::vector<double>& grid, const char* what) {
  if (grid.empty()) {
    throw std::invalid_argument(std::string(what) + " grid must be non-empty");
  }
  if (!std::is_sorted(grid.begin(), grid.end())) {
    throw std::invalid_argument(std::string(what) + " grid must be sorted");
  }
}

}  // namespace

HittingTimeField compute_field(const BrownianPath& path,
                               const std::vector<double>& xs,
                               const std::vector<double>& deltas,
                               const FlowConfig& cfg, unsigned threads) {
  check_sorted(xs, "x");
  check_sorted(deltas, "delta");
  if (deltas.back() > 0.0) {
    throw std::invalid_argument("compute_field: delta entries must be <= 0");
  }
  HittingTimeField f;
  f.seed = path.seed();
  f.xs = xs;
  f.deltas = deltas;
  f.config = cfg;
  const std::size_t nx = xs.size();
  const std::size_t nd = deltas.size();
  f.entries.resize(nx * nd);
  std::vector<FlowParams> params;
  for (double d : deltas) params.push_back(FlowParams::bessel(d));
  parallel_for(nx * nd, threads, [&](std::size_t n) {
    f.entries[n] = hitting_time(path, params[n / nx], 0.0, xs[n % nx], cfg);
  });

  for (std::size_t i = 0; i < nd; ++i) {
    for (std::size_t j = 0; j < nx; ++j) {
      const HittingTime& e = f.at(i, j);
      if (e.censored) ++f.censored;
      if (e.resolution_limited) ++f.resolution_limited;
      if (j + 1 < nx && xs[j + 1] > xs[j]) {
        const HittingTime& next = f.at(i, j + 1);
        if (xs[j] >= 0.0) {
          // zeta increases with x on [0, inf).
          if (!surely_before(e, next) && !(e.censored && next.censored)) {
            ++f.x_violations;
          }
        } else if (xs[j + 1] <= 0.0) {
          if (!surely_before(next, e) && !(e.censored && next.censored)) {
            ++f.x_violations;
          }
        }
        if (!e.censored && !next.censored) {
          f.max_x_increment = std::max(f.max_x_increment, std::abs(next.point - e.point));
        }
      }
      if (i + 1 < nd) {
        const HittingTime& next = f.at(i + 1, j);
        // zeta is non-decreasing in delta.
        if (surely_after(e, next)) ++f.delta_violations;
        if (!e.censored && !next.censored) {
          f.max_delta_increment =
              std::max(f.max_delta_increment, std::abs(next.point - e.point));
        }
      }
    }
  }
  return f;
}

std::vector<double> refine_grid(const std::vector<double>& grid) {
  std::vector<double> out;
  out.reserve(2 * grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i > 0) out.push_back(0.5 * (grid[i - 1] + grid[i]));
    out.push_back(grid[i]);
  }
  return out;
}

std::vector<RefinementLevel> field_refinement(const BrownianPath& path,
                                              const std::vector<double>& xs,
                                              const std::vector<double>& deltas,
                                              int levels, const FlowConfig& cfg,
                                              unsigned threads) {
  if (levels < 1) throw std::invalid_argument("field_refinement: levels must be >= 1");
  std::vector<RefinementLevel> out;
  std::vector<double> gx = xs;
  std::vector<double> gd = deltas;
  for (int l = 0; l < levels; ++l) {
    if (l > 0) {
      gx = refine_grid(gx);
      gd = refine_grid(gd);
    }
    const HittingTimeField f = compute_field(path, gx, gd, cfg, threads);
    out.push_back({gx.size(), gd.size(), f.max_x_increment,
                   f.max_delta_increment, f.x_violations + f.delta_violations});
  }
  return out;
}

// ---------------------------------------------------------------------------

ExactLawReport verify_exact_law(double delta, std::size_t n_paths,
                                const std::vector<double>& quantile_points,
                                std::uint64_t seed, const FlowConfig& cfg,
                                unsigned threads) {
  const FlowParams params = FlowParams::bessel(delta);
  const InverseGammaParams law = InverseGammaParams::for_bessel_dimension(delta);
  if (n_paths == 0) throw std::invalid_argument("verify_exact_law: n_paths must be positive");
  for (double t : quantile_points) {
    if (!(t > 0.0 && t < cfg.cap)) {
      throw std::invalid_argument("verify_exact_law: quantile points must lie in (0, cap)");
    }
  }
  ExactLawReport rep;
  rep.delta = delta;
  rep.alpha = law.alpha();
  rep.beta = law.beta();
  rep.seed = seed;
  rep.n_paths = n_paths;
  rep.samples.resize(n_paths);
  parallel_for(n_paths, threads, [&](std::size_t i) {
    const BrownianPath path({seed, i}, 1.0);
    rep.samples[i] = hitting_time(path, params, 0.0, 1.0, cfg);
  });
  for (const HittingTime& h : rep.samples) {
    if (h.censored) ++rep.censored;
    if (h.resolution_limited) ++rep.resolution_limited;
  }
  if (2 * rep.censored > n_paths) {
    throw std::runtime_error("verify_exact_law: insufficient uncensored samples");
  }

  const double n = static_cast<double>(n_paths);
  rep.pass = true;
  for (double t : quantile_points) {
    CdfCheck c;
    c.t = t;
    c.exact = inverse_gamma_cdf(law, t);
    std::size_t below = 0;
    std::size_t surely_below = 0;
    std::size_t maybe_below = 0;
    for (const HittingTime& h : rep.samples) {
      if (h.point <= t) ++below;
      if (h.bracket.hi <= t) ++surely_below;
      if (h.bracket.lo <= t) ++maybe_below;
    }
    c.empirical = static_cast<double>(below) / n;
    c.straddling = maybe_below - surely_below;
    c.se = std::sqrt(c.exact * (1.0 - c.exact) / n);
    c.allowed = 3.0 * c.se + static_cast<double>(c.straddling) / n;
    c.pass = std::abs(c.empirical - c.exact) <= c.allowed;
    rep.pass = rep.pass && c.pass;
    rep.points.push_back(c);
  }

  rep.mean.expected = inverse_gamma_mean(law);
  rep.mean.finite = std::isfinite(rep.mean.expected);
  rep.mean.gated = law.alpha() >= 2.0;
  std::vector<double> points;
  points.reserve(n_paths);
  for (const HittingTime& h : rep.samples) points.push_back(h.point);
  rep.mean.sample = mean_estimate(points);
  if (rep.mean.gated) {
    rep.mean.pass =
        std::abs(rep.mean.sample.mean - rep.mean.expected) <= 3.0 * rep.mean.sample.se;
    rep.pass = rep.pass && rep.mean.pass;
  }
  return rep;
}

DirectMeanReport direct_mean_check(double alpha, std::size_t n,
                                   std::uint64_t seed) {
  const InverseGammaParams law(alpha, 0.5);
  DirectMeanReport rep;
  rep.alpha = alpha;
  rep.expected = inverse_gamma_mean(law);
  RandomStream stream(seed, 0);
  std::vector<double> draws(n);
  for (double& d : draws) d = inverse_gamma_sample(law, stream);
  rep.sample = mean_estimate(draws);
  rep.pass = std::isfinite(rep.expected) &&
             std::abs(rep.sample.mean - rep.expected) <= 3.0 * rep.sample.se;
  return rep;
}

std::vector<LaplaceCheck> laplace_check(const std::vector<double>& ts,
                                        std::size_t n, std::uint64_t seed) {
  const InverseGammaParams law(1.0, 0.5);
  RandomStream stream(seed, 0);
  std::vector<double> draws(n);
  for (double& d : draws) d = inverse_gamma_sample(law, stream);
  std::vector<LaplaceCheck> out;
  for (double t : ts) {
    LaplaceCheck c;
    c.t = t;
    c.exact = laplace_inverse_gamma(t);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::exp(-t * draws[i]);
    c.sample = mean_estimate(v);
    c.pass = std::abs(c.sample.mean - c.exact) <= 3.0 * c.sample.se;
    out.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<double> walk_sum_statistic(std::size_t n, std::size_t replicates,
                                       std::uint64_t seed, unsigned threads) {
  if (n < 2) throw std::invalid_argument("walk_sum_statistic: n must be >= 2");
  const InverseGammaParams law(1.0, 0.5);
  const double norm = static_cast<double>(n) * std::log(static_cast<double>(n));
  std::vector<double> out(replicates);
  parallel_for(replicates, threads, [&](std::size_t r) {
    RandomStream stream(seed, r);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += inverse_gamma_sample(law, stream);
    out[r] = sum / norm;
  });
  return out;
}

WalkRun bessel_walk(const BrownianPath& path, double x, std::size_t k,
                    const FlowConfig& cfg) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::invalid_argument("bessel_walk: x must be positive");
  }
  const FlowParams params = FlowParams::loewner(4.0);
  WalkRun run;
  run.x = x;
  run.k = k;
  run.times.push_back(0.0);
  double start = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    FlowConfig local = cfg;
    local.cap = start + cfg.cap;
    const BrownianPath window = path.extended_to(start + 1.0);
    const HittingTime h = hitting_time(window, params, start, 2.0 * x, local);
    if (h.resolution_limited) ++run.resolution_limited;
    if (h.censored) {
      run.censored = true;
      break;
    }
    run.times.push_back(h.point);
    run.increments.push_back(h.point - start);
    run.brackets.push_back({h.bracket.lo - start, h.bracket.hi - start});
    start = window.time_of(window.ceil_tick(h.point));
  }
  return run;
}

EventProbability event_a_probability(double x, std::size_t k, double lambda,
                                     std::size_t replicates,
                                     std::uint64_t seed) {
  if (!(x > 0.0) || k == 0 || !(lambda > 0.0) || replicates == 0) {
    throw std::invalid_argument("event_a_probability: parameters must be positive");
  }
  const InverseGammaParams law(1.0, 0.5);
  EventProbability ev;
  ev.x = x;
  ev.k = k;
  ev.lambda = lambda;
  ev.replicates = replicates;
  ev.exact = -std::expm1(-static_cast<double>(k) * x * x / (2.0 * lambda));
  ev.via_cdf = 1.0 - std::pow(inverse_gamma_cdf(law, lambda / (x * x)),
                              static_cast<double>(k));
  std::size_t hits = 0;
  for (std::size_t r = 0; r < replicates; ++r) {
    RandomStream stream(seed, r);
    bool any = false;
    for (std::size_t i = 0; i < k; ++i) {
      if (x * x * inverse_gamma_sample(law, stream) > lambda) any = true;
    }
    if (any) ++hits;
  }
  const double n = static_cast<double>(replicates);
  ev.empirical = static_cast<double>(hits) / n;
  ev.se = std::sqrt(ev.exact * (1.0 - ev.exact) / n);
  ev.pass = std::abs(ev.empirical - ev.exact) <= 3.0 * ev.se;
  return ev;
}

KappaSupReport kappa_sup_vanishes(double x, const std::vector<double>& kappas,
                                  std::size_t n_paths, std::uint64_t seed,
                                  const FlowConfig& cfg, unsigned threads) {
  if (!(x > 0.0)) throw std::invalid_argument("kappa_sup_vanishes: x must be positive");
  if (n_paths == 0) throw std::invalid_argument("kappa_sup_vanishes: n_paths must be positive");
  for (std::size_t i = 0; i + 1 < kappas.size(); ++i) {
    if (!(kappas[i + 1] < kappas[i])) {
      throw std::invalid_argument("kappa_sup_vanishes: kappas must be decreasing");
    }
  }
  KappaSupReport rep;
  rep.x = x;
  for (double kappa : kappas) {
    const FlowParams params = FlowParams::loewner(kappa);
    std::vector<HittingTime> hits(n_paths);
    parallel_for(n_paths, threads, [&](std::size_t i) {
      const BrownianPath path({seed, i}, 1.0);
      hits[i] = hitting_time(path, params, 0.0, x, cfg);
    });
    KappaSupRow row;
    row.kappa = kappa;
    std::vector<double> sups;
    std::vector<double> times;
    for (const HittingTime& h : hits) {
      if (h.censored) ++row.censored;
      sups.push_back(std::sqrt(kappa) *
                     std::max(std::abs(h.driver_min), std::abs(h.driver_max)));
      times.push_back(h.point);
    }
    row.median_sup = sample_quantile(sups, 0.5);
    row.median_hit = sample_quantile(times, 0.5);
    rep.rows.push_back(row);
  }
  rep.decreasing = true;
  for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
    if (!(rep.rows[i + 1].median_sup < rep.rows[i].median_sup)) rep.decreasing = false;
  }
  return rep;
}

}  // namespace zerohit
