// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "zerohit/commands.hpp"
#include "zerohit/complex_flow.hpp"
#include "zerohit/config.hpp"
#include "zerohit/experiments.hpp"
#include "zerohit/flow.hpp"
#include "zerohit/special_functions.hpp"
#include "zerohit/welding.hpp"

using namespace zerohit;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 1;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(a + (b - a) * double(i) / double(n - 1));
  return out;
}

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

Outcome exact_law() {
  const std::vector<double> probs = {0.1, 0.25, 0.5, 0.75, 0.9, 0.95};
  Outcome o{true, ""};
  for (double delta : {0.0, -1.0, -2.0}) {
    const InverseGammaParams law = InverseGammaParams::for_bessel_dimension(delta);
    std::vector<double> ts;
    for (double p : probs) ts.push_back(inverse_gamma_quantile(law, p));
    const ExactLawReport rep = verify_exact_law(delta, 10000, ts, kSeed, {}, worker_count());
    double worst = 0.0;
    bool all = true;
    for (const CdfCheck& c : rep.points) {
      all = all && c.pass;
      worst = std::max(worst, std::abs(c.empirical - c.exact) / c.allowed);
    }
    o.pass = o.pass && all;
    o.detail += fmt("delta=%g", delta) + fmt(" worst |emp-F|/allowed=%.3f; ", worst);
  }
  return o;
}

Outcome kappa_zero() {
  const BrownianPath path({kSeed, 0}, 1.0);
  double worst = 0.0;
  for (double x : {0.1, 0.5, 1.0, 1.5, 2.0}) {
    worst = std::max(worst, std::abs(hitting_time(path, FlowParams::loewner(0.0), 0.0, x).point - x * x / 4.0));
  }
  for (double t : {0.0, 0.1, 0.25, 0.5, 1.0}) {
    const TracePoint tp = trace_point(path, 0.0, t, 0.1);
    worst = std::max(worst, std::abs(tp.value - std::complex<double>(0.0, 2.0 * std::sqrt(t))));
  }
  std::vector<double> times;
  for (std::uint64_t i = 0; i < 50; ++i) {
    times.push_back(hitting_time(BrownianPath({kSeed, i}, 1.0), FlowParams::loewner(1e-6), 0.0, 1.0).point);
  }
  const double med = sample_quantile(times, 0.5);
  Outcome o;
  o.pass = worst <= 1e-12 && std::abs(med - 0.25) <= 1e-3;
  o.detail = fmt("closed-form max error %.2e; ", worst) + fmt("kappa=1e-6 median T(1)=%.6f", med);
  return o;
}

Outcome mean_identity() {
  const DirectMeanReport direct = direct_mean_check(2.0, 100000, kSeed);
  const ExactLawReport sim = verify_exact_law(-2.0, 1000, {0.5}, kSeed, {}, worker_count());
  const double z_direct = (direct.sample.mean - 0.5) / direct.sample.se;
  const double z_sim = (sim.mean.sample.mean - 0.5) / sim.mean.sample.se;
  Outcome o;
  o.pass = std::abs(z_direct) <= 3.0 && std::abs(z_sim) <= 3.0;
  o.detail = fmt("direct mean %.4f", direct.sample.mean) + fmt(" (z=%.2f); ", z_direct) +
             fmt("simulated mean %.4f", sim.mean.sample.mean) + fmt(" (z=%.2f)", z_sim);
  return o;
}

Outcome laplace() {
  const std::vector<LaplaceCheck> lc = laplace_check({0.1, 1.0, 10.0}, 100000, kSeed);
  bool mc = true;
  double worst_z = 0.0;
  for (const LaplaceCheck& c : lc) {
    mc = mc && c.pass;
    worst_z = std::max(worst_z, std::abs(c.sample.mean - c.exact) / c.sample.se);
  }
  double worst_k1 = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double x = 0.05 * std::pow(1.35, i);
    const double ref = oracle::k1_integral(x);
    worst_k1 = std::max(worst_k1, std::abs(bessel_k1(x) - ref) / ref);
  }
  Outcome o;
  o.pass = mc && worst_k1 <= 1e-8;
  o.detail = fmt("worst |z|=%.2f; ", worst_z) + fmt("K1 max relative error %.2e over 20 points", worst_k1);
  return o;
}

Outcome walk_scaling() {
  const std::vector<double> small = walk_sum_statistic(1000, 200, kSeed, worker_count());
  const std::vector<double> large = walk_sum_statistic(100000, 200, kSeed, worker_count());
  const double med = sample_quantile(large, 0.5);
  const double iqr_small = sample_quantile(small, 0.75) - sample_quantile(small, 0.25);
  const double iqr_large = sample_quantile(large, 0.75) - sample_quantile(large, 0.25);
  Outcome o;
  o.pass = med >= 0.4 && med <= 0.6 && iqr_large < iqr_small;
  o.detail = fmt("median %.4f; ", med) + fmt("IQR %.4f at n=1e5", iqr_large) +
             fmt(" vs %.4f at n=1e3", iqr_small);
  return o;
}

Outcome event_probability() {
  const WalkSettings defaults;
  Outcome o{true, ""};
  std::uint64_t i = 0;
  for (const EventSpec& e : defaults.events) {
    const EventProbability p = event_a_probability(e.x, e.k, e.lambda, 10000, kSeed + 1000 + i++);
    o.pass = o.pass && p.pass;
    o.detail += fmt("%.2f", (p.empirical - p.exact) / p.se) + " ";
  }
  o.detail = "z-scores " + o.detail;
  return o;
}

Outcome pathwise_order() {
  const std::vector<double> xs = linspace(0.25, 2.5, 10);
  const std::vector<double> deltas = linspace(-4.5, 0.0, 10);
  std::size_t violations = 0;
  std::size_t sandwich_failures = 0;
  std::size_t cells = 0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const HittingTimeField f = compute_field(BrownianPath({kSeed, i}, 1.0), xs, deltas, {}, worker_count());
    violations += f.x_violations + f.delta_violations;
    for (std::size_t d = 0; d < deltas.size(); ++d) {
      const double two_a = 1.0 - deltas[d];
      for (std::size_t j = 0; j < xs.size(); ++j) {
        const HittingTime& h = f.at(d, j);
        if (h.censored) continue;
        ++cells;
        const double up = xs[j] + h.driver_max;
        const double down = std::max(0.0, xs[j] + h.driver_min);
        const double slack = h.bracket.width() + 1e-9;
        if (h.bracket.lo > up * up / two_a + slack || down * down / two_a > h.bracket.hi + slack) {
          ++sandwich_failures;
        }
      }
    }
  }
  Outcome o;
  o.pass = violations == 0 && sandwich_failures == 0;
  o.detail = std::to_string(violations) + " monotonicity violations; " +
             std::to_string(sandwich_failures) + " sandwich failures over " +
             std::to_string(cells) + " cells";
  return o;
}

Outcome up_bound() {
  std::size_t failures = 0;
  std::size_t steps = 0;
  for (double y : {0.01, 0.1, 1.0}) {
    for (std::uint64_t i = 0; i < 100; ++i) {
      const UpBoundReport rep = check_up_bound(BrownianPath({kSeed, i}, 1.0), 4.0, 0.0, 1.0, y);
      failures += rep.ok() ? 0 : 1;
      steps += rep.steps;
    }
  }
  Outcome o;
  o.pass = failures == 0;
  o.detail = std::to_string(failures) + " failing integrations of 300 (kappa=4), " +
             std::to_string(steps) + " steps checked";
  return o;
}

Outcome welding_structure() {
  const WeldSettings defaults;
  std::size_t row_violations = 0;
  std::size_t match_failures = 0;
  std::size_t entries = 0;
  bool zero_ok = true;
  double identity_error = 0.0;
  for (std::uint64_t i = 0; i < 5; ++i) {
    const WeldingTable t =
        weld_field(BrownianPath({kSeed, i}, 1.0), defaults.kappas, defaults.xs, {}, worker_count());
    row_violations += t.total_row_violations();
    for (std::size_t k = 0; k < t.kappas.size(); ++k) {
      zero_ok = zero_ok && t.at(k, 0).value == 0.0;
      for (std::size_t j = 0; j < t.xs.size(); ++j) {
        const PsiResult& r = t.at(k, j);
        ++entries;
        if (!check_matching(r).pass) ++match_failures;
        if (t.kappas[k] == 0.0) identity_error = std::max(identity_error, std::abs(r.value - t.xs[j]));
      }
    }
  }
  Outcome o;
  o.pass = zero_ok && row_violations == 0 && identity_error <= 1e-6 && match_failures == 0;
  o.detail = std::string("psi(k,0)=0: ") + (zero_ok ? "yes" : "no") + "; " +
             std::to_string(row_violations) + " row violations; " +
             fmt("identity row error %.2e; ", identity_error) + std::to_string(match_failures) +
             " matching failures of " + std::to_string(entries);
  return o;
}

Outcome continuity_proxies() {
  const std::vector<RefinementLevel> field = field_refinement(
      BrownianPath({kSeed, 0}, 1.0), linspace(0.25, 2.5, 10), linspace(-4.5, 0.0, 10), 3, {}, worker_count());
  bool field_ok = true;
  std::string detail = "field x-increments";
  for (std::size_t l = 0; l < field.size(); ++l) {
    detail += fmt(" %.4f", field[l].max_x_increment);
    if (l > 0) {
      field_ok = field_ok && field[l].max_x_increment < field[l - 1].max_x_increment &&
                 field[l].max_delta_increment < field[l - 1].max_delta_increment;
    }
  }
  detail += ", delta-increments";
  for (const RefinementLevel& l : field) detail += fmt(" %.4f", l.max_delta_increment);

  const WeldSettings defaults;
  std::vector<double> ks = defaults.kappas;
  std::vector<double> xs = defaults.xs;
  const BrownianPath path({kSeed, 0}, 1.0);
  bool weld_ok = true;
  double prev_k = 0.0;
  double prev_x = 0.0;
  detail += "; weld kappa-increments";
  std::string x_detail = ", x-increments";
  for (int l = 0; l < 3; ++l) {
    const WeldingTable t = weld_field(path, ks, xs, {}, worker_count());
    detail += fmt(" %.4f", t.max_kappa_increment);
    x_detail += fmt(" %.4f", t.max_x_increment);
    if (l > 0) weld_ok = weld_ok && t.max_kappa_increment < prev_k && t.max_x_increment < prev_x;
    prev_k = t.max_kappa_increment;
    prev_x = t.max_x_increment;
    ks = refine_grid(ks);
    xs = refine_grid(xs);
  }
  Outcome o;
  o.pass = field_ok && weld_ok;
  o.detail = "diagnostic only; " + detail + x_detail;
  return o;
}

std::map<std::string, std::string> read_tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    out[e.path().filename().string()] =
        std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return out;
}

Outcome determinism() {
  // Reduced sizes keep this quick; every command runs twice at 1 and at 8
  // workers.
  RunConfig cfg;
  cfg.seed = 12345;
  cfg.verify_law.deltas = {0.0, -2.0};
  cfg.verify_law.n_paths = 400;
  cfg.field.paths = 2;
  cfg.field.refine_levels = 2;
  cfg.weld.xs = {0.0, 0.5, 1.0, 1.5, 2.0, 3.0};
  cfg.walk.k = 100;
  cfg.walk.paths = 4;
  cfg.walk.sum_n = {1000, 5000};
  cfg.walk.sum_replicates = 50;
  cfg.walk.event_replicates = 500;
  cfg.trace.points = 9;

  using Cmd = std::function<int(const RunConfig&, const CommandContext&)>;
  const std::vector<std::pair<std::string, Cmd>> commands = {
      {"verify-law", cmd_verify_law}, {"field", cmd_field}, {"weld", cmd_weld},
      {"walk", cmd_walk},             {"trace", cmd_trace}};
  const fs::path root = fs::temp_directory_path() / "zerohit_acceptance";
  std::size_t files = 0;
  std::vector<std::string> mismatched;
  for (const auto& [name, cmd] : commands) {
    std::map<std::string, std::string> reference;
    int run = 0;
    for (unsigned threads : {1u, 8u, 1u, 8u}) {
      const fs::path dir = root / (name + "_" + std::to_string(run++));
      fs::remove_all(dir);
      fs::create_directories(dir);
      CommandContext ctx;
      ctx.out_dir = dir;
      ctx.threads = threads;
      cmd(cfg, ctx);
      const auto tree = read_tree(dir);
      if (reference.empty()) {
        reference = tree;
        files += tree.size();
      } else if (tree != reference) {
        mismatched.push_back(name);
        break;
      }
    }
  }
  fs::remove_all(root);
  Outcome o;
  o.pass = mismatched.empty() && files > 0;
  o.detail = std::to_string(files) + " files compared over 4 runs each";
  for (const std::string& m : mismatched) o.detail += "; mismatch in " + m;
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
      {"exact hitting law", exact_law},
      {"kappa=0 oracle", kappa_zero},
      {"mean identity", mean_identity},
      {"Laplace identity", laplace},
      {"walk scaling", walk_scaling},
      {"event probability", event_probability},
      {"pathwise order", pathwise_order},
      {"complex up-bound", up_bound},
      {"welding structure", welding_structure},
      {"continuity proxies", continuity_proxies},
      {"determinism", determinism},
  };
  int failures = 0;
  int index = 1;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d (%s): %s [%s] (%.1fs)\n", index++, name, o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
