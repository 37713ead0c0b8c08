#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "zerohit/brownian_path.hpp"
#include "zerohit/flow.hpp"

namespace zerohit {

/// A point of the upper half-plane.
struct ComplexState {
  double re = 0.0;
  double im = 1.0;

  std::complex<double> value() const noexcept { return {re, im}; }
  static ComplexState from(std::complex<double> z) noexcept {
    return {z.real(), z.imag()};
  }
};

struct ComplexFlowConfig {
  double max_step = 1.0 / 64.0;
  /// Steps are min(max_step, step_factor * |h| * Im h).
  double step_factor = 0.01;
};

/// Reverse Loewner flow dh = sqrt(kappa) dB - (2 / h) dt from a point of the
/// upper half-plane. Same split-step idea as FlowStepper: the noiseless flow
/// h -> sqrt(h^2 - 4 dt) (root in the upper half-plane) is applied exactly,
/// then the real driver increment is added. Im h never decreases.
class ComplexStepper {
 public:
  ComplexStepper(const BrownianPath& path, double kappa, double start_time,
                 ComplexState z, const ComplexFlowConfig& cfg);

  int desired_exponent() const noexcept;
  void step(int max_exponent, std::uint64_t end_tick);
  void run_until(std::uint64_t end_tick);

  std::uint64_t tick() const noexcept { return cursor_.tick(); }
  double time() const noexcept { return cursor_.time(); }
  double start_time() const noexcept { return start_time_; }
  std::complex<double> value() const noexcept { return h_; }
  /// Driver increment sqrt(kappa) (B_t - B_s) at the current time.
  double driver_offset() const noexcept;
  std::size_t steps() const noexcept { return steps_; }
  /// A step finer than one tick was wanted at least once.
  bool resolution_limited() const noexcept { return resolution_limited_; }

 private:
  const BrownianPath* path_;
  ComplexFlowConfig cfg_;
  double sigma_;
  double start_time_;
  double b_start_;
  PathCursor cursor_;
  std::complex<double> h_;
  std::size_t steps_ = 0;
  bool resolution_limited_ = false;
};

/// h(s, t, z). s and t are snapped up to the tick grid. Requires
/// 0 <= s <= t <= 1 and kappa in [0, 4]. The observer, when given, sees the
/// state after every step.
using ComplexObserver =
    std::function<void(double time, std::complex<double> h, double driver)>;

ComplexState integrate_complex(const BrownianPath& path, double kappa,
                               double s, double t, ComplexState z,
                               const ComplexFlowConfig& cfg = {},
                               const ComplexObserver& observer = {});

struct UpBoundReport {
  std::size_t steps = 0;
  std::size_t real_violations = 0;
  std::size_t imag_violations = 0;
  /// max |Re h| / (2 sup |dU|) over steps with a nonzero sup.
  double max_real_ratio = 0.0;
  /// max Im h - sqrt(y^2 + 4 (t - s)).
  double max_imag_excess = -std::numeric_limits<double>::infinity();
  ComplexState final_state;

  bool ok() const noexcept {
    return real_violations == 0 && imag_violations == 0;
  }
};

/// Runs the flow from iy and checks, after every step,
/// |Re h| <= 2 sup_{[s,t]} |U_r - U_s| (sup over visited samples) and
/// Im h <= sqrt(y^2 + 4 (t - s)).
UpBoundReport check_up_bound(const BrownianPath& path, double kappa, double s,
                             double t, double y,
                             const ComplexFlowConfig& cfg = {},
                             double relative_slack = 1e-12);

struct DominanceReport {
  std::size_t compared = 0;
  std::size_t violations = 0;
  double first_violation_time = std::numeric_limits<double>::quiet_NaN();
  double max_deficit = 0.0;
  /// Time the comparison stopped (t, or the real flow's absorption).
  double stopped_at = 0.0;

  bool ok() const noexcept { return violations == 0; }
};

/// Checks Re h(0, r, x + iy) >= h(0, r, x) on a common step grid for
/// r <= min(t, T_kappa(x)). Requires x, y > 0.
DominanceReport real_dominates(const BrownianPath& path, double kappa,
                               double t, ComplexState z,
                               const FlowConfig& real_cfg = {},
                               const ComplexFlowConfig& cfg = {},
                               double relative_slack = 1e-12);

struct TraceConfig {
  /// Stop once two successive probes differ by less than this.
  double tolerance = 1e-3;
  double y_floor = 1e-5;
  ComplexFlowConfig flow;
};

struct TracePoint {
  std::complex<double> value;
  /// Last Cauchy increment |p(y/2) - p(y)|.
  double increment = 0.0;
  double y_used = 0.0;
  bool converged = false;
  std::vector<double> increments;
};

/// h(1 - t, 1, iy), closed form when kappa = 0.
std::complex<double> trace_probe(const BrownianPath& path, double kappa,
                                 double t, double y,
                                 const ComplexFlowConfig& cfg = {});

/// Approximates the curve point at capacity time t by halving the probe
/// height from y_probe until the Cauchy increment drops below tolerance or
/// the floor is reached. kappa = 0 returns the exact limit 2i sqrt(t).
TracePoint trace_point(const BrownianPath& path, double kappa, double t,
                       double y_probe, const TraceConfig& cfg = {});

}  // namespace zerohit
