#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "zerohit/brownian_path.hpp"

namespace zerohit {

enum class FlowKind { bessel, loewner };

/// Dimension delta of a Bessel flow, or kappa of a reverse Loewner flow.
/// The two are tied by delta = 1 - 4 / kappa; both numbers are stored so a
/// conversion round trip is exact.
class FlowParams {
 public:
  /// Requires delta <= 0.
  static FlowParams bessel(double delta);
  /// Requires kappa in [0, 4].
  static FlowParams loewner(double kappa);

  FlowKind kind() const noexcept { return kind_; }
  double delta() const noexcept { return delta_; }
  double kappa() const noexcept { return kappa_; }

  /// Same process in the other normalization; kappa must be positive.
  FlowParams to_bessel() const;
  FlowParams to_loewner() const;

  /// Coefficient of dB: 1 for Bessel, sqrt(kappa) for Loewner.
  double noise_scale() const noexcept;
  /// a in the drift -a / Y: (1 - delta) / 2 for Bessel, 2 for Loewner.
  double drift_strength() const noexcept;
  bool deterministic() const noexcept { return noise_scale() == 0.0; }

  friend bool operator==(const FlowParams&, const FlowParams&) = default;

 private:
  FlowParams(FlowKind kind, double delta, double kappa)
      : kind_(kind), delta_(delta), kappa_(kappa) {}

  FlowKind kind_;
  double delta_;
  double kappa_;
};

struct FlowConfig {
  /// Upper bound on any step.
  double max_step = 1.0 / 64.0;
  /// Steps are min(max_step, step_factor * Y^2, 0.1 Y^2 / a). The last term
  /// only binds for very negative delta (a > 10) and keeps the drift from
  /// moving Y by more than about a tenth per step.
  double step_factor = 0.0025;
  /// |Y| below hit_threshold * max(|x|, 1) forces a bracket attempt.
  double hit_threshold = 1e-6;
  /// Target bracket width, relative to max(1, hitting time).
  double bracket_tolerance = 1e-8;
  /// Censoring time for hitting_time.
  double cap = 1e4;
  bool record = false;
  std::size_t record_stride = 1;
};

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;

  double width() const noexcept { return hi - lo; }
  double mid() const noexcept { return 0.5 * (lo + hi); }
  bool contains(double t) const noexcept { return lo <= t && t <= hi; }
};

enum class FlowStatus { alive, absorbed };

/// A discretized solution started from x at time s.
struct Trajectory {
  FlowParams params = FlowParams::loewner(0.0);
  double start_time = 0.0;
  double start_value = 0.0;
  std::vector<double> times;
  std::vector<double> values;
  FlowStatus status = FlowStatus::alive;
  /// Certified interval holding the zero-hitting time when absorbed.
  Bracket hit_bracket;
  /// Horizon when alive; last alive sample otherwise.
  double end_time = 0.0;
  double end_value = 0.0;
  /// The bracket could not be narrowed to tolerance before the path's
  /// resolution floor.
  bool resolution_limited = false;
  /// Extremes of B_t - B_s over the visited samples before the hit.
  double driver_min = 0.0;
  double driver_max = 0.0;
  std::size_t steps = 0;

  bool absorbed() const noexcept { return status == FlowStatus::absorbed; }
};

struct HittingTime {
  /// Bracket midpoint; the cap when censored.
  double point = 0.0;
  /// [cap, inf] when censored.
  Bracket bracket;
  bool censored = false;
  double cap = 0.0;
  bool resolution_limited = false;
  double driver_min = 0.0;
  double driver_max = 0.0;
};

/// Split-step integrator for dY = sigma dB - (a / Y) dt on one shared path.
///
/// Each step first applies the exact drift flow Y -> sqrt(Y^2 - 2 a dt) and
/// then adds the Brownian increment, so the scheme is exact when sigma = 0.
/// Steps are dyadic intervals of the path's tree. Near zero the stepper tries
/// to close a bracket on the hitting time using the comparison with the
/// noiseless flow: from (t, Y), the time left is at least
/// (Y + sigma inf dB)_+^2 / 2a and at most (Y + sigma sup dB)^2 / 2a.
class FlowStepper {
 public:
  FlowStepper(const BrownianPath& path, FlowParams params, double start_time,
              double x, const FlowConfig& cfg);

  /// Runs until absorption or `end_tick`. Returns true if still alive.
  bool run_until(std::uint64_t end_tick);
  /// One step of at most 2^max_exponent ticks, not past `end_tick`. Tries a
  /// bracket first when Y is small. Returns true if still alive.
  bool step(int max_exponent, std::uint64_t end_tick);
  /// Exponent (in ticks) of the step the stepper would choose on its own.
  int desired_exponent() const noexcept;

  std::uint64_t tick() const noexcept { return cursor_.tick(); }
  double time() const noexcept { return cursor_.time(); }
  /// Current value in the caller's sign convention.
  double value() const noexcept { return sign_ * y_; }
  bool absorbed() const noexcept { return absorbed_; }
  const Bracket& bracket() const noexcept { return bracket_; }
  const PathCursor& cursor() const noexcept { return cursor_; }

  /// Moves the recorded state out into a Trajectory.
  Trajectory finish();

 private:
  bool try_bracket(std::uint64_t end_tick);
  void record();
  void absorb(Bracket b);

  const BrownianPath* path_;
  FlowParams params_;
  FlowConfig cfg_;
  double sigma_;
  double a_;
  double sign_;
  double y_;
  double b_start_;
  double start_time_;
  double start_value_;
  double hit_floor_;
  double last_attempt_y_ = std::numeric_limits<double>::infinity();
  PathCursor cursor_;
  bool absorbed_ = false;
  bool resolution_limited_ = false;
  Bracket bracket_;
  double driver_min_ = 0.0;
  double driver_max_ = 0.0;
  std::size_t steps_ = 0;
  std::vector<double> times_;
  std::vector<double> values_;
};

/// Solves the flow from x at time s (snapped up to the path's tick grid) until
/// absorption or `horizon`. The horizon may exceed the path's window; the
/// driver continues on the same seed.
Trajectory integrate(const BrownianPath& path, const FlowParams& params,
                     double s, double x, double horizon,
                     const FlowConfig& cfg = {});

/// Zero-hitting time from x at time s, doubling the window up to cfg.cap.
HittingTime hitting_time(const BrownianPath& path, const FlowParams& params,
                         double s, double x, const FlowConfig& cfg = {});

/// Trajectory value at u, reproducing the integration up to u.
/// Throws if u precedes the start or lies past absorption.
double restart_value(const BrownianPath& path, const Trajectory& traj,
                     double u, const FlowConfig& cfg = {});

struct ComparisonReport {
  std::size_t compared = 0;
  std::size_t violations = 0;
  double first_violation_time = std::numeric_limits<double>::quiet_NaN();
  double max_excess = 0.0;
  /// The upper trajectory was absorbed strictly before the lower one.
  bool order_violation = false;

  bool ok() const noexcept { return violations == 0 && !order_violation; }
};

/// Checks low <= high at every common sample time until `low` absorbs.
/// Requires equal start times and either equal params with
/// low.start_value <= high.start_value, or equal starts with low's delta no
/// larger than high's (Bessel normalization). Both must be recorded.
ComparisonReport comparison_check(const Trajectory& low,
                                  const Trajectory& high,
                                  double relative_slack = 1e-15);

struct SandwichReport {
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  /// Hitting time minus start time.
  Bracket elapsed;
  bool holds = false;
};

/// Compares the elapsed hitting time with (x + sigma inf B)_+^2 / 2a and
/// (x + sigma sup B)^2 / 2a built from the trajectory's driver extremes.
SandwichReport sandwich_check(const Trajectory& traj, double slack);

}  // namespace zerohit
