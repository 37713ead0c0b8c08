#include "zerohit/flow.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace zerohit {

namespace {

// Number of samples used to scan a bracket window for the driver's extremes.
constexpr double kWindowSamples = 128.0;

int floor_log2_ticks(double ticks) noexcept {
  if (!(ticks >= 1.0)) return 0;
  int e = 0;
  std::frexp(ticks, &e);
  return e - 1;
}

}  // namespace

// ---------------------------------------------------------------------------
// FlowParams

FlowParams FlowParams::bessel(double delta) {
  if (!(delta <= 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("FlowParams: Bessel dimension must be <= 0, got " +
                                std::to_string(delta));
  }
  return {FlowKind::bessel, delta, 4.0 / (1.0 - delta)};
}

FlowParams FlowParams::loewner(double kappa) {
  if (!(kappa >= 0.0 && kappa <= 4.0)) {
    throw std::invalid_argument("FlowParams: kappa must lie in [0, 4], got " +
                                std::to_string(kappa));
  }
  const double delta = kappa > 0.0 ? 1.0 - 4.0 / kappa
                                   : -std::numeric_limits<double>::infinity();
  return {FlowKind::loewner, delta, kappa};
}

FlowParams FlowParams::to_bessel() const {
  if (!(kappa_ > 0.0)) {
    throw std::invalid_argument("FlowParams: kappa = 0 has no Bessel form");
  }
  return {FlowKind::bessel, delta_, kappa_};
}

FlowParams FlowParams::to_loewner() const {
  return {FlowKind::loewner, delta_, kappa_};
}

double FlowParams::noise_scale() const noexcept {
  return kind_ == FlowKind::bessel ? 1.0 : std::sqrt(kappa_);
}

double FlowParams::drift_strength() const noexcept {
  return kind_ == FlowKind::bessel ? 0.5 * (1.0 - delta_) : 2.0;
}

// ---------------------------------------------------------------------------
// FlowStepper

FlowStepper::FlowStepper(const BrownianPath& path, FlowParams params,
                         double start_time, double x, const FlowConfig& cfg)
    : path_(&path),
      params_(params),
      cfg_(cfg),
      sigma_(params.noise_scale()),
      a_(params.drift_strength()),
      sign_(x < 0.0 ? -1.0 : 1.0),
      y_(std::abs(x)),
      cursor_(path.cursor_at(path.ceil_tick(start_time))) {
  if (!(cfg.max_step > 0.0) || !(cfg.step_factor > 0.0) ||
      !(cfg.step_factor < 0.25) || !(cfg.bracket_tolerance > 0.0) ||
      !(cfg.hit_threshold > 0.0) || cfg.record_stride == 0) {
    throw std::invalid_argument("FlowConfig: invalid tolerances");
  }
  if (!std::isfinite(x)) {
    throw std::invalid_argument("FlowStepper: start value must be finite");
  }
  b_start_ = cursor_.value();
  start_time_ = cursor_.time();
  start_value_ = x;
  hit_floor_ = cfg.hit_threshold * std::max(std::abs(x), 1.0);
  if (cfg_.record) record();
  if (y_ == 0.0) absorb({start_time_, start_time_});
}

int FlowStepper::desired_exponent() const noexcept {
  const double y2 = y_ * y_;
  const double dt = std::min({cfg_.max_step, cfg_.step_factor * y2, 0.1 * y2 / a_});
  return floor_log2_ticks(dt / path_->tick_length());
}

void FlowStepper::record() {
  times_.push_back(cursor_.time());
  values_.push_back(sign_ * y_);
}

void FlowStepper::absorb(Bracket b) {
  absorbed_ = true;
  bracket_ = b;
  const double tol =
      cfg_.bracket_tolerance * std::max(1.0, b.hi);
  if (b.width() > tol) resolution_limited_ = true;
}

bool FlowStepper::try_bracket(std::uint64_t end_tick) {
  const double t = cursor_.time();
  const double two_a = 2.0 * a_;
  const double rest = y_ * y_ / two_a;
  if (sigma_ == 0.0) {
    const Bracket b{t + rest, t + rest};
    if (b.hi > path_->time_of(end_tick)) return false;
    absorb(b);
    return true;
  }
  // Find a window w with (Y + sigma sup_{[t,t+w]} dB)^2 / 2a <= w; the hit
  // then lies inside [t, t + w].
  double window = 2.0 * rest;
  for (int iter = 0; iter < 6; ++iter) {
    const double ticks = std::ceil(window / path_->tick_length());
    if (ticks >= static_cast<double>(std::uint64_t{1} << 62)) return false;
    const std::uint64_t window_end = cursor_.tick() + static_cast<std::uint64_t>(ticks);
    const int e = floor_log2_ticks(ticks / kWindowSamples);
    PathCursor scan = cursor_;
    double sup = 0.0;
    double inf = 0.0;
    while (scan.tick() < window_end) {
      scan.advance(e, window_end);
      const double d = sign_ * sigma_ * (scan.value() - cursor_.value());
      sup = std::max(sup, d);
      inf = std::min(inf, d);
    }
    const double hi = (y_ + sup) * (y_ + sup) / two_a;
    if (hi <= window) {
      const double low_arg = std::max(0.0, y_ + inf);
      const double lo = low_arg * low_arg / two_a;
      const Bracket b{t + lo, t + hi};
      const double tol = cfg_.bracket_tolerance * std::max(1.0, b.hi);
      const bool forced = y_ <= hit_floor_;
      if (b.hi > path_->time_of(end_tick)) return false;
      if (b.width() > tol && !forced) return false;
      // Extend the driver extremes over the part of the window that surely
      // precedes the hit.
      PathCursor pre = cursor_;
      const std::uint64_t lo_tick =
          cursor_.tick() + static_cast<std::uint64_t>(lo / path_->tick_length());
      while (pre.tick() < lo_tick) {
        pre.advance(e, lo_tick);
        driver_min_ = std::min(driver_min_, pre.value() - b_start_);
        driver_max_ = std::max(driver_max_, pre.value() - b_start_);
      }
      absorb(b);
      return true;
    }
    window = 2.0 * hi;
  }
  return false;
}

bool FlowStepper::step(int max_exponent, std::uint64_t end_tick) {
  if (absorbed_) return false;
  if (cursor_.tick() >= end_tick) return true;

  const double rest = y_ * y_ / (2.0 * a_);
  const double tol =
      cfg_.bracket_tolerance * std::max(1.0, cursor_.time() + rest);
  if ((rest <= 0.5 * tol || y_ <= hit_floor_) && y_ <= 0.7 * last_attempt_y_) {
    last_attempt_y_ = y_;
    if (try_bracket(end_tick)) return false;
  }

  int e = std::min(desired_exponent(), max_exponent);
  const double b0 = cursor_.value();
  while (true) {
    const std::uint64_t ticks = cursor_.peek_bounded(e, end_tick);
    const double dt = static_cast<double>(ticks) * path_->tick_length();
    const double q = 1.0 - 2.0 * a_ * dt / (y_ * y_);
    const double db = cursor_.peek_value() - b0;
    const double next = q > 0.0 ? y_ * std::sqrt(q) + sign_ * sigma_ * db : 0.0;
    if (next > 0.0) {
      cursor_.commit();
      y_ = next;
      break;
    }
    if (ticks > 1) {
      e = std::bit_width(ticks) - 2;
      continue;
    }
    // Crossed zero inside a single tick.
    absorb({cursor_.time(), cursor_.time() + dt});
    return false;
  }
  ++steps_;
  const double d = cursor_.value() - b_start_;
  driver_min_ = std::min(driver_min_, d);
  driver_max_ = std::max(driver_max_, d);
  if (cfg_.record && (steps_ % cfg_.record_stride == 0 ||
                      cursor_.tick() == end_tick)) {
    record();
  }
  return true;
}

bool FlowStepper::run_until(std::uint64_t end_tick) {
  while (!absorbed_ && cursor_.tick() < end_tick) {
    step(62, end_tick);
  }
  return !absorbed_;
}

Trajectory FlowStepper::finish() {
  Trajectory tr;
  tr.params = params_;
  tr.start_time = start_time_;
  tr.start_value = start_value_;
  tr.status = absorbed_ ? FlowStatus::absorbed : FlowStatus::alive;
  tr.hit_bracket = bracket_;
  tr.end_time = cursor_.time();
  tr.end_value = sign_ * y_;
  tr.resolution_limited = resolution_limited_;
  tr.driver_min = driver_min_;
  tr.driver_max = driver_max_;
  tr.steps = steps_;
  if (cfg_.record && (times_.empty() || times_.back() != tr.end_time)) {
    record();
  }
  tr.times = std::move(times_);
  tr.values = std::move(values_);
  return tr;
}

// ---------------------------------------------------------------------------

namespace {

// Noiseless flow: Y^2 falls at rate 2a, so the hit comes after x^2 / 2a.
Trajectory closed_form(const BrownianPath& path, const FlowParams& params,
                       double s, double x, double horizon,
                       const FlowConfig& cfg) {
  Trajectory tr;
  tr.params = params;
  tr.start_time = path.time_of(path.ceil_tick(s));
  tr.start_value = x;
  const double two_a = 2.0 * params.drift_strength();
  const double hit = tr.start_time + x * x / two_a;
  const double sign = x < 0.0 ? -1.0 : 1.0;
  const double stop = std::min(hit, horizon);
  auto value_at = [&](double t) {
    return sign * std::sqrt(std::max(0.0, x * x - two_a * (t - tr.start_time)));
  };
  if (cfg.record) {
    // Samples on the max_step grid, plus the stopping point.
    for (double t = tr.start_time; t < stop; t += cfg.max_step) {
      tr.times.push_back(t);
      tr.values.push_back(value_at(t));
    }
    tr.times.push_back(stop);
    tr.values.push_back(value_at(stop));
  }
  if (hit <= horizon) {
    tr.status = FlowStatus::absorbed;
    tr.hit_bracket = {hit, hit};
    tr.end_time = hit;
    tr.end_value = 0.0;
  } else {
    tr.status = FlowStatus::alive;
    tr.end_time = horizon;
    tr.end_value = value_at(horizon);
  }
  return tr;
}

}  // namespace

Trajectory integrate(const BrownianPath& path, const FlowParams& params,
                     double s, double x, double horizon,
                     const FlowConfig& cfg) {
  if (!(s >= 0.0) || !(horizon > s)) {
    throw std::invalid_argument("integrate: need 0 <= s < horizon");
  }
  if (params.deterministic()) {
    return closed_form(path, params, s, x, horizon, cfg);
  }
  const BrownianPath window = path.extended_to(horizon);
  FlowStepper stepper(window, params, s, x, cfg);
  stepper.run_until(window.ceil_tick(horizon));
  return stepper.finish();
}

HittingTime hitting_time(const BrownianPath& path, const FlowParams& params,
                         double s, double x, const FlowConfig& cfg) {
  if (!(s >= 0.0) || !(cfg.cap > s)) {
    throw std::invalid_argument("hitting_time: need 0 <= s < cap");
  }
  HittingTime out;
  out.cap = cfg.cap;
  auto finish = [&](const Bracket& b, bool limited, double dmin, double dmax) {
    out.bracket = b;
    out.point = b.mid();
    out.resolution_limited = limited;
    out.driver_min = dmin;
    out.driver_max = dmax;
    return out;
  };
  if (params.deterministic()) {
    const Trajectory tr = closed_form(path, params, s, x, cfg.cap, FlowConfig{});
    if (tr.absorbed()) return finish(tr.hit_bracket, false, 0.0, 0.0);
  } else {
    FlowConfig quiet = cfg;
    quiet.record = false;
    BrownianPath window = path;
    FlowStepper stepper(window, params, s, x, quiet);
    // Horizon chain: each pass doubles the window on the same seed.
    while (true) {
      const double horizon = std::min(window.horizon(), cfg.cap);
      if (!stepper.run_until(window.ceil_tick(horizon))) {
        const Trajectory tr = stepper.finish();
        return finish(tr.hit_bracket, tr.resolution_limited, tr.driver_min,
                      tr.driver_max);
      }
      if (horizon >= cfg.cap) break;
      window = window.extended_to(2.0 * window.horizon());
    }
  }
  out.censored = true;
  out.point = cfg.cap;
  out.bracket = {cfg.cap, std::numeric_limits<double>::infinity()};
  return out;
}

double restart_value(const BrownianPath& path, const Trajectory& traj,
                     double u, const FlowConfig& cfg) {
  if (u < traj.start_time) {
    throw std::invalid_argument("restart_value: u precedes the start time");
  }
  if (traj.absorbed() && u >= traj.hit_bracket.lo) {
    throw std::invalid_argument("restart_value: u lies past absorption");
  }
  if (u == traj.start_time) return traj.start_value;
  const auto it = std::lower_bound(traj.times.begin(), traj.times.end(), u);
  if (it != traj.times.end() && *it == u) {
    return traj.values[static_cast<std::size_t>(it - traj.times.begin())];
  }
  FlowConfig quiet = cfg;
  quiet.record = false;
  const Trajectory head =
      integrate(path, traj.params, traj.start_time, traj.start_value, u, quiet);
  if (head.absorbed()) {
    throw std::invalid_argument("restart_value: u lies past absorption");
  }
  return head.end_value;
}

ComparisonReport comparison_check(const Trajectory& low,
                                  const Trajectory& high,
                                  double relative_slack) {
  if (low.start_time != high.start_time) {
    throw std::invalid_argument("comparison_check: start times differ");
  }
  const bool by_start =
      low.params == high.params && low.start_value <= high.start_value;
  const bool by_dimension =
      low.start_value == high.start_value && low.params.kappa() > 0.0 &&
      high.params.kappa() > 0.0 && low.params.delta() <= high.params.delta() &&
      low.params.kind() == FlowKind::bessel &&
      high.params.kind() == FlowKind::bessel;
  if (!by_start && !by_dimension) {
    throw std::invalid_argument(
        "comparison_check: trajectories are not ordered by start or dimension");
  }
  ComparisonReport rep;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < low.times.size() && j < high.times.size()) {
    const double tl = low.times[i];
    const double th = high.times[j];
    if (tl < th) {
      ++i;
    } else if (th < tl) {
      ++j;
    } else {
      const double lv = low.values[i];
      const double hv = high.values[j];
      const double slack =
          relative_slack * std::max({std::abs(lv), std::abs(hv), 1.0});
      ++rep.compared;
      if (lv > hv + slack) {
        if (rep.violations == 0) rep.first_violation_time = tl;
        ++rep.violations;
        rep.max_excess = std::max(rep.max_excess, lv - hv);
      }
      ++i;
      ++j;
    }
  }
  if (high.absorbed() &&
      (!low.absorbed() || high.hit_bracket.hi < low.hit_bracket.lo)) {
    // Only meaningful if the lower one was followed at least that far.
    if (low.absorbed() || low.end_time > high.hit_bracket.hi) {
      rep.order_violation = true;
    }
  }
  return rep;
}

SandwichReport sandwich_check(const Trajectory& traj, double slack) {
  SandwichReport rep;
  const double sigma = traj.params.noise_scale();
  const double two_a = 2.0 * traj.params.drift_strength();
  const double sign = traj.start_value < 0.0 ? -1.0 : 1.0;
  const double x = std::abs(traj.start_value);
  // For negative starts the driver enters with the opposite sign.
  const double up = sign > 0.0 ? traj.driver_max : -traj.driver_min;
  const double down = sign > 0.0 ? traj.driver_min : -traj.driver_max;
  const double hi_arg = x + sigma * up;
  const double lo_arg = std::max(0.0, x + sigma * down);
  rep.upper_bound = hi_arg * hi_arg / two_a;
  rep.lower_bound = lo_arg * lo_arg / two_a;
  rep.elapsed = {traj.hit_bracket.lo - traj.start_time,
                 traj.hit_bracket.hi - traj.start_time};
  rep.holds = traj.absorbed() && rep.elapsed.lo <= rep.upper_bound + slack &&
              rep.lower_bound <= rep.elapsed.hi + slack;
  return rep;
}

}  // namespace zerohit
