#include "zerohit/complex_flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace zerohit {

namespace {

int floor_log2_ticks(double ticks) noexcept {
  if (!(ticks >= 1.0)) return 0;
  int e = 0;
  std::frexp(ticks, &e);
  return e - 1;
}

// Exact noiseless flow over dt: h^2 falls by 4 dt; keep the root in H.
std::complex<double> drift_flow(std::complex<double> h, double dt) {
  std::complex<double> r = std::sqrt(h * h - 4.0 * dt);
  if (r.imag() < 0.0 || (r.imag() == 0.0 && r.real() * h.real() < 0.0)) {
    r = -r;
  }
  return r;
}

void check_kappa(double kappa) {
  if (!(kappa >= 0.0 && kappa <= 4.0)) {
    throw std::invalid_argument("complex flow: kappa must lie in [0, 4]");
  }
}

}  // namespace

ComplexStepper::ComplexStepper(const BrownianPath& path, double kappa,
                               double start_time, ComplexState z,
                               const ComplexFlowConfig& cfg)
    : path_(&path),
      cfg_(cfg),
      sigma_(std::sqrt(kappa)),
      cursor_(path.cursor_at(path.ceil_tick(start_time))),
      h_(z.value()) {
  check_kappa(kappa);
  if (!(z.im > 0.0)) {
    throw std::invalid_argument("complex flow: start must lie in the upper half-plane");
  }
  if (!(cfg.max_step > 0.0) || !(cfg.step_factor > 0.0)) {
    throw std::invalid_argument("ComplexFlowConfig: invalid step parameters");
  }
  start_time_ = cursor_.time();
  b_start_ = cursor_.value();
}

double ComplexStepper::driver_offset() const noexcept {
  return sigma_ * (cursor_.value() - b_start_);
}

int ComplexStepper::desired_exponent() const noexcept {
  const double dt =
      std::min(cfg_.max_step, cfg_.step_factor * std::abs(h_) * h_.imag());
  return floor_log2_ticks(dt / path_->tick_length());
}

void ComplexStepper::step(int max_exponent, std::uint64_t end_tick) {
  if (cursor_.tick() >= end_tick) return;
  const double want =
      std::min(cfg_.max_step, cfg_.step_factor * std::abs(h_) * h_.imag());
  if (want < path_->tick_length()) resolution_limited_ = true;
  const int e = std::min(desired_exponent(), max_exponent);
  const double b0 = cursor_.value();
  const std::uint64_t ticks = cursor_.peek_bounded(e, end_tick);
  const double dt = static_cast<double>(ticks) * path_->tick_length();
  const double db = cursor_.peek_value() - b0;
  cursor_.commit();
  h_ = drift_flow(h_, dt) + sigma_ * db;
  ++steps_;
}

void ComplexStepper::run_until(std::uint64_t end_tick) {
  while (cursor_.tick() < end_tick) step(62, end_tick);
}

ComplexState integrate_complex(const BrownianPath& path, double kappa,
                               double s, double t, ComplexState z,
                               const ComplexFlowConfig& cfg,
                               const ComplexObserver& observer) {
  check_kappa(kappa);
  if (!(s >= 0.0) || !(t >= s) || t > 1.0) {
    throw std::invalid_argument("integrate_complex: need 0 <= s <= t <= 1");
  }
  if (!(z.im > 0.0)) {
    throw std::invalid_argument("integrate_complex: start must have im > 0");
  }
  const BrownianPath window = path.extended_to(1.0);
  const std::uint64_t end = window.ceil_tick(t);
  if (kappa == 0.0 && !observer) {
    const double s0 = window.time_of(window.ceil_tick(s));
    return ComplexState::from(drift_flow(z.value(), window.time_of(end) - s0));
  }
  ComplexStepper stepper(window, kappa, s, z, cfg);
  while (stepper.tick() < end) {
    stepper.step(62, end);
    if (observer) {
      observer(stepper.time(), stepper.value(), stepper.driver_offset());
    }
  }
  return ComplexState::from(stepper.value());
}

UpBoundReport check_up_bound(const BrownianPath& path, double kappa, double s,
                             double t, double y, const ComplexFlowConfig& cfg,
                             double relative_slack) {
  UpBoundReport rep;
  double sup_abs = 0.0;
  const BrownianPath window = path.extended_to(1.0);
  const double s0 = window.time_of(window.ceil_tick(s));
  auto observe = [&](double time, std::complex<double> h, double driver) {
    ++rep.steps;
    sup_abs = std::max(sup_abs, std::abs(driver));
    const double re_bound = 2.0 * sup_abs;
    if (std::abs(h.real()) > re_bound * (1.0 + relative_slack) + 1e-300) {
      ++rep.real_violations;
    }
    if (re_bound > 0.0) {
      rep.max_real_ratio = std::max(rep.max_real_ratio, std::abs(h.real()) / re_bound);
    }
    const double im_bound = std::sqrt(y * y + 4.0 * (time - s0));
    rep.max_imag_excess = std::max(rep.max_imag_excess, h.imag() - im_bound);
    if (h.imag() > im_bound * (1.0 + relative_slack)) ++rep.imag_violations;
  };
  rep.final_state = integrate_complex(window, kappa, s, t, {0.0, y}, cfg, observe);
  return rep;
}

DominanceReport real_dominates(const BrownianPath& path, double kappa,
                               double t, ComplexState z,
                               const FlowConfig& real_cfg,
                               const ComplexFlowConfig& cfg,
                               double relative_slack) {
  check_kappa(kappa);
  if (!(z.re > 0.0) || !(z.im > 0.0)) {
    throw std::invalid_argument("real_dominates: need x > 0 and y > 0");
  }
  DominanceReport rep;
  const BrownianPath window = path.extended_to(std::max(t, 1.0));
  const std::uint64_t end = window.ceil_tick(t);
  if (kappa == 0.0) {
    // Both noiseless: compare closed forms on the max_step grid.
    const double x = z.re;
    const double hit = x * x / 4.0;
    const double stop = std::min(t, hit);
    for (double r = 0.0; r <= stop; r += real_cfg.max_step) {
      const double real = std::sqrt(std::max(0.0, x * x - 4.0 * r));
      const double re = drift_flow(z.value(), r).real();
      ++rep.compared;
      const double slack = relative_slack * std::max(1.0, std::abs(real));
      if (re < real - slack) {
        if (rep.violations == 0) rep.first_violation_time = r;
        ++rep.violations;
        rep.max_deficit = std::max(rep.max_deficit, real - re);
      }
    }
    rep.stopped_at = stop;
    return rep;
  }
  FlowStepper real(window, FlowParams::loewner(kappa), 0.0, z.re, real_cfg);
  ComplexStepper cplx(window, kappa, 0.0, z, cfg);
  while (real.tick() < end) {
    const int e = std::min(real.desired_exponent(), cplx.desired_exponent());
    if (!real.step(e, end)) break;
    cplx.step(62, real.tick());
    const double re = cplx.value().real();
    const double rv = real.value();
    ++rep.compared;
    const double slack = relative_slack * std::max(1.0, std::abs(rv));
    if (re < rv - slack) {
      if (rep.violations == 0) rep.first_violation_time = real.time();
      ++rep.violations;
      rep.max_deficit = std::max(rep.max_deficit, rv - re);
    }
  }
  rep.stopped_at = real.time();
  return rep;
}

std::complex<double> trace_probe(const BrownianPath& path, double kappa,
                                 double t, double y,
                                 const ComplexFlowConfig& cfg) {
  check_kappa(kappa);
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::invalid_argument("trace_probe: t must lie in [0, 1]");
  }
  if (!(y > 0.0)) throw std::invalid_argument("trace_probe: y must be positive");
  if (kappa == 0.0) {
    return {0.0, std::sqrt(y * y + 4.0 * t)};
  }
  return integrate_complex(path, kappa, 1.0 - t, 1.0, {0.0, y}, cfg).value();
}

TracePoint trace_point(const BrownianPath& path, double kappa, double t,
                       double y_probe, const TraceConfig& cfg) {
  if (!(y_probe > 0.0 && y_probe <= 0.1)) {
    throw std::invalid_argument("trace_point: y_probe must lie in (0, 0.1]");
  }
  TracePoint out;
  if (kappa == 0.0) {
    check_kappa(kappa);
    if (!(t >= 0.0 && t <= 1.0)) {
      throw std::invalid_argument("trace_point: t must lie in [0, 1]");
    }
    out.value = {0.0, 2.0 * std::sqrt(t)};
    out.converged = true;
    return out;
  }
  double y = y_probe;
  std::complex<double> prev = trace_probe(path, kappa, t, y, cfg.flow);
  out.value = prev;
  out.y_used = y;
  out.increment = std::numeric_limits<double>::infinity();
  while (y / 2.0 >= cfg.y_floor) {
    y /= 2.0;
    const std::complex<double> next = trace_probe(path, kappa, t, y, cfg.flow);
    out.increment = std::abs(next - prev);
    out.increments.push_back(out.increment);
    out.value = next;
    out.y_used = y;
    prev = next;
    if (out.increment < cfg.tolerance) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace zerohit
