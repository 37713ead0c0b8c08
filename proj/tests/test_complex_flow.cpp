#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <vector>

#include "zerohit/complex_flow.hpp"
#include "zerohit/experiments.hpp"

using namespace zerohit;

namespace {

// Relative flow-property defect at 100 random (s, u, t, z) for one config.
std::vector<double> flow_property_defects(const ComplexFlowConfig& cfg) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> out;
  for (std::uint64_t i = 0; i < 100; ++i) {
    double a = unif(gen), b = unif(gen), c = unif(gen);
    const double s = std::min({a, b, c});
    const double t = std::max({a, b, c});
    const double u = a + b + c - s - t;
    const ComplexState z{4.0 * unif(gen) - 2.0, 0.01 + unif(gen)};
    const BrownianPath path({31, i}, 1.0);
    const std::complex<double> direct = integrate_complex(path, 2.0, s, t, z, cfg).value();
    const ComplexState mid = integrate_complex(path, 2.0, s, u, z, cfg);
    const std::complex<double> split = integrate_complex(path, 2.0, u, t, mid, cfg).value();
    out.push_back(std::abs(direct - split) / std::max(1.0, std::abs(direct)));
  }
  return out;
}

}  // namespace

TEST_CASE("kappa zero from iy") {
  const BrownianPath path({1, 0}, 1.0);
  for (double y : {0.01, 0.1, 1.0}) {
    for (double t : {0.0, 0.125, 0.5, 1.0}) {
      const std::complex<double> h = integrate_complex(path, 0.0, 0.0, t, {0.0, y}).value();
      CHECK(std::abs(h - std::complex<double>(0.0, std::sqrt(y * y + 4.0 * t))) <= 1e-12);
    }
  }
  // The stepped integrator is exact too, since the drift flow is solved exactly.
  std::size_t calls = 0;
  const ComplexState z = integrate_complex(path, 0.0, 0.0, 1.0, {0.0, 0.1}, {},
                                           [&](double, std::complex<double>, double) { ++calls; });
  CHECK(calls > 0);
  CHECK(z.re == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(z.im == doctest::Approx(std::sqrt(4.01)).epsilon(1e-12));
}

TEST_CASE("argument checks") {
  const BrownianPath path({2, 0}, 1.0);
  CHECK_THROWS(integrate_complex(path, 5.0, 0.0, 1.0, {0.0, 1.0}));
  CHECK_THROWS(integrate_complex(path, 2.0, 0.5, 0.25, {0.0, 1.0}));
  CHECK_THROWS(integrate_complex(path, 2.0, 0.0, 1.5, {0.0, 1.0}));
  CHECK_THROWS(integrate_complex(path, 2.0, 0.0, 1.0, {0.0, 0.0}));
  CHECK_THROWS(real_dominates(path, 2.0, 1.0, {-1.0, 0.1}));
  CHECK_THROWS(trace_point(path, 2.0, 0.5, 0.2));
  CHECK_THROWS(trace_point(path, 2.0, 0.5, 0.0));
}

TEST_CASE("both up-bound inequalities hold at every step") {
  std::size_t failures = 0;
  std::size_t steps = 0;
  for (double kappa : {2.0, 4.0}) {
    for (double y : {0.01, 0.1, 1.0}) {
      for (std::uint64_t i = 0; i < 100; ++i) {
        const BrownianPath path({33, i}, 1.0);
        const UpBoundReport rep = check_up_bound(path, kappa, 0.0, 1.0, y);
        if (!rep.ok()) ++failures;
        steps += rep.steps;
        CHECK(rep.max_real_ratio <= 1.0 + 1e-12);
      }
    }
  }
  CHECK(failures == 0);
  CHECK(steps > 10000);
}

TEST_CASE("imaginary part never decreases") {
  for (std::uint64_t i = 0; i < 20; ++i) {
    const BrownianPath path({35, i}, 1.0);
    double prev = 0.05;
    bool monotone = true;
    integrate_complex(path, 4.0, 0.0, 1.0, {0.3, 0.05}, {},
                      [&](double, std::complex<double> h, double) {
                        if (h.imag() < prev) monotone = false;
                        prev = h.imag();
                      });
    CHECK(monotone);
  }
}

TEST_CASE("real part dominates the real flow") {
  std::size_t violations = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const BrownianPath path({32, i}, 1.0);
    const DominanceReport rep = real_dominates(path, 4.0, 1.0, {1.0, 0.1});
    violations += rep.violations;
    CHECK(rep.compared > 0);
  }
  CHECK(violations == 0);

  const BrownianPath path({36, 0}, 1.0);
  const DominanceReport k0 = real_dominates(path, 0.0, 1.0, {1.0, 0.5});
  CHECK(k0.ok());
  CHECK(k0.stopped_at == 0.25);
  CHECK(real_dominates(path, 2.0, 1.0, {1.0, 50.0}).ok());
}

TEST_CASE("flow property for complex starts") {
  const std::vector<double> coarse = flow_property_defects({});
  CHECK(*std::max_element(coarse.begin(), coarse.end()) < 5e-3);
  ComplexFlowConfig fine;
  fine.step_factor /= 4.0;
  const std::vector<double> refined = flow_property_defects(fine);
  // The defect is a discretization effect and shrinks with the step.
  CHECK(sample_quantile(refined, 0.5) < 0.5 * sample_quantile(coarse, 0.5));
  CHECK(*std::max_element(refined.begin(), refined.end()) < 1e-3);
}

TEST_CASE("trace for kappa zero") {
  const BrownianPath path({37, 0}, 1.0);
  for (double t : {0.0, 0.25, 1.0}) {
    const TracePoint tp = trace_point(path, 0.0, t, 0.1);
    CHECK(tp.value == std::complex<double>(0.0, 2.0 * std::sqrt(t)));
    CHECK(tp.converged);
  }
  // The probes approach the limit as y shrinks.
  double prev = std::numeric_limits<double>::infinity();
  for (double y = 0.1; y > 1e-4; y /= 2.0) {
    const double err = std::abs(trace_probe(path, 0.0, 0.25, y) - std::complex<double>(0.0, 1.0));
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-7);
}

TEST_CASE("trace starts at zero and stays in the upper half-plane") {
  for (double kappa : {0.5, 2.0, 4.0}) {
    for (std::uint64_t i = 0; i < 5; ++i) {
      const BrownianPath path({34, i}, 1.0);
      const TracePoint start = trace_point(path, kappa, 0.0, 0.1);
      CHECK(std::abs(start.value) < 1e-3);
      for (double t : {0.125, 0.5, 1.0}) {
        const TracePoint tp = trace_point(path, kappa, t, 0.1);
        CHECK(tp.value.imag() > 0.0);
        CHECK(tp.y_used <= 0.1);
        if (tp.converged) CHECK(tp.increment < 1e-3);
      }
    }
  }
}
