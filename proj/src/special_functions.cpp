#include "zerohit/special_functions.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace zerohit {

namespace {

void require_positive(double t, const char* what) {
  if (!(t > 0.0)) {
    throw std::domain_error(std::string(what) + ": argument must be positive");
  }
}

}  // namespace

InverseGammaParams::InverseGammaParams(double alpha, double beta)
    : alpha_(alpha), beta_(beta) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) ||
      !std::isfinite(beta)) {
    throw std::invalid_argument(
        "InverseGammaParams: alpha and beta must be positive and finite");
  }
}

InverseGammaParams InverseGammaParams::for_bessel_dimension(double delta) {
  if (!(delta < 2.0)) {
    throw std::invalid_argument(
        "InverseGammaParams: hitting time is finite only for delta < 2");
  }
  return {1.0 - 0.5 * delta, 0.5};
}

double inverse_gamma_pdf(const InverseGammaParams& p, double t) {
  require_positive(t, "inverse_gamma_pdf");
  if (std::isinf(t)) return 0.0;
  const double a = p.alpha();
  const double b = p.beta();
  return std::exp(a * std::log(b) - std::lgamma(a) - (1.0 + a) * std::log(t) -
                  b / t);
}

double inverse_gamma_cdf(const InverseGammaParams& p, double t) {
  require_positive(t, "inverse_gamma_cdf");
  if (std::isinf(t)) return 1.0;
  return boost::math::gamma_q(p.alpha(), p.beta() / t);
}

double inverse_gamma_quantile(const InverseGammaParams& p, double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::domain_error("inverse_gamma_quantile: q must lie in (0, 1)");
  }
  return p.beta() / boost::math::gamma_q_inv(p.alpha(), q);
}

double inverse_gamma_mean(const InverseGammaParams& p) noexcept {
  if (p.alpha() <= 1.0) return std::numeric_limits<double>::infinity();
  return p.beta() / (p.alpha() - 1.0);
}

double inverse_gamma_sample(const InverseGammaParams& p, RandomStream& stream) {
  std::gamma_distribution<double> gamma(p.alpha(), 1.0);
  double g = 0.0;
  // A zero draw is possible only through underflow for tiny alpha.
  do {
    g = gamma(stream.engine());
  } while (!(g > 0.0));
  return p.beta() / g;
}

double bessel_k1(double x) {
  require_positive(x, "bessel_k1");
  return boost::math::cyl_bessel_k(1, x);
}

double laplace_inverse_gamma(double t) {
  require_positive(t, "laplace_inverse_gamma");
  const double u = std::sqrt(2.0 * t);
  return u * bessel_k1(u);
}

double k1_log_limit_statistic(double x) {
  if (!(x > 0.0) || !(x < 1.0)) {
    throw std::domain_error("k1_log_limit_statistic: x must lie in (0, 1)");
  }
  // x = 1/e makes the denominator vanish.
  const double denom = x * x * (std::log(x) + 1.0);
  if (denom == 0.0) {
    throw std::domain_error("k1_log_limit_statistic: singular at x = 1/e");
  }
  return std::log(x * bessel_k1(x)) / denom;
}

}  // namespace zerohit
