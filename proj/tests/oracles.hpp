#pragma once

// Reference computations that do not go through the library.

#include <cmath>
#include <cstddef>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

// K1(x) = int_0^inf exp(-x cosh u) cosh u du.
inline double k1_integral(double x) {
  boost::math::quadrature::exp_sinh<double> integrator;
  auto f = [x](double u) {
    const double c = std::cosh(u);
    const double e = x * c;
    return e > 700.0 ? 0.0 : std::exp(-e) * c;
  };
  return integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity());
}

// beta^alpha / Gamma(alpha) t^(-1-alpha) exp(-beta / t), written out directly.
inline double inverse_gamma_density(double alpha, double beta, double t) {
  if (!(t > 0.0)) return 0.0;
  return std::exp(alpha * std::log(beta) - std::log(std::tgamma(alpha)) -
                  (1.0 + alpha) * std::log(t) - beta / t);
}

inline double inverse_gamma_cdf_by_quadrature(double alpha, double beta, double t) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  auto f = [&](double s) { return s > 0.0 ? inverse_gamma_density(alpha, beta, s) : 0.0; };
  return integrator.integrate(f, 0.0, t);
}

inline double inverse_gamma_total_mass(double alpha, double beta) {
  boost::math::quadrature::exp_sinh<double> integrator;
  auto f = [&](double s) { return s > 0.0 ? inverse_gamma_density(alpha, beta, s) : 0.0; };
  return integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity());
}

// E[max - min] of standard Brownian motion on [0, 1] is 2 sqrt(2 / pi).
inline double expected_bm_range() { return 2.0 * std::sqrt(2.0 / M_PI); }

inline double binomial_se(double p, std::size_t n) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace oracle
