#pragma once

#include "zerohit/random_stream.hpp"

namespace zerohit {

/// Shape/rate pair of an Inverse-Gamma law, density proportional to
/// t^(-1-alpha) exp(-beta / t).
class InverseGammaParams {
 public:
  InverseGammaParams(double alpha, double beta);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }

  /// Law of the zero-hitting time of a dimension-delta Bessel process from 1.
  static InverseGammaParams for_bessel_dimension(double delta);

 private:
  double alpha_;
  double beta_;
};

double inverse_gamma_pdf(const InverseGammaParams& p, double t);
/// P[X <= t] = Q(alpha, beta / t), the regularized upper incomplete gamma.
double inverse_gamma_cdf(const InverseGammaParams& p, double t);
/// t with inverse_gamma_cdf(p, t) = q, for q in (0, 1).
double inverse_gamma_quantile(const InverseGammaParams& p, double q);
/// beta / (alpha - 1), or +inf when alpha <= 1.
double inverse_gamma_mean(const InverseGammaParams& p) noexcept;

/// beta / Gamma(alpha, 1). Gamma draws use the Marsaglia-Tsang squeeze
/// rejection sampler (with the U^(1/alpha) boost for alpha < 1).
double inverse_gamma_sample(const InverseGammaParams& p, RandomStream& stream);

/// Modified Bessel function of the second kind, order 1.
double bessel_k1(double x);

/// E[exp(-t T)] for T ~ Inverse-Gamma(1, 1/2), which is sqrt(2t) K1(sqrt(2t)).
double laplace_inverse_gamma(double t);

/// log(x K1(x)) / (x^2 (log x + 1)), tending to 1/2 as x -> 0+.
double k1_log_limit_statistic(double x);

}  // namespace zerohit
