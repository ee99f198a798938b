#pragma once

// Special-function kernels used by the closed-form laws: gamma family,
// incomplete gamma and beta, Kummer 1F1, Gauss 2F1, modified Bessel I and K,
// and the Whittaker W function.
//
// Functions that can overflow return an EvalResult holding the value as
// mantissa * exp(log_scale). Everything here is a pure function of its
// arguments.

#include <cmath>

namespace skewbessel {

struct EvalResult {
  double value = 0.0;      ///< mantissa
  double log_scale = 0.0;  ///< the represented number is value * exp(log_scale)
  bool converged = true;
  int terms_used = 0;

  /// value * exp(log_scale); may overflow or underflow for extreme scales.
  [[nodiscard]] double real() const { return value * std::exp(log_scale); }
  /// log|value * exp(log_scale)|; -inf for an exact zero.
  [[nodiscard]] double log_abs() const { return std::log(std::abs(value)) + log_scale; }
  [[nodiscard]] int sign() const { return (value > 0) - (value < 0); }
};

namespace specfun {

inline constexpr int kSeriesTermCap = 500;
inline constexpr double kSeriesRelTol = 1e-14;
/// Bessel series / asymptotic crossover.
inline constexpr double kBesselSeam = 15.0;
/// Below this z, K is evaluated from the I_{-nu}, I_nu reflection formula.
inline constexpr double kBesselReflectionMax = 2.0;
/// Arguments of 1F1 below this use the Kummer transformation.
inline constexpr double kKummerTransformBelow = -1.0;
/// Arguments of 1F1 above this use the large-argument asymptotic expansion.
inline constexpr double kKummerAsymptoticAbove = 250.0;

}  // namespace specfun

double log_gamma(double x);
/// log|Gamma(x)| and its sign for any non-pole real x.
double log_gamma_signed(double x, int& sign);
/// 1/Gamma(x), exactly zero at the poles.
double recip_gamma(double x);
double beta_fn(double x, double y);

/// Non-regularized lower incomplete gamma gamma(a, x).
EvalResult lower_inc_gamma(double a, double x);
/// Regularized P(a, x) = gamma(a, x) / Gamma(a).
double gamma_p(double a, double x);
/// Regularized Q(a, x) = 1 - P(a, x), accurate in the upper tail.
double gamma_q(double a, double x);
/// Regularized incomplete beta I_x(a, b).
double inc_beta(double a, double b, double x);
/// 1 - I_x(a, b), accurate when I_x is close to one.
double inc_beta_complement(double a, double b, double x);

EvalResult kummer_1f1(double a, double c, double z);
EvalResult gauss_2f1(double a, double b, double c, double z);
EvalResult bessel_i(double nu, double z);
EvalResult bessel_k(double nu, double z);
EvalResult whittaker_w(double lambda, double mu, double z);

}  // namespace skewbessel
