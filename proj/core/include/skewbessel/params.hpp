#pragma once

// Model parameters and the exponents derived from them.
//
// Y is a skew Bessel process of dimension delta and skewness eta; the
// functional is X_t = int_0^t V(Y_u) du with V(y) = |y|^gamma for y >= 0 and
// -c |y|^gamma for y < 0.

#include <string>

namespace skewbessel {

struct ModelParams {
  double delta = 1.0;      ///< dimension, in [1, 2)
  double eta = 0.0;        ///< skewness, in (-1, 1)
  double gamma_exp = 1.0;  ///< power gamma > 0
  double c_weight = 1.0;   ///< weight c > 0 of the negative half-line

  /// Throws DomainError naming the first violated bound.
  void validate() const;
  [[nodiscard]] std::string to_string() const;
};

struct Exponents {
  double nu = 0.0;     ///< (2 - delta) / (2 + gamma)
  double theta = 0.0;  ///< persistence exponent
  double alpha = 0.0;
  double beta = 0.0;   ///< 2 theta / (2 + gamma)
  double a_const = 0.0;       ///< A = (2 + gamma)^2 / 2
  double moment_ratio = 0.0;  ///< M_- / M_+
};

Exponents derive_exponents(const ModelParams& p);

/// Levels a < b and the starting value x of the functional.
struct Interval {
  double a = -1.0;
  double b = 1.0;
  double x = 0.0;

  /// Throws DomainError unless a < x < b.
  void validate_exit() const;
};

/// Residual of tan(pi beta) (c^nu (1-eta)/(1+eta) + cos nu pi) - sin nu pi.
double theta_equation_residual(const ModelParams& p, const Exponents& e);

/// Residual of sin(pi beta)[sin(2pi/(2+gamma) - pi s) - R sin(pi s)]
///           - sin(pi (beta - s)) sin(2pi/(2+gamma)),  R = M_-/M_+.
double moment_ratio_identity_residual(const ModelParams& p, const Exponents& e, double s);

/// The same parameters with the roles of the two half-lines exchanged:
/// (eta, c) -> (-eta, 1/c). Exchanges alpha and beta.
ModelParams mirrored(const ModelParams& p);

}  // namespace skewbessel
