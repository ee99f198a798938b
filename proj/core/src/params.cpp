#include "skewbessel/params.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "skewbessel/error.hpp"

namespace skewbessel {
namespace {
constexpr double kPi = std::numbers::pi;
}

void ModelParams::validate() const {
  auto fail = [](const std::string& msg) { throw DomainError(msg); };
  if (!(delta >= 1.0 && delta < 2.0)) fail("delta must lie in [1, 2), got " + std::to_string(delta));
  if (!(eta > -1.0 && eta < 1.0)) fail("eta must lie in (-1, 1), got " + std::to_string(eta));
  if (!(gamma_exp > 0.0) || !std::isfinite(gamma_exp)) {
    fail("gamma must be positive and finite, got " + std::to_string(gamma_exp));
  }
  if (!(c_weight > 0.0) || !std::isfinite(c_weight)) {
    fail("c must be positive and finite, got " + std::to_string(c_weight));
  }
}

std::string ModelParams::to_string() const {
  std::ostringstream s;
  s.precision(17);
  s << "delta=" << delta << " eta=" << eta << " gamma=" << gamma_exp << " c=" << c_weight;
  return s.str();
}

void Interval::validate_exit() const {
  if (!(a < x && x < b)) {
    std::ostringstream s;
    s << "exit problem needs a < x < b, got a=" << a << " x=" << x << " b=" << b;
    throw DomainError(s.str());
  }
}

Exponents derive_exponents(const ModelParams& p) {
  p.validate();
  const double g2 = 2.0 + p.gamma_exp;
  Exponents e;
  e.nu = (2.0 - p.delta) / g2;
  const double s = std::sin(e.nu * kPi);
  const double co = std::cos(e.nu * kPi);
  const double odds = (1.0 - p.eta) / (1.0 + p.eta);
  const double cnu = std::pow(p.c_weight, e.nu);
  e.beta = std::atan2(s, cnu * odds + co) / kPi;
  e.alpha = std::atan2(s, 1.0 / (cnu * odds) + co) / kPi;
  e.theta = 0.5 * g2 * e.beta;
  e.a_const = 0.5 * g2 * g2;
  e.moment_ratio = (cnu * odds * std::sin(2.0 * kPi / g2) + std::sin(p.delta * kPi / g2)) / s;
  return e;
}

double theta_equation_residual(const ModelParams& p, const Exponents& e) {
  const double odds = (1.0 - p.eta) / (1.0 + p.eta);
  const double lhs = std::tan(kPi * e.beta) * (std::pow(p.c_weight, e.nu) * odds + std::cos(e.nu * kPi));
  return lhs - std::sin(e.nu * kPi);
}

double moment_ratio_identity_residual(const ModelParams& p, const Exponents& e, double s) {
  const double w = 2.0 * kPi / (2.0 + p.gamma_exp);
  const double lhs = std::sin(kPi * e.beta) * (std::sin(w - kPi * s) - e.moment_ratio * std::sin(kPi * s));
  return lhs - std::sin(kPi * (e.beta - s)) * std::sin(w);
}

ModelParams mirrored(const ModelParams& p) {
  return {p.delta, -p.eta, p.gamma_exp, 1.0 / p.c_weight};
}

}  // namespace skewbessel
