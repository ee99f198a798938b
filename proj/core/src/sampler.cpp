#include "skewbessel/sampler.hpp"

#include <cmath>

#include "skewbessel/error.hpp"

namespace skewbessel {

double sample_inverse_gamma(double shape, double scale, RngStream& rng) {
  if (!(shape > 0.0) || !(scale > 0.0)) throw DomainError("inverse gamma needs positive parameters");
  return scale / rng.gamma(shape);
}

double sample_beta_prime(double a, double b, RngStream& rng) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta prime needs positive parameters");
  const double g1 = rng.gamma(a);
  return g1 / rng.gamma(b);
}

double sample_overshoot(const ModelParams&, const Exponents& e, double b_minus_x, RngStream& rng) {
  if (!(b_minus_x > 0.0)) throw DomainError("overshoot needs b - x > 0");
  return b_minus_x * sample_beta_prime(1.0 - e.beta, e.beta, rng);
}

double sample_sigma0_time(const ModelParams& p, double y, RngStream& rng) {
  if (y == 0.0) return 0.0;
  return y * y * sample_inverse_gamma(1.0 - 0.5 * p.delta, 0.5, rng);
}

double sample_exit_magnitude(const Exponents& e, const Interval& iv, Side side, RngStream& rng,
                             int* attempts) {
  const double span = iv.b - iv.a;
  const bool plus = side == Side::plus;
  const double near = plus ? iv.b - iv.x : iv.x - iv.a;
  const double shape = plus ? e.beta : e.alpha;
  const double accept_exp = plus ? e.alpha : e.beta;
  for (int k = 1; k <= 1000000; ++k) {
    const double z = near * sample_beta_prime(1.0 - shape, shape, rng);
    if (rng.uniform() < std::pow(span / (span + z), accept_exp)) {
      if (attempts) *attempts = k;
      return z;
    }
  }
  throw RejectionStall("exit-system rejection sampler accepted nothing in 1e6 proposals");
}

ExitSystemSampler::ExitSystemSampler(const ModelParams& p, const Interval& iv)
    : p_(p), e_(derive_exponents(p)), iv_(iv), up_(hitting_prob(p, iv, 0.0)) {
  iv.validate_exit();
}

ExitDraw ExitSystemSampler::operator()(RngStream& rng) const {
  ExitDraw d;
  d.side = rng.uniform() < up_ ? Side::plus : Side::minus;
  d.magnitude = sample_exit_magnitude(e_, iv_, d.side, rng, &d.attempts);
  return d;
}

double ExitSystemSampler::acceptance_plus() const {
  return up_ / std::pow((iv_.x - iv_.a) / (iv_.b - iv_.a), e_.alpha);
}

double ExitSystemSampler::acceptance_minus() const {
  return (1.0 - up_) / std::pow((iv_.b - iv_.x) / (iv_.b - iv_.a), e_.beta);
}

ExitDraw sample_exit_system(const ModelParams& p, const Interval& iv, RngStream& rng) {
  return ExitSystemSampler(p, iv)(rng);
}

ExitPositionSampler::ExitPositionSampler(const ModelParams& p, const Interval& iv)
    : law_(exit_position_law_y0(p, iv)) {}

double sample_exit_position(const ModelParams& p, const Interval& iv, RngStream& rng) {
  return ExitPositionSampler(p, iv)(rng);
}

ZetaDraw zero_chain_to_zeta(const ModelParams& p, double start_x, double b, RngStream& rng,
                            int max_steps) {
  if (!(start_x < b)) throw DomainError("zero chain needs start_x < b");
  if (max_steps < 1) throw DomainError("zero chain needs max_steps >= 1");
  const Exponents e = derive_exponents(p);
  return {b + sample_overshoot(p, e, b - start_x, rng), 1};
}

ZetaDraw zero_chain_to_zeta_from(const ModelParams& p, double x, double y, double b,
                                 RngStream& rng) {
  if (y == 0.0) return zero_chain_to_zeta(p, x, b, rng);
  const Exponents e = derive_exponents(p);
  const double w = sample_inverse_gamma(e.nu, sigma0_scale(p, y), rng);
  const double landing = y > 0.0 ? x + w : x - w;
  if (landing >= b) return {landing, 1};
  ZetaDraw d = zero_chain_to_zeta(p, landing, b, rng);
  d.steps = 2;
  return d;
}

ZetaDraw zero_chain_to_zeta_ab(const ExitSystemSampler& sampler, const Interval& iv,
                               RngStream& rng) {
  const ExitDraw d = sampler(rng);
  return {d.side == Side::plus ? iv.b + d.magnitude : iv.a - d.magnitude, 1};
}

}  // namespace skewbessel
