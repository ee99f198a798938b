#pragma once

// Exact and rejection samplers for the closed-form laws, and the zero-chain
// samplers that reach X at zeta_b / zeta_ab without discretizing a path.

#include <cstdint>

#include "skewbessel/analytic.hpp"
#include "skewbessel/law.hpp"
#include "skewbessel/params.hpp"
#include "skewbessel/rng.hpp"

namespace skewbessel {

/// scale / G with G ~ Gamma(shape, 1).
double sample_inverse_gamma(double shape, double scale, RngStream& rng);

/// G1 / G2 with G1 ~ Gamma(a), G2 ~ Gamma(b): the Beta-prime(a, b) law.
double sample_beta_prime(double a, double b, RngStream& rng);

/// X_{zeta_b} - b from an axis start at distance b_minus_x below the level.
double sample_overshoot(const ModelParams& p, const Exponents& e, double b_minus_x,
                        RngStream& rng);

/// First zero of Y started at y: y^2 times an InvGamma(1 - delta/2, 1/2) variable.
double sample_sigma0_time(const ModelParams& p, double y, RngStream& rng);

struct ExitDraw {
  Side side = Side::plus;
  double magnitude = 0.0;  ///< X_{zeta_ab} - b on side plus, a - X_{zeta_ab} on side minus
  int attempts = 0;        ///< rejection proposals used
};

/// One magnitude from rho_+ (side plus) or rho_- by rejection from a scaled
/// Beta-prime envelope. Throws RejectionStall after 1e6 proposals.
double sample_exit_magnitude(const Exponents& e, const Interval& iv, Side side, RngStream& rng,
                             int* attempts = nullptr);

/// Exit-system sampler; construction evaluates the upward exit probability once.
class ExitSystemSampler {
 public:
  ExitSystemSampler(const ModelParams& p, const Interval& iv);
  ExitDraw operator()(RngStream& rng) const;
  [[nodiscard]] double exit_up_prob() const { return up_; }
  /// Mean acceptance of the side-plus proposals: P_+ / ((x-a)/(b-a))^alpha.
  [[nodiscard]] double acceptance_plus() const;
  [[nodiscard]] double acceptance_minus() const;

 private:
  ModelParams p_;
  Exponents e_;
  Interval iv_;
  double up_;
};

ExitDraw sample_exit_system(const ModelParams& p, const Interval& iv, RngStream& rng);

/// Inverse-CDF sampler on the tabulated exit-position law (built once).
class ExitPositionSampler {
 public:
  ExitPositionSampler(const ModelParams& p, const Interval& iv);
  double operator()(RngStream& rng) const { return law_.sample(rng); }
  [[nodiscard]] const LawSpec& law() const { return law_; }

 private:
  LawSpec law_;
};

/// Builds the tabulated law on every call; prefer ExitPositionSampler in loops.
double sample_exit_position(const ModelParams& p, const Interval& iv, RngStream& rng);

struct ZetaDraw {
  double x_at_zeta = 0.0;
  int steps = 0;
};

/// X_{zeta_b} from (start_x, 0), start_x < b: b plus one overshoot draw.
ZetaDraw zero_chain_to_zeta(const ModelParams& p, double start_x, double b, RngStream& rng,
                            int max_steps = 1);

/// X_{zeta_b} from (x, y): one X_{sigma_0} draw, then an overshoot draw if
/// still below b.
ZetaDraw zero_chain_to_zeta_from(const ModelParams& p, double x, double y, double b,
                                 RngStream& rng);

/// X_{zeta_ab} from (x, 0) with one exit-system draw.
ZetaDraw zero_chain_to_zeta_ab(const ExitSystemSampler& sampler, const Interval& iv,
                               RngStream& rng);

}  // namespace skewbessel
