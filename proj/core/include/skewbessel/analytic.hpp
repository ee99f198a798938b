#pragma once

// Closed-form laws of the functional X and of Y at first-passage and exit
// times: the law of X at the first zero of Y, the harmonic function h, the
// overshoot law, Mellin and modified Laplace transforms, the exit-position
// densities, and the hitting probabilities.

#include "skewbessel/law.hpp"
#include "skewbessel/params.hpp"

namespace skewbessel {

enum class Side { plus, minus };

/// Law of X at the first zero sigma_0 of Y, started from (x, y), y != 0.
/// y > 0: x + InvGamma(nu, y^{2+gamma}/A); y < 0: x - InvGamma(nu, c|y|^{2+gamma}/A).
LawSpec x_sigma0_law(const ModelParams& p, double x, double y);

/// Scale of the inverse-gamma variable X_{sigma_0} - x (zero for y = 0).
double sigma0_scale(const ModelParams& p, double y);

/// h(x, y) = E_{(0,y)}[(x - X_{sigma_0})_+^beta] from the Whittaker-function
/// closed forms.
double harmonic_h(const ModelParams& p, double x, double y);

/// The same expectation by quadrature against the law of X_{sigma_0}.
double harmonic_h_expectation(const ModelParams& p, double x, double y);

/// Law of X_{zeta_b} - b for a start (x, 0), x < b: (b-x) times a
/// Beta-prime(1-beta, beta) variable.
LawSpec x_zeta_b_overshoot_law(const ModelParams& p, double x, double b);

/// E_{(x,y)}[(X_{zeta_b} - b)^s] for s in (beta - 1, beta).
double mellin_x_zeta(const ModelParams& p, double x, double y, double b, double s);

/// E_{(x,y)}[Y_{T_b}^s] for s / (2+gamma) in (beta - 1, beta).
double mellin_y_tb(const ModelParams& p, double x, double y, double b, double s);

/// Unnormalized densities rho_+ (of X_{zeta_ab} - b on exits above b) and
/// rho_- (of a - X_{zeta_ab} on exits below a) from a start (x, 0).
double rho_plus_density(const ModelParams& p, const Interval& iv, double z);
double rho_minus_density(const ModelParams& p, const Interval& iv, double z);

struct ExitSystem {
  LawSpec rho_plus;   ///< conditional law of X_{zeta_ab} - b given an upward exit
  LawSpec rho_minus;  ///< conditional law of a - X_{zeta_ab} given a downward exit
  double exit_up_prob = 0.0;    ///< from the hitting-probability formula
  double mass_plus = 0.0;       ///< integral of rho_+ by quadrature
  double mass_minus = 0.0;      ///< integral of rho_- by quadrature
};

/// Builds both laws; asserts mass_plus + mass_minus = 1 (1e-8) and
/// mass_plus = exit_up_prob (1e-7).
ExitSystem exit_system_laws(const ModelParams& p, const Interval& iv);

struct SystemResiduals {
  double upper = 0.0;  ///< equation carrying (b - x)^s
  double lower = 0.0;  ///< equation carrying (x - a)^s
};

/// Residuals of the pair of Mellin identities satisfied by rho_+-, by quadrature.
SystemResiduals exit_system_residuals(const ModelParams& p, const Interval& iv, double s);

/// Density of Y_{T_ab} under P_{(x,0)}, z != 0.
double exit_position_density_y0(const ModelParams& p, const Interval& iv, double z);

/// Tabulated law of Y_{T_ab} under P_{(x,0)}; normalization asserted to 1e-8.
LawSpec exit_position_law_y0(const ModelParams& p, const Interval& iv);

/// E_{(x,0)}[|Y|^{2-delta} exp(-lambda |Y|^{2+gamma} / A); sign(Y) = side] at T_ab.
double modified_laplace_exit(const ModelParams& p, const Interval& iv, double lambda, Side side);

/// Density of Y_{T_ab} under P_{(x,y)}, y != 0.
double exit_position_density_general(const ModelParams& p, const Interval& iv, double y,
                                     double z);

/// Tabulated law of Y_{T_ab} under P_{(x,y)}; normalization asserted to 1e-6.
LawSpec exit_position_law_general(const ModelParams& p, const Interval& iv, double y);

/// P_{(x,y)}(T_b < T_a). y = 0 needs a < x < b; y < 0 needs a < x <= b;
/// y > 0 needs a <= x < b.
double hitting_prob(const ModelParams& p, const Interval& iv, double y);

/// h(b - x, y), the (x, y)-dependent factor of P_{(x,y)}(T_b > t) t^theta.
double survival_prefactor(const ModelParams& p, double x, double y, double b);

/// Guard band applied at both ends of every Mellin strip.
inline constexpr double kMellinGuard = 1e-6;

}  // namespace skewbessel
