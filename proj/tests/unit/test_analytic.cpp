#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "skewbessel/analytic.hpp"
#include "skewbessel/error.hpp"

using namespace skewbessel;
using oracle::mp50;
using oracle::rel;

namespace {

const ModelParams kSym{1.0, 0.0, 1.0, 1.0};
const ModelParams kAsym{1.5, 0.3, 1.0, 2.0};
const ModelParams kOdd{1.3, -0.6, 2.5, 0.4};

double inv_gamma_pdf(double nu, double S, double w) {
  return std::exp(nu * std::log(S) - std::lgamma(nu) - (nu + 1) * std::log(w) - S / w);
}

// E[g(W)], W ~ InvGamma(nu, S), by Boost's double-exponential quadrature,
// split at the point where g has a kink or a jump.
template <class G>
double inv_gamma_expect(double nu, double S, double kink, G g) {
  auto f = [&](double w) { return w > 0 ? g(w) * inv_gamma_pdf(nu, S, w) : 0.0; };
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  return ts.integrate(f, 0.0, kink) + es.integrate(f, kink, std::numeric_limits<double>::infinity());
}

}  // namespace

TEST_SUITE("analytic") {
  TEST_CASE("X at sigma_0 is a shifted inverse gamma") {
    for (const ModelParams& p : {kSym, kAsym, kOdd}) {
      const Exponents e = derive_exponents(p);
      for (double y : {0.4, -1.3}) {
        const double x = 0.2;
        const LawSpec law = x_sigma0_law(p, x, y);
        const double S = y > 0 ? std::pow(y, 2 + p.gamma_exp) / e.a_const
                               : p.c_weight * std::pow(-y, 2 + p.gamma_exp) / e.a_const;
        CHECK(rel(sigma0_scale(p, y), S) < 1e-14);
        for (double w : {0.01, 0.3, 2.0, 50.0}) {
          const double z = y > 0 ? x + w : x - w;
          const double upper = static_cast<double>(boost::math::gamma_p(mp50(e.nu), mp50(S / w)));
          CHECK(std::abs(law.cdf(z) - (y > 0 ? 1.0 - upper : upper)) < 1e-13);
          CHECK(rel(law.pdf(z), inv_gamma_pdf(e.nu, S, w)) < 1e-12);
        }
        CHECK(law.sampler_tag() == SamplerTag::exact);
        CHECK(std::abs(law.mass_by_quadrature() - 1.0) < 1e-8);
      }
    }
    CHECK_THROWS_AS(x_sigma0_law(kSym, 0.0, 0.0), DomainError);
  }

  TEST_CASE("h: Whittaker closed form equals the defining expectation") {
    for (const ModelParams& p : {kSym, kAsym, kOdd}) {
      for (double x : {0.02, 0.3, 1.0, 4.0}) {
        for (double y : {-2.0, -0.5, -0.05, 0.05, 0.5, 2.0}) {
          CAPTURE(x);
          CAPTURE(y);
          const double closed = harmonic_h(p, x, y);
          const double e = harmonic_h_expectation(p, x, y);
          CHECK(rel(closed, e) < 1e-8);
        }
      }
    }
  }

  TEST_CASE("h against an independent quadrature of its definition") {
    const ModelParams& p = kAsym;
    const Exponents e = derive_exponents(p);
    for (double y : {-0.7, 0.7}) {
      const double x = 0.8;
      const double S = sigma0_scale(p, y);
      const double want = inv_gamma_expect(e.nu, S, x, [&](double w) {
        const double v = y > 0 ? x - w : x + w;
        return v > 0 ? std::pow(v, e.beta) : 0.0;
      });
      CHECK(rel(harmonic_h(p, x, y), want) < 1e-7);
    }
  }

  TEST_CASE("h boundary values") {
    const Exponents e = derive_exponents(kAsym);
    CHECK(rel(harmonic_h(kAsym, 2.0, 0.0), std::pow(2.0, e.beta)) < 1e-14);
    CHECK(harmonic_h(kAsym, -1.0, 0.5) == 0.0);
    CHECK(rel(survival_prefactor(kAsym, 0.25, -0.3, 1.0), harmonic_h(kAsym, 0.75, -0.3)) < 1e-15);
    CHECK_THROWS_AS(survival_prefactor(kAsym, 1.5, 0.0, 1.0), DomainError);
  }

  TEST_CASE("overshoot law is a scaled Beta-prime") {
    for (const ModelParams& p : {kSym, kAsym}) {
      const Exponents e = derive_exponents(p);
      const double len = 1.7;
      const LawSpec law = x_zeta_b_overshoot_law(p, -0.7, 1.0);
      for (double z : {1e-6, 0.05, 1.0, 30.0, 1e6}) {
        const double u = z / (z + len);
        const double want = static_cast<double>(boost::math::ibeta(mp50(1 - e.beta), mp50(e.beta), mp50(u)));
        CHECK(std::abs(law.cdf(z) - want) < 1e-12);
      }
      CHECK(std::abs(law.mass_by_quadrature() - 1.0) < 1e-8);
      CHECK(std::abs(law.cdf(law.quantile(0.37)) - 0.37) < 1e-12);
    }
  }

  TEST_CASE("Mellin transform of the overshoot from the axis") {
    const ModelParams& p = kAsym;
    const Exponents e = derive_exponents(p);
    const double len = 2.0;
    for (double s : {-0.5, -0.1, 0.05}) {
      const double want = std::pow(len, s) * std::tgamma(1 - e.beta + s) * std::tgamma(e.beta - s) /
                          (std::tgamma(1 - e.beta) * std::tgamma(e.beta));
      CHECK(rel(mellin_x_zeta(p, -1.0, 0.0, 1.0, s), want) < 1e-12);
    }
    CHECK_THROWS(mellin_x_zeta(p, -1.0, 0.0, 1.0, e.beta));
    CHECK_THROWS(mellin_x_zeta(p, -1.0, 0.0, 1.0, e.beta - 1.0));
  }

  TEST_CASE("Mellin transform from y != 0 by composing with X at sigma_0") {
    const ModelParams& p = kSym;
    const Exponents e = derive_exponents(p);
    const double b = 1.0, s = 0.08;
    for (double y : {-0.6, 0.6}) {
      const double x = 0.1;
      const double want = inv_gamma_expect(e.nu, sigma0_scale(p, y), y > 0 ? b - x : 1.0, [&](double w) {
        const double land = y > 0 ? x + w : x - w;
        return land >= b ? std::pow(land - b, s) : mellin_x_zeta(p, land, 0.0, b, s);
      });
      CHECK(rel(mellin_x_zeta(p, x, y, b, s), want) < 1e-7);
    }
  }

  TEST_CASE("hitting probability from the axis is I_r(alpha, beta)") {
    for (const ModelParams& p : {kSym, kAsym, kOdd}) {
      const Exponents e = derive_exponents(p);
      for (double x : {-0.9, -0.2, 0.0, 0.5, 0.99}) {
        const Interval iv{-1.0, 1.0, x};
        const double want = static_cast<double>(
            boost::math::ibeta(mp50(e.alpha), mp50(e.beta), mp50((x + 1.0) / 2.0)));
        CHECK(std::abs(hitting_prob(p, iv, 0.0) - want) < 1e-12);
      }
    }
    CHECK(std::abs(hitting_prob(kSym, {-1, 1, 0}, 0.0) - 0.5) < 1e-12);
    CHECK(std::abs(hitting_prob(kAsym, {-1, 1, 0}, 0.0) - 0.627103169533071) < 1e-12);
  }

  TEST_CASE("hitting probability from y != 0 by composition") {
    const ModelParams& p = kAsym;
    const Exponents e = derive_exponents(p);
    const Interval iv{-1.0, 1.0, 0.2};
    for (double y : {-0.5, 0.5}) {
      const double want = inv_gamma_expect(e.nu, sigma0_scale(p, y), y > 0 ? iv.b - iv.x : iv.x - iv.a, [&](double w) {
        const double land = y > 0 ? iv.x + w : iv.x - w;
        if (land >= iv.b) return 1.0;
        if (land <= iv.a) return 0.0;
        return hitting_prob(p, {iv.a, iv.b, land}, 0.0);
      });
      CHECK(std::abs(hitting_prob(p, iv, y) - want) < 1e-8);
    }
    // boundary starts are allowed on the side the first excursion moves away from
    CHECK(hitting_prob(p, {-1, 1, 1.0}, -0.3) < 1.0);
    CHECK(hitting_prob(p, {-1, 1, -1.0}, 0.3) > 0.0);
    CHECK_THROWS_AS(hitting_prob(p, {-1, 1, 1.0}, 0.3), DomainError);
  }

  TEST_CASE("exit-position density: normalization and upper mass") {
    for (const ModelParams& p : {kSym, kAsym, kOdd}) {
      const Interval iv{-0.5, 2.0, 0.3};
      const LawSpec law = exit_position_law_y0(p, iv);
      const auto& tab = dynamic_cast<const TabulatedLaw&>(law.impl());
      CHECK(std::abs(tab.mass_by_quadrature() - 1.0) < 1e-8);
      CHECK(std::abs(tab.positive_mass() - hitting_prob(p, iv, 0.0)) < 1e-8);
    }
  }

  TEST_CASE("exit-position density is symmetric for symmetric parameters") {
    const Interval iv{-1.0, 1.0, 0.0};
    for (double z : {0.01, 0.3, 1.0, 2.5}) {
      CHECK(rel(exit_position_density_y0(kSym, iv, z), exit_position_density_y0(kSym, iv, -z)) < 1e-12);
    }
  }

  TEST_CASE("exit-position density stays finite far in the tail") {
    const Interval iv{-1.0, 1.0, 0.0};
    for (double z : {5.0, 12.0, 30.0}) {
      const double f = exit_position_density_y0(kAsym, iv, z);
      CHECK(std::isfinite(f));
      CHECK(f >= 0.0);
    }
  }

  TEST_CASE("modified Laplace transform against quadrature of the density") {
    for (const ModelParams& p : {kSym, kAsym}) {
      const Exponents e = derive_exponents(p);
      const Interval iv{-1.0, 1.5, 0.2};
      boost::math::quadrature::tanh_sinh<double> ts;
      for (double lambda : {0.0, 0.7, 3.0}) {
        for (int sign : {1, -1}) {
          // the density is below 1e-30 beyond |z| = 12 for these parameters
          auto g = [&](double r) {
            return std::pow(r, 2 - p.delta) * std::exp(-lambda * std::pow(r, 2 + p.gamma_exp) / e.a_const) *
                   exit_position_density_y0(p, iv, sign * r);
          };
          const double q = ts.integrate(g, 0.0, 1.0) + ts.integrate(g, 1.0, 12.0);
          CHECK(rel(modified_laplace_exit(p, iv, lambda, sign > 0 ? Side::plus : Side::minus), q) < 1e-8);
        }
      }
    }
  }

  TEST_CASE("exit system: masses, Mellin residuals and the one-sided limit") {
    for (const ModelParams& p : {kSym, kAsym, kOdd}) {
      const Interval iv{-1.0, 1.0, 0.1};
      const Exponents e = derive_exponents(p);
      const ExitSystem sys = exit_system_laws(p, iv);
      CHECK(std::abs(sys.mass_plus + sys.mass_minus - 1.0) < 1e-8);
      CHECK(std::abs(sys.mass_plus - hitting_prob(p, iv, 0.0)) < 1e-7);
      const double lo = std::max(e.alpha, e.beta) - 1.0, hi = std::min(e.alpha, e.beta);
      for (double f : {0.2, 0.5, 0.8}) {
        const SystemResiduals r = exit_system_residuals(p, iv, lo + f * (hi - lo));
        CHECK(std::abs(r.upper) < 1e-7);
        CHECK(std::abs(r.lower) < 1e-7);
      }
      CHECK(std::abs(sys.rho_plus.cdf(sys.rho_plus.quantile(0.6)) - 0.6) < 1e-9);
    }
    const Interval wide{-1e6, 1.0, 0.0};
    const LawSpec one_sided = x_zeta_b_overshoot_law(kSym, 0.0, 1.0);
    for (double z : {0.1, 0.5, 2.0, 10.0}) {
      CHECK(std::abs(rho_plus_density(kSym, wide, z) - one_sided.pdf(z)) < 1e-4);
    }
  }

  TEST_CASE("exit position from y != 0") {
    const Interval iv{-1.0, 1.0, 0.0};
    for (double y : {0.5, -0.5}) {
      const LawSpec law = exit_position_law_general(kSym, iv, y);
      const auto& tab = dynamic_cast<const TabulatedLaw&>(law.impl());
      CHECK(std::abs(tab.mass_by_quadrature() - 1.0) < 1e-6);
      CHECK(std::abs(tab.positive_mass() - hitting_prob(kSym, iv, y)) < 1e-6);
    }
    // y = 0 reduces to the axis density
    CHECK(exit_position_density_general(kSym, iv, 0.0, 0.4) == exit_position_density_y0(kSym, iv, 0.4));
  }

  TEST_CASE("Mellin transform of Y at T_b from the axis") {
    // consistency with the one-sided limit of the exit-position density
    const ModelParams& p = kSym;
    const double s = 0.2;
    const double far = mellin_y_tb(p, 0.0, 0.0, 1.0, s);
    CHECK(std::isfinite(far));
    CHECK(far > 0.0);
    CHECK_THROWS(mellin_y_tb(p, 0.0, 0.0, 1.0, 3.0 * derive_exponents(p).beta));
  }
}
