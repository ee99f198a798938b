#include <doctest.h>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "skewbessel/analytic.hpp"
#include "skewbessel/error.hpp"
#include "skewbessel/sampler.hpp"
#include "skewbessel/stats.hpp"

using namespace skewbessel;

namespace {

const ModelParams kSym{1.0, 0.0, 1.0, 1.0};
const ModelParams kAsym{1.5, 0.3, 1.0, 2.0};
constexpr int kN = 20000;

template <class F>
std::vector<double> draws(std::uint64_t seed, F f, int n = kN) {
  RngStream r(seed, 0);
  std::vector<double> v(n);
  for (auto& x : v) x = f(r);
  return v;
}

}  // namespace

TEST_SUITE("sampler") {
  TEST_CASE("inverse gamma and Beta-prime draws") {
    const auto ig = draws(1, [](RngStream& r) { return sample_inverse_gamma(1.0 / 6.0, 0.3, r); });
    CHECK(oracle::ks_distance(ig, [](double z) { return z > 0 ? boost::math::gamma_q(1.0 / 6.0, 0.3 / z) : 0.0; }) <
          oracle::ks_crit_001(kN));
    const auto bp = draws(2, [](RngStream& r) { return sample_beta_prime(0.9, 0.1, r); });
    CHECK(oracle::ks_distance(bp, [](double z) { return z > 0 ? boost::math::ibetac(0.1, 0.9, 1 / (1 + z)) : 0.0; }) <
          oracle::ks_crit_001(kN));
  }

  TEST_CASE("overshoot draws follow the overshoot law") {
    for (const ModelParams& p : {kSym, kAsym}) {
      const Exponents e = derive_exponents(p);
      const LawSpec law = x_zeta_b_overshoot_law(p, 0.2, 1.0);
      const auto v = draws(3, [&](RngStream& r) { return sample_overshoot(p, e, 0.8, r); });
      CHECK(oracle::ks_distance(v, [&](double z) { return law.cdf(z); }) < oracle::ks_crit_001(kN));
    }
  }

  TEST_CASE("first zero time: reflection principle for delta = 1") {
    // |B| started at y first hits 0 at a time with CDF erfc(y / sqrt(2t))
    const double y = 0.7;
    const auto v = draws(4, [&](RngStream& r) { return sample_sigma0_time(kSym, y, r); });
    CHECK(oracle::ks_distance(v, [&](double t) { return t > 0 ? std::erfc(y / std::sqrt(2 * t)) : 0.0; }) <
          oracle::ks_crit_001(kN));
    // delta = 1.5: y^2 / (2 G), G ~ Gamma(1/4)
    const auto w = draws(5, [&](RngStream& r) { return sample_sigma0_time(kAsym, -y, r); });
    CHECK(oracle::ks_distance(w, [&](double t) { return t > 0 ? boost::math::gamma_q(0.25, y * y / (2 * t)) : 0.0; }) <
          oracle::ks_crit_001(kN));
  }

  TEST_CASE("exit-system draws follow the rho mixture") {
    for (const ModelParams& p : {kSym, kAsym}) {
      const Interval iv{-1.0, 1.0, 0.3};
      const ExitSystemSampler sampler(p, iv);
      const ExitSystem sys = exit_system_laws(p, iv);
      RngStream r(6, 0);
      std::vector<double> plus, minus;
      double tries_plus = 0.0;
      for (int i = 0; i < kN; ++i) {
        const ExitDraw d = sampler(r);
        if (d.side == Side::plus) {
          plus.push_back(d.magnitude);
          tries_plus += d.attempts;
        } else {
          minus.push_back(d.magnitude);
        }
        REQUIRE(d.attempts >= 1);
      }
      const double up = hitting_prob(p, iv, 0.0);
      CHECK(std::abs(plus.size() / double(kN) - up) < 4 * std::sqrt(up * (1 - up) / kN));
      CHECK(oracle::ks_distance(plus, [&](double z) { return sys.rho_plus.cdf(z); }) < oracle::ks_crit_001(plus.size()));
      CHECK(oracle::ks_distance(minus, [&](double z) { return sys.rho_minus.cdf(z); }) < oracle::ks_crit_001(minus.size()));
      // accepted / proposed estimates the acceptance probability of the plus side
      const double acc = plus.size() / tries_plus;
      CHECK(std::abs(acc - sampler.acceptance_plus()) < 4 * std::sqrt(acc * (1 - acc) / tries_plus));
    }
  }

  TEST_CASE("exit-position sampler inverts the tabulated CDF") {
    const Interval iv{-1.0, 1.0, 0.0};
    const ExitPositionSampler sampler(kAsym, iv);
    const auto v = draws(7, [&](RngStream& r) { return sampler(r); });
    CHECK(oracle::ks_distance(v, [&](double z) { return sampler.law().cdf(z); }) < oracle::ks_crit_001(kN));
    const double up = hitting_prob(kAsym, iv, 0.0);
    const double frac = std::count_if(v.begin(), v.end(), [](double z) { return z > 0; }) / double(kN);
    CHECK(std::abs(frac - up) < 4 * std::sqrt(up * (1 - up) / kN));
  }

  TEST_CASE("zero chain from y != 0 matches the Mellin transform") {
    for (double y : {-0.8, 0.8}) {
      const double s = 0.04, x = 0.0, b = 1.0;
      const auto v = draws(8, [&](RngStream& r) {
        const ZetaDraw d = zero_chain_to_zeta_from(kSym, x, y, b, r);
        REQUIRE(d.x_at_zeta >= b);
        return std::pow(d.x_at_zeta - b, s);
      });
      const MeanSe m = mean_and_se(v);
      CHECK(std::abs(m.mean - mellin_x_zeta(kSym, x, y, b, s)) < 3.5 * m.se);
    }
  }

  TEST_CASE("zero chain returns the sigma_0 landing when it is already past b") {
    RngStream r(9, 0);
    int direct = 0;
    for (int i = 0; i < 2000; ++i) {
      const ZetaDraw d = zero_chain_to_zeta_from(kSym, 0.9, 2.0, 1.0, r);
      if (d.steps == 1) ++direct;
      CHECK(d.x_at_zeta >= 1.0);
    }
    // P(X_sigma0 >= b) = P(InvGamma(nu, S) >= 0.1) = P(nu, S / 0.1)
    const Exponents e = derive_exponents(kSym);
    const double p = boost::math::gamma_p(e.nu, sigma0_scale(kSym, 2.0) / 0.1);
    CHECK(std::abs(direct / 2000.0 - p) < 4 * std::sqrt(p * (1 - p) / 2000));
    CHECK_THROWS_AS(zero_chain_to_zeta(kSym, 1.0, 1.0, r), DomainError);
  }

  TEST_CASE("two-sided zero chain exits the interval") {
    const Interval iv{-1.0, 1.0, 0.0};
    const ExitSystemSampler sampler(kSym, iv);
    RngStream r(10, 0);
    for (int i = 0; i < 1000; ++i) {
      const ZetaDraw d = zero_chain_to_zeta_ab(sampler, iv, r);
      CHECK((d.x_at_zeta >= iv.b || d.x_at_zeta <= iv.a));
    }
  }

  TEST_CASE("draws are a function of the stream") {
    const Exponents e = derive_exponents(kAsym);
    RngStream a(11, 3), b(11, 3);
    for (int i = 0; i < 100; ++i) CHECK(sample_overshoot(kAsym, e, 1.0, a) == sample_overshoot(kAsym, e, 1.0, b));
  }
}
