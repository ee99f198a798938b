#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "skewbessel/error.hpp"
#include "skewbessel/params.hpp"
#include "skewbessel/rng.hpp"

using namespace skewbessel;

namespace {

// beta from tan(pi beta) (c^nu (1-eta)/(1+eta) + cos nu pi) = sin nu pi by
// bisection on (0, nu) in long double.
long double beta_by_bisection(const ModelParams& p) {
  const long double pi = std::numbers::pi_v<long double>;
  const long double nu = (2.0L - p.delta) / (2.0L + p.gamma_exp);
  const long double k = std::pow(static_cast<long double>(p.c_weight), nu) * (1.0L - p.eta) / (1.0L + p.eta) +
                        std::cos(nu * pi);
  auto f = [&](long double b) { return std::sin(pi * b) * k - std::cos(pi * b) * std::sin(nu * pi); };
  long double lo = 0.0L, hi = nu;
  for (int i = 0; i < 200; ++i) {
    const long double mid = 0.5L * (lo + hi);
    (f(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5L * (lo + hi);
}

ModelParams random_params(RngStream& r) {
  return {1.0 + 0.999 * r.uniform(), -0.98 + 1.96 * r.uniform(), 0.1 + 5.0 * r.uniform(),
          std::exp(4.0 * (r.uniform() - 0.5))};
}

}  // namespace

TEST_SUITE("params") {
  TEST_CASE("integrated Brownian motion: theta = 1/4") {
    const Exponents e = derive_exponents({1.0, 0.0, 1.0, 1.0});
    CHECK(std::abs(e.theta - 0.25) < 1e-15);
    CHECK(std::abs(e.nu - 1.0 / 3.0) < 1e-15);
    CHECK(std::abs(e.alpha - 1.0 / 6.0) < 1e-15);
    CHECK(std::abs(e.beta - 1.0 / 6.0) < 1e-15);
    CHECK(e.a_const == 4.5);
  }

  TEST_CASE("beta agrees with a bisection solve of the defining equation") {
    RngStream r(17, 0);
    for (int i = 0; i < 200; ++i) {
      const ModelParams p = random_params(r);
      const Exponents e = derive_exponents(p);
      CHECK(std::abs(e.beta - static_cast<double>(beta_by_bisection(p))) < 1e-13);
      CHECK(std::abs(e.theta - (2.0 + p.gamma_exp) * e.beta / 2.0) < 1e-14);
      CHECK(e.beta > 0.0);
      CHECK(e.beta < e.nu);
    }
  }

  TEST_CASE("asymmetric reference set") {
    const Exponents e = derive_exponents({1.5, 0.3, 1.0, 2.0});
    CHECK(std::abs(e.nu - 1.0 / 6.0) < 1e-15);
    CHECK(std::abs(e.beta - static_cast<double>(beta_by_bisection({1.5, 0.3, 1.0, 2.0}))) < 1e-14);
    CHECK(std::abs(e.alpha + e.beta - e.nu) < 1e-15);
  }

  TEST_CASE("identities hold on random parameters") {
    RngStream r(18, 0);
    for (int i = 0; i < 100; ++i) {
      const ModelParams p = random_params(r);
      const Exponents e = derive_exponents(p);
      CHECK(std::abs(e.alpha + e.beta - e.nu) < 1e-12);
      CHECK(std::abs(theta_equation_residual(p, e)) < 1e-12);
      for (double f : {0.05, 0.3, 0.6, 0.95}) {
        CHECK(std::abs(moment_ratio_identity_residual(p, e, e.beta - 1.0 + f)) < 1e-10);
      }
    }
  }

  TEST_CASE("moment ratio solves the identity at an interior s") {
    // solve the identity for R at s = beta / 2 and compare
    RngStream r(19, 0);
    const double pi = std::numbers::pi;
    for (int i = 0; i < 50; ++i) {
      const ModelParams p = random_params(r);
      const Exponents e = derive_exponents(p);
      const double s = 0.5 * e.beta;
      const double w = 2.0 * pi / (2.0 + p.gamma_exp);
      const double R = (std::sin(w - pi * s) - std::sin(pi * (e.beta - s)) * std::sin(w) / std::sin(pi * e.beta)) /
                       std::sin(pi * s);
      CHECK(std::abs(e.moment_ratio - R) < 1e-9 * std::max(1.0, R));
    }
    CHECK(std::abs(derive_exponents({1.0, 0.0, 1.0, 1.0}).moment_ratio - 2.0) < 1e-13);
  }

  TEST_CASE("mirroring exchanges alpha and beta") {
    RngStream r(20, 0);
    for (int i = 0; i < 50; ++i) {
      const ModelParams p = random_params(r);
      const Exponents e = derive_exponents(p);
      const Exponents m = derive_exponents(mirrored(p));
      CHECK(std::abs(e.alpha - m.beta) < 1e-13);
      CHECK(std::abs(e.beta - m.alpha) < 1e-13);
      const ModelParams back = mirrored(mirrored(p));
      CHECK(std::abs(back.c_weight - p.c_weight) < 1e-15 * p.c_weight);
      CHECK(back.eta == p.eta);
    }
  }

  TEST_CASE("theta increases with eta") {
    // more positive excursions make the upward passage faster
    double last = 0.0;
    for (double eta : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
      const double t = derive_exponents({1.3, eta, 1.0, 1.0}).theta;
      CHECK(t > last);
      last = t;
    }
  }

  TEST_CASE("validation names the violated bound") {
    auto message = [](ModelParams p) {
      try {
        p.validate();
      } catch (const DomainError& e) {
        return std::string(e.what());
      }
      return std::string();
    };
    CHECK(message({2.5, 0, 1, 1}).find("delta") != std::string::npos);
    CHECK(message({0.5, 0, 1, 1}).find("delta") != std::string::npos);
    CHECK(message({1, 1.0, 1, 1}).find("eta") != std::string::npos);
    CHECK(message({1, 0, 0.0, 1}).find("gamma") != std::string::npos);
    CHECK(message({1, 0, 1, -2}).find("c") != std::string::npos);
    CHECK(message({1, 0, 1, 1}).empty());
    CHECK_THROWS_AS(derive_exponents({2.0, 0, 1, 1}), DomainError);
  }

  TEST_CASE("exit interval validation") {
    CHECK_NOTHROW(Interval{-1, 1, 0}.validate_exit());
    CHECK_THROWS_AS((Interval{-1, 1, 1}.validate_exit()), DomainError);
    CHECK_THROWS_AS((Interval{1, -1, 0}.validate_exit()), DomainError);
  }
}
