#include <doctest.h>

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "skewbessel/analytic.hpp"
#include "skewbessel/error.hpp"
#include "skewbessel/pathsim.hpp"
#include "skewbessel/sampler.hpp"
#include "skewbessel/stats.hpp"

using namespace skewbessel;

namespace {

const ModelParams kSym{1.0, 0.0, 1.0, 1.0};
const ModelParams kAsym{1.5, 0.3, 1.0, 2.0};

// q' / dt is noncentral chi-square with delta degrees of freedom and
// noncentrality q / dt.
double bessel_sq_cdf(double q, double delta, double dt, double z) {
  if (z <= 0) return 0.0;
  if (q == 0.0) return boost::math::gamma_p(delta / 2, z / (2 * dt));
  return boost::math::cdf(boost::math::non_central_chi_squared(delta, q / dt), z / dt);
}

// X at the first zero, with horizon-censored paths completed by an exact
// draw from their final state.
std::vector<double> simulated_x_sigma0(const ModelParams& p, const PathConfig& cfg, double y, std::uint64_t seed,
                                       std::uint64_t n) {
  const StopSpec stop{StopRule::sigma0, std::nullopt, std::nullopt};
  const auto runs = simulate_replicas(p, cfg, 0.0, y, stop, seed, n, 1);
  const Exponents e = derive_exponents(p);
  std::vector<double> xs;
  RngStream rng(seed, 1ULL << 40);
  for (const auto& s : runs) {
    double x = s.x_at_stop;
    if (s.stop_kind == StopKind::censored_at_horizon && s.y_at_stop != 0.0) {
      const double w = sample_inverse_gamma(e.nu, sigma0_scale(p, s.y_at_stop), rng);
      x += s.y_at_stop > 0 ? w : -w;
    }
    xs.push_back(x);
  }
  return xs;
}

PathConfig fast(double dt) {
  PathConfig c;
  c.dt = dt;
  c.step_growth = dt;
  c.t_max = 1e4;
  return c;
}

}  // namespace

TEST_SUITE("pathsim") {
  TEST_CASE("squared Bessel step: mean and noncentral chi-square law") {
    for (double delta : {1.0, 1.5, 1.9}) {
      const double q = 0.2, dt = 0.1;
      RngStream r(1, static_cast<std::uint64_t>(delta * 10));
      std::vector<double> v(40000);
      for (auto& s : v) s = step_bessel_squared(q, delta, dt, r);
      const MeanSe m = mean_and_se(v);
      CAPTURE(delta);
      CHECK(std::abs(m.mean - (q + delta * dt)) < 4 * m.se);
      CHECK(oracle::ks_distance(v, [&](double z) { return bessel_sq_cdf(q, delta, dt, z); }) <
            oracle::ks_crit_001(v.size()));
    }
  }

  TEST_CASE("squared Bessel step from zero with delta = 1 is dt chi-square(1)") {
    RngStream r(2, 0);
    std::vector<double> v(40000);
    for (auto& s : v) s = step_bessel_squared(0.0, 1.0, 0.5, r);
    CHECK(oracle::ks_distance(v, [](double z) { return z > 0 ? boost::math::gamma_p(0.5, z) : 0.0; }) <
          oracle::ks_crit_001(v.size()));
  }

  TEST_CASE("Poisson-mixture step agrees with the decomposition step") {
    const double q = 0.3, delta = 1.5, dt = 0.05;
    RngStream r(3, 0);
    std::vector<double> v(40000);
    for (auto& s : v) s = step_bessel_squared_poisson(q, delta, dt, r);
    CHECK(oracle::ks_distance(v, [&](double z) { return bessel_sq_cdf(q, delta, dt, z); }) <
          oracle::ks_crit_001(v.size()));
    // delta below one is only reachable through the mixture
    RngStream r2(3, 1);
    std::vector<double> w(40000);
    for (auto& s : w) s = step_bessel_squared_poisson(q, 0.5, dt, r2);
    CHECK(oracle::ks_distance(w, [&](double z) { return bessel_sq_cdf(q, 0.5, dt, z); }) <
          oracle::ks_crit_001(w.size()));
  }

  TEST_CASE("two half steps have the law of one full step") {
    const double q = 0.1, delta = 1.3, dt = 0.2;
    RngStream r(4, 0);
    std::vector<double> v(40000);
    for (auto& s : v) s = step_bessel_squared(step_bessel_squared(q, delta, dt / 2, r), delta, dt / 2, r);
    CHECK(oracle::ks_distance(v, [&](double z) { return bessel_sq_cdf(q, delta, dt, z); }) <
          oracle::ks_crit_001(v.size()));
  }

  TEST_CASE("bridge zero probability against Bessel functions") {
    for (double delta : {1.2, 1.5, 1.8}) {
      const double m = 1 - delta / 2;
      for (double z : {1e-3, 0.1, 1.0, 4.0, 10.0}) {
        const oracle::mp50 M = m, Z = z;
        const double want = static_cast<double>(1 - boost::math::cyl_bessel_i(M, Z) / boost::math::cyl_bessel_i(-M, Z));
        CAPTURE(delta);
        CAPTURE(z);
        CHECK(oracle::rel(bessel_bridge_zero_prob(z, 1.0, delta, 1.0), want) < 1e-9);
      }
    }
    // reflection: |B| bridges visit 0 with weight 2 phi(r0 + r1) / (phi(r1 - r0) + phi(r1 + r0))
    for (double r0 : {0.01, 0.2, 0.9}) {
      const double r1 = 0.3, dt = 0.05;
      const double near = std::exp(-(r1 - r0) * (r1 - r0) / (2 * dt));
      const double far = std::exp(-(r1 + r0) * (r1 + r0) / (2 * dt));
      CHECK(oracle::rel(bessel_bridge_zero_prob(r0, r1, 1.0, dt), 2 * far / (near + far)) < 1e-12);
    }
    CHECK(bessel_bridge_zero_prob(0.0, 0.3, 1.5, 0.1) == 1.0);
    CHECK_THROWS_AS(bessel_bridge_zero_prob(1, 1, 2.0, 1), DomainError);
  }

  TEST_CASE("configuration and stop validation") {
    PathConfig c;
    c.dt = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = PathConfig{};
    c.zero_band = -1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK(PathConfig{}.band() == doctest::Approx(std::sqrt(1e-4) / 4));
    CHECK_THROWS_AS((StopSpec{StopRule::level_passage, std::nullopt, std::nullopt}.validate(0.0)), ConfigError);
    CHECK_THROWS_AS((StopSpec{StopRule::level_passage, 1.0, -1.0}.validate(0.0)), ConfigError);
    CHECK_NOTHROW((StopSpec{StopRule::level_passage, std::nullopt, 1.0}.validate(0.0)));
  }

  TEST_CASE("stopped samples land on the level they cross") {
    const StopSpec stop{StopRule::level_passage, -0.3, 0.3};
    const auto runs = simulate_replicas(kAsym, fast(1e-3), 0.0, 0.0, stop, 5, 300, 1);
    for (const auto& s : runs) {
      REQUIRE(s.stop_kind == StopKind::exit_T_ab);
      CHECK((s.x_at_stop == 0.3 || s.x_at_stop == -0.3));
      CHECK(s.stop_time > 0.0);
      CHECK(s.steps > 0);
      // X increases while Y > 0, so the upper level is reached from above the axis
      if (s.x_at_stop == 0.3) CHECK(s.y_at_stop >= 0.0);
      if (s.x_at_stop == -0.3) CHECK(s.y_at_stop <= 0.0);
    }
  }

  TEST_CASE("horizon censoring and immediate stops") {
    PathConfig c = fast(1e-3);
    c.t_max = 0.5;
    RngStream r(6, 0);
    const StoppedSample s = simulate_to_stop(kSym, c, 0.0, 0.0, {StopRule::level_passage, -1e3, 1e3}, r);
    CHECK(s.stop_kind == StopKind::censored_at_horizon);
    CHECK(s.stop_time == doctest::Approx(0.5));
    const StoppedSample z = simulate_to_stop(kSym, c, 0.2, 0.0, {StopRule::sigma0, std::nullopt, std::nullopt}, r);
    CHECK(z.stop_kind == StopKind::hit_sigma0);
    CHECK(z.stop_time == 0.0);
    CHECK(z.x_at_stop == 0.2);
  }

  TEST_CASE("trajectory recording keeps every stride-th step") {
    PathConfig c = fast(1e-3);
    c.step_growth = 0.0;
    c.t_max = 0.1;
    c.record_stride = 10;
    RngStream r(7, 0);
    std::vector<TrajectoryPoint> tr;
    (void)simulate_to_stop(kSym, c, 0.0, 0.5, {StopRule::horizon, std::nullopt, std::nullopt}, r, &tr);
    REQUIRE(tr.size() >= 10);
    CHECK(tr.front().t == 0.0);
    CHECK(tr.front().y == 0.5);
    for (std::size_t i = 1; i < tr.size(); ++i) CHECK(tr[i].t > tr[i - 1].t);
  }

  TEST_CASE("replica results do not depend on the worker count") {
    const StopSpec stop{StopRule::level_passage, -0.5, 0.5};
    const auto one = simulate_replicas(kAsym, fast(1e-3), 0.0, 0.0, stop, 8, 200, 1);
    const auto three = simulate_replicas(kAsym, fast(1e-3), 0.0, 0.0, stop, 8, 200, 3);
    for (std::size_t i = 0; i < one.size(); ++i) {
      CHECK(one[i].stop_time == three[i].stop_time);
      CHECK(one[i].x_at_stop == three[i].x_at_stop);
      CHECK(one[i].y_at_stop == three[i].y_at_stop);
    }
    CHECK_THROWS_AS(parallel_for(3, 0, [](std::uint64_t) {}), ConfigError);
    CHECK_THROWS_AS(parallel_for(200, 2, [](std::uint64_t i) {
                      if (i == 150) throw DomainError("boom");
                    }),
                    DomainError);
  }

  TEST_CASE("survival curve is a decreasing function starting near one") {
    PathConfig c = fast(1e-3);
    c.t_max = 100;
    const std::vector<double> grid{1e-3, 0.01, 0.1, 1.0, 10.0, 100.0};
    const auto curve = survival_curve(kSym, c, 0.0, 0.0, 1.0, grid, 400, 9, 1);
    REQUIRE(curve.size() == grid.size());
    CHECK(curve.front().p > 0.99);
    for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].p <= curve[i - 1].p);
    CHECK_THROWS_AS(survival_curve(kSym, c, 1.0, 0.0, 1.0, grid, 10, 9, 1), ConfigError);
    CHECK_THROWS_AS(survival_curve(kSym, c, 0.0, 0.0, 1.0, {1.0, 0.5}, 10, 9, 1), ConfigError);
  }
}

TEST_SUITE("pathsim_mc") {
  TEST_CASE("symmetric and asymmetric exit probabilities") {
    const std::uint64_t n = 4000;
    for (const ModelParams& p : {kSym, kAsym}) {
      const auto runs =
          simulate_replicas(p, fast(1e-3), 0.0, 0.0, {StopRule::level_passage, -1.0, 1.0}, 10, n, 1);
      std::uint64_t up = 0;
      double signs = 0, pos = 0;
      for (const auto& s : runs) {
        up += s.x_at_stop >= 1.0;
        signs += s.excursions;
        pos += s.positive_excursions;
      }
      const double want = hitting_prob(p, {-1.0, 1.0, 0.0}, 0.0);
      CHECK(std::abs(up / double(n) - want) < 3.5 * std::sqrt(want * (1 - want) / n));
      const double pp = 0.5 * (1 + p.eta);
      CHECK(std::abs(pos / signs - pp) < 3.5 * std::sqrt(pp * (1 - pp) / signs));
    }
  }

  TEST_CASE("space-time scaling of the exit position") {
    // (X, Y) -> (l X, l^{1/(2+gamma)} Y) maps exits of (a, b) onto exits of (l a, l b)
    const ModelParams& p = kAsym;
    const double l = 8.0, k = std::pow(l, 1.0 / 3.0);
    const std::uint64_t n = 4000;
    const auto unit = simulate_replicas(p, fast(1e-3), 0.0, 0.0, {StopRule::level_passage, -1.0, 1.0}, 11, n, 1);
    const auto big = simulate_replicas(p, fast(1e-3), 0.0, 0.0, {StopRule::level_passage, -l, l}, 12, n, 1);
    std::vector<double> a, b;
    for (const auto& s : unit) a.push_back(s.y_at_stop);
    for (const auto& s : big) b.push_back(s.y_at_stop / k);
    const EmpiricalDist ea(a), eb(b);
    CHECK(ks_two_sample(ea, eb) < ks_two_sample_critical(n, n, 0.01));
  }

  TEST_CASE("X at sigma_0 from simulation with bridge zero detection") {
    const std::uint64_t n = 10000;
    for (const ModelParams& p : {kSym, kAsym}) {
      const auto xs = simulated_x_sigma0(p, fast(1e-3), 1.0, 13, n);
      const LawSpec law = x_sigma0_law(p, 0.0, 1.0);
      CHECK(oracle::ks_distance(xs, [&](double z) { return law.cdf(z); }) < oracle::ks_crit_001(n));
    }
  }

  TEST_CASE("band-only zero detection: KS distance shrinks as dt is refined") {
    const std::uint64_t n = 20000;
    const LawSpec law = x_sigma0_law(kSym, 0.0, 1.0);
    std::vector<double> d;
    for (double dt : {4e-3, 2.5e-4}) {
      PathConfig c = fast(dt);
      c.bridge_zeros = false;
      d.push_back(oracle::ks_distance(simulated_x_sigma0(kSym, c, 1.0, 14, n), [&](double z) { return law.cdf(z); }));
    }
    MESSAGE("KS distance at dt 4e-3 and 2.5e-4: " << d[0] << " " << d[1]);
    CHECK(d[0] > oracle::ks_crit_001(n));
    CHECK(d[1] < d[0]);
  }

  TEST_CASE("simulated overshoot past a single level") {
    // The overshoot law is heavy tailed, so the paths still running at the
    // horizon are the large ones; they are completed by an exact draw from
    // their final state.
    const std::uint64_t n = 4000;
    PathConfig c = fast(1e-3);
    c.t_max = 1e5;
    const auto runs = simulate_replicas(kSym, c, 0.0, 0.0,
                                        {StopRule::zero_after_passage, std::nullopt, 0.5}, 15, n, 1);
    std::vector<double> over;
    std::uint64_t censored = 0;
    RngStream rng(15, 1ULL << 40);
    for (const auto& s : runs) {
      if (s.stop_kind == StopKind::hit_zeta_b) {
        over.push_back(s.x_at_stop - 0.5);
      } else {
        ++censored;
        over.push_back(zero_chain_to_zeta_from(kSym, s.x_at_stop, s.y_at_stop, 0.5, rng).x_at_zeta - 0.5);
      }
    }
    CHECK(censored < n / 10);
    const LawSpec law = x_zeta_b_overshoot_law(kSym, 0.0, 0.5);
    CHECK(oracle::ks_distance(over, [&](double z) { return law.cdf(z); }) < oracle::ks_crit_001(n));
  }
}
