#include "skewbessel/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "skewbessel/error.hpp"
#include "skewbessel/quadrature.hpp"
#include "skewbessel/rng.hpp"
#include "skewbessel/sampler.hpp"
#include "skewbessel/specfun.hpp"

namespace skewbessel {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

quad::Options tight() {
  quad::Options o;
  o.abs_tol = 1e-14;
  o.rel_tol = 1e-11;
  o.max_subdivisions = 4000;
  return o;
}

double inv_gamma_log_pdf(double shape, double scale, double w) {
  return shape * std::log(scale) - log_gamma(shape) - (shape + 1.0) * std::log(w) - scale / w;
}

double inv_gamma_pdf(double shape, double scale, double w) {
  if (!(w > 0.0)) return 0.0;
  return std::exp(inv_gamma_log_pdf(shape, scale, w));
}

/// Integral over (0, inf) of a function behaving like z^p at 0 and like
/// z^{-1-q} at infinity; `h` is the full integrand, split at `split`.
double integrate_half_line(const std::function<double(double)>& h, double p, double q,
                           double split, const quad::Options& opts) {
  const double head = quad::integrate_power_weight(
                          [&](double z) { return h(z) * std::pow(z, -p); }, split, p, opts)
                          .value;
  const double tail = quad::integrate_power_tail(
                          [&](double z) { return h(z) * std::pow(z, 1.0 + q); }, split, q, opts)
                          .value;
  return head + tail;
}

/// E[g(W)] for W ~ InvGamma(shape, scale) restricted to (0, upper).
double inv_gamma_expect_bounded(double shape, double scale, double upper,
                                const std::function<double(double)>& g,
                                const quad::Options& opts) {
  auto integrand = [&](double u) { return g(u) * inv_gamma_pdf(shape, scale, u); };
  const double mode = scale / (shape + 1.0);
  if (mode < upper) {
    return quad::integrate(integrand, 0.0, mode, opts).value +
           quad::integrate(integrand, mode, upper, opts).value;
  }
  return quad::integrate(integrand, 0.0, upper, opts).value;
}

void check_mellin_strip(double s, double beta) {
  if (!(s > beta - 1.0 + kMellinGuard && s < beta - kMellinGuard)) {
    std::ostringstream m;
    m << "Mellin argument " << s << " outside the strip (" << beta - 1.0 << ", " << beta << ")";
    throw DomainError(m.str());
  }
}

// ---------------------------------------------------------------- laws

class ShiftedInverseGammaLaw final : public LawImpl {
 public:
  ShiftedInverseGammaLaw(double x, int sign, double shape, double scale)
      : x_(x), sign_(sign), shape_(shape), scale_(scale) {}

  double pdf(double z) const override { return inv_gamma_pdf(shape_, scale_, sign_ * (z - x_)); }
  double log_pdf(double z) const override {
    const double w = sign_ * (z - x_);
    return w > 0.0 ? inv_gamma_log_pdf(shape_, scale_, w) : -kInf;
  }
  double cdf(double z) const override {
    const double w = sign_ * (z - x_);
    if (sign_ > 0) return w <= 0.0 ? 0.0 : gamma_q(shape_, scale_ / w);
    return w <= 0.0 ? 1.0 : gamma_p(shape_, scale_ / w);
  }
  Support support() const override { return sign_ > 0 ? Support{x_, kInf} : Support{-kInf, x_}; }
  SamplerTag sampler_tag() const override { return SamplerTag::exact; }
  double sample(RngStream& rng) const override { return x_ + sign_ * scale_ / rng.gamma(shape_); }
  double mass_by_quadrature() const override {
    const auto o = tight();
    const double mode = scale_ / (shape_ + 1.0);
    const double head =
        quad::integrate([&](double w) { return inv_gamma_pdf(shape_, scale_, w); }, 0.0, mode, o)
            .value;
    // w^{1+shape} times the density is scale^shape / Gamma(shape) e^{-scale/w}
    const double tail = quad::integrate_power_tail(
                            [&](double w) {
                              return std::exp(shape_ * std::log(scale_) - log_gamma(shape_) -
                                              scale_ / w);
                            },
                            mode, shape_, o)
                            .value;
    return head + tail;
  }
  std::string name() const override { return "x_sigma0"; }

 private:
  double x_;
  int sign_;
  double shape_;
  double scale_;
};

/// len * U with U ~ Beta-prime(1 - b, b), density sin(pi b)/pi len^b z^{-b}/(len + z).
class ScaledBetaPrimeLaw final : public LawImpl {
 public:
  ScaledBetaPrimeLaw(double len, double b) : len_(len), b_(b) {
    log_k_ = std::log(std::sin(kPi * b) / kPi) + b * std::log(len);
  }
  double pdf(double z) const override { return z > 0.0 ? std::exp(log_pdf(z)) : 0.0; }
  double log_pdf(double z) const override {
    if (!(z > 0.0)) return -kInf;
    return log_k_ - b_ * std::log(z) - std::log(len_ + z);
  }
  double cdf(double z) const override {
    if (!(z > 0.0)) return 0.0;
    const double u = z / len_;
    if (u <= 1.0) return inc_beta(1.0 - b_, b_, u / (1.0 + u));
    return 1.0 - inc_beta(b_, 1.0 - b_, 1.0 / (1.0 + u));
  }
  Support support() const override { return {0.0, kInf}; }
  SamplerTag sampler_tag() const override { return SamplerTag::exact; }
  double sample(RngStream& rng) const override {
    const double g1 = rng.gamma(1.0 - b_);
    const double g2 = rng.gamma(b_);
    return len_ * (g1 / g2);
  }
  double mass_by_quadrature() const override {
    return integrate_half_line([this](double z) { return pdf(z); }, -b_, b_, len_, tight());
  }
  std::string name() const override { return "overshoot"; }

 private:
  double len_;
  double b_;
  double log_k_;
};

/// Conditional law of one side of the two-sided exit system.
class ExitSideLaw final : public LawImpl {
 public:
  ExitSideLaw(const ModelParams& p, const Interval& iv, Side side, double mass)
      : p_(p), iv_(iv), side_(side), mass_(mass) {
    const Exponents e = derive_exponents(p);
    nu_ = e.nu;
    if (side == Side::plus) {
      head_ = -e.beta;
      near_ = iv.b - iv.x;
    } else {
      head_ = -e.alpha;
      near_ = iv.x - iv.a;
    }
  }
  double raw(double z) const {
    return side_ == Side::plus ? rho_plus_density(p_, iv_, z) : rho_minus_density(p_, iv_, z);
  }
  double pdf(double z) const override { return z > 0.0 ? raw(z) / mass_ : 0.0; }
  double cdf(double z) const override {
    if (!(z > 0.0)) return 0.0;
    const auto o = tight();
    auto r = [this](double t) { return raw(t); };
    if (z <= near_) {
      return quad::integrate_power_weight([&](double t) { return r(t) * std::pow(t, -head_); }, z,
                                          head_, o)
                 .value /
             mass_;
    }
    const double tail = quad::integrate_power_tail(
                            [&](double t) { return r(t) * std::pow(t, 1.0 + nu_); }, z, nu_, o)
                            .value;
    return std::clamp(1.0 - tail / mass_, 0.0, 1.0);
  }
  Support support() const override { return {0.0, kInf}; }
  SamplerTag sampler_tag() const override { return SamplerTag::rejection; }
  double sample(RngStream& rng) const override {
    return sample_exit_magnitude(derive_exponents(p_), iv_, side_, rng);
  }
  double mass_by_quadrature() const override {
    return integrate_half_line([this](double z) { return raw(z); }, head_, nu_, near_, tight()) /
           mass_;
  }
  std::string name() const override { return side_ == Side::plus ? "rho_plus" : "rho_minus"; }

 private:
  ModelParams p_;
  Interval iv_;
  Side side_;
  double mass_;
  double nu_ = 0.0;
  double head_ = 0.0;
  double near_ = 0.0;
};

}  // namespace

// ---------------------------------------------------------------- sigma_0

double sigma0_scale(const ModelParams& p, double y) {
  const Exponents e = derive_exponents(p);
  const double mag = std::pow(std::abs(y), 2.0 + p.gamma_exp) / e.a_const;
  return y < 0.0 ? p.c_weight * mag : mag;
}

LawSpec x_sigma0_law(const ModelParams& p, double x, double y) {
  if (y == 0.0) throw DomainError("x_sigma0_law: y = 0 gives the point mass at x");
  const Exponents e = derive_exponents(p);
  LawSpec law(std::make_shared<ShiftedInverseGammaLaw>(x, y > 0.0 ? 1 : -1, e.nu,
                                                       sigma0_scale(p, y)));
  law.assert_normalized(1e-8);
  return law;
}

// ---------------------------------------------------------------- h

double harmonic_h(const ModelParams& p, double x, double y) {
  const Exponents e = derive_exponents(p);
  if (x < 0.0) return 0.0;
  if (y == 0.0) return std::pow(x, e.beta);
  const double g2 = 2.0 + p.gamma_exp;
  const double A = e.a_const;
  const double nu = e.nu;
  const double half = 0.5 * (1.0 - nu);
  if (x == 0.0) {
    if (y > 0.0) return 0.0;
    return std::exp(log_gamma(nu - e.beta) - log_gamma(nu) +
                    e.beta * std::log(p.c_weight / A) + 2.0 * e.theta * std::log(-y));
  }
  const double ly = std::log(std::abs(y));
  const double lx = std::log(x);
  if (y > 0.0) {
    const double zw = std::exp(g2 * ly) / (A * x);
    const EvalResult w = whittaker_w(-e.beta - half, 0.5 * nu, zw);
    return std::exp(log_gamma(1.0 + e.beta) - log_gamma(nu) + half * std::log(A) -
                    0.5 * (p.delta + p.gamma_exp) * ly + (half + e.beta) * lx - 0.5 * zw +
                    w.log_abs());
  }
  const double zw = p.c_weight * std::exp(g2 * ly) / (A * x);
  const EvalResult w = whittaker_w(e.beta + half, 0.5 * nu, zw);
  return std::exp(-half * std::log(p.c_weight / A) + log_gamma(nu - e.beta) - log_gamma(nu) +
                  (e.beta + half) * lx - 0.5 * (p.delta + p.gamma_exp) * ly + 0.5 * zw +
                  w.log_abs());
}

double harmonic_h_expectation(const ModelParams& p, double x, double y) {
  const Exponents e = derive_exponents(p);
  if (x < 0.0) return 0.0;
  if (y == 0.0) return std::pow(x, e.beta);
  const double S = sigma0_scale(p, y);
  const double nu = e.nu;
  auto o = tight();
  if (y > 0.0) {
    if (x == 0.0) return 0.0;
    // the expectation can be exponentially small when x is below the mode
    o.abs_tol = 0.0;
    // E[(x - W)_+^beta], W ~ InvGamma(nu, S), in the variable v = x - W
    auto f = [&](double v) { return std::pow(v, e.beta) * inv_gamma_pdf(nu, S, x - v); };
    const double mode = S / (nu + 1.0);
    if (mode < x) {
      return quad::integrate(f, 0.0, x - mode, o).value + quad::integrate(f, x - mode, x, o).value;
    }
    return quad::integrate(f, 0.0, x, o).value;
  }
  // E[(x + W)^beta]
  auto f = [&](double w) { return std::pow(x + w, e.beta) * inv_gamma_pdf(nu, S, w); };
  const double mode = S / (nu + 1.0);
  const double head = quad::integrate(f, 0.0, mode, o).value;
  const double tail = quad::integrate_power_tail(
                          [&](double w) {
                            return std::pow(x + w, e.beta) *
                                   std::exp(nu * std::log(S) - log_gamma(nu) - S / w);
                          },
                          mode, nu, o)
                          .value;
  return head + tail;
}

// ---------------------------------------------------------------- overshoot, Mellin

LawSpec x_zeta_b_overshoot_law(const ModelParams& p, double x, double b) {
  if (!(x < b)) throw DomainError("overshoot law needs x < b");
  const Exponents e = derive_exponents(p);
  LawSpec law(std::make_shared<ScaledBetaPrimeLaw>(b - x, e.beta));
  law.assert_normalized(1e-8);
  return law;
}

double mellin_x_zeta(const ModelParams& p, double x, double y, double b, double s) {
  const Exponents e = derive_exponents(p);
  check_mellin_strip(s, e.beta);
  if (!(x < b || (x == b && y < 0.0))) {
    throw DomainError("mellin_x_zeta needs x < b, or x = b with y < 0");
  }
  const double ratio = std::sin(kPi * e.beta) / std::sin(kPi * (e.beta - s));
  if (s == 0.0) return 1.0;
  const double L = b - x;
  if (y == 0.0) return ratio * std::pow(L, s);
  const double nu = e.nu;
  const double S = sigma0_scale(p, y);
  const auto o = tight();
  const double log_c = nu * std::log(S) - log_gamma(nu);
  // tail density times w^{1+nu}
  auto tail_core = [&](double w) { return std::exp(log_c - S / w); };
  if (y < 0.0) {
    // E[(L + W)^s]
    if (L == 0.0) return ratio * std::exp(s * std::log(S) + log_gamma(nu - s) - log_gamma(nu));
    auto f = [&](double w) { return std::pow(L + w, s) * inv_gamma_pdf(nu, S, w); };
    const double mode = S / (nu + 1.0);
    const double head = quad::integrate(f, 0.0, mode, o).value;
    const double tail = quad::integrate_power_tail(
                            [&](double w) { return std::pow(L + w, s) * tail_core(w); }, mode, nu,
                            o)
                            .value;
    return ratio * (head + tail);
  }
  // y > 0: W ~ InvGamma(nu, S); below: (L - W)^s on W < L, above: (W - L)^s on W > L
  const double below = quad::integrate_power_weight(
                           [&](double v) { return inv_gamma_pdf(nu, S, L - v); }, L, s, o)
                           .value;
  const double above_head = quad::integrate_power_weight(
                                [&](double v) { return inv_gamma_pdf(nu, S, L + v); }, L, s, o)
                                .value;
  // (w - L)^s / w^{1+nu} tail written in v = w - L with exponent nu - s
  const double above_tail =
      quad::integrate_power_tail(
          [&](double v) {
            return std::exp((1.0 + nu) * (std::log(v) - std::log(L + v))) * tail_core(L + v);
          },
          L, nu - s, o)
          .value;
  return ratio * below + above_head + above_tail;
}

double mellin_y_tb(const ModelParams& p, double x, double y, double b, double s) {
  const Exponents e = derive_exponents(p);
  const double sp = s / (2.0 + p.gamma_exp);
  check_mellin_strip(sp, e.beta);
  if (s == 0.0) return 1.0;
  return std::exp(sp * std::log(e.a_const) + log_gamma(e.nu) - log_gamma(e.nu - sp)) *
         mellin_x_zeta(p, x, y, b, sp);
}

// ---------------------------------------------------------------- exit system

double rho_plus_density(const ModelParams& p, const Interval& iv, double z) {
  if (!(z > 0.0)) return 0.0;
  const Exponents e = derive_exponents(p);
  const double l = std::log(std::sin(kPi * e.beta) / kPi) + e.alpha * std::log(iv.x - iv.a) +
                   e.beta * std::log(iv.b - iv.x) - e.beta * std::log(z) -
                   std::log(iv.b - iv.x + z) - e.alpha * std::log(iv.b - iv.a + z);
  return std::exp(l);
}

double rho_minus_density(const ModelParams& p, const Interval& iv, double z) {
  if (!(z > 0.0)) return 0.0;
  const Exponents e = derive_exponents(p);
  const double l = std::log(std::sin(kPi * e.alpha) / kPi) + e.alpha * std::log(iv.x - iv.a) +
                   e.beta * std::log(iv.b - iv.x) - e.alpha * std::log(z) -
                   std::log(iv.x - iv.a + z) - e.beta * std::log(iv.b - iv.a + z);
  return std::exp(l);
}

ExitSystem exit_system_laws(const ModelParams& p, const Interval& iv) {
  iv.validate_exit();
  const Exponents e = derive_exponents(p);
  const auto o = tight();
  const double mp = integrate_half_line([&](double z) { return rho_plus_density(p, iv, z); },
                                        -e.beta, e.nu, iv.b - iv.x, o);
  const double mm = integrate_half_line([&](double z) { return rho_minus_density(p, iv, z); },
                                        -e.alpha, e.nu, iv.x - iv.a, o);
  const double up = hitting_prob(p, iv, 0.0);
  std::ostringstream msg;
  msg.precision(15);
  if (!(std::abs(mp + mm - 1.0) <= 1e-8)) {
    msg << "exit system masses sum to " << mp + mm;
    throw InvariantViolation(msg.str());
  }
  if (!(std::abs(mp - up) <= 1e-7)) {
    msg << "upward exit mass " << mp << " disagrees with hitting probability " << up;
    throw InvariantViolation(msg.str());
  }
  ExitSystem out{LawSpec(std::make_shared<ExitSideLaw>(p, iv, Side::plus, mp)),
                 LawSpec(std::make_shared<ExitSideLaw>(p, iv, Side::minus, mm)), up, mp, mm};
  return out;
}

SystemResiduals exit_system_residuals(const ModelParams& p, const Interval& iv, double s) {
  iv.validate_exit();
  const Exponents e = derive_exponents(p);
  check_mellin_strip(s, e.beta);
  check_mellin_strip(s, e.alpha);
  const auto o = tight();
  const double span = iv.b - iv.a;
  auto rp = [&](double z) { return rho_plus_density(p, iv, z); };
  auto rm = [&](double z) { return rho_minus_density(p, iv, z); };
  const double zs_plus =
      integrate_half_line([&](double z) { return std::pow(z, s) * rp(z); }, s - e.beta, e.nu - s,
                          iv.b - iv.x, o);
  const double zs_minus =
      integrate_half_line([&](double z) { return std::pow(z, s) * rm(z); }, s - e.alpha, e.nu - s,
                          iv.x - iv.a, o);
  const double shifted_plus =
      integrate_half_line([&](double z) { return std::pow(span + z, s) * rp(z); }, -e.beta,
                          e.nu - s, iv.b - iv.x, o);
  const double shifted_minus =
      integrate_half_line([&](double z) { return std::pow(span + z, s) * rm(z); }, -e.alpha,
                          e.nu - s, iv.x - iv.a, o);
  SystemResiduals r;
  r.upper = std::sin(kPi * (e.beta - s)) / std::sin(kPi * e.beta) * zs_plus + shifted_minus -
            std::pow(iv.b - iv.x, s);
  r.lower = std::sin(kPi * (e.alpha - s)) / std::sin(kPi * e.alpha) * zs_minus + shifted_plus -
            std::pow(iv.x - iv.a, s);
  return r;
}

// ---------------------------------------------------------------- exit position

double exit_position_density_y0(const ModelParams& p, const Interval& iv, double z) {
  iv.validate_exit();
  if (z == 0.0) return 0.0;
  const Exponents e = derive_exponents(p);
  const double g2 = 2.0 + p.gamma_exp;
  const double A = e.a_const;
  const double span = iv.b - iv.a;
  const double up = iv.b - iv.x;
  const double down = iv.x - iv.a;
  const double lz = std::log(std::abs(z));
  const double Z = std::exp(g2 * lz);
  const double common = log_gamma(e.nu) - std::log(kPi * e.nu) + std::log(2.0 - p.delta);
  if (z > 0.0) {
    const double w = down * Z / (A * up * span);
    const EvalResult k = kummer_1f1(1.0, 1.0 + e.alpha, -w);
    const double l = common - (1.0 - e.beta) * std::log(A) + std::log(std::sin(kPi * e.beta)) -
                     log_gamma(1.0 + e.alpha) + e.alpha * std::log(down / span) +
                     (p.gamma_exp + e.alpha * g2 + p.delta - 1.0) * lz -
                     (1.0 - e.beta) * std::log(up) - Z / (A * span) + k.log_abs();
    return std::exp(l);
  }
  const double c = p.c_weight;
  const double w = c * up * Z / (A * down * span);
  const EvalResult k = kummer_1f1(1.0, 1.0 + e.beta, -w);
  const double l = common + (1.0 - e.alpha) * std::log(c / A) + std::log(std::sin(kPi * e.alpha)) -
                   log_gamma(1.0 + e.beta) + e.beta * std::log(up / span) +
                   (p.gamma_exp + e.beta * g2 + p.delta - 1.0) * lz -
                   (1.0 - e.alpha) * std::log(down) - c * Z / (A * span) + k.log_abs();
  return std::exp(l);
}

namespace {

TabulatedLaw::Side side_grid(double scale, double reach, int knots) {
  TabulatedLaw::Side s;
  s.present = true;
  s.lower = scale * 1e-6;
  s.upper = reach;
  s.knots = knots;
  return s;
}

}  // namespace

LawSpec exit_position_law_y0(const ModelParams& p, const Interval& iv) {
  iv.validate_exit();
  const Exponents e = derive_exponents(p);
  const double g2 = 2.0 + p.gamma_exp;
  const double span = iv.b - iv.a;
  const double s_pos = std::pow(e.a_const * span, 1.0 / g2);
  const double s_neg = std::pow(e.a_const * span / p.c_weight, 1.0 / g2);
  const double reach = std::pow(120.0, 1.0 / g2);
  auto law = std::make_shared<TabulatedLaw>(
      "exit_position_y0", [p, iv](double z) { return exit_position_density_y0(p, iv, z); },
      side_grid(s_neg, s_neg * reach, 400), side_grid(s_pos, s_pos * reach, 400));
  LawSpec spec(law);
  spec.assert_normalized(1e-8);
  return spec;
}

double modified_laplace_exit(const ModelParams& p, const Interval& iv, double lambda, Side side) {
  iv.validate_exit();
  if (!(lambda >= 0.0)) throw DomainError("modified_laplace_exit needs lambda >= 0");
  const Exponents e = derive_exponents(p);
  const double up = iv.b - iv.x;
  const double down = iv.x - iv.a;
  const double span = iv.b - iv.a;
  const double common = e.nu * std::log(e.a_const) + log_gamma(e.nu) + e.alpha * std::log(down) +
                        e.beta * std::log(up);
  if (side == Side::plus) {
    return std::sin(kPi * e.beta) / kPi *
           std::exp(common - e.alpha * std::log1p(lambda * span) - std::log1p(lambda * up));
  }
  const double c = p.c_weight;
  return std::sin(kPi * e.alpha) / kPi *
         std::exp(common + (1.0 - e.alpha) * std::log(c) - e.beta * std::log(lambda * span + c) -
                  std::log(lambda * down + c));
}

double exit_position_density_general(const ModelParams& p, const Interval& iv, double y,
                                     double z) {
  if (y == 0.0) return exit_position_density_y0(p, iv, z);
  if (z == 0.0) return 0.0;
  if (y > 0.0 && !(iv.a <= iv.x && iv.x < iv.b)) {
    throw DomainError("exit position from y > 0 needs a <= x < b");
  }
  if (y < 0.0 && !(iv.a < iv.x && iv.x <= iv.b)) {
    throw DomainError("exit position from y < 0 needs a < x <= b");
  }
  const Exponents e = derive_exponents(p);
  const double A = e.a_const;
  const double g2 = 2.0 + p.gamma_exp;
  const double nu = e.nu;
  const double S = sigma0_scale(p, y);
  const int dir = y > 0.0 ? 1 : -1;
  const double L = y > 0.0 ? iv.b - iv.x : iv.x - iv.a;
  quad::Options o;
  o.abs_tol = 1e-15;
  o.rel_tol = 1e-10;
  auto kernel = [&](double u) {
    const Interval shifted{iv.a, iv.b, iv.x + dir * u};
    if (!(shifted.a < shifted.x && shifted.x < shifted.b)) return 0.0;
    return exit_position_density_y0(p, shifted, z);
  };
  double total = inv_gamma_expect_bounded(nu, S, L, kernel, o);
  if ((z > 0.0) == (y > 0.0)) {
    const double cw = y > 0.0 ? 1.0 : p.c_weight;
    const double ay = std::abs(y);
    const double az = std::abs(z);
    const double arg = 2.0 * cw * std::pow(az * ay, 0.5 * g2) / (A * L);
    const EvalResult bi = bessel_i(nu, arg);
    const double l = std::log(cw * g2 / (A * L)) + (1.0 - 0.5 * p.delta) * std::log(ay) +
                     (p.gamma_exp + 0.5 * p.delta) * std::log(az) -
                     cw * (std::pow(az, g2) + std::pow(ay, g2)) / (A * L) + bi.log_abs();
    total += std::exp(l);
  }
  return total;
}

LawSpec exit_position_law_general(const ModelParams& p, const Interval& iv, double y) {
  if (y == 0.0) return exit_position_law_y0(p, iv);
  const Exponents e = derive_exponents(p);
  const double g2 = 2.0 + p.gamma_exp;
  const double span = iv.b - iv.a;
  const double s_pos = std::pow(e.a_const * span, 1.0 / g2);
  const double s_neg = std::pow(e.a_const * span / p.c_weight, 1.0 / g2);
  const double reach = std::pow(120.0, 1.0 / g2);
  const double L = y > 0.0 ? iv.b - iv.x : iv.x - iv.a;
  const double cw = y > 0.0 ? 1.0 : p.c_weight;
  // the direct-passage term is concentrated where z^{1+gamma/2} ~ |y|^{1+gamma/2}
  const double direct =
      std::pow(std::pow(std::abs(y), 0.5 * g2) + std::sqrt(120.0 * e.a_const * L / cw), 2.0 / g2);
  double up_pos = s_pos * reach;
  double up_neg = s_neg * reach;
  if (y > 0.0) {
    up_pos = std::max(up_pos, direct);
  } else {
    up_neg = std::max(up_neg, direct);
  }
  auto law = std::make_shared<TabulatedLaw>(
      "exit_position_general",
      [p, iv, y](double z) { return exit_position_density_general(p, iv, y, z); },
      side_grid(s_neg, up_neg, 200), side_grid(s_pos, up_pos, 200), 1e-9);
  LawSpec spec(law);
  spec.assert_normalized(1e-6);
  return spec;
}

// ---------------------------------------------------------------- hitting probabilities

double hitting_prob(const ModelParams& p, const Interval& iv, double y) {
  const Exponents e = derive_exponents(p);
  if (y == 0.0) {
    iv.validate_exit();
    const double r = (iv.x - iv.a) / (iv.b - iv.a);
    const EvalResult f = gauss_2f1(e.alpha, 1.0 - e.beta, 1.0 + e.alpha, r);
    return std::exp(log_gamma(e.nu) - log_gamma(1.0 + e.alpha) - log_gamma(e.beta) +
                    e.alpha * std::log(r)) *
           f.real();
  }
  const double S = sigma0_scale(p, y);
  quad::Options o;
  o.abs_tol = 1e-14;
  o.rel_tol = 1e-11;
  if (y < 0.0) {
    if (!(iv.a < iv.x && iv.x <= iv.b)) throw DomainError("hitting_prob from y < 0 needs a < x <= b");
    const double L = iv.x - iv.a;
    return inv_gamma_expect_bounded(
        e.nu, S, L,
        [&](double u) {
          const double xs = iv.x - u;
          if (!(xs > iv.a)) return 0.0;
          return hitting_prob(p, Interval{iv.a, iv.b, xs}, 0.0);
        },
        o);
  }
  if (!(iv.a <= iv.x && iv.x < iv.b)) throw DomainError("hitting_prob from y > 0 needs a <= x < b");
  const double L = iv.b - iv.x;
  const double inside = inv_gamma_expect_bounded(
      e.nu, S, L,
      [&](double u) {
        const double xs = iv.x + u;
        if (!(xs < iv.b)) return 1.0;
        if (!(xs > iv.a)) return 0.0;
        return hitting_prob(p, Interval{iv.a, iv.b, xs}, 0.0);
      },
      o);
  // escape: X_{sigma_0} beyond b, probability P(W > L) = P(nu, S / L)
  return inside + gamma_p(e.nu, S / L);
}

double survival_prefactor(const ModelParams& p, double x, double y, double b) {
  if (!(x < b || (x == b && y < 0.0))) {
    throw DomainError("survival_prefactor needs x < b, or x = b with y < 0");
  }
  return harmonic_h(p, b - x, y);
}

}  // namespace skewbessel
