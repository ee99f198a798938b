#include "skewbessel/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "skewbessel/error.hpp"
#include "skewbessel/quadrature.hpp"

namespace skewbessel {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRenormAbove = 1e250;
const double kRenormLog = std::log(1e250);

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::nearbyint(x); }

std::string describe(const char* name, double a, double b, double c) {
  std::ostringstream s;
  s << name << "(" << a << ", " << b << ", " << c << ")";
  return s.str();
}

/// Generalized hypergeometric series sum_n prod(num+n)_n / prod(den)_n z^n / n!
/// with up to two numerator and one denominator parameter.
EvalResult hyp_series(double a1, double a2, bool has_a2, double c, double z) {
  EvalResult out;
  out.value = 1.0;
  double term = 1.0;
  for (int n = 0; n < specfun::kSeriesTermCap; ++n) {
    double ratio = (a1 + n) / (c + n) * z / (n + 1.0);
    if (has_a2) ratio *= (a2 + n);
    term *= ratio;
    out.value += term;
    out.terms_used = n + 1;
    if (term == 0.0) return out;  // terminating series
    if (std::abs(out.value) > kRenormAbove) {
      out.value /= kRenormAbove;
      term /= kRenormAbove;
      out.log_scale += kRenormLog;
    }
    double next = (a1 + n + 1) / (c + n + 1) * z / (n + 2.0);
    if (has_a2) next *= (a2 + n + 1);
    if (std::abs(term) < specfun::kSeriesRelTol * std::abs(out.value) && std::abs(next) < 1.0) {
      return out;
    }
  }
  out.converged = false;
  return out;
}

/// Sum of an asymptotic series in 1/z with term ratio supplied by `ratio(k)`;
/// stops at the smallest term.
template <class Ratio>
EvalResult asymptotic_sum(Ratio ratio) {
  EvalResult out;
  out.value = 1.0;
  double term = 1.0;
  for (int k = 0; k < specfun::kSeriesTermCap; ++k) {
    const double next = term * ratio(k);
    out.terms_used = k + 1;
    if (std::abs(next) >= std::abs(term)) {
      out.converged = std::abs(term) < 1e-10 * std::abs(out.value);
      return out;
    }
    term = next;
    out.value += term;
    if (std::abs(term) < specfun::kSeriesRelTol * std::abs(out.value)) return out;
  }
  out.converged = false;
  return out;
}

EvalResult require_converged(EvalResult r, const char* what) {
  if (!r.converged) throw NonConvergence(std::string(what) + ": series did not converge");
  return r;
}

/// Regularized P(a, x) by the power series, valid and fast for x < a + 1.
double gamma_p_series(double a, double x, double& log_front) {
  log_front = a * std::log(x) - x - log_gamma(a + 1.0);
  double sum = 1.0;
  double term = 1.0;
  for (int n = 1; n < 100000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) return sum;
  }
  throw NonConvergence("incomplete gamma series did not converge");
}

/// Regularized Q(a, x) by the Lentz continued fraction, valid for x >= a + 1.
double gamma_q_fraction(double a, double x) {
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) {
      return std::exp(a * std::log(x) - x - log_gamma(a)) * h;
    }
  }
  throw NonConvergence("incomplete gamma continued fraction did not converge");
}

/// Continued fraction for the incomplete beta function (modified Lentz).
double beta_fraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < 100000; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) return h;
  }
  throw NonConvergence("incomplete beta continued fraction did not converge");
}

double beta_front(double a, double b, double x) {
  return std::exp(log_gamma(a + b) - log_gamma(a) - log_gamma(b) + a * std::log(x) +
                  b * std::log1p(-x));
}

/// Ascending series for I_nu(z) as (mantissa, log scale).
EvalResult bessel_i_series(double nu, double z) {
  int sign = 1;
  const double lg = log_gamma_signed(nu + 1.0, sign);
  EvalResult out;
  out.log_scale = nu * std::log(0.5 * z) - lg;
  const double q = 0.25 * z * z;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < specfun::kSeriesTermCap; ++k) {
    term *= q / (k * (nu + k));
    sum += term;
    out.terms_used = k;
    if (std::abs(term) < specfun::kSeriesRelTol * std::abs(sum) && q / ((k + 1) * (nu + k + 1)) < 1.0) {
      out.value = sign * sum;
      return out;
    }
  }
  throw NonConvergence("bessel_i series did not converge");
}

/// Steed's continued fraction CF2 for K_mu, K_{mu+1}, |mu| <= 1/2, x >= 2;
/// both returned without the e^{-x} factor.
void bessel_k_steed(double mu, double x, double& k_mu, double& k_mu1) {
  const double xi = 1.0 / x;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25 - mu * mu;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  int i = 1;
  for (; i < 100000; ++i) {
    a -= 2 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < 1e-16) break;
  }
  if (i >= 100000) throw NonConvergence("bessel_k continued fraction did not converge");
  h *= a1;
  k_mu = std::sqrt(kPi / (2.0 * x)) / s;
  k_mu1 = k_mu * (mu + x + 0.5 - h) * xi;
}

}  // namespace

double log_gamma_signed(double x, int& sign) {
  if (is_nonpositive_integer(x)) throw DomainError("log_gamma: pole at non-positive integer");
  sign = 1;
  return lgamma_r(x, &sign);
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive");
  int sign = 1;
  return lgamma_r(x, &sign);
}

double recip_gamma(double x) {
  if (is_nonpositive_integer(x)) return 0.0;
  int sign = 1;
  const double lg = log_gamma_signed(x, sign);
  return sign * std::exp(-lg);
}

double beta_fn(double x, double y) {
  if (!(x > 0.0) || !(y > 0.0)) throw DomainError("beta_fn: arguments must be positive");
  return std::exp(log_gamma(x) + log_gamma(y) - log_gamma(x + y));
}

double gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw DomainError("gamma_p: need a > 0, x >= 0");
  if (x == 0.0) return 0.0;
  if (x == kInf) return 1.0;
  if (x < a + 1.0) {
    double log_front = 0.0;
    const double sum = gamma_p_series(a, x, log_front);
    return std::exp(log_front) * sum;
  }
  return 1.0 - gamma_q_fraction(a, x);
}

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw DomainError("gamma_q: need a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  if (x == kInf) return 0.0;
  if (x < a + 1.0) {
    double log_front = 0.0;
    const double sum = gamma_p_series(a, x, log_front);
    return 1.0 - std::exp(log_front) * sum;
  }
  return gamma_q_fraction(a, x);
}

EvalResult lower_inc_gamma(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw DomainError("lower_inc_gamma: need a > 0, x >= 0");
  EvalResult out;
  if (x == 0.0) return out;
  if (x < a + 1.0) {
    double log_front = 0.0;
    out.value = gamma_p_series(a, x, log_front);
    out.log_scale = log_front + log_gamma(a);
    return out;
  }
  out.value = 1.0 - gamma_q_fraction(a, x);
  out.log_scale = log_gamma(a);
  return out;
}

double inc_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || x < 0.0 || x > 1.0) {
    throw DomainError("inc_beta: need a, b > 0 and x in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front = beta_front(a, b, x);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_fraction(a, b, x) / a;
  return 1.0 - front * beta_fraction(b, a, 1.0 - x) / b;
}

double inc_beta_complement(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || x < 0.0 || x > 1.0) {
    throw DomainError("inc_beta_complement: need a, b > 0 and x in [0, 1]");
  }
  if (x == 0.0) return 1.0;
  if (x == 1.0) return 0.0;
  const double front = beta_front(a, b, x);
  if (x < (a + 1.0) / (a + b + 2.0)) return 1.0 - front * beta_fraction(a, b, x) / a;
  return front * beta_fraction(b, a, 1.0 - x) / b;
}

EvalResult kummer_1f1(double a, double c, double z) {
  if (is_nonpositive_integer(c)) throw PoleError(describe("kummer_1f1", a, c, z));
  if (z == 0.0 || a == 0.0) return {1.0, 0.0, true, 0};
  if (a == c) return {1.0, z, true, 0};
  if (is_nonpositive_integer(a)) {
    return require_converged(hyp_series(a, 0.0, false, c, z), "kummer_1f1");
  }
  if (z < specfun::kKummerTransformBelow) {
    EvalResult r = kummer_1f1(c - a, c, -z);
    r.log_scale += z;
    return r;
  }
  if (z > specfun::kKummerAsymptoticAbove) {
    // Gamma(c)/Gamma(a) e^z z^{a-c} sum_k (c-a)_k (1-a)_k / (k! z^k)
    EvalResult r = asymptotic_sum([&](int k) { return (c - a + k) * (1.0 - a + k) / ((k + 1.0) * z); });
    int sc = 1;
    int sa = 1;
    const double lc = log_gamma_signed(c, sc);
    const double la = log_gamma_signed(a, sa);
    r.value *= sc * sa;
    r.log_scale = lc - la + z + (a - c) * std::log(z);
    return require_converged(r, "kummer_1f1 asymptotic");
  }
  return require_converged(hyp_series(a, 0.0, false, c, z), "kummer_1f1");
}

namespace {

EvalResult gauss_2f1_unit(double a, double b, double c, double z) {
  if (z <= 0.5) return require_converged(hyp_series(a, b, true, c, z), "gauss_2f1");
  const double d = c - a - b;
  if (std::abs(d - std::nearbyint(d)) < 1e-8) {
    return require_converged(hyp_series(a, b, true, c, z), "gauss_2f1");
  }
  // Linear transformation to argument 1 - z.
  const double w = 1.0 - z;
  int s_c = 1, s_d = 1, s_ca = 1, s_cb = 1, s_md = 1, s_a = 1, s_b = 1;
  const double l_c = log_gamma_signed(c, s_c);
  double first = 0.0;
  if (!is_nonpositive_integer(c - a) && !is_nonpositive_integer(c - b)) {
    const double coef = l_c + log_gamma_signed(d, s_d) - log_gamma_signed(c - a, s_ca) -
                        log_gamma_signed(c - b, s_cb);
    first = s_c * s_d * s_ca * s_cb * std::exp(coef) *
            require_converged(hyp_series(a, b, true, 1.0 - d, w), "gauss_2f1").real();
  }
  double second = 0.0;
  if (!is_nonpositive_integer(a) && !is_nonpositive_integer(b)) {
    const double coef = l_c + log_gamma_signed(-d, s_md) - log_gamma_signed(a, s_a) -
                        log_gamma_signed(b, s_b);
    second = s_c * s_md * s_a * s_b * std::exp(coef + d * std::log(w)) *
             require_converged(hyp_series(c - a, c - b, true, 1.0 + d, w), "gauss_2f1").real();
  }
  return {first + second, 0.0, true, 0};
}

}  // namespace

EvalResult gauss_2f1(double a, double b, double c, double z) {
  if (is_nonpositive_integer(c)) throw PoleError(describe("gauss_2f1", a, b, c));
  if (!(z < 1.0)) throw DomainError("gauss_2f1: argument must be below 1");
  if (z == 0.0) return {1.0, 0.0, true, 0};
  if (z >= 0.0) return gauss_2f1_unit(a, b, c, z);
  // Pfaff: (1-z)^{-a} 2F1(a, c-b; c; z/(z-1))
  EvalResult r = gauss_2f1_unit(a, c - b, c, z / (z - 1.0));
  r.log_scale -= a * std::log1p(-z);
  return r;
}

EvalResult bessel_i(double nu, double z) {
  if (z < 0.0 || std::isnan(z)) throw DomainError("bessel_i: argument must be non-negative");
  if (z == 0.0) {
    if (nu == 0.0) return {1.0, 0.0, true, 0};
    if (nu > 0.0 || is_nonpositive_integer(nu)) return {0.0, 0.0, true, 0};
    return {kInf, 0.0, true, 0};
  }
  if (z < specfun::kBesselSeam) return bessel_i_series(nu, z);
  const double m = 4.0 * nu * nu;
  EvalResult r = asymptotic_sum([&](int k) {
    const double odd = 2.0 * k + 1.0;
    return -(m - odd * odd) / ((k + 1.0) * 8.0 * z);
  });
  r.log_scale = z - 0.5 * std::log(2.0 * kPi * z);
  return require_converged(r, "bessel_i asymptotic");
}

EvalResult bessel_k(double nu, double z) {
  if (!(z > 0.0)) throw DomainError("bessel_k: argument must be positive");
  nu = std::abs(nu);
  if (z >= specfun::kBesselSeam) {
    const double m = 4.0 * nu * nu;
    EvalResult r = asymptotic_sum([&](int k) {
      const double odd = 2.0 * k + 1.0;
      return (m - odd * odd) / ((k + 1.0) * 8.0 * z);
    });
    r.log_scale = -z + 0.5 * std::log(kPi / (2.0 * z));
    return require_converged(r, "bessel_k asymptotic");
  }
  if (z <= specfun::kBesselReflectionMax) {
    if (nu == std::nearbyint(nu)) throw DomainError("bessel_k: integer order not supported");
    const double i_neg = bessel_i_series(-nu, z).real();
    const double i_pos = bessel_i_series(nu, z).real();
    return {kPi * (i_neg - i_pos) / (2.0 * std::sin(nu * kPi)), 0.0, true, 0};
  }
  const int nl = static_cast<int>(nu + 0.5);
  const double mu = nu - nl;
  double k_mu = 0.0;
  double k_mu1 = 0.0;
  bessel_k_steed(mu, z, k_mu, k_mu1);
  for (int i = 1; i <= nl; ++i) {
    const double next = (mu + i) * (2.0 / z) * k_mu1 + k_mu;
    k_mu = k_mu1;
    k_mu1 = next;
  }
  return {k_mu, -z, true, 0};
}

EvalResult whittaker_w(double lambda, double mu, double z) {
  if (!(z > 0.0)) throw DomainError("whittaker_w: argument must be positive");
  const double p = mu - lambda - 0.5;
  if (!(p > -1.0)) {
    throw DomainError("whittaker_w: integral representation needs mu - lambda + 1/2 > 0");
  }
  const double q = mu + lambda - 0.5;
  quad::Options opts;
  opts.abs_tol = 0.0;
  opts.rel_tol = 1e-12;
  opts.max_subdivisions = 2000;
  // e^{-t} t^p (1 + t/z)^q; the factor (1+t/z)^q changes on the scale t ~ z.
  auto g = [&](double t) { return std::exp(-t + q * std::log1p(t / z)); };
  const double split = std::min(1.0, z);
  quad::Result r = quad::integrate_power_weight(g, split, p, opts);
  auto full = [&](double t) { return std::exp(p * std::log(t)) * g(t); };
  if (split < 1.0) r = r + quad::integrate(full, split, 1.0, opts);
  r = r + quad::integrate_exp_tail(full, 1.0, 1.0 + std::max(0.0, p + q), opts);
  EvalResult out;
  out.value = r.value;
  out.log_scale = -0.5 * z + lambda * std::log(z) - log_gamma(p + 1.0);
  out.terms_used = r.evaluations;
  return out;
}

}  // namespace skewbessel
