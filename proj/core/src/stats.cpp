#include "skewbessel/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "skewbessel/error.hpp"

namespace skewbessel {

EmpiricalDist::EmpiricalDist(std::vector<double> samples) : sorted_(std::move(samples)) {
  if (sorted_.empty()) throw InsufficientData("empirical distribution needs at least one sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalDist::cdf(double z) const {
  const auto k = std::upper_bound(sorted_.begin(), sorted_.end(), z) - sorted_.begin();
  return static_cast<double>(k) / static_cast<double>(sorted_.size());
}

double EmpiricalDist::mean() const {
  double s = 0.0;
  for (double v : sorted_) s += v;
  return s / static_cast<double>(sorted_.size());
}

double EmpiricalDist::quantile(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
  const double pos = u * static_cast<double>(sorted_.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= sorted_.size()) return sorted_.back();
  const double f = pos - static_cast<double>(i);
  return sorted_[i] + f * (sorted_[i + 1] - sorted_[i]);
}

double kolmogorov_critical(std::size_t n, double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("KS level must lie in (0, 1)");
  return std::sqrt(-0.5 * std::log(0.5 * level)) / std::sqrt(static_cast<double>(n));
}

KsResult ks_statistic(const EmpiricalDist& e, const std::function<double(double)>& cdf) {
  const auto& xs = e.sorted_samples();
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return {d, 1.9495 / std::sqrt(n)};
}

double ks_two_sample(const EmpiricalDist& a, const EmpiricalDist& b) {
  const auto& x = a.sorted_samples();
  const auto& y = b.sorted_samples();
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(i / n - j / m));
  }
  return d;
}

double ks_two_sample_critical(std::size_t n, std::size_t m, double level) {
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  return std::sqrt(-0.5 * std::log(0.5 * level)) * std::sqrt((nn + mm) / (nn * mm));
}

TailFit tail_exponent_fit(const std::vector<CurvePoint>& curve) {
  if (curve.size() < 5) throw InsufficientData("tail fit needs at least 5 points");
  bool unit_weights = false;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (!(curve[i].p > 0.0)) throw InsufficientData("tail fit needs positive survival values");
    if (!(curve[i].t > 0.0) || (i > 0 && !(curve[i].t > curve[i - 1].t))) {
      throw DomainError("tail fit needs increasing positive t");
    }
    if (!(curve[i].se > 0.0)) unit_weights = true;
  }
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (const auto& c : curve) {
    const double w = unit_weights ? 1.0 : (c.p / c.se) * (c.p / c.se);
    sw += w;
    sx += w * std::log(c.t);
    sy += w * std::log(c.p);
  }
  const double mx = sx / sw;
  const double my = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& c : curve) {
    const double w = unit_weights ? 1.0 : (c.p / c.se) * (c.p / c.se);
    const double dx = std::log(c.t) - mx;
    sxx += w * dx * dx;
    sxy += w * dx * (std::log(c.p) - my);
  }
  if (!(sxx > 0.0)) throw InsufficientData("tail fit needs distinct t values");
  const double slope = sxy / sxx;
  TailFit f;
  f.theta_hat = -slope;
  f.theta_se = unit_weights ? 0.0 : std::sqrt(1.0 / sxx);
  f.kappa_hat = std::exp(my - slope * mx);
  return f;
}

PrefactorFit prefactor_fit(const std::vector<CurvePoint>& curve, double theta) {
  if (curve.empty()) throw InsufficientData("prefactor fit needs at least one point");
  double sw = 0.0, swk = 0.0;
  for (const auto& c : curve) {
    const double scale = std::pow(c.t, theta);
    const double se = c.se * scale;
    if (!(se > 0.0)) throw InsufficientData("prefactor fit needs positive standard errors");
    const double w = 1.0 / (se * se);
    sw += w;
    swk += w * c.p * scale;
  }
  return {swk / sw, std::sqrt(1.0 / sw)};
}

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("normal quantile needs u in (0, 1)");
  // Acklam's rational approximation, refined by one Halley step.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double lo = 0.02425;
  double x;
  if (u < lo) {
    const double q = std::sqrt(-2.0 * std::log(u));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (u <= 1.0 - lo) {
    const double q = u - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-u));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - u;
  const double g = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - g / (1.0 + 0.5 * x * g);
}

Interval01 binomial_ci(std::uint64_t k, std::uint64_t n, double level) {
  if (n == 0 || k > n) throw DomainError("binomial_ci needs 0 <= k <= n, n > 0");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("binomial_ci level must lie in (0, 1)");
  const double z = normal_quantile(0.5 + 0.5 * level);
  const double nn = static_cast<double>(n);
  const double ph = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (ph + z2 / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(ph * (1.0 - ph) / nn + z2 / (4.0 * nn * nn));
  Interval01 ci{std::max(0.0, center - half), std::min(1.0, center + half)};
  if (k == 0) ci.lo = 0.0;
  if (k == n) ci.hi = 1.0;
  return ci;
}

MeanSe mean_and_se(const std::vector<double>& v) {
  if (v.size() < 2) throw InsufficientData("mean and standard error need two values");
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double var = ss / static_cast<double>(v.size() - 1);
  return {m, std::sqrt(var / static_cast<double>(v.size()))};
}

}  // namespace skewbessel
