#include "skewbessel/law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "skewbessel/error.hpp"
#include "skewbessel/quadrature.hpp"
#include "skewbessel/rng.hpp"

namespace skewbessel {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Smallest z with cdf(z) >= u, by bisection on a bracket grown outward.
double bisect_quantile(const std::function<double(double)>& cdf, double u, double lo, double hi,
                       double tol_prob) {
  double step = 1.0;
  if (!std::isfinite(lo)) {
    lo = std::isfinite(hi) ? hi - step : -step;
    while (cdf(lo) > u) {
      step *= 2.0;
      lo -= step;
    }
  }
  step = 1.0;
  if (!std::isfinite(hi)) {
    hi = lo + step;
    while (cdf(hi) < u) {
      step *= 2.0;
      hi += step;
    }
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const double c = cdf(mid);
    if (std::abs(c - u) < tol_prob) return mid;
    if (c < u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

const char* to_string(SamplerTag tag) {
  switch (tag) {
    case SamplerTag::exact:
      return "exact";
    case SamplerTag::rejection:
      return "rejection";
    case SamplerTag::inverse_cdf:
      return "inverse_cdf";
  }
  return "unknown";
}

double LawImpl::log_pdf(double z) const { return std::log(pdf(z)); }

double LawImpl::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile: probability must lie in (0, 1)");
  const Support s = support();
  return bisect_quantile([this](double z) { return cdf(z); }, u, s.lo, s.hi, 1e-12);
}

double LawImpl::sample(RngStream& rng) const { return quantile(rng.uniform()); }

LawSpec::LawSpec(std::shared_ptr<const LawImpl> impl) : impl_(std::move(impl)) {
  if (!impl_) throw DomainError("LawSpec: null implementation");
}

void LawSpec::assert_normalized(double tol) const {
  const double mass = mass_by_quadrature();
  if (!(std::abs(mass - 1.0) <= tol)) {
    std::ostringstream s;
    s.precision(15);
    s << name() << ": density integrates to " << mass << ", tolerance " << tol;
    throw InvariantViolation(s.str());
  }
}

TabulatedLaw::TabulatedLaw(std::string name, std::function<double(double)> density, Side negative,
                           Side positive, double panel_rel_tol)
    : name_(std::move(name)), density_(std::move(density)), neg_(negative), pos_(positive) {
  if (!neg_.present && !pos_.present) throw DomainError("TabulatedLaw: empty support");
  for (const Side* s : {&neg_, &pos_}) {
    if (s->present && !(s->lower > 0.0 && s->upper > s->lower && s->knots >= 2)) {
      throw DomainError("TabulatedLaw: need 0 < lower < upper and at least two knots");
    }
  }
  quad::Options opts;
  opts.abs_tol = 1e-16;
  opts.rel_tol = panel_rel_tol;
  opts.max_subdivisions = 200;

  auto geometric = [](const Side& s) {
    std::vector<double> v(s.knots);
    const double r = std::log(s.upper / s.lower) / (s.knots - 1);
    for (int k = 0; k < s.knots; ++k) v[k] = s.lower * std::exp(r * k);
    v.back() = s.upper;
    return v;
  };
  if (neg_.present) {
    auto v = geometric(neg_);
    for (auto it = v.rbegin(); it != v.rend(); ++it) z_.push_back(-*it);
  }
  zero_index_ = z_.size();
  if (pos_.present) {
    auto v = geometric(pos_);
    z_.insert(z_.end(), v.begin(), v.end());
  }

  const auto& f = density_;
  if (neg_.present) {
    tail_lo_ = quad::integrate_exp_tail([&](double t) { return f(-t); }, neg_.upper,
                                        neg_.upper / 8.0, opts)
                   .value;
  } else {
    tail_lo_ = quad::integrate(f, 0.0, pos_.lower, opts).value;
  }
  if (pos_.present) {
    tail_hi_ = quad::integrate_exp_tail(f, pos_.upper, pos_.upper / 8.0, opts).value;
  } else {
    tail_hi_ = quad::integrate(f, -neg_.lower, 0.0, opts).value;
  }

  f_.resize(z_.size());
  F_.resize(z_.size());
  double acc = tail_lo_;
  for (std::size_t k = 0; k < z_.size(); ++k) {
    f_[k] = f(z_[k]);
    if (k > 0) {
      double m;
      if (k == zero_index_) {
        m = quad::integrate(f, z_[k - 1], 0.0, opts).value +
            quad::integrate(f, 0.0, z_[k], opts).value;
      } else {
        m = quad::integrate(f, z_[k - 1], z_[k], opts).value;
      }
      acc += m;
    }
    F_[k] = acc;
    if (k + 1 == zero_index_) mass_neg_ = acc;  // up to -lower on the negative side
  }
  total_ = acc + tail_hi_;
  if (neg_.present && pos_.present) {
    mass_neg_ += quad::integrate(f, -neg_.lower, 0.0, opts).value;
    mass_pos_ = total_ - mass_neg_;
  } else if (neg_.present) {
    mass_neg_ = total_;
  } else {
    mass_pos_ = total_;
  }
  if (!(total_ > 0.0) || !std::isfinite(total_)) {
    throw InvariantViolation(name_ + ": tabulated mass is not a positive finite number");
  }
}

Support TabulatedLaw::support() const {
  return {neg_.present ? -kInf : 0.0, pos_.present ? kInf : 0.0};
}

double TabulatedLaw::pdf(double z) const {
  if (z == 0.0 || (z < 0.0 && !neg_.present) || (z > 0.0 && !pos_.present)) return 0.0;
  return density_(z) / total_;
}

double TabulatedLaw::raw_cdf(double z) const {
  quad::Options opts;
  opts.abs_tol = 1e-16;
  opts.rel_tol = 1e-10;
  const auto& f = density_;
  if (z < z_.front()) {
    if (neg_.present) {
      return quad::integrate_exp_tail([&](double t) { return f(-t); }, -z, neg_.upper / 8.0, opts)
          .value;
    }
    return z <= 0.0 ? 0.0 : quad::integrate(f, 0.0, z, opts).value;
  }
  if (z >= z_.back()) {
    if (pos_.present) {
      return total_ - quad::integrate_exp_tail(f, z, pos_.upper / 8.0, opts).value;
    }
    return z >= 0.0 ? total_ : F_.back() + quad::integrate(f, z_.back(), z, opts).value;
  }
  const auto it = std::upper_bound(z_.begin(), z_.end(), z);
  const std::size_t k = static_cast<std::size_t>(it - z_.begin()) - 1;
  if (k + 1 == zero_index_) {
    if (z <= 0.0) return F_[k] + quad::integrate(f, z_[k], z, opts).value;
    return F_[k + 1] - quad::integrate(f, z, z_[k + 1], opts).value;
  }
  const double h = z_[k + 1] - z_[k];
  const double t = (z - z_[k]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h11 = t3 - t2;
  return F_[k] + h01 * (F_[k + 1] - F_[k]) + h * (h10 * f_[k] + h11 * f_[k + 1]);
}

double TabulatedLaw::cdf(double z) const {
  return std::clamp(raw_cdf(z) / total_, 0.0, 1.0);
}

double TabulatedLaw::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile: probability must lie in (0, 1)");
  const double target = u * total_;
  auto c = [this](double z) { return raw_cdf(z); };
  const double tol = 1e-12 * total_;
  if (target <= F_.front()) {
    return bisect_quantile(c, target, neg_.present ? -kInf : 0.0, z_.front(), tol);
  }
  if (target >= F_.back()) {
    return bisect_quantile(c, target, z_.back(), pos_.present ? kInf : 0.0, tol);
  }
  const auto it = std::upper_bound(F_.begin(), F_.end(), target);
  const std::size_t k = static_cast<std::size_t>(it - F_.begin()) - 1;
  return bisect_quantile(c, target, z_[k], z_[k + 1], tol);
}

}  // namespace skewbessel
