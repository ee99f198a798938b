#pragma once

// LawSpec: an immutable, shareable probability law on the real line with a
// density, a CDF, a quantile function and a sampler.

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace skewbessel {

class RngStream;

enum class SamplerTag { exact, rejection, inverse_cdf };

const char* to_string(SamplerTag tag);

struct Support {
  double lo;
  double hi;
};

class LawImpl {
 public:
  virtual ~LawImpl() = default;

  [[nodiscard]] virtual double pdf(double z) const = 0;
  [[nodiscard]] virtual double log_pdf(double z) const;
  [[nodiscard]] virtual double cdf(double z) const = 0;
  /// Numeric inverse of cdf by bisection; concrete laws may override.
  [[nodiscard]] virtual double quantile(double u) const;
  [[nodiscard]] virtual Support support() const = 0;
  [[nodiscard]] virtual SamplerTag sampler_tag() const = 0;
  /// Default: quantile(U).
  virtual double sample(RngStream& rng) const;
  /// Integral of pdf over the support by adaptive quadrature.
  [[nodiscard]] virtual double mass_by_quadrature() const = 0;
  [[nodiscard]] virtual std::string name() const = 0;
};

class LawSpec {
 public:
  explicit LawSpec(std::shared_ptr<const LawImpl> impl);

  [[nodiscard]] double pdf(double z) const { return impl_->pdf(z); }
  [[nodiscard]] double log_pdf(double z) const { return impl_->log_pdf(z); }
  [[nodiscard]] double cdf(double z) const { return impl_->cdf(z); }
  [[nodiscard]] double quantile(double u) const { return impl_->quantile(u); }
  [[nodiscard]] Support support() const { return impl_->support(); }
  [[nodiscard]] SamplerTag sampler_tag() const { return impl_->sampler_tag(); }
  double sample(RngStream& rng) const { return impl_->sample(rng); }
  [[nodiscard]] double mass_by_quadrature() const { return impl_->mass_by_quadrature(); }
  [[nodiscard]] std::string name() const { return impl_->name(); }

  /// Throws InvariantViolation when |mass - 1| > tol.
  void assert_normalized(double tol) const;

  [[nodiscard]] const LawImpl& impl() const { return *impl_; }

 private:
  std::shared_ptr<const LawImpl> impl_;
};

/// Law given by a density on (-inf, 0) and/or (0, inf), with the CDF
/// tabulated at construction: panel masses between geometric knots by
/// adaptive quadrature, cubic Hermite interpolation (the density supplies
/// the derivative) inside panels, and bisection for the quantile.
class TabulatedLaw final : public LawImpl {
 public:
  struct Side {
    bool present = false;
    double lower = 0.0;  ///< innermost knot (distance from 0)
    double upper = 0.0;  ///< outermost knot; the tail beyond is integrated once
    int knots = 400;
  };

  TabulatedLaw(std::string name, std::function<double(double)> density, Side negative,
               Side positive, double panel_rel_tol = 1e-11);

  [[nodiscard]] double pdf(double z) const override;
  [[nodiscard]] double cdf(double z) const override;
  [[nodiscard]] double quantile(double u) const override;
  [[nodiscard]] Support support() const override;
  [[nodiscard]] SamplerTag sampler_tag() const override { return SamplerTag::inverse_cdf; }
  [[nodiscard]] double mass_by_quadrature() const override { return total_; }
  [[nodiscard]] std::string name() const override { return name_; }

  /// Unnormalized mass on z < 0 and z > 0.
  [[nodiscard]] double negative_mass() const { return mass_neg_; }
  [[nodiscard]] double positive_mass() const { return mass_pos_; }

 private:
  [[nodiscard]] double raw_cdf(double z) const;

  std::string name_;
  std::function<double(double)> density_;
  Side neg_;
  Side pos_;
  std::vector<double> z_;    // ascending knots
  std::vector<double> f_;    // density at knots
  std::vector<double> F_;    // unnormalized cumulative mass at knots
  double tail_lo_ = 0.0;     // mass below the first knot
  double tail_hi_ = 0.0;     // mass above the last knot
  double mass_neg_ = 0.0;
  double mass_pos_ = 0.0;
  double total_ = 0.0;
  std::size_t zero_index_ = 0;  // first knot with z > 0
};

}  // namespace skewbessel
