#pragma once

// Estimators and goodness-of-fit checks used by the verification harness.

#include <cstdint>
#include <functional>
#include <vector>

namespace skewbessel {

class EmpiricalDist {
 public:
  /// Sorts the samples; throws InsufficientData when empty.
  explicit EmpiricalDist(std::vector<double> samples);

  [[nodiscard]] const std::vector<double>& sorted_samples() const { return sorted_; }
  [[nodiscard]] std::size_t n() const { return sorted_.size(); }
  /// Fraction of samples <= z.
  [[nodiscard]] double cdf(double z) const;
  [[nodiscard]] double mean() const;
  [[nodiscard]] double quantile(double u) const;

 private:
  std::vector<double> sorted_;
};

struct KsResult {
  double d = 0.0;
  double critical_001 = 0.0;  ///< 1.9495 / sqrt(n)
};

/// Asymptotic Kolmogorov quantile sqrt(-ln(level/2)/2) / sqrt(n).
double kolmogorov_critical(std::size_t n, double level);

/// sup_z |F_n(z) - F(z)| over both one-sided gaps at the sample points.
KsResult ks_statistic(const EmpiricalDist& e, const std::function<double(double)>& cdf);

/// Two-sample KS distance.
double ks_two_sample(const EmpiricalDist& a, const EmpiricalDist& b);

/// Critical value of the two-sample statistic at `level`.
double ks_two_sample_critical(std::size_t n, std::size_t m, double level);

struct CurvePoint {
  double t;
  double p;
  double se;
};

struct TailFit {
  double theta_hat = 0.0;
  double theta_se = 0.0;
  double kappa_hat = 0.0;  ///< exp(intercept)
};

/// Weighted least squares of log p on log t, weights (p / se)^2.
TailFit tail_exponent_fit(const std::vector<CurvePoint>& curve);

/// Weighted mean of p t^theta with theta held fixed (weights (t^theta / se)^-2).
struct PrefactorFit {
  double kappa_hat = 0.0;
  double kappa_se = 0.0;
};
PrefactorFit prefactor_fit(const std::vector<CurvePoint>& curve, double theta);

struct Interval01 {
  double lo;
  double hi;
};

/// Wilson score interval for k successes in n trials at two-sided `level`.
Interval01 binomial_ci(std::uint64_t k, std::uint64_t n, double level);

/// Standard normal quantile.
double normal_quantile(double u);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};
MeanSe mean_and_se(const std::vector<double>& v);

}  // namespace skewbessel
