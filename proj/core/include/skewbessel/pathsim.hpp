#pragma once

// Discretized simulation of (X, Y): |Y| moves by exact squared-Bessel
// transitions, each excursion of Y away from a thin zero band gets an
// independent sign, and X integrates V(Y) by the trapezoidal rule.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "skewbessel/params.hpp"
#include "skewbessel/rng.hpp"

namespace skewbessel {

struct PathConfig {
  double dt = 1e-4;
  double t_max = 1e4;
  /// |Y| below this counts as a zero; 0 selects sqrt(dt)/4.
  double zero_band = 0.0;
  /// Keep every record_stride-th step in trajectory dumps; 0 keeps none.
  int record_stride = 0;
  /// Scale-adaptive stepping: step = max(dt, step_growth * L) where L is the
  /// natural time scale max(Y^2, d^{2/(2+gamma)}) and d the distance of X to
  /// the nearest pending level. 0 keeps the step fixed at dt.
  double step_growth = 0.0;
  /// Also declare a zero when the radial bridge between two steps outside the
  /// band touched 0 (drawn with its exact probability).
  bool bridge_zeros = true;

  /// Throws ConfigError on inconsistent settings.
  void validate() const;
  [[nodiscard]] double band() const;
};

enum class StopKind { hit_T_b, exit_T_ab, hit_sigma0, hit_zeta_b, hit_zeta_ab, censored_at_horizon };

const char* to_string(StopKind k);

enum class StopRule {
  sigma0,              ///< first zero of Y
  level_passage,       ///< first exit of X from (lower, upper)
  zero_after_passage,  ///< first zero of Y after the level passage
  horizon,             ///< run to t_max
};

struct StopSpec {
  StopRule rule = StopRule::level_passage;
  std::optional<double> lower;
  std::optional<double> upper;

  /// Throws ConfigError when the rule needs levels that are missing.
  void validate(double x0) const;
};

struct StoppedSample {
  double stop_time = 0.0;
  double y_at_stop = 0.0;
  double x_at_stop = 0.0;
  StopKind stop_kind = StopKind::censored_at_horizon;
  std::uint64_t steps = 0;
  std::uint64_t excursions = 0;           ///< zero-band entries (sign draws)
  std::uint64_t positive_excursions = 0;  ///< sign draws that came out positive
};

struct TrajectoryPoint {
  double t;
  double y;
  double x;
};

/// One exact transition of the squared Bessel process of dimension delta >= 1:
/// (sqrt(q) + sqrt(dt) N)^2 + dt chi^2_{delta - 1}.
double step_bessel_squared(double q, double delta, double dt, RngStream& rng);

/// The same transition drawn as a Poisson mixture of central chi-squares:
/// dt chi^2_{delta + 2K}, K ~ Poisson(q / (2 dt)).
double step_bessel_squared_poisson(double q, double delta, double dt, RngStream& rng);

/// Probability that a Bessel bridge of dimension delta in [1, 2) from r0 to r1
/// over time dt visits 0: 1 - I_m(z) / I_{-m}(z), m = 1 - delta/2, z = r0 r1 / dt.
double bessel_bridge_zero_prob(double r0, double r1, double delta, double dt);

StoppedSample simulate_to_stop(const ModelParams& p, const PathConfig& cfg, double x0, double y0,
                               const StopSpec& stop, RngStream& rng,
                               std::vector<TrajectoryPoint>* trajectory = nullptr);

/// Number of hardware threads, at least one.
int default_workers();

/// Runs body(i) for i in [0, n) on `workers` threads. Replica i must derive
/// all randomness from its own index so results do not depend on scheduling.
void parallel_for(std::uint64_t n, int workers, const std::function<void(std::uint64_t)>& body);

/// n independent replicas; replica i uses RngStream(seed, i).
std::vector<StoppedSample> simulate_replicas(const ModelParams& p, const PathConfig& cfg, double x0,
                                             double y0, const StopSpec& stop, std::uint64_t seed,
                                             std::uint64_t n, int workers);

struct SurvivalPoint {
  double t;
  double p;   ///< fraction of replicas with T_b > t
  double se;  ///< binomial standard error
};

/// P(T_b > t) on t_grid from n replicas sharing each path across the grid.
std::vector<SurvivalPoint> survival_curve(const ModelParams& p, const PathConfig& cfg, double x0,
                                          double y0, double b, const std::vector<double>& t_grid,
                                          std::uint64_t n, std::uint64_t seed, int workers);

/// Survival curve from already simulated level-passage samples.
std::vector<SurvivalPoint> survival_from_samples(const std::vector<StoppedSample>& samples,
                                                 const std::vector<double>& t_grid);

}  // namespace skewbessel
