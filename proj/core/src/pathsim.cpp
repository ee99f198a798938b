#include "skewbessel/pathsim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "skewbessel/error.hpp"
#include "skewbessel/specfun.hpp"

namespace skewbessel {

void PathConfig::validate() const {
  std::ostringstream m;
  if (!(dt > 0.0) || !std::isfinite(dt)) m << "dt must be positive, got " << dt;
  else if (!(t_max > 0.0) || !std::isfinite(t_max)) m << "t_max must be positive, got " << t_max;
  else if (t_max / dt > 9.0e18) m << "t_max / dt does not fit a 64-bit step count";
  else if (zero_band < 0.0 || !(band() < std::sqrt(dt))) {
    m << "zero_band must lie in (0, sqrt(dt)), got " << zero_band;
  } else if (record_stride < 0) m << "record_stride must be non-negative";
  else if (step_growth < 0.0 || !std::isfinite(step_growth)) m << "step_growth must be >= 0";
  const std::string s = m.str();
  if (!s.empty()) throw ConfigError(s);
}

double PathConfig::band() const { return zero_band > 0.0 ? zero_band : 0.25 * std::sqrt(dt); }

const char* to_string(StopKind k) {
  switch (k) {
    case StopKind::hit_T_b:
      return "hit_T_b";
    case StopKind::exit_T_ab:
      return "exit_T_ab";
    case StopKind::hit_sigma0:
      return "hit_sigma0";
    case StopKind::hit_zeta_b:
      return "hit_zeta_b";
    case StopKind::hit_zeta_ab:
      return "hit_zeta_ab";
    case StopKind::censored_at_horizon:
      return "censored_at_horizon";
  }
  return "unknown";
}

void StopSpec::validate(double x0) const {
  const bool needs_level = rule == StopRule::level_passage || rule == StopRule::zero_after_passage;
  if (needs_level && !lower && !upper) throw ConfigError("stop rule needs a lower or upper level");
  if (lower && upper && !(*lower < *upper)) throw ConfigError("stop levels need lower < upper");
  if (needs_level && ((upper && x0 > *upper) || (lower && x0 < *lower))) {
    throw ConfigError("start of X lies outside the stop levels");
  }
}

namespace {

// The decomposition step for delta >= 1 with sqrt(q) and sqrt(dt) supplied.
inline double step_decomposed(double r, double delta, double dt, double sqrt_dt, RngStream& rng) {
  const double w = r + sqrt_dt * rng.normal();
  double out = w * w;
  const double extra = delta - 1.0;
  if (extra > 0.0) {
    // Gamma(a) = Gamma(a + 1) U^{1/a}, a = extra / 2 < 1/2
    const double a = 0.5 * extra;
    const double g = rng.gamma(a + 1.0);
    out += 2.0 * dt * g * std::exp(std::log(rng.uniform()) / a);
  }
  return out;
}

}  // namespace

double step_bessel_squared(double q, double delta, double dt, RngStream& rng) {
  if (!(q >= 0.0) || !(dt > 0.0)) throw DomainError("squared Bessel step needs q >= 0, dt > 0");
  if (delta < 1.0) return step_bessel_squared_poisson(q, delta, dt, rng);
  return step_decomposed(std::sqrt(q), delta, dt, std::sqrt(dt), rng);
}

double step_bessel_squared_poisson(double q, double delta, double dt, RngStream& rng) {
  if (!(q >= 0.0) || !(dt > 0.0) || !(delta > 0.0)) {
    throw DomainError("squared Bessel step needs q >= 0, dt > 0, delta > 0");
  }
  const auto k = rng.poisson(0.5 * q / dt);
  return 2.0 * dt * rng.gamma(0.5 * delta + static_cast<double>(k));
}

namespace {

constexpr double kBridgeCut = 30.0;  // beyond this z the visit probability is below e^{-59}

double bridge_prob_z(double z, double m) {
  if (z <= 0.0) return 1.0;
  if (m == 0.5) return 2.0 / (1.0 + std::exp(2.0 * z));
  // 1 - I_m / I_{-m} = (2/pi) sin(m pi) K_m / I_{-m}
  const EvalResult k = bessel_k(m, z);
  const EvalResult i = bessel_i(-m, z);
  return std::min(1.0, 2.0 / std::numbers::pi * std::sin(m * std::numbers::pi) * std::exp(k.log_abs() - i.log_abs()));
}

// log of the visit probability on a uniform z grid, cached per thread for the
// last dimension used.
class BridgeTable {
 public:
  double operator()(double z, double delta) {
    if (delta != delta_) build(delta);
    const double u = z / kStep;
    const auto j = static_cast<std::size_t>(u);
    if (j + 1 >= log_p_.size()) return std::exp(log_p_.back());
    const double f = u - static_cast<double>(j);
    return std::exp(log_p_[j] + f * (log_p_[j + 1] - log_p_[j]));
  }

 private:
  static constexpr double kStep = 1.0 / 256.0;
  void build(double delta) {
    const double m = 1.0 - 0.5 * delta;
    const auto n = static_cast<std::size_t>(kBridgeCut / kStep) + 1;
    log_p_.resize(n);
    for (std::size_t j = 0; j < n; ++j) log_p_[j] = std::log(bridge_prob_z(j * kStep, m));
    delta_ = delta;
  }
  double delta_ = -1.0;
  std::vector<double> log_p_;
};

struct Potential {
  double gamma;
  double c;
  double operator()(int sign, double r) const {
    double v;
    if (gamma == 1.0) {
      v = r;
    } else if (gamma == 2.0) {
      v = r * r;
    } else {
      v = std::pow(r, gamma);
    }
    return sign > 0 ? v : -c * v;
  }
};

}  // namespace

StoppedSample simulate_to_stop(const ModelParams& p, const PathConfig& cfg, double x0, double y0,
                               const StopSpec& stop, RngStream& rng,
                               std::vector<TrajectoryPoint>* trajectory) {
  p.validate();
  cfg.validate();
  stop.validate(x0);
  if (!std::isfinite(x0) || !std::isfinite(y0)) throw ConfigError("start must be finite");

  const Potential V{p.gamma_exp, p.c_weight};
  const double sqrt_base_dt = std::sqrt(cfg.dt);
  const double band_ratio = cfg.band() / sqrt_base_dt;
  const double pos_prob = 0.5 * (1.0 + p.eta);
  const double barrier_power = 2.0 / (2.0 + p.gamma_exp);
  // distances below this cannot lengthen the step past dt
  const double level_reach =
      cfg.step_growth > 0.0 ? std::pow(cfg.dt / cfg.step_growth, 1.0 / barrier_power) : 0.0;
  const bool levels = stop.rule == StopRule::level_passage || stop.rule == StopRule::zero_after_passage;
  const StopKind passage_kind = (stop.lower && stop.upper) ? StopKind::exit_T_ab : StopKind::hit_T_b;
  const StopKind zeta_kind = (stop.lower && stop.upper) ? StopKind::hit_zeta_ab : StopKind::hit_zeta_b;

  StoppedSample out;
  double t = 0.0;
  double x = x0;
  double r = std::abs(y0);
  double q = r * r;
  int sign = y0 > 0.0 ? 1 : -1;
  auto draw_sign = [&] {
    sign = rng.uniform() < pos_prob ? 1 : -1;
    ++out.excursions;
    if (sign > 0) ++out.positive_excursions;
  };
  if (y0 == 0.0) draw_sign();
  bool in_band = r < cfg.band();
  thread_local BridgeTable table;
  BridgeTable* bridge_table = cfg.bridge_zeros && p.delta < 2.0 ? &table : nullptr;
  bool passed = false;

  auto finish = [&](double ts, double ys, double xs, StopKind k) {
    out.stop_time = ts;
    out.y_at_stop = ys;
    out.x_at_stop = xs;
    out.stop_kind = k;
    return out;
  };
  auto record = [&] {
    if (trajectory && cfg.record_stride > 0 && out.steps % cfg.record_stride == 0) {
      trajectory->push_back({t, sign * r, x});
    }
  };
  if (trajectory && cfg.record_stride > 0) trajectory->push_back({t, sign * r, x});

  if (stop.rule == StopRule::sigma0 && (y0 == 0.0 || in_band)) {
    return finish(0.0, y0, x0, StopKind::hit_sigma0);
  }
  if (levels && ((stop.upper && x0 >= *stop.upper) || (stop.lower && x0 <= *stop.lower))) {
    if (stop.rule == StopRule::level_passage) return finish(0.0, y0, x0, passage_kind);
    passed = true;
    if (in_band) return finish(0.0, y0, x0, zeta_kind);
  }

  double v_old = V(sign, r);
  while (t < cfg.t_max) {
    double dt = cfg.dt;
    if (cfg.step_growth > 0.0) {
      double natural = q;
      if (levels && !passed) {
        double d = std::numeric_limits<double>::infinity();
        if (stop.upper) d = std::min(d, *stop.upper - x);
        if (stop.lower) d = std::min(d, x - *stop.lower);
        if (d > level_reach) natural = std::max(natural, std::pow(d, barrier_power));
      }
      dt = std::max(dt, cfg.step_growth * natural);
    }
    if (t + dt > cfg.t_max) dt = cfg.t_max - t;
    if (!(dt > 0.0)) break;

    const double sqrt_dt = dt == cfg.dt ? sqrt_base_dt : std::sqrt(dt);
    const double q_new = p.delta < 1.0 ? step_bessel_squared_poisson(q, p.delta, dt, rng)
                                       : step_decomposed(r, p.delta, dt, sqrt_dt, rng);
    const double r_new = std::sqrt(q_new);
    const double band = band_ratio * sqrt_dt;
    const double v_new = V(sign, r_new);
    const double x_new = x + 0.5 * (v_old + v_new) * dt;
    const double y_old = sign * r;
    const double y_new = sign * r_new;
    ++out.steps;

    bool crossed = false;
    if (levels && !passed) {
      std::optional<double> hit;
      if (stop.upper && x_new >= *stop.upper) hit = *stop.upper;
      if (stop.lower && x_new <= *stop.lower) hit = *stop.lower;
      if (hit) {
        const double f = (*hit - x) / (x_new - x);
        if (stop.rule == StopRule::level_passage) {
          return finish(t + f * dt, y_old + f * (y_new - y_old), *hit, passage_kind);
        }
        passed = true;
        crossed = true;
      }
    }

    const bool now_in_band = r_new < band;
    bool entering = now_in_band && !in_band;
    if (bridge_table && !in_band && !now_in_band) {
      const double z = r * r_new / dt;
      if (z < kBridgeCut) entering = rng.uniform() < (*bridge_table)(z, p.delta);
    }
    t += dt;
    x = x_new;
    q = q_new;
    r = r_new;
    in_band = now_in_band;

    if (entering && stop.rule == StopRule::sigma0) return finish(t, y_new, x, StopKind::hit_sigma0);
    if (stop.rule == StopRule::zero_after_passage && passed && (entering || (crossed && now_in_band))) {
      return finish(t, y_new, x, zeta_kind);
    }
    v_old = v_new;
    if (entering) {
      draw_sign();
      v_old = V(sign, r);
    }
    record();
  }
  return finish(t, sign * r, x, StopKind::censored_at_horizon);
}

double bessel_bridge_zero_prob(double r0, double r1, double delta, double dt) {
  if (!(r0 >= 0.0) || !(r1 >= 0.0) || !(dt > 0.0)) {
    throw DomainError("bridge probability needs r0, r1 >= 0 and dt > 0");
  }
  if (!(delta >= 1.0 && delta < 2.0)) throw DomainError("bridge probability needs delta in [1, 2)");
  return bridge_prob_z(r0 * r1 / dt, 1.0 - 0.5 * delta);
}

int default_workers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

void parallel_for(std::uint64_t n, int workers, const std::function<void(std::uint64_t)>& body) {
  if (workers < 1) throw ConfigError("worker count must be at least 1");
  if (workers == 1 || n < 2) {
    for (std::uint64_t i = 0; i < n; ++i) body(i);
    return;
  }
  constexpr std::uint64_t kChunk = 64;
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (;;) {
      const std::uint64_t begin = next.fetch_add(kChunk);
      if (begin >= n) return;
      const std::uint64_t end = std::min(n, begin + kChunk);
      try {
        for (std::uint64_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int count = static_cast<int>(std::min<std::uint64_t>(workers, n));
  pool.reserve(count);
  for (int w = 0; w < count; ++w) pool.emplace_back(run);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<StoppedSample> simulate_replicas(const ModelParams& p, const PathConfig& cfg, double x0,
                                             double y0, const StopSpec& stop, std::uint64_t seed,
                                             std::uint64_t n, int workers) {
  p.validate();
  cfg.validate();
  stop.validate(x0);
  std::vector<StoppedSample> out(n);
  parallel_for(n, workers, [&](std::uint64_t i) {
    RngStream rng(seed, i);
    out[i] = simulate_to_stop(p, cfg, x0, y0, stop, rng);
  });
  return out;
}

std::vector<SurvivalPoint> survival_from_samples(const std::vector<StoppedSample>& samples,
                                                 const std::vector<double>& t_grid) {
  if (samples.empty()) throw ConfigError("survival curve needs at least one replica");
  std::vector<double> hit_times;
  hit_times.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.stop_kind != StopKind::censored_at_horizon) hit_times.push_back(s.stop_time);
  }
  std::sort(hit_times.begin(), hit_times.end());
  const double n = static_cast<double>(samples.size());
  std::vector<SurvivalPoint> curve;
  curve.reserve(t_grid.size());
  for (double t : t_grid) {
    const auto hits = std::upper_bound(hit_times.begin(), hit_times.end(), t) - hit_times.begin();
    const double pr = (n - static_cast<double>(hits)) / n;
    curve.push_back({t, pr, std::sqrt(pr * (1.0 - pr) / n)});
  }
  return curve;
}

std::vector<SurvivalPoint> survival_curve(const ModelParams& p, const PathConfig& cfg, double x0,
                                          double y0, double b, const std::vector<double>& t_grid,
                                          std::uint64_t n, std::uint64_t seed, int workers) {
  if (t_grid.empty()) throw ConfigError("t_grid is empty");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0) || t_grid[i] > cfg.t_max || (i > 0 && !(t_grid[i] > t_grid[i - 1]))) {
      throw ConfigError("t_grid must be increasing inside (0, t_max]");
    }
  }
  if (!(x0 < b)) throw ConfigError("survival curve needs x < b");
  StopSpec stop{StopRule::level_passage, std::nullopt, b};
  return survival_from_samples(simulate_replicas(p, cfg, x0, y0, stop, seed, n, workers), t_grid);
}

}  // namespace skewbessel
