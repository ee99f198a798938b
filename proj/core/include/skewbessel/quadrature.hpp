#pragma once

// Globally adaptive 21-point Gauss-Kronrod quadrature, plus change-of-variable
// front ends for the shapes that show up in the persistence and exit laws:
// algebraic endpoint singularities u^p, power-law tails u^{-1-q}, and
// exponentially decaying tails.

#include <cmath>
#include <type_traits>
#include <utility>

namespace skewbessel::quad {

struct Options {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 4000;
  /// Throw QuadratureFailure when the tolerance is not reached.
  bool throw_on_failure = true;
};

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  int evaluations = 0;
  int subdivisions = 0;
  bool converged = true;
};

/// Non-owning reference to a callable double(double).
class FunctionRef {
 public:
  template <class F,
            class = std::enable_if_t<!std::is_same_v<std::decay_t<F>, FunctionRef>>>
  FunctionRef(F&& f)  // NOLINT(google-explicit-constructor)
      : obj_(const_cast<void*>(static_cast<const void*>(&f))),
        call_([](void* o, double x) {
          return (*static_cast<std::remove_reference_t<F>*>(o))(x);
        }) {}

  double operator()(double x) const { return call_(obj_, x); }

 private:
  void* obj_;
  double (*call_)(void*, double);
};

/// Integral of f over the finite interval [a, b].
Result integrate(FunctionRef f, double a, double b, const Options& opts = {});

/// Integral of u^p g(u) over (0, len), p > -1, with g smooth near 0.
/// The substitution s = u^{1+p} removes the endpoint singularity.
Result integrate_power_weight(FunctionRef g, double len, double p,
                              const Options& opts = {});

/// Integral of u^{-1-q} g(u) over (start, inf), q > 0, start > 0, with g
/// bounded and slowly varying at infinity.
Result integrate_power_tail(FunctionRef g, double start, double q,
                            const Options& opts = {});

/// Integral of f over (start, inf) for f decaying at least exponentially on
/// the length scale `scale`.
Result integrate_exp_tail(FunctionRef f, double start, double scale,
                          const Options& opts = {});

/// Sum of two partial results.
inline Result operator+(const Result& lhs, const Result& rhs) {
  return {lhs.value + rhs.value, lhs.abs_error + rhs.abs_error,
          lhs.evaluations + rhs.evaluations, lhs.subdivisions + rhs.subdivisions,
          lhs.converged && rhs.converged};
}

}  // namespace skewbessel::quad
