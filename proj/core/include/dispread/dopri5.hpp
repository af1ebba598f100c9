#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "dispread/hilbert.hpp"

namespace dispread {

/// Dormand-Prince 5(4) integrator for complex matrix-valued ODEs with 4th-order dense output.
class Dopri5 {
 public:
  using Rhs = std::function<void(double t, const Matrix& y, Matrix& dydt)>;
  using Observer = std::function<void(double t, const Matrix& y)>;

  struct Options {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double max_step = 1.0;
    double min_step = 1e-12;
    std::size_t max_steps = 50'000'000;
  };

  struct Stats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evaluations = 0;
  };

  explicit Dopri5(Options options) : opt_(options) {}

  /// Advances y from t0 to t1 and calls `observe` at each time in `outputs` lying in [t0, t1].
  ///
  /// `outputs` must be sorted. Throws IntegrationError on step-size underflow or when the
  /// step budget is exhausted.
  Stats integrate(const Rhs& rhs, double t0, double t1, Matrix& y, const std::vector<double>& outputs,
                  const Observer& observe) const;

 private:
  Options opt_;
};

}  // namespace dispread
