#include "dispread/dopri5.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "dispread/errors.hpp"

namespace dispread {

namespace {

constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                 b6 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

// Dense-output polynomial coefficients: y(t + θh) = y + h Σ_i k_i Σ_p P[i][p] θ^{p+1}.
constexpr std::array<std::array<double, 4>, 7> P{{
    {1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0, -12715105075.0 / 11282082432.0},
    {0.0, 0.0, 0.0, 0.0},
    {0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0, 87487479700.0 / 32700410799.0},
    {0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0, -10690763975.0 / 1880347072.0},
    {0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0, 701980252875.0 / 199316789632.0},
    {0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0, -1453857185.0 / 822651844.0},
    {0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0, 69997945.0 / 29380423.0},
}};

double scaled_rms(const Matrix& v, const Matrix& y0, const Matrix& y1, double atol, double rtol) {
  const Eigen::Index n = v.size();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sc = atol + rtol * std::max(std::abs(y0.data()[i]), std::abs(y1.data()[i]));
    acc += std::norm(v.data()[i]) / (sc * sc);
  }
  return std::sqrt(acc / static_cast<double>(n));
}

}  // namespace

Dopri5::Stats Dopri5::integrate(const Rhs& rhs, double t0, double t1, Matrix& y, const std::vector<double>& outputs,
                                const Observer& observe) const {
  Stats stats;
  auto out_it = std::lower_bound(outputs.begin(), outputs.end(), t0);
  const auto out_end = std::upper_bound(outputs.begin(), outputs.end(), t1);
  while (out_it != out_end && *out_it <= t0) {
    observe(*out_it, y);
    ++out_it;
  }
  if (!(t1 > t0)) return stats;

  const Eigen::Index rows = y.rows();
  const Eigen::Index cols = y.cols();
  std::array<Matrix, 7> k;
  for (auto& m : k) m.resize(rows, cols);
  Matrix ytmp(rows, cols);
  Matrix ynew(rows, cols);
  Matrix err(rows, cols);
  Matrix dense(rows, cols);

  auto f = [&](double t, const Matrix& state, Matrix& d) {
    rhs(t, state, d);
    ++stats.rhs_evaluations;
  };

  const double atol = opt_.abs_tol;
  const double rtol = opt_.rel_tol;
  double t = t0;
  f(t, y, k[0]);

  // Initial step from the local derivative scale.
  double h;
  {
    const Matrix zero = Matrix::Zero(rows, cols);
    const double d0 = scaled_rms(y, y, zero, atol, rtol);
    const double d1 = scaled_rms(k[0], y, zero, atol, rtol);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, t1 - t0);
    ytmp = y + h0 * k[0];
    f(t + h0, ytmp, k[1]);
    const double d2 = scaled_rms(k[1] - k[0], y, zero, atol, rtol) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, 1e-3 * h0) : std::pow(0.01 / dm, 0.2);
    h = std::min({100.0 * h0, h1, opt_.max_step, t1 - t0});
  }

  bool last_rejected = false;
  while (t < t1) {
    if (stats.accepted + stats.rejected >= opt_.max_steps) {
      throw IntegrationError(fmt::format("step budget of {} exhausted at t = {:.6g}", opt_.max_steps, t));
    }
    if (h < opt_.min_step) {
      throw IntegrationError(fmt::format("step size underflow (h = {:.3e}) at t = {:.6g}", h, t));
    }
    bool final_step = false;
    if (t + h >= t1 || t1 - (t + h) < 1e-12 * std::max(1.0, std::abs(t1))) {
      h = t1 - t;
      final_step = true;
    }

    ytmp = y + h * (a21 * k[0]);
    f(t + c2 * h, ytmp, k[1]);
    ytmp = y + h * (a31 * k[0] + a32 * k[1]);
    f(t + c3 * h, ytmp, k[2]);
    ytmp = y + h * (a41 * k[0] + a42 * k[1] + a43 * k[2]);
    f(t + c4 * h, ytmp, k[3]);
    ytmp = y + h * (a51 * k[0] + a52 * k[1] + a53 * k[2] + a54 * k[3]);
    f(t + c5 * h, ytmp, k[4]);
    ytmp = y + h * (a61 * k[0] + a62 * k[1] + a63 * k[2] + a64 * k[3] + a65 * k[4]);
    const double t_new = final_step ? t1 : t + h;
    f(t_new, ytmp, k[5]);
    ynew = y + h * (b1 * k[0] + b3 * k[2] + b4 * k[3] + b5 * k[4] + b6 * k[5]);
    f(t_new, ynew, k[6]);

    err = h * (e1 * k[0] + e3 * k[2] + e4 * k[3] + e5 * k[4] + e6 * k[5] + e7 * k[6]);
    const double en = scaled_rms(err, y, ynew, atol, rtol);

    if (!std::isfinite(en)) {
      ++stats.rejected;
      h *= 0.2;
      last_rejected = true;
      continue;
    }
    if (en > 1.0) {
      ++stats.rejected;
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
      last_rejected = true;
      continue;
    }

    ++stats.accepted;
    while (out_it != out_end && *out_it <= t_new) {
      const double tout = *out_it;
      if (tout >= t_new) {
        observe(tout, ynew);
      } else {
        const double theta = (tout - t) / h;
        dense = y;
        for (int i = 0; i < 7; ++i) {
          double coef = 0.0;
          double pw = theta;
          for (int p = 0; p < 4; ++p) {
            coef += P[i][p] * pw;
            pw *= theta;
          }
          if (coef != 0.0) dense += (h * coef) * k[i];
        }
        observe(tout, dense);
      }
      ++out_it;
    }

    y.swap(ynew);
    k[0].swap(k[6]);
    t = t_new;
    if (final_step) break;

    double factor = en == 0.0 ? 10.0 : 0.9 * std::pow(en, -0.2);
    factor = std::clamp(factor, 0.2, last_rejected ? 1.0 : 10.0);
    h = std::min(h * factor, opt_.max_step);
    last_rejected = false;
  }
  return stats;
}

}  // namespace dispread
