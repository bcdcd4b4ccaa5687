#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "steklov/types.hpp"

namespace steklov {

struct OdeOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  double initial_step = 0.0;  // 0 selects from the span
  double min_step_fraction = 1e-13;
  long max_steps = 2'000'000;
};

// Dormand-Prince 5(4) with the 4th-order continuous extension. Integrates
// y' = f(t, y) from t0 and reports the state at the increasing times
// `t_out` (all >= t0). Throws Error::Kind::Integration on step underflow.
template <int N, class F>
std::vector<Eigen::Matrix<double, N, 1>> dopri5(F&& f, double t0, Eigen::Matrix<double, N, 1> y0,
                                                const std::vector<double>& t_out,
                                                const OdeOptions& opt = {}) {
  using State = Eigen::Matrix<double, N, 1>;
  std::vector<State> out;
  out.reserve(t_out.size());
  if (t_out.empty()) return out;
  const double t_end = t_out.back();

  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                   a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;
  constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                   d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                   d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

  double t = t0;
  State y = y0;
  State k1 = f(t, y);
  const double span = t_end - t0;
  double h = opt.initial_step > 0 ? opt.initial_step : std::max(span * 1e-6, 1e-12);
  const double h_min = std::max(std::abs(span), 1e-300) * opt.min_step_fraction;
  std::size_t next = 0;
  while (next < t_out.size() && t_out[next] <= t0) {
    out.push_back(y0);
    ++next;
  }

  long steps = 0;
  while (next < t_out.size()) {
    if (++steps > opt.max_steps)
      throw Error(Error::Kind::Integration, "ODE integrator exceeded the step budget at t = " + std::to_string(t));
    const bool last = t + h >= t_end;
    if (last) h = t_end - t;

    const State k2 = f(t + c2 * h, y + h * (a21 * k1));
    const State k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const State k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const State k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const State k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const State y_new = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const State k7 = f(t + h, y_new);
    const State delta = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err = 0.0;
    for (int j = 0; j < y.size(); ++j) {
      const double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[j]), std::abs(y_new[j]));
      err += (delta[j] / sc) * (delta[j] / sc);
    }
    err = std::sqrt(err / y.size());
    if (!std::isfinite(err))
      throw Error(Error::Kind::Integration, "non-finite ODE state near t = " + std::to_string(t));

    if (err <= 1.0) {
      const double t_new = last ? t_end : t + h;
      if (next < t_out.size() && t_out[next] <= t_new) {
        const State ydiff = y_new - y;
        const State bspl = h * k1 - ydiff;
        const State r4 = ydiff - h * k7 - bspl;
        const State r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        while (next < t_out.size() && t_out[next] <= t_new) {
          const double th = (t_out[next] - t) / h;
          const double th1 = 1.0 - th;
          out.push_back(y + th * (ydiff + th1 * (bspl + th * (r4 + th1 * r5))));
          ++next;
        }
      }
      t = t_new;
      y = y_new;
      k1 = k7;
      if (t >= t_end) break;
    }
    const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h *= err <= 1.0 ? factor : std::min(factor, 1.0);
    if (h < h_min)
      throw Error(Error::Kind::Integration,
                  "ODE step size underflow near t = " + std::to_string(t) + " (stiff or singular problem)");
  }
  // t_end reached exactly; flush any outputs equal to t_end lost to rounding
  while (out.size() < t_out.size()) out.push_back(y);
  return out;
}

}  // namespace steklov
