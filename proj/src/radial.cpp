#include "steklov/radial.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>

namespace steklov {

namespace {

// Quintic Hermite basis on [0, 1] and its derivative.
void quintic_basis(double s, double (&b)[6], double (&db)[6]) {
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
  b[0] = 1 - 10 * s3 + 15 * s4 - 6 * s5;
  b[1] = s - 6 * s3 + 8 * s4 - 3 * s5;
  b[2] = 0.5 * (s2 - 3 * s3 + 3 * s4 - s5);
  b[3] = 10 * s3 - 15 * s4 + 6 * s5;
  b[4] = -4 * s3 + 7 * s4 - 3 * s5;
  b[5] = 0.5 * (s3 - 2 * s4 + s5);
  db[0] = -30 * s2 + 60 * s3 - 30 * s4;
  db[1] = 1 - 18 * s2 + 32 * s3 - 15 * s4;
  db[2] = 0.5 * (2 * s - 9 * s2 + 12 * s3 - 5 * s4);
  db[3] = 30 * s2 - 60 * s3 + 30 * s4;
  db[4] = -12 * s2 + 28 * s3 - 15 * s4;
  db[5] = 0.5 * (3 * s2 - 8 * s3 + 5 * s4);
}

std::vector<double> uniform_grid(double a, double b, int intervals) {
  std::vector<double> g(intervals + 1);
  for (int k = 0; k <= intervals; ++k) g[k] = a + (b - a) * k / intervals;
  g.back() = b;
  return g;
}

}  // namespace

// --- RadialSolution -------------------------------------------------------------

double RadialSolution::Tsecond(double t, double T, double Tp) const {
  const int n = form.dim;
  const double S = s_kappa(form, t), C = c_kappa(form, t);
  return -((n - 1) * C / S - weight.dphi(t)) * Tp + angular_eigenvalue * T / (S * S);
}

void RadialSolution::hermite(double t, double& value, double& slope) const {
  auto it = std::upper_bound(grid.begin(), grid.end(), t);
  std::size_t k = it == grid.begin() ? 0 : static_cast<std::size_t>(it - grid.begin()) - 1;
  k = std::min(k, grid.size() - 2);
  const double h = grid[k + 1] - grid[k];
  const double s = (t - grid[k]) / h;
  double b[6], db[6];
  quintic_basis(s, b, db);
  const double c[6] = {T_values[k],     h * Tprime_values[k],     h * h * Tsecond_values_[k],
                       T_values[k + 1], h * Tprime_values[k + 1], h * h * Tsecond_values_[k + 1]};
  value = slope = 0.0;
  for (int j = 0; j < 6; ++j) {
    value += c[j] * b[j];
    slope += c[j] * db[j];
  }
  slope /= h;
}

double RadialSolution::T(double t) const {
  if (t < 0.0 || t > t_end() * (1 + 1e-14))
    throw Error(Error::Kind::Domain, "radial solution evaluated outside [0, " + std::to_string(t_end()) + "]");
  if (t <= t_start()) {
    const int i = mode_degree;
    return scale_ * std::pow(t, i) * (1.0 + series_a_ * t + series_b_ * t * t);
  }
  double v, d;
  hermite(t, v, d);
  return v;
}

double RadialSolution::Tprime(double t) const {
  if (t < 0.0 || t > t_end() * (1 + 1e-14))
    throw Error(Error::Kind::Domain, "radial solution evaluated outside [0, " + std::to_string(t_end()) + "]");
  if (t <= t_start()) {
    const int i = mode_degree;
    return scale_ * (i * std::pow(t, i - 1) + (i + 1) * series_a_ * std::pow(t, i) +
                     (i + 2) * series_b_ * std::pow(t, i + 1));
  }
  double v, d;
  hermite(t, v, d);
  return d;
}

// --- solve_mode -------------------------------------------------------------------

RadialSolution solve_mode(const SpaceForm& form, const RadialWeight& w, int i, double R,
                          const RadialOptions& opt) {
  if (i < 1) throw Error(Error::Kind::Domain, "mode degree must be >= 1");
  if (!(R > 0.0)) throw Error(Error::Kind::Domain, "ball radius must be positive");
  const double t_last = std::max(R, opt.extend_to);
  s_kappa(form, t_last);  // domain check (hemisphere)
  if (!(opt.start_fraction > 0.0 && opt.start_fraction < 0.5))
    throw Error(Error::Kind::Domain, "series start fraction must lie in (0, 0.5)");
  if (opt.report_points < 8) throw Error(Error::Kind::Domain, "need at least 8 reporting points");
  if (!(opt.leading_coefficient > 0.0))
    throw Error(Error::Kind::Domain, "Frobenius leading coefficient must be positive");

  if (!opt.waive_admissibility) {
    const auto rep = validate_property_i(w, t_last, 1024, opt.admissibility_tol);
    if (!rep.admissible()) throw Error(Error::Kind::Admissibility, "weight " + w.id() + ": " + rep.diagnostic());
  }

  const int n = form.dim;
  const double kappa = form.kappa();
  RadialSolution sol;
  sol.form = form;
  sol.weight = w;
  sol.mode_degree = i;
  sol.angular_eigenvalue = static_cast<double>(i) * (i + n - 2);
  sol.R = R;
  sol.scale_ = opt.leading_coefficient;

  // Two-term Frobenius expansion T = t^i (1 + a t + b t^2) about the regular
  // singular point, from S = t - kappa t^3/6 and phi' = p0 + p1 t.
  const double lambda = sol.angular_eigenvalue;
  const double p0 = w.dphi(0.0), p1 = w.d2phi(0.0);
  sol.series_a_ = p0 * i / (2.0 * i + n - 1);
  sol.series_b_ = (kappa * (i * (n - 1) + lambda) / 3.0 + p0 * (i + 1) * sol.series_a_ + p1 * i) / (4.0 * i + 2.0 * n);

  const double t0 = opt.start_fraction * R;
  const double a = sol.series_a_, b = sol.series_b_, s = sol.scale_;
  Eigen::Vector2d y0(s * std::pow(t0, i) * (1.0 + a * t0 + b * t0 * t0),
                     s * (i * std::pow(t0, i - 1) + (i + 1) * a * std::pow(t0, i) + (i + 2) * b * std::pow(t0, i + 1)));

  auto rhs = [&](double t, const Eigen::Vector2d& y) {
    const double S = s_kappa(form, t), C = c_kappa(form, t);
    return Eigen::Vector2d(y[1], -((n - 1) * C / S - w.dphi(t)) * y[1] + lambda * y[0] / (S * S));
  };

  OdeOptions ode;
  ode.rel_tol = opt.rel_tol;
  ode.abs_tol = opt.abs_tol;
  ode.initial_step = 0.1 * t0;

  const int intervals = opt.report_points - 1;
  sol.grid = uniform_grid(t0, R, intervals);
  auto states = dopri5<2>(rhs, t0, y0, sol.grid, ode);
  sol.R_index = sol.grid.size() - 1;

  if (opt.extend_to > R) {
    const double h = (R - t0) / intervals;
    const int extra = std::max(1, static_cast<int>(std::ceil((opt.extend_to - R) / h)));
    auto tail = uniform_grid(R, opt.extend_to, extra);
    OdeOptions ode2 = ode;
    ode2.initial_step = 0.0;
    auto tail_states = dopri5<2>(rhs, R, states.back(), tail, ode2);
    sol.grid.insert(sol.grid.end(), tail.begin() + 1, tail.end());
    states.insert(states.end(), tail_states.begin() + 1, tail_states.end());
  }

  sol.T_values.resize(states.size());
  sol.Tprime_values.resize(states.size());
  sol.Tsecond_values_.resize(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) {
    sol.T_values[k] = states[k][0];
    sol.Tprime_values[k] = states[k][1];
    if (!(states[k][0] > 0.0))
      throw Error(Error::Kind::Integration, "radial solution lost positivity at t = " + std::to_string(sol.grid[k]) +
                                                " (invalid weight or integrator failure)");
    sol.Tsecond_values_[k] = sol.Tsecond(sol.grid[k], states[k][0], states[k][1]);
  }
  sol.beta = sol.Tprime_values[sol.R_index] / sol.T_values[sol.R_index];
  return sol;
}

// --- sigma1 and spectrum -----------------------------------------------------------

double g_function(const RadialSolution& sol, double t) {
  const int n = sol.form.dim;
  const double T = sol.T(t), Tp = sol.Tprime(t);
  const double S = s_kappa(sol.form, t), C = c_kappa(sol.form, t);
  return 2.0 * T * Tp + (n - 1) * C / S * T * T - T * T * sol.weight.dphi(t);
}

double h_function(const RadialSolution& sol, double t) {
  const int n = sol.form.dim;
  const double T = sol.T(t), Tp = sol.Tprime(t);
  const double S = s_kappa(sol.form, t);
  return Tp * Tp + (n - 1) * T * T / (S * S);
}

Sigma1Ball sigma1_ball(const SpaceForm& form, const RadialWeight& w, double R, const RadialOptions& opt) {
  Sigma1Ball out;
  out.solution = solve_mode(form, w, 1, R, opt);
  const auto& sol = out.solution;
  out.sigma = sol.beta;

  const int n = form.dim;
  const double omega = unit_sphere_area(n);
  auto measure = [&](double t) { return std::pow(s_kappa(form, t), n - 1) * w.density(t); };
  out.ball_H_integral = omega * integrate([&](double t) { return h_function(sol, t) * measure(t); }, 0.0, R, opt.quadrature);
  out.ball_G_integral = omega * integrate([&](double t) { return g_function(sol, t) * measure(t); }, 0.0, R, opt.quadrature);
  const double TR = sol.T_values[sol.R_index];
  out.identity_value = out.ball_H_integral / (TR * TR * ball_boundary_weighted_measure(form, w, R));
  out.discrepancy = std::abs(out.identity_value - out.sigma) / std::abs(out.sigma);
  out.identity_warning = out.discrepancy > 1e-6;
  return out;
}

long spherical_harmonic_multiplicity(int n, int i) {
  if (n < 2 || i < 0) throw Error(Error::Kind::Domain, "spherical harmonic multiplicity needs n >= 2, i >= 0");
  if (n == 2) return i == 0 ? 1 : 2;
  // C(i+n-1, n-1) - C(i+n-3, n-1)
  auto binom = [](long top, long k) -> long {
    if (k < 0 || top < k) return 0;
    long r = 1;
    for (long j = 1; j <= k; ++j) r = r * (top - k + j) / j;
    return r;
  };
  return binom(i + n - 1, n - 1) - binom(i + n - 3, n - 1);
}

SteklovSpectrum ball_spectrum(const SpaceForm& form, const RadialWeight& w, double R, int k, const RadialOptions& opt) {
  if (k < 1) throw Error(Error::Kind::Domain, "ball_spectrum needs k >= 1");
  struct Entry {
    double value;
    int mode;
  };
  std::vector<Entry> entries;
  long count = 0;
  double largest = 0.0;
  int i = 1;
  // collect until k values are in hand and the next mode cannot undercut them
  for (;; ++i) {
    const double beta = solve_mode(form, w, i, R, opt).beta;
    if (count >= k && beta >= largest) break;
    const long mult = spherical_harmonic_multiplicity(form.dim, i);
    for (long m = 0; m < mult && m < k; ++m) entries.push_back({beta, i});
    count += mult;
    largest = std::max(largest, beta);
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) { return x.value < y.value; });

  SteklovSpectrum spec;
  spec.eigenvalues.push_back(0.0);
  spec.modes.push_back(0);
  for (int j = 0; j < k; ++j) {
    spec.eigenvalues.push_back(entries[j].value);
    spec.modes.push_back(entries[j].mode);
  }
  spec.meta.method = "radial";
  spec.meta.domain = "ball(R=" + std::to_string(R) + ")";
  spec.meta.weight = w.id();
  spec.meta.curvature = form.curvature;
  spec.meta.dim = form.dim;
  return spec;
}

// --- G / H ---------------------------------------------------------------------------

GHProfile compute_gh(const RadialSolution& sol) {
  if (sol.mode_degree != 1) throw Error(Error::Kind::Domain, "compute_gh needs the mode-1 solution");
  GHProfile p;
  p.dim = sol.form.dim;
  p.grid = sol.grid;
  p.G_values.resize(sol.grid.size());
  p.H_values.resize(sol.grid.size());
  const int n = sol.form.dim;
  for (std::size_t k = 0; k < sol.grid.size(); ++k) {
    const double t = sol.grid[k], T = sol.T_values[k], Tp = sol.Tprime_values[k];
    const double S = s_kappa(sol.form, t), C = c_kappa(sol.form, t);
    p.G_values[k] = 2.0 * T * Tp + (n - 1) * C / S * T * T - T * T * sol.weight.dphi(t);
    p.H_values[k] = Tp * Tp + (n - 1) * T * T / (S * S);
  }
  return p;
}

MonotonicityReport check_gh_monotonicity(const GHProfile& p, double tol, bool relative) {
  MonotonicityReport rep;
  const std::size_t m = p.grid.size();
  if (m < 2) return rep;
  double gmax = 0.0, hmax = 0.0;
  rep.min_G = rep.min_H = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < m; ++k) {
    gmax = std::max(gmax, std::abs(p.G_values[k]));
    hmax = std::max(hmax, std::abs(p.H_values[k]));
    rep.min_G = std::min(rep.min_G, p.G_values[k]);
    rep.min_H = std::min(rep.min_H, p.H_values[k]);
  }
  const double span = p.grid.back() - p.grid.front();
  rep.tol_G = relative ? tol * gmax / span : tol;
  rep.tol_H = relative ? tol * hmax / span : tol;
  rep.min_dG = std::numeric_limits<double>::infinity();
  rep.max_dH = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double h = p.grid[k + 1] - p.grid[k];
    rep.min_dG = std::min(rep.min_dG, (p.G_values[k + 1] - p.G_values[k]) / h);
    rep.max_dH = std::max(rep.max_dH, (p.H_values[k + 1] - p.H_values[k]) / h);
  }
  rep.G_nondecreasing = rep.min_dG >= -rep.tol_G;
  rep.H_nonincreasing = rep.max_dH <= rep.tol_H;
  rep.nonnegative = rep.min_G >= -rep.tol_G * span && rep.min_H >= -rep.tol_H * span;
  return rep;
}

std::string radial_csv(const RadialSolution& sol) {
  std::ostringstream os;
  os << "# steklov radial-solution v1 mode=" << sol.mode_degree << " R=" << std::setprecision(17) << sol.R
     << " beta=" << sol.beta << " weight=" << sol.weight.id() << " space=" << sol.form.name() << "\n";
  os << "t,T,Tprime,G,H\n";
  std::optional<GHProfile> gh;
  if (sol.mode_degree == 1) gh = compute_gh(sol);
  for (std::size_t k = 0; k < sol.grid.size(); ++k) {
    os << sol.grid[k] << "," << sol.T_values[k] << "," << sol.Tprime_values[k] << ",";
    if (gh) os << gh->G_values[k] << "," << gh->H_values[k];
    else os << ",";
    os << "\n";
  }
  return os.str();
}

}  // namespace steklov
