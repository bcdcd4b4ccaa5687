#pragma once

#include <string>
#include <vector>

#include "steklov/geometry.hpp"
#include "steklov/ode.hpp"
#include "steklov/spectrum.hpp"

namespace steklov {

struct RadialOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-300;
  double start_fraction = 1e-4;  // series cutoff t0 = start_fraction * R
  int report_points = 2048;      // reporting grid on [t0, R]
  double leading_coefficient = 1.0;
  bool waive_admissibility = false;
  double admissibility_tol = 1e-12;
  /// Continue the solution past R up to this radius (same ODE); ignored when <= R.
  double extend_to = 0.0;
  QuadratureOptions quadrature{1e-14, 1e-11, 4000};
};

/// One angular mode of the separated weighted-harmonic problem on B_R(o):
///   T'' + ((n-1) C/S - phi') T' - i(i+n-2) S^{-2} T = 0,  T ~ t^i at 0.
class RadialSolution {
 public:
  SpaceForm form;
  RadialWeight weight;
  int mode_degree = 1;
  double angular_eigenvalue = 0.0;  // i (i + n - 2), unit sphere
  double R = 0.0;
  std::vector<double> grid;  // t0 ... R (... extend_to)
  std::vector<double> T_values;
  std::vector<double> Tprime_values;
  double beta = 0.0;  // T'(R) / T(R)
  std::size_t R_index = 0;

  /// T and T' anywhere on [0, grid.back()] (series below the cutoff,
  /// quintic Hermite between grid nodes).
  double T(double t) const;
  double Tprime(double t) const;
  /// T'' from the ODE itself.
  double Tsecond(double t, double T, double Tp) const;

  double t_start() const { return grid.front(); }
  double t_end() const { return grid.back(); }

 private:
  friend RadialSolution solve_mode(const SpaceForm&, const RadialWeight&, int, double,
                                   const RadialOptions&);
  double scale_ = 1.0, series_a_ = 0.0, series_b_ = 0.0;
  std::vector<double> Tsecond_values_;
  void hermite(double t, double& value, double& slope) const;
};

/// Integrates the mode-i radial equation from the two-term Frobenius series
/// at t0 and returns the trajectory and beta_i = T'(R)/T(R).
RadialSolution solve_mode(const SpaceForm& form, const RadialWeight& w, int i, double R,
                          const RadialOptions& opt = {});

struct Sigma1Ball {
  double sigma = 0.0;           // beta_1 from shooting
  double identity_value = 0.0;  // int_B H dmu / (T(R)^2 |dB|_phi)
  double discrepancy = 0.0;     // relative
  bool identity_warning = false;
  double ball_G_integral = 0.0;  // int_B G dmu
  double ball_H_integral = 0.0;  // int_B H dmu
  RadialSolution solution;
};

/// First nonzero Steklov eigenvalue of the weighted ball, with the integral
/// identity cross-check recorded in the result.
Sigma1Ball sigma1_ball(const SpaceForm& form, const RadialWeight& w, double R,
                       const RadialOptions& opt = {});

/// Dimension of the degree-i spherical harmonics on S^{n-1}.
long spherical_harmonic_multiplicity(int n, int i);

/// sigma_0 = 0 followed by the k smallest beta_i counted with multiplicity.
SteklovSpectrum ball_spectrum(const SpaceForm& form, const RadialWeight& w, double R, int k,
                              const RadialOptions& opt = {});

struct GHProfile {
  int dim = 2;
  std::vector<double> grid, G_values, H_values;
};

/// Evaluates the comparison functions
///   G = (T^2)' + (n-1)(C/S) T^2 - T^2 phi',   H = (T')^2 + (n-1) T^2 / S^2
/// on the solution grid. Requires a mode-1 solution.
GHProfile compute_gh(const RadialSolution& sol);

/// G and H evaluated at a single radius from a mode-1 solution.
double g_function(const RadialSolution& sol, double t);
double h_function(const RadialSolution& sol, double t);

struct MonotonicityReport {
  double min_dG = 0.0;  // smallest forward difference slope of G
  double max_dH = 0.0;  // largest forward difference slope of H
  double min_G = 0.0, min_H = 0.0;
  double tol_G = 0.0, tol_H = 0.0;  // absolute thresholds applied
  bool G_nondecreasing = true, H_nonincreasing = true, nonnegative = true;
  bool pass() const { return G_nondecreasing && H_nonincreasing && nonnegative; }
};

/// Finite-difference monotonicity check of G (non-decreasing) and H
/// (non-increasing). With `relative`, tol is scaled by max|G|/span and
/// max|H|/span respectively.
MonotonicityReport check_gh_monotonicity(const GHProfile& p, double tol, bool relative = true);

/// CSV with columns t,T,Tprime,G,H (G/H only for mode 1).
std::string radial_csv(const RadialSolution& sol);

}  // namespace steklov
