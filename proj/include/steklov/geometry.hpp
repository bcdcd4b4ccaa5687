#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "steklov/quadrature.hpp"
#include "steklov/types.hpp"

namespace steklov {

enum class Curvature { Euclidean, Hyperbolic, SphericalCap };

/// Simply connected model space of constant curvature: R^n, H^n or the
/// open hemisphere (radial arguments restricted to t < pi).
struct SpaceForm {
  Curvature curvature = Curvature::Euclidean;
  int dim = 2;

  SpaceForm() = default;
  SpaceForm(Curvature c, int n);

  double kappa() const;
  std::string name() const;
};

std::string to_string(Curvature c);

namespace detail {
[[noreturn]] void throw_radial_domain(double t, Curvature c);
}

/// Metric coefficient S_kappa(t): sin t, t or sinh t.
template <class Scalar>
Scalar s_kappa(const SpaceForm& form, Scalar t) {
  using std::sin;
  using std::sinh;
  if (!(t >= Scalar(0)) || (form.curvature == Curvature::SphericalCap && !(t < Scalar(kPi))))
    detail::throw_radial_domain(static_cast<double>(t), form.curvature);
  switch (form.curvature) {
    case Curvature::Euclidean: return t;
    case Curvature::Hyperbolic: return sinh(t);
    case Curvature::SphericalCap: return sin(t);
  }
  return t;
}

/// Derivative of s_kappa: cos t, 1 or cosh t.
template <class Scalar>
Scalar c_kappa(const SpaceForm& form, Scalar t) {
  using std::cos;
  using std::cosh;
  if (!(t >= Scalar(0)) || (form.curvature == Curvature::SphericalCap && !(t < Scalar(kPi))))
    detail::throw_radial_domain(static_cast<double>(t), form.curvature);
  switch (form.curvature) {
    case Curvature::Euclidean: return Scalar(1);
    case Curvature::Hyperbolic: return cosh(t);
    case Curvature::SphericalCap: return cos(t);
  }
  return Scalar(1);
}

/// Surface measure of the unit (n-1)-sphere, 2 pi^{n/2} / Gamma(n/2).
double unit_sphere_area(int n);

/// Radial weight phi(t) about the fixed base point o; the measure is
/// e^{-phi} dv.
class RadialWeight {
 public:
  enum class Kind { Constant, Linear, Quadratic, Tabulated };

  static RadialWeight constant(double c);
  /// phi(t) = -a t
  static RadialWeight linear(double a);
  /// phi(t) = -a t - b t^2
  static RadialWeight quadratic(double a, double b);
  /// Piecewise-linear table of (t, phi); t strictly increasing. Derivatives
  /// use centered differences at the nodes, interpolated linearly.
  static RadialWeight tabulated(std::vector<double> t, std::vector<double> phi);
  /// Two-column CSV (t, phi); '#' comments and one optional header line.
  static RadialWeight from_csv(const std::string& path);

  Kind kind() const { return kind_; }
  const std::string& id() const { return id_; }
  RadialWeight& rename(std::string id) {
    id_ = std::move(id);
    return *this;
  }

  double operator()(double t) const { return phi(t); }
  double phi(double t) const;
  double dphi(double t) const;
  double d2phi(double t) const;
  double density(double t) const { return std::exp(-phi(t)); }

  /// Parameters in declaration order: c; a; a, b. Empty for tables.
  std::vector<double> params() const;
  /// Largest t the weight can be evaluated at (infinity for closed forms).
  double t_limit() const;
  /// Same weight shifted by a constant: phi + c.
  RadialWeight shifted(double c) const;

 private:
  struct Table {
    std::vector<double> t, phi, d1, d2;
  };

  Kind kind_ = Kind::Constant;
  double c_ = 0.0, a_ = 0.0, b_ = 0.0;
  std::shared_ptr<const Table> table_;
  std::string id_;

  std::size_t locate(double t) const;
  double interp(const std::vector<double>& y, double t) const;
};

struct PropertyIReport {
  double t_max = 0.0;
  int samples = 0;
  double max_dphi = 0.0;   // worst (largest) phi'
  double max_d2phi = 0.0;  // worst (largest) phi''
  double t_at_max_dphi = 0.0;
  double t_at_max_d2phi = 0.0;
  double tol = 0.0;
  bool non_increasing = true;
  bool concave = true;
  bool admissible() const { return non_increasing && concave; }
  std::string diagnostic() const;
};

/// Samples phi' and phi'' on a uniform grid of [0, t_max]. Inadmissibility is
/// a report outcome, not an error.
PropertyIReport validate_property_i(const RadialWeight& w, double t_max, int samples = 1024,
                                    double tol = 1e-12);

/// Weighted volume of the geodesic ball B_R(o).
double ball_weighted_volume(const SpaceForm& form, const RadialWeight& w, double R,
                            const QuadratureOptions& opt = {});

/// Weighted measure of the geodesic sphere of radius R.
double ball_boundary_weighted_measure(const SpaceForm& form, const RadialWeight& w, double R);

/// Hyperbolic distance from the origin in the Poincare disk.
double poincare_distance(const Vec2& x);
double poincare_distance(double radius);
/// Conformal factor 2 / (1 - |x|^2) of the Poincare disk metric.
double conformal_factor(const Vec2& x);
/// Euclidean radius in the Poincare disk of a point at hyperbolic distance t.
inline double poincare_radius(double t) { return std::tanh(0.5 * t); }

}  // namespace steklov
