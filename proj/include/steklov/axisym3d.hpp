#pragma once

#include <string>
#include <vector>

#include "steklov/geometry.hpp"
#include "steklov/mesh2d.hpp"
#include "steklov/spectrum.hpp"
#include "steklov/steklov2d.hpp"

namespace steklov {

/// Axisymmetric domain in R^3 described by its meridian in the (r, z)
/// half-plane; vartheta = atan2(z, r) in [-pi/2, pi/2].
struct MeridianDomain {
  enum class Kind { Ball, Spheroid, PerturbedBall };

  Kind kind = Kind::Ball;
  double R = 1.0;
  double a = 1.0, c = 1.0;  // (r/a)^2 + (z/c)^2 = 1
  double eps = 0.0;
  int k = 0;

  static MeridianDomain ball(double R);
  static MeridianDomain spheroid(double a, double c);
  static MeridianDomain perturbed_ball(double R, double eps, int k);

  void validate() const;
  double boundary_radius(double vartheta) const;
  std::string id() const;
};

/// Half-disk polar mesh; axis vertices have r = 0 exactly and the axis
/// segment is flagged as straight boundary.
TriMesh meridian_mesh(const MeridianDomain& dom, int rings, int sectors, const MeshOptions& opt = {});

/// Mode-m matrices of u = U(r, z) e^{i m theta}. For m >= 1 the axis nodes
/// are fixed to zero. Only the outer curve carries boundary mass.
AssembledSystem assemble_mode(const TriMesh& meridian, const RadialWeight& w, int m);

/// Weighted volume and boundary area of the solid of revolution.
MeshMeasures axisym_measures(const TriMesh& meridian, const RadialWeight& w);

/// Union of the per-mode spectra, multiplicity 2 for m >= 1, sorted by value
/// then mode. Returns sigma_0 .. sigma_k.
SteklovSpectrum solve_axisym_spectrum(const TriMesh& meridian, const RadialWeight& w, int k,
                                      const std::vector<int>& modes = {0, 1, 2},
                                      const std::string& domain_id = "");

}  // namespace steklov
