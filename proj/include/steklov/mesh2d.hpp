#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "steklov/geometry.hpp"
#include "steklov/types.hpp"

namespace steklov {

/// Star-shaped planar domain, described by its boundary radius r(theta)
/// about a reference center, then translated by center_offset relative to
/// the weight origin o.
struct Domain2D {
  enum class Kind { Disk, Ellipse, PerturbedDisk, Polygon };

  Kind kind = Kind::Disk;
  double R = 1.0;          // Disk, PerturbedDisk
  double a = 1.0, b = 1.0; // Ellipse semi-axes along x, y
  double eps = 0.0;        // PerturbedDisk amplitude
  int k = 0;               // PerturbedDisk wave number
  std::vector<Vec2> vertices;  // Polygon, counterclockwise
  Vec2 center_offset = Vec2::Zero();

  static Domain2D disk(double R, Vec2 offset = Vec2::Zero());
  static Domain2D ellipse(double a, double b, Vec2 offset = Vec2::Zero());
  static Domain2D perturbed_disk(double R, double eps, int k, Vec2 offset = Vec2::Zero());
  /// Vertices are taken relative to their centroid; the polygon must be
  /// star-shaped about it.
  static Domain2D polygon(std::vector<Vec2> vertices, Vec2 offset = Vec2::Zero());

  /// Throws Error::Kind::Domain when an invariant fails.
  void validate() const;
  /// Additional check for Poincare-disk use: max |x| <= 1 - margin.
  void validate_in_unit_disk(double margin) const;

  /// Boundary radius about the reference center.
  double boundary_radius(double theta) const;
  /// Reference center in absolute coordinates (offset included).
  Vec2 center() const;
  Vec2 boundary_point(double theta) const;
  /// Point on the boundary along the ray from center() through x.
  Vec2 project_to_boundary(const Vec2& x) const;
  /// Largest Euclidean distance of the closure from the origin (sampled).
  double max_abs() const;
  /// A disk about the weight origin, including degenerate ellipses and
  /// zero-amplitude perturbations.
  bool is_centered_disk() const;
  /// Invariance under x -> -x and y -> -y about the weight origin.
  bool dihedral_symmetric(double tol = 1e-12) const;
  std::string id() const;
};

/// Planar triangulation with a single counterclockwise boundary loop.
struct TriMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;   // counterclockwise
  std::vector<std::array<int, 2>> boundary_edges;  // counterclockwise loop
  /// Per boundary edge: true when the edge lies on a straight segment that
  /// must not be re-projected (the symmetry axis of a meridian mesh).
  std::vector<bool> straight_edge;
  double h = 0.0;  // max edge length
  /// Maps a new boundary midpoint onto the exact curve (empty: keep chords).
  std::function<Vec2(const Vec2&)> projector;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_triangles() const { return triangles.size(); }
  double signed_area(std::size_t tri) const;
  double min_angle_degrees() const;
  std::size_t num_edges() const;
  /// Boundary node list in loop order.
  std::vector<int> boundary_nodes() const;
  void update_h();
};

struct MeshOptions {
  double min_angle_degrees = 15.0;
  /// Coarsen inner rings while the coarsened arc stays below this multiple
  /// of the ring spacing (0 disables coarsening).
  double ring_coarsening_ratio = 1.5;
  int min_ring_sectors = 8;
};

/// Mapped polar grid: ring j at radius fraction j/M along rays scaled by
/// r(theta); inner rings coarsened by halving the sector count while cells
/// stay near-isotropic; each quad split into two triangles with the
/// diagonal mirrored across the coordinate axes.
TriMesh generate_mesh(const Domain2D& dom, int rings, int sectors, const MeshOptions& opt = {});

/// Uniform 4-way split; boundary midpoints re-projected when the mesh
/// carries a projector.
TriMesh refine(const TriMesh& mesh);

/// Throws Error::Kind::MeshQuality on a violated invariant.
void check_mesh(const TriMesh& mesh, double min_angle_degrees);

struct MeshMeasures {
  double weighted_area = 0.0;
  double weighted_boundary_length = 0.0;
};

/// Weighted area (edge-midpoint rule) and boundary length (2-point Gauss);
/// the hyperbolic case measures in the Poincare disk with the exact
/// distance from the origin.
MeshMeasures mesh_measures(const TriMesh& mesh, const SpaceForm& form, const RadialWeight& w);

/// Plain-text mesh format: "V T B" header, vertex lines "x y", triangle
/// lines "i j k", boundary edge lines "i j", zero-based.
void write_mesh(std::ostream& os, const TriMesh& mesh);
TriMesh read_mesh(std::istream& is);

/// Radial distance t(x) from the weight origin in the given model.
double radial_distance(const SpaceForm& form, const Vec2& x);
/// Volume density factor (rho^2 in the Poincare disk, 1 otherwise) and the
/// boundary length factor (rho or 1).
double area_factor(const SpaceForm& form, const Vec2& x);
double length_factor(const SpaceForm& form, const Vec2& x);

namespace detail {

// Generic mapped polar construction shared by planar and meridian meshes.
struct PolarSpec {
  std::function<double(double)> radius;  // boundary radius r(theta)
  Vec2 center = Vec2::Zero();
  double theta_begin = 0.0;
  double span = 2.0 * kPi;
  bool closed = true;  // periodic in theta; otherwise the end rays are straight boundary
  // true selects the (inner l, outer l+1) diagonal for the sector at mid angle theta
  std::function<bool(double)> diagonal;
};

TriMesh polar_mesh(const PolarSpec& spec, int rings, int sectors, const MeshOptions& opt);

}  // namespace detail

}  // namespace steklov
