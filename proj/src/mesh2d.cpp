#include "steklov/mesh2d.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace steklov {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

double cross(const Vec2& u, const Vec2& v) { return u.x() * v.y() - u.y() * v.x(); }

}  // namespace

// --- Domain2D -------------------------------------------------------------------

Domain2D Domain2D::disk(double R, Vec2 offset) {
  Domain2D d;
  d.kind = Kind::Disk;
  d.R = R;
  d.center_offset = offset;
  d.validate();
  return d;
}

Domain2D Domain2D::ellipse(double a, double b, Vec2 offset) {
  Domain2D d;
  d.kind = Kind::Ellipse;
  d.a = a;
  d.b = b;
  d.center_offset = offset;
  d.validate();
  return d;
}

Domain2D Domain2D::perturbed_disk(double R, double eps, int k, Vec2 offset) {
  Domain2D d;
  d.kind = Kind::PerturbedDisk;
  d.R = R;
  d.eps = eps;
  d.k = k;
  d.center_offset = offset;
  d.validate();
  return d;
}

Domain2D Domain2D::polygon(std::vector<Vec2> vertices, Vec2 offset) {
  if (vertices.size() < 3) throw Error(Error::Kind::Domain, "polygon needs at least 3 vertices");
  // area centroid
  double area = 0.0;
  Vec2 c = Vec2::Zero();
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const Vec2& p = vertices[i];
    const Vec2& q = vertices[(i + 1) % vertices.size()];
    const double w = cross(p, q);
    area += 0.5 * w;
    c += w * (p + q) / 6.0;
  }
  if (!(area > 0.0)) throw Error(Error::Kind::Domain, "polygon must be counterclockwise with positive area");
  c /= area;
  Domain2D d;
  d.kind = Kind::Polygon;
  for (auto& v : vertices) v -= c;
  d.vertices = std::move(vertices);
  d.center_offset = offset + c;
  d.validate();
  return d;
}

void Domain2D::validate() const {
  auto fail = [](const std::string& msg) { throw Error(Error::Kind::Domain, msg); };
  switch (kind) {
    case Kind::Disk:
      if (!(R > 0.0)) fail("disk radius must be positive");
      break;
    case Kind::Ellipse:
      if (!(a > 0.0 && b > 0.0)) fail("ellipse semi-axes must be positive");
      break;
    case Kind::PerturbedDisk:
      if (!(R > 0.0)) fail("perturbed disk radius must be positive");
      if (k < 0) fail("perturbed disk wave number must be >= 0");
      if (!(std::abs(eps) * k < 1.0))
        fail("perturbed disk needs |epsilon| * k < 1 for a star-shaped boundary (got epsilon = " + num(eps) +
             ", k = " + std::to_string(k) + ")");
      if (!(std::abs(eps) < 1.0)) fail("perturbed disk needs |epsilon| < 1");
      break;
    case Kind::Polygon:
      if (vertices.size() < 3) fail("polygon needs at least 3 vertices");
      for (std::size_t i = 0; i < vertices.size(); ++i) {
        if (!(cross(vertices[i], vertices[(i + 1) % vertices.size()]) > 0.0))
          fail("polygon is not strictly star-shaped about its centroid (edge " + std::to_string(i) + ")");
      }
      break;
  }
  if (!center_offset.allFinite()) fail("domain offset must be finite");
}

void Domain2D::validate_in_unit_disk(double margin) const {
  const double m = max_abs();
  if (!(m <= 1.0 - margin))
    throw Error(Error::Kind::Domain, "domain " + id() + " reaches |x| = " + num(m) +
                                         ", outside the Poincare disk margin 1 - " + num(margin));
}

double Domain2D::boundary_radius(double theta) const {
  switch (kind) {
    case Kind::Disk: return R;
    case Kind::Ellipse: {
      const double c = std::cos(theta) / a, s = std::sin(theta) / b;
      return 1.0 / std::sqrt(c * c + s * s);
    }
    case Kind::PerturbedDisk: return R * (1.0 + eps * std::cos(k * theta));
    case Kind::Polygon: {
      const Vec2 d(std::cos(theta), std::sin(theta));
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < vertices.size(); ++i) {
        const Vec2& p = vertices[i];
        const Vec2 e = vertices[(i + 1) % vertices.size()] - p;
        const double den = cross(d, e);
        if (std::abs(den) < 1e-300) continue;
        const double s = cross(p, e) / den;   // distance along the ray
        const double u = cross(p, d) / den;   // edge parameter
        if (s > 0.0 && u >= -1e-12 && u <= 1.0 + 1e-12) best = std::min(best, s);
      }
      return best;
    }
  }
  return R;
}

Vec2 Domain2D::center() const { return center_offset; }

Vec2 Domain2D::boundary_point(double theta) const {
  return center() + boundary_radius(theta) * Vec2(std::cos(theta), std::sin(theta));
}

Vec2 Domain2D::project_to_boundary(const Vec2& x) const {
  const Vec2 d = x - center();
  return boundary_point(std::atan2(d.y(), d.x()));
}

double Domain2D::max_abs() const {
  double m = 0.0;
  constexpr int samples = 4096;
  for (int l = 0; l < samples; ++l) m = std::max(m, boundary_point(2 * kPi * l / samples).norm());
  if (kind == Kind::Polygon)
    for (const auto& v : vertices) m = std::max(m, (v + center()).norm());
  return m;
}

bool Domain2D::is_centered_disk() const {
  if (center_offset.norm() != 0.0) return false;
  switch (kind) {
    case Kind::Disk: return true;
    case Kind::Ellipse: return a == b;
    case Kind::PerturbedDisk: return eps == 0.0 || k == 0;
    case Kind::Polygon: return false;
  }
  return false;
}

bool Domain2D::dihedral_symmetric(double tol) const {
  if (center().norm() > tol) return false;
  constexpr int samples = 720;
  for (int l = 0; l < samples; ++l) {
    const double th = 2 * kPi * (l + 0.37) / samples;
    const double r = boundary_radius(th);
    if (std::abs(boundary_radius(-th) - r) > tol * std::max(1.0, r)) return false;
    if (std::abs(boundary_radius(kPi - th) - r) > tol * std::max(1.0, r)) return false;
  }
  return true;
}

std::string Domain2D::id() const {
  std::string s;
  switch (kind) {
    case Kind::Disk: s = "disk(R=" + num(R) + ")"; break;
    case Kind::Ellipse: s = "ellipse(a=" + num(a) + ",b=" + num(b) + ")"; break;
    case Kind::PerturbedDisk: s = "perturbed(R=" + num(R) + ",eps=" + num(eps) + ",k=" + std::to_string(k) + ")"; break;
    case Kind::Polygon: s = "polygon(" + std::to_string(vertices.size()) + ")"; break;
  }
  if (center_offset.norm() > 0.0 && kind != Kind::Polygon)
    s += "@(" + num(center_offset.x()) + "," + num(center_offset.y()) + ")";
  return s;
}

// --- TriMesh ------------------------------------------------------------------------

double TriMesh::signed_area(std::size_t tri) const {
  const auto& t = triangles[tri];
  return 0.5 * cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]);
}

double TriMesh::min_angle_degrees() const {
  double best = 180.0;
  for (const auto& t : triangles) {
    for (int c = 0; c < 3; ++c) {
      const Vec2 u = vertices[t[(c + 1) % 3]] - vertices[t[c]];
      const Vec2 v = vertices[t[(c + 2) % 3]] - vertices[t[c]];
      const double ang = std::atan2(std::abs(cross(u, v)), u.dot(v)) * 180.0 / kPi;
      best = std::min(best, ang);
    }
  }
  return best;
}

std::size_t TriMesh::num_edges() const {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(3 * triangles.size());
  for (const auto& t : triangles)
    for (int c = 0; c < 3; ++c) edges.emplace_back(std::minmax(t[c], t[(c + 1) % 3]));
  std::sort(edges.begin(), edges.end());
  return static_cast<std::size_t>(std::unique(edges.begin(), edges.end()) - edges.begin());
}

std::vector<int> TriMesh::boundary_nodes() const {
  std::vector<int> nodes;
  nodes.reserve(boundary_edges.size());
  for (const auto& e : boundary_edges) nodes.push_back(e[0]);
  return nodes;
}

void TriMesh::update_h() {
  h = 0.0;
  for (const auto& t : triangles)
    for (int c = 0; c < 3; ++c) h = std::max(h, (vertices[t[c]] - vertices[t[(c + 1) % 3]]).norm());
}

void check_mesh(const TriMesh& mesh, double min_angle_degrees) {
  auto fail = [](const std::string& msg) { throw Error(Error::Kind::MeshQuality, msg); };
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i)
    if (!(mesh.signed_area(i) > 0.0)) fail("triangle " + std::to_string(i) + " has non-positive signed area");

  std::map<std::pair<int, int>, int> count;
  for (const auto& t : mesh.triangles)
    for (int c = 0; c < 3; ++c) ++count[std::minmax(t[c], t[(c + 1) % 3])];
  std::size_t open_edges = 0;
  for (const auto& [e, c] : count) {
    if (c > 2) fail("edge shared by more than two triangles");
    if (c == 1) ++open_edges;
  }
  if (open_edges != mesh.boundary_edges.size()) fail("boundary edge list does not match the triangulation");
  const auto& be = mesh.boundary_edges;
  for (std::size_t i = 0; i < be.size(); ++i) {
    if (count[std::minmax(be[i][0], be[i][1])] != 1) fail("boundary edge not owned by exactly one triangle");
    if (be[i][1] != be[(i + 1) % be.size()][0]) fail("boundary edges do not form a single closed loop");
  }
  const double ang = mesh.min_angle_degrees();
  if (ang < min_angle_degrees)
    fail("minimum triangle angle " + num(ang) + " deg below the floor " + num(min_angle_degrees) +
         " deg; increase rings or sectors");
}

// --- construction -------------------------------------------------------------------

TriMesh detail::polar_mesh(const PolarSpec& spec, int rings, int sectors, const MeshOptions& opt) {
  if (rings < 2) throw Error(Error::Kind::Domain, "mesh needs at least 2 rings");
  if (sectors < (spec.closed ? 8 : 4)) throw Error(Error::Kind::Domain, "too few sectors");

  const int M = rings;
  std::vector<int> count(M + 1, sectors);  // sector count per ring
  const int min_sectors =
      std::max(2, static_cast<int>(std::lround(opt.min_ring_sectors * spec.span / (2.0 * kPi))));
  for (int j = M - 1; j >= 1; --j) {
    count[j] = count[j + 1];
    if (opt.ring_coarsening_ratio > 0.0 && count[j] % 2 == 0 && count[j] / 2 >= min_sectors &&
        spec.span * j / (count[j] / 2) <= opt.ring_coarsening_ratio)
      count[j] /= 2;
  }

  TriMesh mesh;
  mesh.vertices.push_back(spec.center);
  std::vector<std::vector<int>> ring(M + 1);
  ring[0] = {0};
  for (int j = 1; j <= M; ++j) {
    const int nodes = spec.closed ? count[j] : count[j] + 1;
    for (int l = 0; l < nodes; ++l) {
      const double th = spec.theta_begin + spec.span * l / count[j];
      const double r = spec.radius(th) * (j == M ? 1.0 : static_cast<double>(j) / M);
      ring[j].push_back(static_cast<int>(mesh.vertices.size()));
      mesh.vertices.push_back(spec.center + r * Vec2(std::cos(th), std::sin(th)));
    }
  }
  auto node = [&](int j, int l) {
    const auto& r = ring[j];
    return r[spec.closed ? l % static_cast<int>(r.size()) : l];
  };
  auto mid_angle = [&](int j, int l) { return spec.theta_begin + spec.span * (l + 0.5) / count[j]; };

  for (int l = 0; l < count[1]; ++l) mesh.triangles.push_back({0, node(1, l), node(1, l + 1)});
  for (int j = 2; j <= M; ++j) {
    if (count[j] == count[j - 1]) {
      for (int l = 0; l < count[j]; ++l) {
        const int a = node(j - 1, l), b = node(j - 1, l + 1), c = node(j, l + 1), d = node(j, l);
        if (spec.diagonal(mid_angle(j, l))) {
          mesh.triangles.push_back({a, d, c});
          mesh.triangles.push_back({a, c, b});
        } else {
          mesh.triangles.push_back({a, d, b});
          mesh.triangles.push_back({b, d, c});
        }
      }
    } else {
      for (int l = 0; l < count[j - 1]; ++l) {
        const int i0 = node(j - 1, l), i1 = node(j - 1, l + 1);
        const int o0 = node(j, 2 * l), o1 = node(j, 2 * l + 1), o2 = node(j, 2 * l + 2);
        mesh.triangles.push_back({i0, o0, o1});
        mesh.triangles.push_back({i0, o1, i1});
        mesh.triangles.push_back({i1, o1, o2});
      }
    }
  }

  for (int l = 0; l < count[M]; ++l) {
    mesh.boundary_edges.push_back({node(M, l), node(M, l + 1)});
    mesh.straight_edge.push_back(false);
  }
  if (!spec.closed) {
    // down the end ray to the center, then up the begin ray
    for (int j = M; j >= 1; --j) {
      mesh.boundary_edges.push_back({ring[j].back(), ring[j - 1].back()});
      mesh.straight_edge.push_back(true);
    }
    for (int j = 0; j < M; ++j) {
      mesh.boundary_edges.push_back({ring[j].front(), ring[j + 1].front()});
      mesh.straight_edge.push_back(true);
    }
  }
  mesh.update_h();
  return mesh;
}

TriMesh generate_mesh(const Domain2D& dom, int rings, int sectors, const MeshOptions& opt) {
  dom.validate();
  if (rings < 2 || sectors < 8)
    throw Error(Error::Kind::Domain, "generate_mesh needs rings >= 2 and sectors >= 8");
  detail::PolarSpec spec;
  spec.radius = [dom](double th) { return dom.boundary_radius(th); };
  spec.center = dom.center();
  spec.diagonal = [](double th) { return std::sin(2.0 * th) > 0.0; };
  TriMesh mesh = detail::polar_mesh(spec, rings, sectors, opt);
  mesh.projector = [dom](const Vec2& x) { return dom.project_to_boundary(x); };
  check_mesh(mesh, opt.min_angle_degrees);
  return mesh;
}

TriMesh refine(const TriMesh& mesh) {
  TriMesh out;
  out.vertices = mesh.vertices;
  out.projector = mesh.projector;
  std::map<std::pair<int, int>, int> mid;
  auto midpoint = [&](int i, int j) {
    const auto key = std::minmax(i, j);
    auto it = mid.find(key);
    if (it != mid.end()) return it->second;
    const int id = static_cast<int>(out.vertices.size());
    out.vertices.push_back(0.5 * (mesh.vertices[i] + mesh.vertices[j]));
    mid.emplace(key, id);
    return id;
  };
  out.triangles.reserve(4 * mesh.triangles.size());
  for (const auto& t : mesh.triangles) {
    const int m01 = midpoint(t[0], t[1]), m12 = midpoint(t[1], t[2]), m20 = midpoint(t[2], t[0]);
    out.triangles.push_back({t[0], m01, m20});
    out.triangles.push_back({t[1], m12, m01});
    out.triangles.push_back({t[2], m20, m12});
    out.triangles.push_back({m01, m12, m20});
  }
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto [i, j] = mesh.boundary_edges[e];
    const int m = midpoint(i, j);
    const bool straight = e < mesh.straight_edge.size() && mesh.straight_edge[e];
    if (!straight && out.projector) out.vertices[m] = out.projector(out.vertices[m]);
    out.boundary_edges.push_back({i, m});
    out.boundary_edges.push_back({m, j});
    out.straight_edge.push_back(straight);
    out.straight_edge.push_back(straight);
  }
  out.update_h();
  return out;
}

// --- measures -------------------------------------------------------------------------

double radial_distance(const SpaceForm& form, const Vec2& x) {
  return form.curvature == Curvature::Hyperbolic ? poincare_distance(x) : x.norm();
}

double area_factor(const SpaceForm& form, const Vec2& x) {
  if (form.curvature != Curvature::Hyperbolic) return 1.0;
  const double rho = conformal_factor(x);
  return rho * rho;
}

double length_factor(const SpaceForm& form, const Vec2& x) {
  return form.curvature == Curvature::Hyperbolic ? conformal_factor(x) : 1.0;
}

MeshMeasures mesh_measures(const TriMesh& mesh, const SpaceForm& form, const RadialWeight& w) {
  if (form.dim != 2 || form.curvature == Curvature::SphericalCap)
    throw Error(Error::Kind::Domain, "mesh_measures supports Euclidean or hyperbolic n = 2");
  MeshMeasures m;
  auto density = [&](const Vec2& x) { return w.density(radial_distance(form, x)); };
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    const auto& t = mesh.triangles[i];
    const Vec2 &p0 = mesh.vertices[t[0]], &p1 = mesh.vertices[t[1]], &p2 = mesh.vertices[t[2]];
    double sum = 0.0;
    for (const Vec2& q : {Vec2(0.5 * (p0 + p1)), Vec2(0.5 * (p1 + p2)), Vec2(0.5 * (p2 + p0))})
      sum += density(q) * area_factor(form, q);
    m.weighted_area += mesh.signed_area(i) * sum / 3.0;
  }
  for (const auto& e : mesh.boundary_edges) {
    const Vec2 &p = mesh.vertices[e[0]], &q = mesh.vertices[e[1]];
    const double len = (q - p).norm();
    for (double s : kGauss2Nodes) {
      const Vec2 x = p + s * (q - p);
      m.weighted_boundary_length += 0.5 * len * density(x) * length_factor(form, x);
    }
  }
  return m;
}

// --- I/O --------------------------------------------------------------------------------

void write_mesh(std::ostream& os, const TriMesh& mesh) {
  os << mesh.vertices.size() << " " << mesh.triangles.size() << " " << mesh.boundary_edges.size() << "\n";
  os << std::setprecision(17);
  for (const auto& v : mesh.vertices) os << v.x() << " " << v.y() << "\n";
  for (const auto& t : mesh.triangles) os << t[0] << " " << t[1] << " " << t[2] << "\n";
  for (const auto& e : mesh.boundary_edges) os << e[0] << " " << e[1] << "\n";
}

TriMesh read_mesh(std::istream& is) {
  TriMesh mesh;
  std::size_t V, T, B;
  if (!(is >> V >> T >> B)) throw Error(Error::Kind::Io, "mesh: bad header, expected 'V T B'");
  mesh.vertices.resize(V);
  mesh.triangles.resize(T);
  mesh.boundary_edges.resize(B);
  for (auto& v : mesh.vertices)
    if (!(is >> v.x() >> v.y())) throw Error(Error::Kind::Io, "mesh: truncated vertex block");
  auto index = [&](int i) {
    if (i < 0 || static_cast<std::size_t>(i) >= V) throw Error(Error::Kind::Io, "mesh: index out of range");
    return i;
  };
  for (auto& t : mesh.triangles) {
    if (!(is >> t[0] >> t[1] >> t[2])) throw Error(Error::Kind::Io, "mesh: truncated triangle block");
    for (int& i : t) index(i);
  }
  for (auto& e : mesh.boundary_edges) {
    if (!(is >> e[0] >> e[1])) throw Error(Error::Kind::Io, "mesh: truncated boundary block");
    index(e[0]);
    index(e[1]);
  }
  mesh.straight_edge.assign(B, false);
  mesh.update_h();
  return mesh;
}

}  // namespace steklov
