#include "steklov/axisym3d.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <tuple>

#include "steklov/quadrature.hpp"

namespace steklov {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::vector<bool> axis_flags(const TriMesh& mesh) {
  std::vector<bool> axis(mesh.num_vertices(), false);
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e)
    if (mesh.straight_edge[e]) axis[mesh.boundary_edges[e][0]] = axis[mesh.boundary_edges[e][1]] = true;
  return axis;
}

// Outer curve nodes from the south pole to the north pole.
std::vector<int> outer_nodes(const TriMesh& mesh) {
  std::vector<int> nodes;
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    if (mesh.straight_edge[e]) continue;
    if (nodes.empty()) nodes.push_back(mesh.boundary_edges[e][0]);
    nodes.push_back(mesh.boundary_edges[e][1]);
  }
  return nodes;
}

}  // namespace

MeridianDomain MeridianDomain::ball(double R) {
  MeridianDomain d;
  d.R = R;
  d.validate();
  return d;
}

MeridianDomain MeridianDomain::spheroid(double a, double c) {
  MeridianDomain d;
  d.kind = Kind::Spheroid;
  d.a = a;
  d.c = c;
  d.validate();
  return d;
}

MeridianDomain MeridianDomain::perturbed_ball(double R, double eps, int k) {
  MeridianDomain d;
  d.kind = Kind::PerturbedBall;
  d.R = R;
  d.eps = eps;
  d.k = k;
  d.validate();
  return d;
}

void MeridianDomain::validate() const {
  auto fail = [](const std::string& msg) { throw Error(Error::Kind::Domain, msg); };
  switch (kind) {
    case Kind::Ball:
      if (!(R > 0.0)) fail("ball radius must be positive");
      break;
    case Kind::Spheroid:
      if (!(a > 0.0 && c > 0.0)) fail("spheroid semi-axes must be positive");
      break;
    case Kind::PerturbedBall:
      if (!(R > 0.0)) fail("perturbed ball radius must be positive");
      if (k < 0) fail("perturbed ball wave number must be >= 0");
      if (!(std::abs(eps) * k < 1.0 && std::abs(eps) < 1.0))
        fail("perturbed ball needs |epsilon| * k < 1 (got epsilon = " + num(eps) + ", k = " + std::to_string(k) + ")");
      break;
  }
}

double MeridianDomain::boundary_radius(double th) const {
  switch (kind) {
    case Kind::Ball: return R;
    case Kind::Spheroid: {
      const double u = std::cos(th) / a, v = std::sin(th) / c;
      return 1.0 / std::sqrt(u * u + v * v);
    }
    case Kind::PerturbedBall: return R * (1.0 + eps * std::cos(k * th));
  }
  return R;
}

std::string MeridianDomain::id() const {
  switch (kind) {
    case Kind::Ball: return "ball(R=" + num(R) + ")";
    case Kind::Spheroid: return "spheroid(a=" + num(a) + ",c=" + num(c) + ")";
    case Kind::PerturbedBall:
      return "perturbed-ball(R=" + num(R) + ",eps=" + num(eps) + ",k=" + std::to_string(k) + ")";
  }
  return "";
}

TriMesh meridian_mesh(const MeridianDomain& dom, int rings, int sectors, const MeshOptions& opt) {
  dom.validate();
  if (rings < 2 || sectors < 4 || sectors % 2 != 0)
    throw Error(Error::Kind::Domain, "meridian mesh needs rings >= 2 and an even sector count >= 4");
  detail::PolarSpec spec;
  spec.radius = [dom](double th) { return dom.boundary_radius(th); };
  spec.theta_begin = -kPi / 2;
  spec.span = kPi;
  spec.closed = false;
  spec.diagonal = [](double th) { return std::sin(th) > 0.0; };
  TriMesh mesh = detail::polar_mesh(spec, rings, sectors, opt);
  const auto axis = axis_flags(mesh);
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
    if (axis[v]) mesh.vertices[v].x() = 0.0;
  mesh.projector = [dom](const Vec2& x) {
    const double th = std::atan2(x.y(), x.x());
    return Vec2(dom.boundary_radius(th) * Vec2(std::cos(th), std::sin(th)));
  };
  check_mesh(mesh, opt.min_angle_degrees);
  return mesh;
}

AssembledSystem assemble_mode(const TriMesh& mesh, const RadialWeight& w, int m) {
  if (m < 0) throw Error(Error::Kind::Domain, "azimuthal mode must be >= 0");
  if (mesh.straight_edge.size() != mesh.boundary_edges.size())
    throw Error(Error::Kind::Domain, "meridian mesh lacks axis flags");
  const int n = static_cast<int>(mesh.num_vertices());
  for (const auto& v : mesh.vertices)
    if (v.x() < 0.0) throw Error(Error::Kind::Domain, "meridian mesh has r < 0");

  const TriangleRule& rule = triangle_rule(7);
  const double m2 = static_cast<double>(m) * m;
  std::vector<Triplet> kt;
  kt.reserve(9 * mesh.num_triangles());
  for (std::size_t e = 0; e < mesh.num_triangles(); ++e) {
    const auto& t = mesh.triangles[e];
    const Vec2 &p0 = mesh.vertices[t[0]], &p1 = mesh.vertices[t[1]], &p2 = mesh.vertices[t[2]];
    const double area = mesh.signed_area(e);
    if (!(area > 0.0)) throw Error(Error::Kind::Domain, "degenerate triangle " + std::to_string(e));
    double grad_w = 0.0;  // int e^{-phi} r
    Eigen::Matrix3d mass_w = Eigen::Matrix3d::Zero();  // int e^{-phi} lambda_a lambda_b / r
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const auto& b = rule.points[q];
      const Vec2 x = b[0] * p0 + b[1] * p1 + b[2] * p2;
      const double r = x.x();
      if (m > 0 && !(r > 0.0)) throw Error(Error::Kind::Quadrature, "quadrature point on the axis");
      const double dens = w.density(x.norm());
      grad_w += rule.weights[q] * dens * r;
      if (m > 0)
        for (int a = 0; a < 3; ++a)
          for (int c = 0; c < 3; ++c) mass_w(a, c) += rule.weights[q] * dens * b[a] * b[c] / r;
    }
    grad_w *= area;
    mass_w *= area;
    const std::array<Vec2, 3> edge = {p2 - p1, p0 - p2, p1 - p0};
    for (int a = 0; a < 3; ++a)
      for (int c = 0; c < 3; ++c)
        kt.emplace_back(t[a], t[c], grad_w * edge[a].dot(edge[c]) / (4.0 * area * area) + m2 * mass_w(a, c));
  }
  AssembledSystem sys;
  sys.stiffness.resize(n, n);
  sys.stiffness.setFromTriplets(kt.begin(), kt.end());

  std::vector<Triplet> mt;
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    if (mesh.straight_edge[e]) continue;
    const auto [i, j] = mesh.boundary_edges[e];
    const Vec2 &p = mesh.vertices[i], &q = mesh.vertices[j];
    const double len = (q - p).norm();
    double m00 = 0, m01 = 0, m11 = 0;
    for (double s : kGauss2Nodes) {
      const Vec2 x = p + s * (q - p);
      const double f = 0.5 * len * w.density(x.norm()) * x.x();
      m00 += f * (1 - s) * (1 - s);
      m01 += f * (1 - s) * s;
      m11 += f * s * s;
    }
    mt.emplace_back(i, i, m00);
    mt.emplace_back(i, j, m01);
    mt.emplace_back(j, i, m01);
    mt.emplace_back(j, j, m11);
  }
  sys.boundary_mass.resize(n, n);
  sys.boundary_mass.setFromTriplets(mt.begin(), mt.end());

  const auto axis = axis_flags(mesh);
  for (int v : outer_nodes(mesh))
    if (m == 0 || !axis[v]) sys.boundary_index.push_back(v);
  if (m > 0)
    for (int v = 0; v < n; ++v)
      if (axis[v]) sys.fixed_nodes.push_back(v);
  return sys;
}

MeshMeasures axisym_measures(const TriMesh& mesh, const RadialWeight& w) {
  MeshMeasures out;
  const TriangleRule& rule = triangle_rule(7);
  for (std::size_t e = 0; e < mesh.num_triangles(); ++e) {
    const auto& t = mesh.triangles[e];
    double s = 0.0;
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const auto& b = rule.points[q];
      const Vec2 x = b[0] * mesh.vertices[t[0]] + b[1] * mesh.vertices[t[1]] + b[2] * mesh.vertices[t[2]];
      s += rule.weights[q] * w.density(x.norm()) * x.x();
    }
    out.weighted_area += 2 * kPi * mesh.signed_area(e) * s;
  }
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    if (mesh.straight_edge[e]) continue;
    const Vec2 &p = mesh.vertices[mesh.boundary_edges[e][0]], &q = mesh.vertices[mesh.boundary_edges[e][1]];
    for (double s : kGauss2Nodes) {
      const Vec2 x = p + s * (q - p);
      out.weighted_boundary_length += 2 * kPi * 0.5 * (q - p).norm() * w.density(x.norm()) * x.x();
    }
  }
  return out;
}

SteklovSpectrum solve_axisym_spectrum(const TriMesh& mesh, const RadialWeight& w, int k,
                                      const std::vector<int>& modes, const std::string& domain_id) {
  if (k < 1) throw Error(Error::Kind::Domain, "need k >= 1");
  if (std::find(modes.begin(), modes.end(), 0) == modes.end())
    throw Error(Error::Kind::Domain, "mode 0 is required for the zero eigenvalue");
  // (value, mode, copy)
  std::vector<std::tuple<double, int, int>> all;
  int boundary_nodes = 0;
  for (int m : modes) {
    const auto dtn = dtn_reduce(assemble_mode(mesh, w, m));
    const int avail = static_cast<int>(dtn.mass.rows());
    const int want = std::min(m == 0 ? k + 1 : k, avail);
    const auto s = solve_spectrum(dtn.schur, dtn.mass, want - 1);
    if (m == 0) boundary_nodes = avail;
    for (double v : s.eigenvalues)
      for (int copy = 0; copy < (m == 0 ? 1 : 2); ++copy) all.emplace_back(v, m, copy);
  }
  std::stable_sort(all.begin(), all.end());
  SteklovSpectrum spec;
  for (int i = 0; i <= k && i < static_cast<int>(all.size()); ++i) {
    spec.eigenvalues.push_back(std::get<0>(all[i]));
    spec.modes.push_back(std::get<1>(all[i]));
  }
  spec.meta.method = "axisym-p1-dtn";
  spec.meta.domain = domain_id;
  spec.meta.weight = w.id();
  spec.meta.curvature = Curvature::Euclidean;
  spec.meta.dim = 3;
  spec.meta.h = mesh.h;
  spec.meta.boundary_nodes = boundary_nodes;
  spec.meta.nodes = static_cast<int>(mesh.num_vertices());
  return spec;
}

}  // namespace steklov
