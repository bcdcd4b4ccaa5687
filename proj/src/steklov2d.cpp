#include "steklov/steklov2d.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCholesky>

#include "steklov/quadrature.hpp"

namespace steklov {

AssembledSystem assemble(const TriMesh& mesh, const SpaceForm& form, const RadialWeight& w,
                         const AssemblyOptions& opt) {
  if (form.dim != 2 || form.curvature == Curvature::SphericalCap)
    throw Error(Error::Kind::Domain, "2-D assembly supports Euclidean or hyperbolic n = 2");
  if (opt.weight_points != 1 && opt.weight_points != 3)
    throw Error(Error::Kind::Domain, "weight_points must be 1 or 3");
  const int n = static_cast<int>(mesh.num_vertices());
  if (form.curvature == Curvature::Hyperbolic)
    for (const auto& v : mesh.vertices)
      if (!(v.norm() < 1.0)) throw Error(Error::Kind::Domain, "hyperbolic mesh must lie inside the unit disk");

  const TriangleRule& rule = triangle_rule(opt.weight_points);
  std::vector<Triplet> kt;
  kt.reserve(9 * mesh.num_triangles());
  for (std::size_t e = 0; e < mesh.num_triangles(); ++e) {
    const auto& t = mesh.triangles[e];
    const Vec2 &p0 = mesh.vertices[t[0]], &p1 = mesh.vertices[t[1]], &p2 = mesh.vertices[t[2]];
    const double area = mesh.signed_area(e);
    if (!(area > 0.0)) throw Error(Error::Kind::Domain, "degenerate triangle " + std::to_string(e));
    double wbar = 0.0;
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const auto& b = rule.points[q];
      const Vec2 x = b[0] * p0 + b[1] * p1 + b[2] * p2;
      wbar += rule.weights[q] * w.density(radial_distance(form, x));
    }
    // gradients of barycentric coordinates: rotated opposite edges / (2A)
    const std::array<Vec2, 3> edge = {p2 - p1, p0 - p2, p1 - p0};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        kt.emplace_back(t[a], t[b], wbar * edge[a].dot(edge[b]) / (4.0 * area));
  }
  AssembledSystem sys;
  sys.stiffness.resize(n, n);
  sys.stiffness.setFromTriplets(kt.begin(), kt.end());

  std::vector<Triplet> mt;
  for (const auto& e : mesh.boundary_edges) {
    const Vec2 &p = mesh.vertices[e[0]], &q = mesh.vertices[e[1]];
    const double len = (q - p).norm();
    if (!(len > 0.0)) throw Error(Error::Kind::Domain, "zero-length boundary edge");
    double m00 = 0, m01 = 0, m11 = 0;
    for (double s : kGauss2Nodes) {
      const Vec2 x = p + s * (q - p);
      const double f = 0.5 * len * w.density(radial_distance(form, x)) * length_factor(form, x);
      m00 += f * (1 - s) * (1 - s);
      m01 += f * (1 - s) * s;
      m11 += f * s * s;
    }
    mt.emplace_back(e[0], e[0], m00);
    mt.emplace_back(e[0], e[1], m01);
    mt.emplace_back(e[1], e[0], m01);
    mt.emplace_back(e[1], e[1], m11);
  }
  sys.boundary_mass.resize(n, n);
  sys.boundary_mass.setFromTriplets(mt.begin(), mt.end());
  sys.boundary_index = mesh.boundary_nodes();
  return sys;
}

DtnSystem dtn_reduce(const AssembledSystem& sys) {
  const int n = static_cast<int>(sys.stiffness.rows());
  // local numbering: -1 fixed, boundary 0..nb-1, interior 0..ni-1
  std::vector<int> role(n, 0), local(n, -1);
  for (int v : sys.fixed_nodes) role[v] = -1;
  int nb = 0, ni = 0;
  for (int v : sys.boundary_index) {
    if (role[v] == -1) throw Error(Error::Kind::Domain, "boundary node is also fixed");
    role[v] = 1;
    local[v] = nb++;
  }
  for (int v = 0; v < n; ++v)
    if (role[v] == 0) local[v] = ni++;
  if (nb == 0) throw Error(Error::Kind::Domain, "no boundary nodes");

  std::vector<Triplet> tii, tib;
  Mat Kbb = Mat::Zero(nb, nb);
  for (int c = 0; c < n; ++c) {
    for (SpMat::InnerIterator it(sys.stiffness, c); it; ++it) {
      const int r = static_cast<int>(it.row());
      if (role[r] == -1 || role[c] == -1) continue;
      if (role[r] == 1 && role[c] == 1) Kbb(local[r], local[c]) += it.value();
      else if (role[r] == 0 && role[c] == 0) tii.emplace_back(local[r], local[c], it.value());
      else if (role[r] == 0 && role[c] == 1) tib.emplace_back(local[r], local[c], it.value());
    }
  }
  DtnSystem out;
  out.schur = Kbb;
  if (ni > 0) {
    SpMat Kii(ni, ni), Kib(ni, nb);
    Kii.setFromTriplets(tii.begin(), tii.end());
    Kib.setFromTriplets(tib.begin(), tib.end());
    Eigen::SimplicialLDLT<SpMat> ldlt(Kii);
    if (ldlt.info() != Eigen::Success)
      throw Error(Error::Kind::Factorization, "interior stiffness factorization failed");
    constexpr int block = 64;
    for (int c0 = 0; c0 < nb; c0 += block) {
      const int w = std::min(block, nb - c0);
      const Mat rhs = Mat(Kib.middleCols(c0, w));
      const Mat X = ldlt.solve(rhs);
      if (ldlt.info() != Eigen::Success) throw Error(Error::Kind::Factorization, "interior solve failed");
      out.schur.middleCols(c0, w).noalias() -= Kib.transpose() * X;
    }
    const Vec d = ldlt.vectorD();
    if (!(d.minCoeff() > 0.0))
      throw Error(Error::Kind::Factorization, "interior stiffness is not positive definite");
  }
  out.schur = 0.5 * (out.schur + out.schur.transpose()).eval();

  out.mass = Mat::Zero(nb, nb);
  for (int c = 0; c < n; ++c)
    for (SpMat::InnerIterator it(sys.boundary_mass, c); it; ++it) {
      const int r = static_cast<int>(it.row());
      if (role[r] == 1 && role[c] == 1) out.mass(local[r], local[c]) += it.value();
    }
  return out;
}

SteklovSpectrum solve_spectrum(const Mat& schur, const Mat& mass, int k) {
  const int nb = static_cast<int>(schur.rows());
  if (k < 0 || k + 1 > nb)
    throw Error(Error::Kind::Domain, "requested " + std::to_string(k + 1) + " eigenvalues from " +
                                         std::to_string(nb) + " boundary nodes");
  Eigen::LLT<Mat> llt(mass);
  if (llt.info() != Eigen::Success)
    throw Error(Error::Kind::Factorization, "boundary mass is not positive definite (zero-length boundary edges?)");
  const auto L = llt.matrixL();
  Mat A = L.solve(schur);
  A = L.solve(A.transpose()).eval();
  A = 0.5 * (A + A.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Mat> eig(A);
  if (eig.info() != Eigen::Success) throw Error(Error::Kind::Factorization, "dense eigensolve failed");
  SteklovSpectrum spec;
  const Vec& ev = eig.eigenvalues();
  spec.eigenvalues.assign(ev.data(), ev.data() + k + 1);
  spec.boundary_eigenvectors = llt.matrixU().solve(eig.eigenvectors().leftCols(k + 1));
  spec.meta.boundary_nodes = nb;
  return spec;
}

SteklovSpectrum steklov_spectrum(const TriMesh& mesh, const SpaceForm& form, const RadialWeight& w, int k,
                                 const std::string& domain_id, const AssemblyOptions& opt) {
  const auto sys = assemble(mesh, form, w, opt);
  const auto dtn = dtn_reduce(sys);
  auto spec = solve_spectrum(dtn.schur, dtn.mass, k);
  spec.meta.method = "p1-dtn";
  spec.meta.domain = domain_id;
  spec.meta.weight = w.id();
  spec.meta.curvature = form.curvature;
  spec.meta.dim = 2;
  spec.meta.h = mesh.h;
  spec.meta.nodes = static_cast<int>(mesh.num_vertices());
  return spec;
}

}  // namespace steklov
