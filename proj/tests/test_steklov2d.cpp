#include "doctest.h"

#include <cmath>
#include <random>

#include "steklov/radial.hpp"
#include "steklov/steklov2d.hpp"

using namespace steklov;

namespace {
const SpaceForm E2{Curvature::Euclidean, 2};
const SpaceForm H2{Curvature::Hyperbolic, 2};
const auto zero = RadialWeight::constant(0.0);

TriMesh disk_mesh(double R, int levels, int M = 4, int N = 32) {
  auto mesh = generate_mesh(Domain2D::disk(R), M, N);
  for (int l = 0; l < levels; ++l) mesh = refine(mesh);
  return mesh;
}

std::vector<double> sigmas(const TriMesh& mesh, const SpaceForm& form, const RadialWeight& w, int k) {
  return steklov_spectrum(mesh, form, w, k).eigenvalues;
}
}  // namespace

TEST_CASE("stiffness annihilates constants and scales with a constant weight") {
  const auto mesh = generate_mesh(Domain2D::ellipse(1.3, 0.8), 4, 32);
  const auto plain = assemble(mesh, E2, zero);
  const auto shifted = assemble(mesh, E2, RadialWeight::constant(0.7));
  const Vec ones = Vec::Ones(mesh.num_vertices());
  CHECK((plain.stiffness * ones).cwiseAbs().maxCoeff() < 1e-13);
  const SpMat diff = shifted.stiffness - std::exp(-0.7) * plain.stiffness;
  CHECK(Mat(diff).cwiseAbs().maxCoeff() < 1e-14);
  const SpMat asym = plain.stiffness - SpMat(plain.stiffness.transpose());
  CHECK(Mat(asym).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("boundary mass totals the weighted boundary length") {
  const auto w = RadialWeight::linear(0.5);
  for (const auto& form : {E2, H2}) {
    const auto mesh = generate_mesh(Domain2D::perturbed_disk(0.6, 0.1, 3), 4, 32);
    const auto sys = assemble(mesh, form, w);
    const Vec ones = Vec::Ones(mesh.num_vertices());
    CHECK(ones.dot(sys.boundary_mass * ones) ==
          doctest::Approx(mesh_measures(mesh, form, w).weighted_boundary_length).epsilon(1e-13));
  }
}

TEST_CASE("Schur complement properties") {
  const auto mesh = generate_mesh(Domain2D::perturbed_disk(1.0, 0.15, 3), 4, 32);
  const auto sys = assemble(mesh, E2, RadialWeight::quadratic(0.5, 0.25));
  const auto dtn = dtn_reduce(sys);
  const double norm = dtn.schur.cwiseAbs().maxCoeff();
  CHECK((dtn.schur * Vec::Ones(dtn.schur.rows())).cwiseAbs().maxCoeff() <= 1e-10 * norm);
  CHECK((dtn.schur - dtn.schur.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * norm);

  SUBCASE("Rayleigh quotient equals the harmonic-extension quotient") {
    // independent dense extension over the interior nodes
    const int n = static_cast<int>(mesh.num_vertices());
    std::vector<bool> on_boundary(n, false);
    for (int v : sys.boundary_index) on_boundary[v] = true;
    std::vector<int> interior;
    for (int v = 0; v < n; ++v)
      if (!on_boundary[v]) interior.push_back(v);
    const Mat K(sys.stiffness), Mb(sys.boundary_mass);
    Mat Kii(interior.size(), interior.size()), Kib(interior.size(), sys.boundary_index.size());
    for (std::size_t r = 0; r < interior.size(); ++r) {
      for (std::size_t c = 0; c < interior.size(); ++c) Kii(r, c) = K(interior[r], interior[c]);
      for (std::size_t c = 0; c < sys.boundary_index.size(); ++c) Kib(r, c) = K(interior[r], sys.boundary_index[c]);
    }
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 3; ++trial) {
      Vec g(sys.boundary_index.size());
      for (auto& x : g) x = gauss(rng);
      const Vec ui = Kii.fullPivLu().solve(-Kib * g);
      Vec u = Vec::Zero(n);
      for (std::size_t c = 0; c < sys.boundary_index.size(); ++c) u[sys.boundary_index[c]] = g[c];
      for (std::size_t r = 0; r < interior.size(); ++r) u[interior[r]] = ui[r];
      const double full = u.dot(K * u) / u.dot(Mb * u);
      const double reduced = g.dot(dtn.schur * g) / g.dot(dtn.mass * g);
      CHECK(reduced == doctest::Approx(full).epsilon(1e-10));
    }
  }
}

TEST_CASE("spectrum invariants") {
  const auto mesh = generate_mesh(Domain2D::ellipse(1.2, 0.9), 4, 32);
  const auto w = RadialWeight::linear(0.5);
  const auto spec = steklov_spectrum(mesh, E2, w, 6);
  REQUIRE(spec.size() == 7);
  for (std::size_t i = 1; i < spec.size(); ++i) CHECK(spec[i] >= spec[i - 1]);
  CHECK(std::abs(spec[0]) <= 1e-8 * spec[1]);
  // constant zero mode
  const Vec v0 = spec.boundary_eigenvectors.col(0);
  CHECK((v0.array() - v0.mean()).abs().maxCoeff() <= 1e-6 * std::abs(v0.mean()));
  // mass orthonormality
  const auto dtn = dtn_reduce(assemble(mesh, E2, w));
  const Mat G = spec.boundary_eigenvectors.transpose() * dtn.mass * spec.boundary_eigenvectors;
  CHECK((G - Mat::Identity(7, 7)).cwiseAbs().maxCoeff() <= 1e-10);

  SUBCASE("weight shift leaves the pencil spectrum unchanged") {
    const auto moved = steklov_spectrum(mesh, E2, w.shifted(1.3), 6);
    for (std::size_t i = 1; i < spec.size(); ++i) CHECK(moved[i] == doctest::Approx(spec[i]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(solve_spectrum(dtn.schur, dtn.mass, static_cast<int>(dtn.mass.rows())), Error);
  CHECK_THROWS_AS(solve_spectrum(dtn.schur, Mat::Zero(dtn.mass.rows(), dtn.mass.rows()), 3), Error);
}

TEST_CASE("unit disk spectrum approaches 1,1,2,2,3 at second order") {
  double prev = 0.0;
  std::vector<double> s;
  for (int level = 0; level < 3; ++level) {
    s = sigmas(disk_mesh(1.0, level), E2, RadialWeight::constant(2.0), 5);
    const double err = std::abs(s[1] - 1.0);
    if (level > 0) CHECK(prev / err >= 3.0);
    prev = err;
  }
  const double exact[] = {0, 1, 1, 2, 2, 3};
  for (int i = 1; i <= 5; ++i) CHECK(s[i] == doctest::Approx(exact[i]).epsilon(0.02));
  CHECK(s[1] == doctest::Approx(s[2]).epsilon(1e-9));
}

TEST_CASE("rotating a centered disk mesh leaves the spectrum unchanged") {
  auto mesh = disk_mesh(1.0, 0);
  const auto base = sigmas(mesh, E2, RadialWeight::linear(0.5), 5);
  const double a = 0.3;
  for (auto& v : mesh.vertices) v = Vec2(std::cos(a) * v.x() - std::sin(a) * v.y(), std::sin(a) * v.x() + std::cos(a) * v.y());
  const auto rot = sigmas(mesh, E2, RadialWeight::linear(0.5), 5);
  for (int i = 1; i <= 5; ++i) CHECK(rot[i] == doctest::Approx(base[i]).epsilon(1e-12));
}

TEST_CASE("weighted disks agree with the radial solver") {
  SUBCASE("Euclidean, phi = -t/2") {
    const auto w = RadialWeight::linear(0.5);
    const double exact = sigma1_ball(E2, w, 1.0).sigma;
    const auto s = sigmas(disk_mesh(1.0, 2), E2, w, 2);
    CHECK(s[1] == doctest::Approx(exact).epsilon(0.01));
    CHECK(s[2] == doctest::Approx(exact).epsilon(0.01));
  }
  SUBCASE("hyperbolic radius 1") {
    const auto s = sigmas(disk_mesh(std::tanh(0.5), 2), H2, zero, 2);
    CHECK(s[1] == doctest::Approx(1.0 / std::sinh(1.0)).epsilon(0.01));
  }
  SUBCASE("hyperbolic radius 1 with a weight") {
    const auto w = RadialWeight::quadratic(1.0, 0.25);
    const double exact = sigma1_ball(H2, w, 1.0).sigma;
    const auto s = sigmas(disk_mesh(std::tanh(0.5), 2), H2, w, 2);
    CHECK(s[1] == doctest::Approx(exact).epsilon(0.01));
  }
}

TEST_CASE("hyperbolic meshes must stay inside the disk") {
  CHECK_THROWS_AS(assemble(generate_mesh(Domain2D::disk(1.0), 2, 8), H2, zero), Error);
  CHECK_THROWS_AS(assemble(generate_mesh(Domain2D::disk(0.5), 2, 8), SpaceForm(Curvature::Euclidean, 3), zero), Error);
}
