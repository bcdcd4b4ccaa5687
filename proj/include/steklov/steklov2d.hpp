#pragma once

#include <vector>

#include "steklov/geometry.hpp"
#include "steklov/mesh2d.hpp"
#include "steklov/spectrum.hpp"
#include "steklov/types.hpp"

namespace steklov {

/// Weighted stiffness and boundary mass of a P1 discretization.
struct AssembledSystem {
  SpMat stiffness;       // over all nodes
  SpMat boundary_mass;   // over all nodes, nonzero on boundary_index only
  std::vector<int> boundary_index;  // boundary-local -> mesh node
  std::vector<int> fixed_nodes;     // essential zero condition (excluded everywhere)
};

struct AssemblyOptions {
  int weight_points = 1;  // 1: centroid, 3: interior 3-point rule
};

/// Euclidean, or hyperbolic in the Poincare disk (conformal stiffness,
/// boundary mass scaled by rho). The weight is anchored at the origin.
AssembledSystem assemble(const TriMesh& mesh, const SpaceForm& form, const RadialWeight& w,
                         const AssemblyOptions& opt = {});

struct DtnSystem {
  Mat schur;  // K_bb - K_bi K_ii^{-1} K_ib
  Mat mass;   // M_b restricted to the boundary
};

DtnSystem dtn_reduce(const AssembledSystem& sys);

/// k + 1 smallest eigenpairs of S u = sigma M u, ascending, M-orthonormal.
SteklovSpectrum solve_spectrum(const Mat& schur, const Mat& mass, int k);

/// assemble + dtn_reduce + solve_spectrum with metadata filled in.
SteklovSpectrum steklov_spectrum(const TriMesh& mesh, const SpaceForm& form, const RadialWeight& w, int k,
                                 const std::string& domain_id = "", const AssemblyOptions& opt = {});

}  // namespace steklov
