#pragma once

#include <string>
#include <vector>

#include "steklov/geometry.hpp"
#include "steklov/types.hpp"

namespace steklov {

/// Ordered Steklov eigenvalues sigma_0 <= sigma_1 <= ... with optional
/// boundary traces and the provenance of the discretization.
struct SteklovSpectrum {
  std::vector<double> eigenvalues;
  /// Boundary traces (one column per eigenvalue), mass-orthonormal. Empty
  /// for spectra that come from the radial ODE.
  Mat boundary_eigenvectors;
  /// Angular degree (radial) or azimuthal mode (axisymmetric) per
  /// eigenvalue; empty for plain 2-D spectra.
  std::vector<int> modes;

  struct Metadata {
    std::string method;  // "radial", "p1-dtn", "axisym-p1-dtn"
    std::string domain;
    std::string weight;
    Curvature curvature = Curvature::Euclidean;
    int dim = 2;
    double h = 0.0;  // max edge length, 0 when not mesh based
    int boundary_nodes = 0;
    int nodes = 0;
  } meta;

  std::size_t size() const { return eigenvalues.size(); }
  double operator[](std::size_t i) const { return eigenvalues[i]; }
};

}  // namespace steklov
