#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace steklov {

using Vec2 = Eigen::Vector2d;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Base of every error raised by the library. The category names the failure
// class so the CLI can map it to diagnostics without string matching.
class Error : public std::runtime_error {
 public:
  enum class Kind {
    Domain,         // argument outside the mathematical domain
    Quadrature,     // adaptive quadrature missed its tolerance
    Integration,    // ODE step underflow / non-positive solution
    MeshQuality,    // min-angle floor or orientation violated
    Factorization,  // sparse or dense factorization failed
    Admissibility,  // weight violates Property I without a waiver
    Bracket,        // root bracket could not be established
    Symmetry,       // domain fails a required reflection symmetry
    Config,         // configuration parse / validation failure
    Io,
  };

  Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace steklov
