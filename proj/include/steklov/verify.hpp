#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "steklov/axisym3d.hpp"
#include "steklov/geometry.hpp"
#include "steklov/mesh2d.hpp"
#include "steklov/radial.hpp"
#include "steklov/steklov2d.hpp"

namespace steklov {

/// R with |B_R|_phi = target, by bisection on a geometrically grown bracket.
double match_radius(const SpaceForm& form, const RadialWeight& w, double target_volume,
                    double r_max = 50.0, double rel_tol = 1e-10);

struct Extrapolation {
  double limit = 0.0;
  double order = 2.0;
  double estimate = 0.0;  // |limit - finest|
  bool monotone = true;   // false: fell back to order 2
};

/// Richardson extrapolation from the last three values of a sequence
/// computed on meshes h, h/2, h/4. Two values assume order 2; one value
/// returns itself with a zero estimate.
Extrapolation richardson(const std::vector<double>& values);

struct FemOptions {
  int rings = 8;
  int sectors = 64;  // full circle; meridian meshes use half of it
  int levels = 3;    // base mesh plus levels - 1 uniform refinements
  MeshOptions mesh;
  AssemblyOptions assembly;
  double hyperbolic_margin = 1e-3;  // domains must satisfy max |x| <= 1 - margin
};

struct LevelResult {
  double h = 0.0;
  int nodes = 0;
  int boundary_nodes = 0;
  double volume = 0.0;            // weighted, from the mesh
  double boundary_measure = 0.0;  // weighted, from the mesh
  std::vector<double> sigma;      // sigma_0 .. sigma_k
  std::vector<int> modes;         // axisymmetric only
};

struct ConvergenceStudy {
  std::string domain, weight;
  Curvature curvature = Curvature::Euclidean;
  int dim = 2;
  std::vector<LevelResult> levels;
  std::vector<Extrapolation> sigma;  // index i: sigma_i (index 0 is the zero mode)
  std::vector<std::string> warnings;
};

ConvergenceStudy convergence_study(const Domain2D& dom, const SpaceForm& form, const RadialWeight& w, int k,
                                   const FemOptions& opt = {});
ConvergenceStudy convergence_study(const MeridianDomain& dom, const RadialWeight& w, int k,
                                   const FemOptions& opt = {});

/// Integrals over a star-shaped planar domain in the Euclidean plane or the
/// Poincare disk, for radial integrands f(t):
///   domain_integral   = int_Omega f(t) e^{-phi} dv,
///   boundary_integral = int_dOmega f(t) e^{-phi} ds.
/// t_breaks lists radii where f may jump; honored for domains centered at
/// the weight origin.
double domain_integral(const Domain2D& dom, const SpaceForm& form, const RadialWeight& w,
                       const std::function<double(double)>& f, double rel_tol = 1e-9,
                       const std::vector<double>& t_breaks = {});
double boundary_integral(const Domain2D& dom, const SpaceForm& form, const RadialWeight& w,
                         const std::function<double(double)>& f, double rel_tol = 1e-9);
/// |S^{n-1}| int_0^R f(t) e^{-phi} S^{n-1} dt.
double ball_integral(const SpaceForm& form, const RadialWeight& w, double R, const std::function<double(double)>& f);

struct ChainLink {
  std::string name;
  double lower = 0.0, upper = 0.0;  // the link asserts lower <= upper
  double margin = 0.0;              // (upper - lower) / max(|lower|, |upper|)
  double slack = 0.0;               // relative
  bool holds() const { return margin >= -slack; }
};

/// Quantities of the coordinate trial-function argument evaluated with one
/// radial profile.
struct ChainProfile {
  double A = 0.0;       // int_dOmega f^2 dmu_hat
  double B = 0.0;       // int_Omega G dmu
  double C = 0.0;       // int_Omega H dmu
  double ball_G = 0.0;  // int_{B_R} G dmu
  double ball_H = 0.0;  // int_{B_R} H dmu
  std::vector<ChainLink> links;  // (i) A >= B, (ii) A <= lhs C/(n-1), (iii) B >= ball_G, C <= ball_H
  double ratio_GH = 0.0;  // B / C
  double ratio_HG = 0.0;  // C / B
  bool all_hold() const;
};

struct ChainReport {
  std::string domain, weight;
  Curvature curvature = Curvature::Euclidean;
  int dim = 2;
  double volume = 0.0;  // by quadrature
  double R = 0.0;       // matched to that volume
  double lhs = 0.0;     // sum 1/sigma_i from the FEM study
  double sigma1_ball = 0.0;
  double ball_ratio = 0.0;  // int_B G / int_B H, equals 1/sigma_1(B_R)
  /// Main audit: the mode-1 radial solution continued past R.
  ChainProfile profile;
  /// Informational: T frozen at T(R) beyond R.
  ChainProfile capped;
  /// Composition of the links: reproduces gap from the margins, and the
  /// lower bound on gap implied by the link slacks.
  double gap = 0.0;
  double gap_from_links = 0.0;
  double implied_gap_bound = 0.0;
  bool implication_consistent = false;
  bool centered_ball = false;
  double equality_tol = 0.0;
  bool pass() const;
};

struct QuestionA {
  double lhs = 0.0, rhs = 0.0, gap = 0.0, slack = 0.0;
  bool candidate = false;  // gap < -slack: flagged for inspection, never an error
};

struct VerifyOptions {
  FemOptions fem;
  RadialOptions radial;
  double slack_floor = 1e-3;     // relative to rhs
  double slack_factor = 3.0;     // times the propagated Richardson estimate
  double equality_floor = 1e-3;
  double chain_slack = 1e-3;     // relative, per link
  double r_max = 50.0;
  bool question_a = false;
  bool chain = false;
  bool waive_admissibility = false;
};

struct VerificationReport {
  std::string domain, weight;
  Curvature curvature = Curvature::Euclidean;
  int dim = 2;
  double volume = 0.0;
  double R = 0.0;
  double volume_residual = 0.0;  // relative mismatch of |B_R|_phi
  std::vector<double> sigma;           // sigma_1 .. sigma_m, extrapolated
  std::vector<double> sigma_estimate;  // Richardson error estimates
  ConvergenceStudy study;
  double sigma1_ball = 0.0;
  double lhs = 0.0, rhs = 0.0, gap = 0.0;
  double slack = 0.0, equality_tol = 0.0;
  bool centered_ball = false;
  bool near_equality = false;
  PropertyIReport admissibility;
  bool admissibility_waived = false;
  std::optional<QuestionA> question_a;
  std::optional<ChainReport> chain;
  std::vector<std::string> warnings;

  bool pass() const { return gap >= -slack; }
  /// The centered-ball equality case holds when applicable.
  bool equality_ok() const { return !centered_ball || near_equality; }
};

VerificationReport brock_report(const Domain2D& dom, const SpaceForm& form, const RadialWeight& w,
                                const VerifyOptions& opt = {});
VerificationReport brock_report(const MeridianDomain& dom, const RadialWeight& w, const VerifyOptions& opt = {});
VerificationReport question_a_report(const Domain2D& dom, const SpaceForm& form, const RadialWeight& w,
                                     VerifyOptions opt = {});

/// Audit of the trial-function argument on a domain symmetric under
/// x -> -x and y -> -y about the weight origin.
ChainReport proof_chain_check(const Domain2D& dom, const SpaceForm& form, const RadialWeight& w,
                              VerifyOptions opt = {});

struct RearrangementReport {
  enum class Kind { NonDecreasing, NonIncreasing };
  Kind kind = Kind::NonDecreasing;
  double volume = 0.0, R = 0.0;
  double omega_integral = 0.0, ball_integral = 0.0;
  double margin = 0.0;  // relative, positive when the expected direction holds
  double slack = 0.0;
  bool pass() const { return margin >= -slack; }
};

/// Compares int_Omega v dmu with int_{B_R} v dmu for |B_R|_phi = |Omega|_phi:
/// larger on Omega for non-decreasing v, smaller for non-increasing v.
RearrangementReport rearrangement_check(const Domain2D& dom, const SpaceForm& form, const RadialWeight& w,
                                        const std::function<double(double)>& v, RearrangementReport::Kind kind,
                                        double slack = 1e-8);

}  // namespace steklov
