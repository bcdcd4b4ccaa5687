#include "doctest.h"

#include <cmath>

#include "steklov/verify.hpp"

using namespace steklov;

namespace {
const SpaceForm E2{Curvature::Euclidean, 2};
const SpaceForm H2{Curvature::Hyperbolic, 2};
const auto zero = RadialWeight::constant(0.0);
const auto half = RadialWeight::linear(0.5);

Domain2D area_pi_ellipse(double ratio) { return Domain2D::ellipse(std::sqrt(ratio), 1.0 / std::sqrt(ratio)); }
}  // namespace

TEST_CASE("volume matching") {
  CHECK(match_radius(E2, zero, kPi) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(match_radius(E2, RadialWeight::linear(1.0), 2 * kPi) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(match_radius(H2, zero, 2 * kPi * (std::cosh(1.0) - 1.0)) == doctest::Approx(1.0).epsilon(1e-9));
  // bracket grows past the initial guess
  CHECK(match_radius(E2, zero, kPi * 49.0) == doctest::Approx(7.0).epsilon(1e-9));
  CHECK_THROWS_AS(match_radius(E2, zero, kPi * 100.0, 5.0), Error);
  CHECK_THROWS_AS(match_radius(E2, zero, -1.0), Error);
}

TEST_CASE("Richardson extrapolation") {
  // s(h) = 2 + 0.3 h^2 exactly: order 2, exact limit
  const auto e = richardson({2.3, 2.075, 2.01875});
  CHECK(e.order == doctest::Approx(2.0));
  CHECK(e.limit == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(e.estimate == doctest::Approx(0.01875));
  CHECK(e.monotone);
  // oscillating sequence falls back to order 2 and flags it
  const auto bad = richardson({1.0, 1.1, 1.05});
  CHECK_FALSE(bad.monotone);
  CHECK(bad.order == 2.0);
  CHECK(bad.estimate == doctest::Approx(0.1));
  CHECK(richardson({4.0}).limit == 4.0);
  CHECK(richardson({1.3, 1.075}).limit == doctest::Approx(1.0));
}

TEST_CASE("disk convergence studies") {
  const auto s = convergence_study(Domain2D::disk(1.0), E2, zero, 1);
  REQUIRE(s.levels.size() == 3);
  CHECK(s.sigma[1].limit >= 0.999);
  CHECK(s.sigma[1].limit <= 1.001);
  CHECK(s.sigma[1].order >= 1.7);
  CHECK(s.sigma[1].order <= 2.3);
  CHECK(s.warnings.empty());

  const auto h = convergence_study(Domain2D::disk(std::tanh(0.5)), H2, zero, 1);
  CHECK(h.sigma[1].limit >= 0.995 / std::sinh(1.0));
  CHECK(h.sigma[1].limit <= 1.005 / std::sinh(1.0));
}

TEST_CASE("Brock-type reports") {
  SUBCASE("centered unit disk is the equality case") {
    const auto r = brock_report(Domain2D::disk(1.0), E2, zero);
    CHECK(r.lhs == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(r.rhs == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(r.centered_ball);
    CHECK(r.near_equality);
    CHECK(r.pass());
    CHECK(r.volume_residual < 1e-9);
  }
  SUBCASE("elongated ellipse is strictly above the ball") {
    const auto r = brock_report(area_pi_ellipse(2.0), E2, zero);
    CHECK(r.gap > 0.1);
    CHECK(r.sigma[0] < 1.0);
    CHECK(r.R == doctest::Approx(1.0).epsilon(1e-3));
    CHECK_FALSE(r.centered_ball);
  }
  SUBCASE("unit ball in R^3 with a weight") {
    const auto r = brock_report(MeridianDomain::ball(1.0), half);
    CHECK(r.dim == 3);
    REQUIRE(r.sigma.size() == 2);
    CHECK(r.lhs == doctest::Approx(2.0 / r.sigma1_ball).epsilon(2e-3));
    CHECK(std::abs(r.gap) <= r.equality_tol);
    CHECK(r.near_equality);
  }
  SUBCASE("off-center disk: unweighted passes, weighted falls below the ball bound") {
    const auto plain = brock_report(Domain2D::disk(1.0, Vec2(0.3, 0.0)), E2, zero);
    CHECK_FALSE(plain.centered_ball);
    CHECK(plain.pass());
    // the weight stays anchored at the origin while the domain moves
    const auto r = brock_report(Domain2D::disk(1.0, Vec2(0.3, 0.0)), E2, half);
    CHECK(r.gap < -10 * r.slack);
    CHECK_FALSE(r.pass());
  }
}

TEST_CASE("weight admissibility is enforced") {
  const auto up = RadialWeight::linear(-0.5);
  try {
    brock_report(Domain2D::disk(1.0), E2, up);
    FAIL("expected an admissibility error");
  } catch (const Error& e) {
    CHECK(e.kind() == Error::Kind::Admissibility);
    CHECK(std::string(e.what()).find("Property I") != std::string::npos);
  }
  VerifyOptions waive;
  waive.waive_admissibility = true;
  const auto r = brock_report(Domain2D::disk(1.0), E2, up, waive);
  CHECK(r.admissibility_waived);
  CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("two-term sums") {
  const auto disk = question_a_report(Domain2D::disk(1.0), E2, zero);
  REQUIRE(disk.question_a);
  CHECK(disk.question_a->lhs == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(std::abs(disk.question_a->gap) <= disk.question_a->slack);
  for (double ratio : {1.1, 1.5, 2.0}) {
    const auto r = question_a_report(area_pi_ellipse(ratio), E2, zero);
    CHECK(r.question_a->gap >= 0.0);
    CHECK_FALSE(r.question_a->candidate);
  }
}

TEST_CASE("proof-chain audit") {
  SUBCASE("centered disk saturates every link") {
    const auto c = proof_chain_check(Domain2D::disk(1.0), E2, half);
    for (const auto& l : c.profile.links) CHECK(std::abs(l.margin) <= c.equality_tol);
    CHECK(c.pass());
    CHECK(c.ball_ratio == doctest::Approx(1.0 / c.sigma1_ball).epsilon(1e-6));
  }
  SUBCASE("elongated ellipse has positive margins") {
    const auto c = proof_chain_check(area_pi_ellipse(2.0), E2, zero);
    REQUIRE(c.profile.links.size() == 4);
    CHECK(c.profile.links[0].margin > 0.0);
    CHECK(c.profile.links[1].margin > 0.0);
    CHECK(c.profile.links[2].margin > 0.0);
    // H = 2 is constant for the unweighted plane: equality up to quadrature
    CHECK(c.profile.links[3].margin > -1e-8);
    CHECK(c.implication_consistent);
    CHECK(c.gap_from_links == doctest::Approx(c.gap).epsilon(1e-9));
    CHECK(c.pass());
  }
  SUBCASE("perturbed disk with a weight") {
    const auto c = proof_chain_check(Domain2D::perturbed_disk(1.0, 0.1, 2), E2, half);
    for (const auto& l : c.profile.links) CHECK(l.margin >= -1e-3);
    CHECK(c.pass());
  }
  SUBCASE("hyperbolic ellipse") {
    const auto c = proof_chain_check(Domain2D::ellipse(0.6, 0.4), H2, RadialWeight::quadratic(1.0, 0.25));
    CHECK(c.pass());
  }
  SUBCASE("asymmetric domains are rejected") {
    CHECK_THROWS_AS(proof_chain_check(Domain2D::perturbed_disk(1.0, 0.1, 3), E2, zero), Error);
    CHECK_THROWS_AS(proof_chain_check(Domain2D::disk(1.0, Vec2(0.2, 0.0)), E2, zero), Error);
  }
}

TEST_CASE("domain quadrature against closed forms") {
  // ellipse area and the unweighted perimeter via the complete elliptic integral
  CHECK(domain_integral(Domain2D::ellipse(1.5, 0.5), E2, zero, [](double) { return 1.0; }) ==
        doctest::Approx(0.75 * kPi).epsilon(1e-10));
  CHECK(boundary_integral(Domain2D::disk(0.7), E2, zero, [](double) { return 1.0; }) ==
        doctest::Approx(1.4 * kPi).epsilon(1e-10));
  // int over the unit disk of t^2 = pi / 2
  CHECK(domain_integral(Domain2D::disk(1.0), E2, zero, [](double t) { return t * t; }) ==
        doctest::Approx(kPi / 2).epsilon(1e-10));
  // hyperbolic disk of radius 1
  CHECK(domain_integral(Domain2D::disk(std::tanh(0.5)), H2, zero, [](double) { return 1.0; }) ==
        doctest::Approx(2 * kPi * (std::cosh(1.0) - 1.0)).epsilon(1e-10));
  CHECK(boundary_integral(Domain2D::disk(std::tanh(0.5)), H2, zero, [](double) { return 1.0; }) ==
        doctest::Approx(2 * kPi * std::sinh(1.0)).epsilon(1e-10));
  // square: polygon pieces
  const auto sq = Domain2D::polygon({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}});
  CHECK(domain_integral(sq, E2, zero, [](double) { return 1.0; }) == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(boundary_integral(sq, E2, zero, [](double) { return 1.0; }) == doctest::Approx(8.0).epsilon(1e-10));
  // off-center disk: int |x|^2 = pi R^4/2 + pi R^2 |c|^2
  CHECK(domain_integral(Domain2D::disk(0.5, Vec2(0.3, 0.4)), E2, zero, [](double t) { return t * t; }) ==
        doctest::Approx(kPi * 0.0625 / 2 + kPi * 0.25 * 0.25).epsilon(1e-10));
}

TEST_CASE("rearrangement comparisons") {
  using Kind = RearrangementReport::Kind;
  const auto t = [](double s) { return s; };
  const auto decay = [](double s) { return std::exp(-s); };
  const auto disk = rearrangement_check(Domain2D::disk(1.0), E2, zero, t, Kind::NonDecreasing);
  CHECK(std::abs(disk.margin) <= 1e-8);
  const auto e1 = rearrangement_check(area_pi_ellipse(2.0), E2, zero, t, Kind::NonDecreasing);
  CHECK(e1.R == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(e1.omega_integral >= e1.ball_integral);
  CHECK(e1.pass());
  const auto e2 = rearrangement_check(area_pi_ellipse(2.0), E2, zero, decay, Kind::NonIncreasing);
  CHECK(e2.omega_integral <= e2.ball_integral);
  CHECK(e2.pass());
  // wrong direction is reported, not thrown
  const auto wrong = rearrangement_check(area_pi_ellipse(2.0), E2, zero, decay, Kind::NonDecreasing);
  CHECK_FALSE(wrong.pass());
  // a weighted hyperbolic case
  const auto h = rearrangement_check(Domain2D::perturbed_disk(0.5, 0.1, 4), H2, half, t, Kind::NonDecreasing);
  CHECK(h.pass());
}
