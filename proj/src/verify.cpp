#include "steklov/verify.hpp"

#include <algorithm>
#include <cmath>

#include "steklov/quadrature.hpp"

namespace steklov {

namespace {

double relative_margin(double lower, double upper) {
  const double scale = std::max({std::abs(lower), std::abs(upper), 1e-300});
  return (upper - lower) / scale;
}

// Largest distance t from the weight origin reached by the closure.
double domain_t_max(const Domain2D& dom, const SpaceForm& form) {
  const double r = dom.max_abs();
  return form.curvature == Curvature::Hyperbolic ? poincare_distance(r) : r;
}

double meridian_t_max(const MeridianDomain& dom) {
  double m = 0.0;
  for (int l = 0; l <= 2048; ++l) m = std::max(m, dom.boundary_radius(-kPi / 2 + kPi * l / 2048));
  return m;
}

void check_weight(const RadialWeight& w, double t_max, const VerifyOptions& opt, VerificationReport& rep) {
  rep.admissibility = validate_property_i(w, t_max);
  if (rep.admissibility.admissible()) return;
  if (!opt.waive_admissibility) throw Error(Error::Kind::Admissibility, rep.admissibility.diagnostic());
  rep.admissibility_waived = true;
  rep.warnings.push_back("admissibility waived: " + rep.admissibility.diagnostic());
}

std::vector<double> polygon_angles(const Domain2D& dom) {
  std::vector<double> cuts = {0.0, 2 * kPi};
  if (dom.kind == Domain2D::Kind::Polygon) {
    for (const auto& v : dom.vertices) {
      double a = std::atan2(v.y(), v.x());
      if (a < 0) a += 2 * kPi;
      cuts.push_back(a);
    }
    std::sort(cuts.begin(), cuts.end());
  }
  return cuts;
}

// Sums 1/sigma_i for i = 1..m with the propagated Richardson estimate.
std::pair<double, double> reciprocal_sum(const VerificationReport& rep, int m) {
  double sum = 0.0, est = 0.0;
  for (int i = 0; i < m; ++i) {
    sum += 1.0 / rep.sigma[i];
    est += rep.sigma_estimate[i] / (rep.sigma[i] * rep.sigma[i]);
  }
  return {sum, est};
}

void fill_inequality(VerificationReport& rep, const VerifyOptions& opt) {
  const int n = rep.dim;
  const auto [lhs, est] = reciprocal_sum(rep, n - 1);
  rep.lhs = lhs;
  rep.rhs = (n - 1) / rep.sigma1_ball;
  rep.gap = rep.lhs - rep.rhs;
  rep.slack = std::max(opt.slack_floor * rep.rhs, opt.slack_factor * est);
  rep.equality_tol = std::max(opt.equality_floor * rep.rhs, opt.slack_factor * est);
  rep.near_equality = rep.centered_ball && std::abs(rep.gap) <= rep.equality_tol;
  if (opt.question_a) {
    QuestionA qa;
    const auto [lhs_n, est_n] = reciprocal_sum(rep, n);
    qa.lhs = lhs_n;
    qa.rhs = n / rep.sigma1_ball;
    qa.gap = qa.lhs - qa.rhs;
    qa.slack = std::max(opt.slack_floor * qa.rhs, opt.slack_factor * est_n);
    qa.candidate = qa.gap < -qa.slack;
    rep.question_a = qa;
  }
}

void take_study(VerificationReport& rep, ConvergenceStudy study, int m) {
  for (int i = 1; i <= m; ++i) {
    rep.sigma.push_back(study.sigma[i].limit);
    rep.sigma_estimate.push_back(study.sigma[i].estimate);
  }
  for (const auto& w : study.warnings) rep.warnings.push_back(w);
  rep.volume = study.levels.back().volume;
  rep.study = std::move(study);
}

void finish_ball_side(VerificationReport& rep, const SpaceForm& form, const RadialWeight& w,
                      const VerifyOptions& opt) {
  rep.R = match_radius(form, w, rep.volume, opt.r_max);
  rep.volume_residual = std::abs(ball_weighted_volume(form, w, rep.R) - rep.volume) / rep.volume;
  RadialOptions ropt = opt.radial;
  ropt.waive_admissibility = ropt.waive_admissibility || opt.waive_admissibility;
  const auto ball = sigma1_ball(form, w, rep.R, ropt);
  rep.sigma1_ball = ball.sigma;
  if (ball.identity_warning) rep.warnings.push_back("ball integral identity discrepancy above 1e-6");
}

ChainProfile evaluate_profile(const Domain2D& dom, const SpaceForm& form, const RadialWeight& w,
                              const std::function<double(double)>& f, const std::function<double(double)>& G,
                              const std::function<double(double)>& H, double ball_G, double ball_H, double lhs,
                              double lhs_rel_est, const VerifyOptions& opt, const std::vector<double>& t_breaks) {
  const int n = form.dim;
  ChainProfile p;
  p.A = boundary_integral(dom, form, w, [&](double t) { return f(t) * f(t); });
  p.B = domain_integral(dom, form, w, G, 1e-9, t_breaks);
  p.C = domain_integral(dom, form, w, H, 1e-9, t_breaks);
  p.ball_G = ball_G;
  p.ball_H = ball_H;
  p.ratio_GH = p.B / p.C;
  p.ratio_HG = p.C / p.B;
  auto link = [&](std::string name, double lower, double upper, double slack) {
    p.links.push_back({std::move(name), lower, upper, relative_margin(lower, upper), slack});
  };
  link("divergence: A >= int_Omega G", p.B, p.A, opt.chain_slack);
  link("trial functions: A <= lhs * int_Omega H / (n-1)", p.A, lhs * p.C / (n - 1),
       opt.chain_slack + opt.slack_factor * lhs_rel_est);
  link("rearrangement: int_Omega G >= int_B G", p.ball_G, p.B, opt.chain_slack);
  link("rearrangement: int_Omega H <= int_B H", p.C, p.ball_H, opt.chain_slack);
  return p;
}

ChainReport chain_report(const Domain2D& dom, const SpaceForm& form, const RadialWeight& w,
                         const VerificationReport& rep, const VerifyOptions& opt) {
  if (!dom.dihedral_symmetric())
    throw Error(Error::Kind::Symmetry, "domain " + dom.id() +
                                           " is not symmetric under x -> -x and y -> -y about the weight origin");
  const int n = form.dim;
  ChainReport c;
  c.domain = dom.id();
  c.weight = w.id();
  c.curvature = form.curvature;
  c.dim = n;
  c.centered_ball = dom.is_centered_disk();
  c.volume = domain_integral(dom, form, w, [](double) { return 1.0; });
  c.R = match_radius(form, w, c.volume, opt.r_max);

  RadialOptions ropt = opt.radial;
  ropt.waive_admissibility = ropt.waive_admissibility || opt.waive_admissibility;
  ropt.extend_to = std::max(c.R, 1.01 * domain_t_max(dom, form));
  const auto ball = sigma1_ball(form, w, c.R, ropt);
  const RadialSolution& sol = ball.solution;
  c.sigma1_ball = ball.sigma;
  c.ball_ratio = ball.ball_G_integral / ball.ball_H_integral;

  const auto [lhs, est] = reciprocal_sum(rep, n - 1);
  c.lhs = lhs;
  const double lhs_rel_est = est / lhs;
  c.equality_tol = std::max(opt.equality_floor, opt.slack_factor * lhs_rel_est);

  auto T = [&](double t) { return sol.T(t); };
  auto G = [&](double t) { return g_function(sol, t); };
  auto H = [&](double t) { return h_function(sol, t); };
  c.profile = evaluate_profile(dom, form, w, T, G, H, ball.ball_G_integral, ball.ball_H_integral, lhs, lhs_rel_est,
                               opt, {});

  const double R = c.R, TR = sol.T(R);
  auto Tc = [&](double t) { return t <= R ? sol.T(t) : TR; };
  auto Gc = [&](double t) {
    if (t <= R) return g_function(sol, t);
    return (n - 1) * c_kappa(form, t) / s_kappa(form, t) * TR * TR - TR * TR * w.dphi(t);
  };
  auto Hc = [&](double t) {
    if (t <= R) return h_function(sol, t);
    const double s = s_kappa(form, t);
    return (n - 1) * TR * TR / (s * s);
  };
  c.capped = evaluate_profile(dom, form, w, Tc, Gc, Hc, ball.ball_G_integral, ball.ball_H_integral, lhs, lhs_rel_est,
                              opt, {R});

  // compose the links: lhs/(n-1) = (ball_G + d_i + d_ii + d_G) / (ball_H - d_H)
  const auto& p = c.profile;
  const double d_i = p.A - p.B, d_ii = lhs * p.C / (n - 1) - p.A;
  const double d_G = p.B - p.ball_G, d_H = p.ball_H - p.C;
  const double identity_term = (n - 1) * (c.ball_ratio - 1.0 / c.sigma1_ball);
  c.gap = lhs - (n - 1) / c.sigma1_ball;
  c.gap_from_links = (n - 1) * ((p.ball_G + d_i + d_ii + d_G) / (p.ball_H - d_H) - c.ball_ratio) + identity_term;
  auto allowance = [](const ChainLink& l) { return l.slack * std::max(std::abs(l.lower), std::abs(l.upper)); };
  const double low_num = p.ball_G - allowance(p.links[0]) - allowance(p.links[1]) - allowance(p.links[2]);
  c.implied_gap_bound = (n - 1) * (low_num / (p.ball_H + allowance(p.links[3])) - c.ball_ratio) + identity_term;
  const bool reproduces = std::abs(c.gap_from_links - c.gap) <= 1e-9 * std::max(1.0, std::abs(lhs));
  c.implication_consistent = reproduces && (!p.all_hold() || c.gap >= c.implied_gap_bound - 1e-12);
  return c;
}

}  // namespace

// --- volume matching and extrapolation --------------------------------------------

double match_radius(const SpaceForm& form, const RadialWeight& w, double target, double r_max, double rel_tol) {
  if (!(target > 0.0)) throw Error(Error::Kind::Domain, "target volume must be positive");
  double cap = r_max;
  if (form.curvature == Curvature::SphericalCap) cap = std::min(cap, kPi * (1.0 - 1e-12));
  if (w.kind() == RadialWeight::Kind::Tabulated) cap = std::min(cap, w.t_limit());
  auto vol = [&](double R) { return ball_weighted_volume(form, w, R); };
  double lo = 0.0, hi = std::min(1.0, cap);
  while (vol(hi) < target) {
    if (hi >= cap)
      throw Error(Error::Kind::Bracket, "no radius up to " + std::to_string(cap) + " reaches weighted volume " +
                                            std::to_string(target));
    lo = hi;
    hi = std::min(2.0 * hi, cap);
  }
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    (vol(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Extrapolation richardson(const std::vector<double>& v) {
  if (v.empty()) throw Error(Error::Kind::Domain, "richardson needs at least one value");
  Extrapolation e;
  const std::size_t n = v.size();
  if (n == 1) {
    e.limit = v[0];
    return e;
  }
  if (n == 2) {
    e.limit = v[1] + (v[1] - v[0]) / 3.0;
    e.estimate = std::abs(e.limit - v[1]);
    return e;
  }
  const double s1 = v[n - 3], s2 = v[n - 2], s3 = v[n - 1];
  const double d1 = s2 - s1, d2 = s3 - s2;
  if (d2 == 0.0) {
    e.limit = s3;
    e.order = 0.0;
    return e;
  }
  const double p = (d1 * d2 > 0.0 && std::abs(d2) < std::abs(d1)) ? std::log2(d1 / d2) : -1.0;
  if (p >= 0.5 && p <= 6.0) {
    e.order = p;
    e.limit = s3 + d2 / (std::pow(2.0, p) - 1.0);
    e.estimate = std::abs(e.limit - s3);
  } else {
    e.monotone = false;
    e.order = 2.0;
    e.limit = s3 + d2 / 3.0;
    e.estimate = std::max(std::abs(d1), std::abs(d2));
  }
  return e;
}

namespace {

void extrapolate(ConvergenceStudy& s, int k) {
  for (int i = 0; i <= k; ++i) {
    std::vector<double> seq;
    for (const auto& l : s.levels) seq.push_back(l.sigma[i]);
    s.sigma.push_back(richardson(seq));
    if (i > 0 && !s.sigma.back().monotone)
      s.warnings.push_back("sigma_" + std::to_string(i) + ": non-monotone convergence, order-2 fallback");
  }
}

void check_fem(const FemOptions& opt, int k) {
  if (opt.levels < 1) throw Error(Error::Kind::Domain, "levels must be >= 1");
  if (k < 1) throw Error(Error::Kind::Domain, "need at least one nonzero eigenvalue");
}

}  // namespace

ConvergenceStudy convergence_study(const Domain2D& dom, const SpaceForm& form, const RadialWeight& w, int k,
                                   const FemOptions& opt) {
  check_fem(opt, k);
  if (form.dim != 2) throw Error(Error::Kind::Domain, "planar study needs n = 2");
  if (form.curvature == Curvature::Hyperbolic) dom.validate_in_unit_disk(opt.hyperbolic_margin);
  ConvergenceStudy s;
  s.domain = dom.id();
  s.weight = w.id();
  s.curvature = form.curvature;
  s.dim = 2;
  TriMesh mesh = generate_mesh(dom, opt.rings, opt.sectors, opt.mesh);
  for (int l = 0; l < opt.levels; ++l) {
    const auto spec = steklov_spectrum(mesh, form, w, k, dom.id(), opt.assembly);
    const auto m = mesh_measures(mesh, form, w);
    s.levels.push_back({mesh.h, spec.meta.nodes, spec.meta.boundary_nodes, m.weighted_area,
                        m.weighted_boundary_length, spec.eigenvalues, {}});
    if (l + 1 < opt.levels) mesh = refine(mesh);
  }
  extrapolate(s, k);
  return s;
}

ConvergenceStudy convergence_study(const MeridianDomain& dom, const RadialWeight& w, int k, const FemOptions& opt) {
  check_fem(opt, k);
  ConvergenceStudy s;
  s.domain = dom.id();
  s.weight = w.id();
  s.dim = 3;
  TriMesh mesh = meridian_mesh(dom, opt.rings, std::max(4, opt.sectors / 2), opt.mesh);
  for (int l = 0; l < opt.levels; ++l) {
    const auto spec = solve_axisym_spectrum(mesh, w, k, {0, 1, 2}, dom.id());
    const auto m = axisym_measures(mesh, w);
    s.levels.push_back({mesh.h, spec.meta.nodes, spec.meta.boundary_nodes, m.weighted_area,
                        m.weighted_boundary_length, spec.eigenvalues, spec.modes});
    if (l + 1 < opt.levels) mesh = refine(mesh);
  }
  extrapolate(s, k);
  return s;
}

// --- quadrature over star-shaped domains ------------------------------------------------

double domain_integral(const Domain2D& dom, const SpaceForm& form, const RadialWeight& w,
                       const std::function<double(double)>& f, double rel_tol, const std::vector<double>& t_breaks) {
  if (form.dim != 2) throw Error(Error::Kind::Domain, "domain_integral needs n = 2");
  const Vec2 c = dom.center();
  const QuadratureOptions inner_opt{1e-15, rel_tol * 1e-1, 4000};
  const QuadratureOptions outer_opt{1e-14, rel_tol, 4000};
  std::vector<double> rho_breaks;
  if (c.norm() == 0.0)
    for (double t : t_breaks)
      rho_breaks.push_back(form.curvature == Curvature::Hyperbolic ? poincare_radius(t) : t);
  auto ray = [&](double th) {
    const Vec2 e(std::cos(th), std::sin(th));
    auto g = [&](double rho) {
      const Vec2 x = c + rho * e;
      const double t = radial_distance(form, x);
      return f(t) * w.density(t) * area_factor(form, x) * rho;
    };
    const double rb = dom.boundary_radius(th);
    double sum = 0.0, lo = 0.0;
    for (double b : rho_breaks)
      if (b > lo && b < rb) {
        sum += integrate(g, lo, b, inner_opt);
        lo = b;
      }
    return sum + integrate(g, lo, rb, inner_opt);
  };
  const auto cuts = polygon_angles(dom);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) sum += integrate(ray, cuts[i], cuts[i + 1], outer_opt);
  return sum;
}

double boundary_integral(const Domain2D& dom, const SpaceForm& form, const RadialWeight& w,
                         const std::function<double(double)>& f, double rel_tol) {
  if (form.dim != 2) throw Error(Error::Kind::Domain, "boundary_integral needs n = 2");
  const QuadratureOptions qopt{1e-14, rel_tol, 4000};
  auto g = [&](const Vec2& x) {
    const double t = radial_distance(form, x);
    return f(t) * w.density(t) * length_factor(form, x);
  };
  if (dom.kind == Domain2D::Kind::Polygon) {
    double sum = 0.0;
    for (std::size_t i = 0; i < dom.vertices.size(); ++i) {
      const Vec2 p = dom.center() + dom.vertices[i];
      const Vec2 q = dom.center() + dom.vertices[(i + 1) % dom.vertices.size()];
      sum += (q - p).norm() * integrate([&](double s) { return g(p + s * (q - p)); }, 0.0, 1.0, qopt);
    }
    return sum;
  }
  constexpr double h = 1e-4;
  return integrate(
      [&](double th) {
        // fourth-order central difference for the tangent
        const Vec2 d = (dom.boundary_point(th - 2 * h) - 8.0 * dom.boundary_point(th - h) +
                        8.0 * dom.boundary_point(th + h) - dom.boundary_point(th + 2 * h)) /
                       (12.0 * h);
        return g(dom.boundary_point(th)) * d.norm();
      },
      0.0, 2 * kPi, qopt);
}

double ball_integral(const SpaceForm& form, const RadialWeight& w, double R, const std::function<double(double)>& f) {
  const int n = form.dim;
  return unit_sphere_area(n) *
         integrate([&](double t) { return f(t) * w.density(t) * std::pow(s_kappa(form, t), n - 1); }, 0.0, R,
                   QuadratureOptions{1e-15, 1e-12, 4000});
}

// --- reports ------------------------------------------------------------------------------

bool ChainProfile::all_hold() const {
  return std::all_of(links.begin(), links.end(), [](const ChainLink& l) { return l.holds(); });
}

bool ChainReport::pass() const {
  if (!profile.all_hold() || !implication_consistent) return false;
  if (centered_ball)
    for (const auto& l : profile.links)
      if (std::abs(l.margin) > equality_tol) return false;
  return true;
}

VerificationReport brock_report(const Domain2D& dom, const SpaceForm& form, const RadialWeight& w,
                                const VerifyOptions& opt) {
  if (form.dim != 2) throw Error(Error::Kind::Domain, "planar domains need n = 2");
  if (form.curvature == Curvature::SphericalCap)
    throw Error(Error::Kind::Domain, "inequality reports cover Euclidean and hyperbolic space");
  if (form.curvature == Curvature::Hyperbolic) dom.validate_in_unit_disk(opt.fem.hyperbolic_margin);
  VerificationReport rep;
  rep.domain = dom.id();
  rep.weight = w.id();
  rep.curvature = form.curvature;
  rep.dim = 2;
  rep.centered_ball = dom.is_centered_disk();
  check_weight(w, domain_t_max(dom, form), opt, rep);

  const int m = opt.question_a ? 2 : 1;
  take_study(rep, convergence_study(dom, form, w, m, opt.fem), m);
  finish_ball_side(rep, form, w, opt);
  fill_inequality(rep, opt);
  if (opt.chain) rep.chain = chain_report(dom, form, w, rep, opt);
  return rep;
}

VerificationReport brock_report(const MeridianDomain& dom, const RadialWeight& w, const VerifyOptions& opt) {
  const SpaceForm form(Curvature::Euclidean, 3);
  VerificationReport rep;
  rep.domain = dom.id();
  rep.weight = w.id();
  rep.curvature = form.curvature;
  rep.dim = 3;
  rep.centered_ball = dom.kind == MeridianDomain::Kind::Ball ||
                      (dom.kind == MeridianDomain::Kind::Spheroid && dom.a == dom.c) ||
                      (dom.kind == MeridianDomain::Kind::PerturbedBall && (dom.eps == 0.0 || dom.k == 0));
  check_weight(w, meridian_t_max(dom), opt, rep);
  if (opt.chain) throw Error(Error::Kind::Domain, "the chain audit covers planar domains only");

  const int m = opt.question_a ? 3 : 2;
  take_study(rep, convergence_study(dom, w, m, opt.fem), m);
  finish_ball_side(rep, form, w, opt);
  fill_inequality(rep, opt);
  return rep;
}

VerificationReport question_a_report(const Domain2D& dom, const SpaceForm& form, const RadialWeight& w,
                                     VerifyOptions opt) {
  opt.question_a = true;
  return brock_report(dom, form, w, opt);
}

ChainReport proof_chain_check(const Domain2D& dom, const SpaceForm& form, const RadialWeight& w, VerifyOptions opt) {
  if (!dom.dihedral_symmetric())
    throw Error(Error::Kind::Symmetry, "domain " + dom.id() +
                                           " is not symmetric under x -> -x and y -> -y about the weight origin");
  opt.chain = true;
  return *brock_report(dom, form, w, opt).chain;
}

RearrangementReport rearrangement_check(const Domain2D& dom, const SpaceForm& form, const RadialWeight& w,
                                        const std::function<double(double)>& v, RearrangementReport::Kind kind,
                                        double slack) {
  RearrangementReport r;
  r.kind = kind;
  r.slack = slack;
  r.volume = domain_integral(dom, form, w, [](double) { return 1.0; }, 1e-12);
  r.R = match_radius(form, w, r.volume, 50.0, 1e-13);
  r.omega_integral = domain_integral(dom, form, w, v, 1e-12);
  r.ball_integral = ball_integral(form, w, r.R, v);
  r.margin = kind == RearrangementReport::Kind::NonDecreasing ? relative_margin(r.ball_integral, r.omega_integral)
                                                               : relative_margin(r.omega_integral, r.ball_integral);
  return r;
}

}  // namespace steklov
