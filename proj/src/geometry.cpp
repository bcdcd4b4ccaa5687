#include "steklov/geometry.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

namespace steklov {

namespace {

std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

// Signed term of phi = -a t ...: "-a" + var, or "+|a|" + var for a < 0.
std::string neg_term(double a, const std::string& var) {
  return (a < 0.0 ? "+" + fmt_num(-a) : "-" + fmt_num(a)) + var;
}

}  // namespace

SpaceForm::SpaceForm(Curvature c, int n) : curvature(c), dim(n) {
  if (n < 2) throw Error(Error::Kind::Domain, "space form dimension must be >= 2, got " + std::to_string(n));
}

double SpaceForm::kappa() const {
  switch (curvature) {
    case Curvature::Euclidean: return 0.0;
    case Curvature::Hyperbolic: return -1.0;
    case Curvature::SphericalCap: return 1.0;
  }
  return 0.0;
}

std::string to_string(Curvature c) {
  switch (c) {
    case Curvature::Euclidean: return "euclidean";
    case Curvature::Hyperbolic: return "hyperbolic";
    case Curvature::SphericalCap: return "spherical";
  }
  return "unknown";
}

std::string SpaceForm::name() const { return to_string(curvature) + "-" + std::to_string(dim); }

void detail::throw_radial_domain(double t, Curvature c) {
  throw Error(Error::Kind::Domain, "radial argument t = " + fmt_num(t) + " outside the domain of the " +
                                       to_string(c) + " model");
}

double unit_sphere_area(int n) {
  if (n < 1) throw Error(Error::Kind::Domain, "unit_sphere_area needs n >= 1");
  return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

// --- RadialWeight ------------------------------------------------------------

RadialWeight RadialWeight::constant(double c) {
  RadialWeight w;
  w.kind_ = Kind::Constant;
  w.c_ = c;
  w.id_ = c == 0.0 ? "0" : "const(" + fmt_num(c) + ")";
  return w;
}

RadialWeight RadialWeight::linear(double a) {
  RadialWeight w;
  w.kind_ = Kind::Linear;
  w.a_ = a;
  w.id_ = neg_term(a, "t");
  return w;
}

RadialWeight RadialWeight::quadratic(double a, double b) {
  RadialWeight w;
  w.kind_ = Kind::Quadratic;
  w.a_ = a;
  w.b_ = b;
  w.id_ = neg_term(a, "t") + neg_term(b, "t^2");
  return w;
}

RadialWeight RadialWeight::tabulated(std::vector<double> t, std::vector<double> phi) {
  if (t.size() != phi.size() || t.size() < 3)
    throw Error(Error::Kind::Domain, "tabulated weight needs >= 3 (t, phi) pairs of equal length");
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!std::isfinite(t[k]) || !std::isfinite(phi[k]))
      throw Error(Error::Kind::Domain, "tabulated weight has a non-finite entry at row " + std::to_string(k));
    if (k > 0 && !(t[k] > t[k - 1]))
      throw Error(Error::Kind::Domain,
                  "tabulated weight t column must be strictly increasing (row " + std::to_string(k) + ")");
  }
  if (t.front() > 0.0) throw Error(Error::Kind::Domain, "tabulated weight must start at t = 0");

  auto centered = [&](const std::vector<double>& y) {
    const std::size_t n = t.size();
    std::vector<double> d(n);
    d[0] = (y[1] - y[0]) / (t[1] - t[0]);
    d[n - 1] = (y[n - 1] - y[n - 2]) / (t[n - 1] - t[n - 2]);
    for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (y[k + 1] - y[k - 1]) / (t[k + 1] - t[k - 1]);
    return d;
  };

  auto table = std::make_shared<Table>();
  table->d1 = centered(phi);
  table->d2 = centered(table->d1);
  table->t = std::move(t);
  table->phi = std::move(phi);

  RadialWeight w;
  w.kind_ = Kind::Tabulated;
  w.table_ = std::move(table);
  w.id_ = "table(" + std::to_string(w.table_->t.size()) + ")";
  return w;
}

RadialWeight RadialWeight::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Error::Kind::Io, "cannot open weight table '" + path + "'");
  std::vector<double> t, phi;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double a, b;
    if (!(row >> a >> b)) {
      if (t.empty()) continue;  // header
      throw Error(Error::Kind::Config, path + ":" + std::to_string(lineno) + ": expected two numbers");
    }
    t.push_back(a);
    phi.push_back(b);
  }
  try {
    return tabulated(std::move(t), std::move(phi)).rename("table:" + path);
  } catch (const Error& e) {
    throw Error(Error::Kind::Config, path + ": " + e.what());
  }
}

std::size_t RadialWeight::locate(double t) const {
  const auto& ts = table_->t;
  if (t < 0.0 || t > ts.back() * (1.0 + 1e-12))
    throw Error(Error::Kind::Domain,
                "t = " + fmt_num(t) + " outside tabulated weight range [0, " + fmt_num(ts.back()) + "]");
  auto it = std::upper_bound(ts.begin(), ts.end(), t);
  std::size_t k = it == ts.begin() ? 0 : static_cast<std::size_t>(it - ts.begin()) - 1;
  return std::min(k, ts.size() - 2);
}

double RadialWeight::interp(const std::vector<double>& y, double t) const {
  const std::size_t k = locate(t);
  const auto& ts = table_->t;
  const double s = (t - ts[k]) / (ts[k + 1] - ts[k]);
  return (1.0 - s) * y[k] + s * y[k + 1];
}

double RadialWeight::phi(double t) const {
  switch (kind_) {
    case Kind::Constant: return c_;
    case Kind::Linear: return c_ - a_ * t;
    case Kind::Quadratic: return c_ - a_ * t - b_ * t * t;
    case Kind::Tabulated: return interp(table_->phi, t);
  }
  return 0.0;
}

double RadialWeight::dphi(double t) const {
  switch (kind_) {
    case Kind::Constant: return 0.0;
    case Kind::Linear: return -a_;
    case Kind::Quadratic: return -a_ - 2.0 * b_ * t;
    case Kind::Tabulated: return interp(table_->d1, t);
  }
  return 0.0;
}

double RadialWeight::d2phi(double t) const {
  switch (kind_) {
    case Kind::Constant:
    case Kind::Linear: return 0.0;
    case Kind::Quadratic: return -2.0 * b_;
    case Kind::Tabulated: return interp(table_->d2, t);
  }
  return 0.0;
}

std::vector<double> RadialWeight::params() const {
  switch (kind_) {
    case Kind::Constant: return {c_};
    case Kind::Linear: return {a_};
    case Kind::Quadratic: return {a_, b_};
    case Kind::Tabulated: return {};
  }
  return {};
}

double RadialWeight::t_limit() const {
  return kind_ == Kind::Tabulated ? table_->t.back() : std::numeric_limits<double>::infinity();
}

RadialWeight RadialWeight::shifted(double c) const {
  RadialWeight w = *this;
  switch (kind_) {
    case Kind::Constant: w.c_ += c; break;
    case Kind::Linear:
    case Kind::Quadratic: w.c_ += c; break;
    case Kind::Tabulated: {
      auto table = std::make_shared<Table>(*table_);
      for (auto& v : table->phi) v += c;
      w.table_ = std::move(table);
      break;
    }
  }
  w.id_ = id_ + "+" + fmt_num(c);
  return w;
}

// --- Property I ---------------------------------------------------------------

std::string PropertyIReport::diagnostic() const {
  std::ostringstream os;
  os.precision(6);
  if (admissible()) {
    os << "Property I holds on [0, " << t_max << "]";
    return os.str();
  }
  os << "Property I violated on [0, " << t_max << "]:";
  if (!non_increasing) os << " phi' = " << max_dphi << " > " << tol << " at t = " << t_at_max_dphi << " (not non-increasing);";
  if (!concave) os << " phi'' = " << max_d2phi << " > " << tol << " at t = " << t_at_max_d2phi << " (not concave);";
  return os.str();
}

PropertyIReport validate_property_i(const RadialWeight& w, double t_max, int samples, double tol) {
  if (!(t_max > 0.0)) throw Error(Error::Kind::Domain, "validate_property_i needs t_max > 0");
  if (samples < 16) throw Error(Error::Kind::Domain, "validate_property_i needs samples >= 16");
  PropertyIReport rep;
  rep.t_max = std::min(t_max, w.t_limit());
  rep.samples = samples;
  rep.tol = tol;
  rep.max_dphi = -std::numeric_limits<double>::infinity();
  rep.max_d2phi = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= samples; ++k) {
    const double t = rep.t_max * k / samples;
    const double d1 = w.dphi(t), d2 = w.d2phi(t);
    if (d1 > rep.max_dphi) {
      rep.max_dphi = d1;
      rep.t_at_max_dphi = t;
    }
    if (d2 > rep.max_d2phi) {
      rep.max_d2phi = d2;
      rep.t_at_max_d2phi = t;
    }
  }
  rep.non_increasing = rep.max_dphi <= tol;
  rep.concave = rep.max_d2phi <= tol;
  return rep;
}

// --- ball measures ------------------------------------------------------------

double ball_weighted_volume(const SpaceForm& form, const RadialWeight& w, double R,
                            const QuadratureOptions& opt) {
  if (!(R > 0.0)) throw Error(Error::Kind::Domain, "ball radius must be positive");
  s_kappa(form, R);  // domain check
  const int n = form.dim;
  auto integrand = [&](double t) { return std::pow(s_kappa(form, t), n - 1) * w.density(t); };
  return unit_sphere_area(n) * integrate(integrand, 0.0, R, opt);
}

double ball_boundary_weighted_measure(const SpaceForm& form, const RadialWeight& w, double R) {
  if (!(R > 0.0)) throw Error(Error::Kind::Domain, "ball radius must be positive");
  return unit_sphere_area(form.dim) * std::pow(s_kappa(form, R), form.dim - 1) * w.density(R);
}

double poincare_distance(double r) {
  if (!(r >= 0.0) || !(r < 1.0))
    throw Error(Error::Kind::Domain, "point outside the open unit (Poincare) disk, |x| = " + fmt_num(r));
  return std::log1p(r) - std::log1p(-r);
}

double poincare_distance(const Vec2& x) { return poincare_distance(x.norm()); }

double conformal_factor(const Vec2& x) {
  const double r2 = x.squaredNorm();
  if (!(r2 < 1.0)) throw Error(Error::Kind::Domain, "point outside the open unit (Poincare) disk");
  return 2.0 / (1.0 - r2);
}

}  // namespace steklov
