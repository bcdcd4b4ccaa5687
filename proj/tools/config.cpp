#include "config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace steklov::cli {

namespace {

using nlohmann::ordered_json;

[[noreturn]] void fail(int line, const std::string& msg) {
  throw Error(Error::Kind::Config, "config:" + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line = 0;
};

// One [section] block; keys are consumed as they are read so leftovers are
// reported as unknown.
struct Block {
  std::string name;
  int line = 0;
  std::map<std::string, Entry> keys;

  bool has(const std::string& k) const { return keys.count(k) != 0; }

  std::optional<Entry> take(const std::string& k) {
    auto it = keys.find(k);
    if (it == keys.end()) return std::nullopt;
    Entry e = it->second;
    keys.erase(it);
    return e;
  }

  void finish() const {
    if (!keys.empty()) {
      const auto& [k, e] = *keys.begin();
      fail(e.line, "unknown key '" + k + "' in [" + name + "]");
    }
  }
};

double to_double(const Entry& e, const std::string& key) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(e.value, &pos);
  } catch (const std::exception&) {
    fail(e.line, key + ": expected a number, got '" + e.value + "'");
  }
  if (pos != e.value.size() || !std::isfinite(v)) fail(e.line, key + ": expected a number, got '" + e.value + "'");
  return v;
}

long long to_int(const Entry& e, const std::string& key) {
  const double v = to_double(e, key);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) fail(e.line, key + ": expected an integer, got '" + e.value + "'");
  return static_cast<long long>(v);
}

bool to_bool(const Entry& e, const std::string& key) {
  if (e.value == "true" || e.value == "yes" || e.value == "1") return true;
  if (e.value == "false" || e.value == "no" || e.value == "0") return false;
  fail(e.line, key + ": expected true or false, got '" + e.value + "'");
}

std::vector<double> to_list(const Entry& e, const std::string& key) {
  std::vector<double> out;
  std::string s = e.value;
  for (char& c : s)
    if (c == ',') c = ' ';
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(to_double(Entry{tok, e.line}, key));
  if (out.empty()) fail(e.line, key + ": empty list");
  return out;
}

Vec2 to_point(const Entry& e, const std::string& key) {
  const auto v = to_list(e, key);
  if (v.size() != 2) fail(e.line, key + ": expected two numbers 'x, y'");
  return Vec2(v[0], v[1]);
}

std::vector<Vec2> to_vertices(const Entry& e, const std::string& key) {
  std::vector<Vec2> out;
  std::istringstream in(e.value);
  std::string part;
  while (std::getline(in, part, ';')) {
    if (trim(part).empty()) continue;
    out.push_back(to_point(Entry{trim(part), e.line}, key));
  }
  if (out.size() < 3) fail(e.line, key + ": a polygon needs at least 3 vertices");
  return out;
}

template <class T>
void positive(const Entry& e, const std::string& key, T v) {
  if (!(v > T(0))) fail(e.line, key + " must be positive");
}

std::vector<Block> split_blocks(const std::string& text) {
  static const std::set<std::string> sections = {"run",  "space", "weight", "domain", "ball",
                                                  "mesh", "tolerances", "output"};
  static const std::set<std::string> repeatable = {"weight", "domain"};
  std::vector<Block> blocks;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(lineno, "malformed section header '" + line + "'");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (!sections.count(name)) fail(lineno, "unknown section [" + name + "]");
      if (!repeatable.count(name) && !seen.insert(name).second) fail(lineno, "section [" + name + "] repeated");
      blocks.push_back(Block{name, lineno, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(lineno, "expected 'key = value', got '" + line + "'");
    if (blocks.empty()) fail(lineno, "key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(lineno, "empty key");
    if (value.empty()) fail(lineno, key + ": empty value");
    if (!blocks.back().keys.emplace(key, Entry{value, lineno}).second)
      fail(lineno, "duplicate key '" + key + "' in [" + blocks.back().name + "]");
  }
  return blocks;
}

Command parse_command(const Entry& e) {
  static const std::map<std::string, Command> names = {{"ball", Command::Ball},         {"spectrum", Command::Spectrum},
                                                       {"verify", Command::Verify},     {"sweep", Command::Sweep},
                                                       {"converge", Command::Converge}, {"chain", Command::Chain}};
  auto it = names.find(e.value);
  if (it == names.end()) fail(e.line, "command: unknown command '" + e.value + "'");
  return it->second;
}

WeightSpec parse_weight(Block& b, const std::string& base_dir) {
  WeightSpec spec;
  const Entry kind = b.take("kind").value_or(Entry{"constant", b.line});
  auto num = [&](const char* key, double def) {
    auto e = b.take(key);
    return e ? to_double(*e, key) : def;
  };
  if (kind.value == "constant") {
    spec.weight = RadialWeight::constant(num("c", 0.0));
  } else if (kind.value == "linear") {
    spec.weight = RadialWeight::linear(num("a", 0.0));
  } else if (kind.value == "quadratic") {
    const double a = num("a", 0.0);
    spec.weight = RadialWeight::quadratic(a, num("b", 0.0));
  } else if (kind.value == "tabulated") {
    auto f = b.take("file");
    if (!f) fail(b.line, "tabulated weight needs 'file'");
    spec.file = f->value;
    std::filesystem::path p(f->value);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    try {
      spec.weight = RadialWeight::from_csv(p.string()).rename("table:" + f->value);
    } catch (const Error& e) {
      fail(f->line, e.what());
    }
  } else {
    fail(kind.line, "kind: unknown weight kind '" + kind.value + "'");
  }
  if (auto name = b.take("name")) spec.weight.rename(name->value);
  b.finish();
  return spec;
}

DomainSpec parse_domain(Block& b) {
  DomainSpec spec;
  spec.line = b.line;
  auto kind = b.take("kind");
  if (!kind) fail(b.line, "[domain] needs 'kind'");
  auto num = [&](const char* key, std::optional<double> def = std::nullopt) {
    auto e = b.take(key);
    if (!e) {
      if (!def) fail(b.line, std::string(kind->value) + " domain needs '" + key + "'");
      return *def;
    }
    return to_double(*e, key);
  };
  auto wave = [&]() {
    auto e = b.take("k");
    if (!e) fail(b.line, kind->value + " domain needs 'k'");
    return static_cast<int>(to_int(*e, "k"));
  };
  Vec2 offset = Vec2::Zero();
  const bool planar = kind->value == "disk" || kind->value == "ellipse" || kind->value == "perturbed" ||
                      kind->value == "polygon";
  if (planar) {
    if (auto o = b.take("offset")) offset = to_point(*o, "offset");
    spec.offset = offset;
  }
  try {
    if (kind->value == "disk") {
      spec.planar = Domain2D::disk(num("R", 1.0), offset);
    } else if (kind->value == "ellipse") {
      const double a = num("a");
      spec.planar = Domain2D::ellipse(a, num("b"), offset);
    } else if (kind->value == "perturbed") {
      const double R = num("R", 1.0);
      const double eps = num("epsilon");
      spec.planar = Domain2D::perturbed_disk(R, eps, wave(), offset);
    } else if (kind->value == "polygon") {
      auto v = b.take("vertices");
      if (!v) fail(b.line, "polygon domain needs 'vertices'");
      spec.polygon = to_vertices(*v, "vertices");
      spec.planar = Domain2D::polygon(spec.polygon, offset);
    } else if (kind->value == "ball") {
      spec.solid = true;
      spec.meridian = MeridianDomain::ball(num("R", 1.0));
    } else if (kind->value == "spheroid") {
      spec.solid = true;
      const double a = num("a");
      spec.meridian = MeridianDomain::spheroid(a, num("c"));
    } else if (kind->value == "perturbed_ball") {
      spec.solid = true;
      const double R = num("R", 1.0);
      const double eps = num("epsilon");
      spec.meridian = MeridianDomain::perturbed_ball(R, eps, wave());
    } else {
      fail(kind->line, "kind: unknown domain kind '" + kind->value + "'");
    }
    b.finish();
    if (spec.solid)
      spec.meridian.validate();
    else
      spec.planar.validate();
  } catch (const Error& e) {
    if (e.kind() == Error::Kind::Config) throw;
    fail(b.line, "domain " + kind->value + ": " + e.what());
  }
  return spec;
}

// 53 uniform bits in [0, 1), independent of the standard library's
// distribution implementations.
double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

ordered_json weight_json(const WeightSpec& w) {
  ordered_json j;
  static const char* kinds[] = {"constant", "linear", "quadratic", "tabulated"};
  j["kind"] = kinds[static_cast<int>(w.weight.kind())];
  const auto p = w.weight.params();
  switch (w.weight.kind()) {
    case RadialWeight::Kind::Constant: j["c"] = p[0]; break;
    case RadialWeight::Kind::Linear: j["a"] = p[0]; break;
    case RadialWeight::Kind::Quadratic:
      j["a"] = p[0];
      j["b"] = p[1];
      break;
    case RadialWeight::Kind::Tabulated: j["file"] = w.file; break;
  }
  j["name"] = w.weight.id();
  return j;
}

ordered_json domain_json(const DomainSpec& d) {
  ordered_json j;
  if (d.solid) {
    const auto& m = d.meridian;
    switch (m.kind) {
      case MeridianDomain::Kind::Ball:
        j["kind"] = "ball";
        j["R"] = m.R;
        break;
      case MeridianDomain::Kind::Spheroid:
        j["kind"] = "spheroid";
        j["a"] = m.a;
        j["c"] = m.c;
        break;
      case MeridianDomain::Kind::PerturbedBall:
        j["kind"] = "perturbed_ball";
        j["R"] = m.R;
        j["epsilon"] = m.eps;
        j["k"] = m.k;
        break;
    }
  } else {
    const auto& p = d.planar;
    switch (p.kind) {
      case Domain2D::Kind::Disk:
        j["kind"] = "disk";
        j["R"] = p.R;
        break;
      case Domain2D::Kind::Ellipse:
        j["kind"] = "ellipse";
        j["a"] = p.a;
        j["b"] = p.b;
        break;
      case Domain2D::Kind::PerturbedDisk:
        j["kind"] = "perturbed";
        j["R"] = p.R;
        j["epsilon"] = p.eps;
        j["k"] = p.k;
        break;
      case Domain2D::Kind::Polygon: {
        j["kind"] = "polygon";
        ordered_json v = ordered_json::array();
        for (const auto& x : d.polygon) v.push_back({x.x(), x.y()});
        j["vertices"] = v;
        break;
      }
    }
    j["offset"] = {d.offset.x(), d.offset.y()};
  }
  j["id"] = d.id();
  return j;
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::Ball: return "ball";
    case Command::Spectrum: return "spectrum";
    case Command::Verify: return "verify";
    case Command::Sweep: return "sweep";
    case Command::Converge: return "converge";
    case Command::Chain: return "chain";
  }
  return "unknown";
}

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  RunConfig cfg;
  auto blocks = split_blocks(text);
  bool have_command = false;
  int space_line = 0;

  for (auto& b : blocks) {
    if (b.name == "run") {
      if (auto e = b.take("command")) {
        cfg.command = parse_command(*e);
        have_command = true;
      }
      if (auto e = b.take("seed")) {
        const double v = to_double(*e, "seed");
        if (v < 0 || v != std::floor(v)) fail(e->line, "seed must be a non-negative integer");
        cfg.seed = std::stoull(e->value);
      }
      if (auto e = b.take("question_a")) cfg.verify.question_a = to_bool(*e, "question_a");
      if (auto e = b.take("chain")) cfg.verify.chain = to_bool(*e, "chain");
      if (auto e = b.take("waive_admissibility")) {
        cfg.verify.waive_admissibility = to_bool(*e, "waive_admissibility");
        cfg.verify.radial.waive_admissibility = cfg.verify.waive_admissibility;
      }
      if (auto e = b.take("eigenvalues")) {
        cfg.eigenvalues = static_cast<int>(to_int(*e, "eigenvalues"));
        positive(*e, "eigenvalues", cfg.eigenvalues);
      }
      if (auto e = b.take("random_weights")) {
        cfg.random_weights = static_cast<int>(to_int(*e, "random_weights"));
        if (cfg.random_weights < 0) fail(e->line, "random_weights must be >= 0");
      }
    } else if (b.name == "space") {
      space_line = b.line;
      Curvature c = Curvature::Euclidean;
      if (auto e = b.take("curvature")) {
        if (e->value == "euclidean")
          c = Curvature::Euclidean;
        else if (e->value == "hyperbolic")
          c = Curvature::Hyperbolic;
        else if (e->value == "spherical")
          c = Curvature::SphericalCap;
        else
          fail(e->line, "curvature: expected euclidean, hyperbolic or spherical");
      }
      int n = 2;
      if (auto e = b.take("dim")) {
        n = static_cast<int>(to_int(*e, "dim"));
        if (n < 2) fail(e->line, "dim must be >= 2");
      }
      cfg.form = SpaceForm(c, n);
    } else if (b.name == "weight") {
      cfg.weights.push_back(parse_weight(b, base_dir));
    } else if (b.name == "domain") {
      cfg.domains.push_back(parse_domain(b));
    } else if (b.name == "ball") {
      if (auto e = b.take("radii")) {
        cfg.radii = to_list(*e, "radii");
        for (double r : cfg.radii) positive(*e, "radii", r);
      }
    } else if (b.name == "mesh") {
      auto& f = cfg.verify.fem;
      if (auto e = b.take("rings")) f.rings = static_cast<int>(to_int(*e, "rings"));
      if (auto e = b.take("sectors")) f.sectors = static_cast<int>(to_int(*e, "sectors"));
      if (auto e = b.take("levels")) {
        f.levels = static_cast<int>(to_int(*e, "levels"));
        if (f.levels < 1) fail(e->line, "levels must be >= 1");
      }
      if (auto e = b.take("min_angle")) {
        f.mesh.min_angle_degrees = to_double(*e, "min_angle");
        if (f.mesh.min_angle_degrees < 0 || f.mesh.min_angle_degrees >= 60)
          fail(e->line, "min_angle must lie in [0, 60)");
      }
      if (auto e = b.take("coarsening")) {
        f.mesh.ring_coarsening_ratio = to_double(*e, "coarsening");
        if (f.mesh.ring_coarsening_ratio < 0) fail(e->line, "coarsening must be >= 0");
      }
      if (auto e = b.take("weight_points")) {
        f.assembly.weight_points = static_cast<int>(to_int(*e, "weight_points"));
        if (f.assembly.weight_points != 1 && f.assembly.weight_points != 3)
          fail(e->line, "weight_points must be 1 or 3");
      }
      if (f.rings < 2) fail(b.line, "rings must be >= 2");
      if (f.sectors < 8 || f.sectors % 4 != 0) fail(b.line, "sectors must be a multiple of 4 and >= 8");
    } else if (b.name == "tolerances") {
      auto& v = cfg.verify;
      auto tol = [&](const char* key, double& slot) {
        if (auto e = b.take(key)) {
          slot = to_double(*e, key);
          positive(*e, key, slot);
        }
      };
      tol("ode_rel", v.radial.rel_tol);
      tol("quadrature_rel", v.radial.quadrature.rel_tol);
      tol("admissibility", v.radial.admissibility_tol);
      tol("slack_floor", v.slack_floor);
      tol("slack_factor", v.slack_factor);
      tol("equality_floor", v.equality_floor);
      tol("chain_slack", v.chain_slack);
      tol("r_max", v.r_max);
      tol("hyperbolic_margin", v.fem.hyperbolic_margin);
    } else if (b.name == "output") {
      if (auto e = b.take("format")) {
        if (e->value != "csv" && e->value != "json" && e->value != "both")
          fail(e->line, "format must be csv, json or both");
        cfg.format = e->value;
      }
      if (auto e = b.take("prefix")) {
        if (e->value.find('/') != std::string::npos) fail(e->line, "prefix must be a plain file name");
        cfg.prefix = e->value;
      }
    }
    b.finish();
  }

  if (!have_command) fail(1, "[run] command is required");
  if (cfg.weights.empty()) cfg.weights.push_back(WeightSpec{});

  const int line = space_line ? space_line : 1;
  const bool hyperbolic = cfg.form.curvature == Curvature::Hyperbolic;
  if (cfg.command == Command::Ball) {
    if (cfg.radii.empty()) fail(line, "ball command needs [ball] radii");
    if (!cfg.domains.empty()) fail(cfg.domains.front().line, "ball command takes no [domain]");
  } else {
    if (cfg.form.curvature == Curvature::SphericalCap)
      fail(line, "spherical caps are supported by the ball command only");
    if (cfg.domains.empty()) fail(line, to_string(cfg.command) + " command needs a [domain]");
    if (cfg.command != Command::Sweep) {
      if (cfg.domains.size() != 1) fail(cfg.domains[1].line, to_string(cfg.command) + " takes exactly one [domain]");
      if (cfg.weights.size() != 1) fail(line, to_string(cfg.command) + " takes exactly one [weight]");
    }
    for (const auto& d : cfg.domains) {
      if (d.solid && (cfg.form.dim != 3 || hyperbolic))
        fail(d.line, "solid domains need curvature = euclidean and dim = 3");
      if (!d.solid && cfg.form.dim != 2) fail(d.line, "planar domains need dim = 2");
      if (!d.solid && hyperbolic) {
        try {
          d.planar.validate_in_unit_disk(cfg.verify.fem.hyperbolic_margin);
        } catch (const Error& e) {
          fail(d.line, e.what());
        }
      }
    }
    if (cfg.command == Command::Chain && cfg.domains.front().solid) fail(line, "chain covers planar domains only");
  }
  if (cfg.prefix.empty()) cfg.prefix = to_string(cfg.command);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Error::Kind::Io, "cannot open config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  auto base = std::filesystem::path(path).parent_path();
  return parse_config(text.str(), base.empty() ? "." : base.string());
}

void expand_random_weights(RunConfig& cfg) {
  // splitmix64: portable and fully determined by the seed.
  std::uint64_t state = cfg.seed;
  auto next = [&state]() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  };
  for (int i = 0; i < cfg.random_weights; ++i) {
    const double a = unit_uniform(next());
    const double b = 0.5 * unit_uniform(next());
    WeightSpec w;
    w.weight = RadialWeight::quadratic(a, b);
    w.weight.rename("rand" + std::to_string(i) + ":" + w.weight.id());
    cfg.weights.push_back(w);
  }
  cfg.random_weights = 0;
}

ordered_json resolved_config(const RunConfig& cfg) {
  ordered_json j;
  const auto& v = cfg.verify;
  j["run"] = {{"command", to_string(cfg.command)},
              {"seed", cfg.seed},
              {"question_a", v.question_a},
              {"chain", v.chain},
              {"waive_admissibility", v.waive_admissibility},
              {"eigenvalues", cfg.eigenvalues},
              {"random_weights", cfg.random_weights}};
  j["space"] = {{"curvature", to_string(cfg.form.curvature)}, {"dim", cfg.form.dim}};
  j["weight"] = ordered_json::array();
  for (const auto& w : cfg.weights) j["weight"].push_back(weight_json(w));
  j["domain"] = ordered_json::array();
  for (const auto& d : cfg.domains) j["domain"].push_back(domain_json(d));
  j["ball"] = {{"radii", cfg.radii}};
  j["mesh"] = {{"rings", v.fem.rings},
               {"sectors", v.fem.sectors},
               {"levels", v.fem.levels},
               {"min_angle", v.fem.mesh.min_angle_degrees},
               {"coarsening", v.fem.mesh.ring_coarsening_ratio},
               {"weight_points", v.fem.assembly.weight_points}};
  j["tolerances"] = {{"ode_rel", v.radial.rel_tol},
                     {"quadrature_rel", v.radial.quadrature.rel_tol},
                     {"admissibility", v.radial.admissibility_tol},
                     {"slack_floor", v.slack_floor},
                     {"slack_factor", v.slack_factor},
                     {"equality_floor", v.equality_floor},
                     {"chain_slack", v.chain_slack},
                     {"r_max", v.r_max},
                     {"hyperbolic_margin", v.fem.hyperbolic_margin}};
  j["output"] = {{"format", cfg.format}, {"prefix", cfg.prefix}};
  return j;
}

namespace {

// Config-format rendering: lists as "a, b", point lists as "x y; x y".
std::string render(const ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (!v.is_array()) return v.dump();
  std::string s;
  for (const auto& x : v) {
    if (!s.empty()) s += x.is_array() ? "; " : ", ";
    if (x.is_array())
      s += x[0].dump() + " " + x[1].dump();
    else
      s += x.dump();
  }
  return s;
}

}  // namespace

std::vector<std::string> resolved_config_lines(const RunConfig& cfg) {
  std::vector<std::string> out;
  const auto j = resolved_config(cfg);
  auto emit = [&out](const std::string& section, const ordered_json& body) {
    out.push_back("[" + section + "]");
    for (const auto& [k, val] : body.items()) out.push_back(k + " = " + render(val));
  };
  for (const auto& [section, body] : j.items()) {
    if (body.is_array())
      for (const auto& item : body) emit(section, item);
    else
      emit(section, body);
  }
  return out;
}

}  // namespace steklov::cli
