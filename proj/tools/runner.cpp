#include "runner.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <thread>

namespace steklov::cli {

namespace {

using nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Quotes a CSV field when it contains a separator or a quote.
std::string field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Each index is claimed
/// exactly once; callers store results by index so order never depends on
/// scheduling.
template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

ordered_json json_of(const Extrapolation& e) {
  return {{"limit", e.limit}, {"order", e.order}, {"estimate", e.estimate}, {"monotone", e.monotone}};
}

ordered_json json_of(const PropertyIReport& a) {
  return {{"t_max", a.t_max},           {"samples", a.samples},
          {"max_dphi", a.max_dphi},     {"max_d2phi", a.max_d2phi},
          {"non_increasing", a.non_increasing}, {"concave", a.concave},
          {"admissible", a.admissible()}};
}

ordered_json json_of(const ConvergenceStudy& s) {
  ordered_json levels = ordered_json::array();
  for (const auto& l : s.levels) {
    ordered_json j = {{"h", l.h},
                      {"nodes", l.nodes},
                      {"boundary_nodes", l.boundary_nodes},
                      {"volume", l.volume},
                      {"boundary_measure", l.boundary_measure},
                      {"sigma", l.sigma}};
    if (!l.modes.empty()) j["modes"] = l.modes;
    levels.push_back(j);
  }
  ordered_json ex = ordered_json::array();
  for (const auto& e : s.sigma) ex.push_back(json_of(e));
  return {{"domain", s.domain},
          {"weight", s.weight},
          {"curvature", to_string(s.curvature)},
          {"dim", s.dim},
          {"levels", levels},
          {"extrapolated", ex},
          {"warnings", s.warnings}};
}

ordered_json json_of(const ChainProfile& p) {
  ordered_json links = ordered_json::array();
  for (const auto& l : p.links)
    links.push_back({{"name", l.name},
                     {"lower", l.lower},
                     {"upper", l.upper},
                     {"margin", l.margin},
                     {"slack", l.slack},
                     {"holds", l.holds()}});
  return {{"A", p.A},           {"int_omega_G", p.B},       {"int_omega_H", p.C},
          {"int_ball_G", p.ball_G}, {"int_ball_H", p.ball_H}, {"ratio_GH", p.ratio_GH},
          {"ratio_HG", p.ratio_HG}, {"links", links},         {"all_hold", p.all_hold()}};
}

ordered_json json_of(const ChainReport& c) {
  return {{"domain", c.domain},
          {"weight", c.weight},
          {"curvature", to_string(c.curvature)},
          {"dim", c.dim},
          {"volume", c.volume},
          {"R", c.R},
          {"lhs", c.lhs},
          {"sigma1_ball", c.sigma1_ball},
          {"ball_ratio_GH", c.ball_ratio},
          {"profile", json_of(c.profile)},
          {"capped_profile", json_of(c.capped)},
          {"gap", c.gap},
          {"gap_from_links", c.gap_from_links},
          {"implied_gap_bound", c.implied_gap_bound},
          {"implication_consistent", c.implication_consistent},
          {"centered_ball", c.centered_ball},
          {"equality_tol", c.equality_tol},
          {"pass", c.pass()}};
}

std::string status_of(const VerificationReport& r) {
  if (!r.pass()) return "violation";
  if (!r.equality_ok()) return "equality-miss";
  if (r.chain && !r.chain->pass()) return "chain-fail";
  return "pass";
}

bool flagged(const VerificationReport& r) { return status_of(r) != "pass"; }

ordered_json json_of(const VerificationReport& r) {
  ordered_json j = {{"domain", r.domain},
                    {"weight", r.weight},
                    {"curvature", to_string(r.curvature)},
                    {"n", r.dim},
                    {"volume", r.volume},
                    {"R", r.R},
                    {"volume_residual", r.volume_residual},
                    {"sigma", r.sigma},
                    {"sigma_estimate", r.sigma_estimate},
                    {"sigma1_ball", r.sigma1_ball},
                    {"lhs", r.lhs},
                    {"rhs", r.rhs},
                    {"gap", r.gap},
                    {"slack", r.slack},
                    {"equality_tol", r.equality_tol},
                    {"centered_ball", r.centered_ball},
                    {"near_equality", r.near_equality},
                    {"admissibility", json_of(r.admissibility)},
                    {"admissibility_waived", r.admissibility_waived}};
  if (r.question_a)
    j["question_a"] = {{"lhs", r.question_a->lhs},
                       {"rhs", r.question_a->rhs},
                       {"gap_n", r.question_a->gap},
                       {"slack_n", r.question_a->slack},
                       {"candidate", r.question_a->candidate}};
  if (r.chain) j["chain"] = json_of(*r.chain);
  j["study"] = json_of(r.study);
  j["warnings"] = r.warnings;
  j["status"] = status_of(r);
  return j;
}

struct Job {
  std::size_t domain = 0, weight = 0;
  std::optional<VerificationReport> report;
  std::string error;
};

VerificationReport verify_one(const RunConfig& cfg, const DomainSpec& d, const RadialWeight& w, VerifyOptions opt) {
  if (d.solid) return brock_report(d.meridian, w, opt);
  return brock_report(d.planar, cfg.form, w, opt);
}

std::string describe(const DomainSpec& d, const WeightSpec& w) { return d.id() + " / " + w.weight.id(); }

Table verification_table(const RunConfig& cfg, const std::vector<Job>& jobs) {
  Table t;
  const int n = cfg.form.dim;
  t.columns = {"domain", "weight", "curvature", "n", "volume", "R"};
  for (int i = 1; i <= n; ++i) t.columns.push_back("sigma" + std::to_string(i) + "_omega");
  for (const char* c : {"sigma1_ball", "lhs", "rhs", "gap", "gap_n", "status", "slack", "slack_n", "equality_tol",
                        "qa_candidate", "message"})
    t.columns.push_back(c);
  for (const auto& job : jobs) {
    const auto& d = cfg.domains[job.domain];
    const auto& w = cfg.weights[job.weight];
    std::vector<std::string> row = {field(d.id()), field(w.weight.id()), to_string(cfg.form.curvature),
                                    std::to_string(n)};
    if (!job.report) {
      row.resize(t.columns.size());
      row[t.columns.size() - 6] = "error";
      row.back() = field(job.error);
      t.rows.push_back(row);
      continue;
    }
    const auto& r = *job.report;
    row.push_back(fmt(r.volume));
    row.push_back(fmt(r.R));
    for (int i = 0; i < n; ++i) row.push_back(i < static_cast<int>(r.sigma.size()) ? fmt(r.sigma[i]) : "");
    row.push_back(fmt(r.sigma1_ball));
    row.push_back(fmt(r.lhs));
    row.push_back(fmt(r.rhs));
    row.push_back(fmt(r.gap));
    row.push_back(r.question_a ? fmt(r.question_a->gap) : "");
    row.push_back(status_of(r));
    row.push_back(fmt(r.slack));
    row.push_back(r.question_a ? fmt(r.question_a->slack) : "");
    row.push_back(fmt(r.equality_tol));
    row.push_back(r.question_a ? (r.question_a->candidate ? "yes" : "no") : "");
    std::string msg;
    for (const auto& wmsg : r.warnings) msg += (msg.empty() ? "" : "; ") + wmsg;
    row.push_back(field(msg));
    t.rows.push_back(row);
  }
  return t;
}

struct Output {
  ordered_json results;
  Table table;
  int status = kExitPass;
};

Output run_verify(const RunConfig& cfg, const RunOptions& ro, std::ostream& log, bool sweep) {
  std::vector<Job> jobs;
  for (std::size_t d = 0; d < cfg.domains.size(); ++d)
    for (std::size_t w = 0; w < cfg.weights.size(); ++w) jobs.push_back(Job{d, w, std::nullopt, {}});

  VerifyOptions opt = cfg.verify;
  if (sweep) opt.question_a = true;
  std::atomic<std::size_t> done{0};
  parallel_for(jobs.size(), ro.jobs, [&](std::size_t i) {
    auto& job = jobs[i];
    const auto& d = cfg.domains[job.domain];
    const auto& w = cfg.weights[job.weight];
    try {
      job.report = verify_one(cfg, d, w.weight, opt);
    } catch (const std::exception& e) {
      job.error = e.what();
    }
    if (sweep) {
      const std::size_t k = ++done;
      char head[48];
      std::snprintf(head, sizeof head, "[%zu/%zu] ", k, jobs.size());
      // One write per line keeps concurrent progress lines intact.
      log << (std::string(head) + describe(d, w) + ": " + (job.report ? status_of(*job.report) : "error") + "\n")
          << std::flush;
    }
  });

  Output out;
  out.results = ordered_json::array();
  for (const auto& job : jobs) {
    const auto& d = cfg.domains[job.domain];
    const auto& w = cfg.weights[job.weight];
    if (!job.report) {
      log << "error: " << describe(d, w) << ": " << job.error << "\n";
      out.results.push_back({{"domain", d.id()}, {"weight", w.weight.id()}, {"status", "error"}, {"error", job.error}});
      out.status = kExitError;
      continue;
    }
    const auto& r = *job.report;
    out.results.push_back(json_of(r));
    for (const auto& wmsg : r.warnings) log << "warning: " << describe(d, w) << ": " << wmsg << "\n";
    if (flagged(r)) {
      log << "flagged: " << describe(d, w) << ": " << status_of(r) << " (gap " << fmt(r.gap) << ", slack "
          << fmt(r.slack) << ")\n";
      if (out.status == kExitPass) out.status = kExitViolation;
    }
    if (r.question_a && r.question_a->candidate)
      log << "note: " << describe(d, w) << ": question A candidate (gap_n " << fmt(r.question_a->gap) << ")\n";
  }
  out.table = verification_table(cfg, jobs);
  if (!sweep) out.results = out.results.front();
  return out;
}

Output run_ball(const RunConfig& cfg, const RunOptions& ro, std::ostream& log) {
  struct Cell {
    std::size_t weight = 0;
    double R = 0.0;
    std::optional<Sigma1Ball> result;
    std::string error;
  };
  std::vector<Cell> cells;
  for (std::size_t w = 0; w < cfg.weights.size(); ++w)
    for (double R : cfg.radii) cells.push_back(Cell{w, R, std::nullopt, {}});
  parallel_for(cells.size(), ro.jobs, [&](std::size_t i) {
    auto& c = cells[i];
    try {
      c.result = sigma1_ball(cfg.form, cfg.weights[c.weight].weight, c.R, cfg.verify.radial);
    } catch (const std::exception& e) {
      c.error = e.what();
    }
  });

  Output out;
  out.results = ordered_json::array();
  out.table.columns = {"weight", "curvature", "n", "R", "sigma1", "identity_value", "discrepancy", "int_ball_G",
                       "int_ball_H", "status"};
  for (const auto& c : cells) {
    const auto& w = cfg.weights[c.weight].weight;
    std::vector<std::string> row = {field(w.id()), to_string(cfg.form.curvature), std::to_string(cfg.form.dim),
                                    fmt(c.R)};
    if (!c.result) {
      log << "error: ball R=" << fmt(c.R) << " / " << w.id() << ": " << c.error << "\n";
      out.status = kExitError;
      row.insert(row.end(), {"", "", "", "", "", "error"});
      out.table.rows.push_back(row);
      out.results.push_back({{"weight", w.id()}, {"R", c.R}, {"status", "error"}, {"error", c.error}});
      continue;
    }
    const auto& b = *c.result;
    if (b.identity_warning) log << "warning: ball R=" << fmt(c.R) << " / " << w.id() << ": identity discrepancy\n";
    const std::string status = b.identity_warning ? "identity-warning" : "ok";
    row.insert(row.end(), {fmt(b.sigma), fmt(b.identity_value), fmt(b.discrepancy), fmt(b.ball_G_integral),
                           fmt(b.ball_H_integral), status});
    out.table.rows.push_back(row);
    out.results.push_back({{"weight", w.id()},
                           {"curvature", to_string(cfg.form.curvature)},
                           {"n", cfg.form.dim},
                           {"R", c.R},
                           {"sigma1", b.sigma},
                           {"identity_value", b.identity_value},
                           {"discrepancy", b.discrepancy},
                           {"int_ball_G", b.ball_G_integral},
                           {"int_ball_H", b.ball_H_integral},
                           {"status", status}});
  }
  return out;
}

ConvergenceStudy study_one(const RunConfig& cfg) {
  const auto& d = cfg.domains.front();
  const auto& w = cfg.weights.front().weight;
  if (d.solid) return convergence_study(d.meridian, w, cfg.eigenvalues, cfg.verify.fem);
  if (cfg.form.curvature == Curvature::Hyperbolic) d.planar.validate_in_unit_disk(cfg.verify.fem.hyperbolic_margin);
  return convergence_study(d.planar, cfg.form, w, cfg.eigenvalues, cfg.verify.fem);
}

Output run_spectrum(const RunConfig& cfg) {
  const auto s = study_one(cfg);
  const auto& fine = s.levels.back();
  Output out;
  std::vector<double> ex;
  for (const auto& e : s.sigma) ex.push_back(e.limit);
  out.results = {{"domain", s.domain},
                 {"weight", s.weight},
                 {"curvature", to_string(s.curvature)},
                 {"n", s.dim},
                 {"h", fine.h},
                 {"nodes", fine.nodes},
                 {"boundary_nodes", fine.boundary_nodes},
                 {"eigenvalues", fine.sigma},
                 {"extrapolated", ex},
                 {"identities",
                  {{"sigma0", fine.sigma.front()},
                   {"weighted_volume", fine.volume},
                   {"weighted_boundary_measure", fine.boundary_measure}}}};
  if (!fine.modes.empty()) out.results["modes"] = fine.modes;
  out.results["warnings"] = s.warnings;
  out.table.columns = {"index", "eigenvalue", "extrapolated", "estimate", "order", "mode"};
  for (std::size_t i = 0; i < fine.sigma.size(); ++i)
    out.table.rows.push_back({std::to_string(i), fmt(fine.sigma[i]), fmt(s.sigma[i].limit), fmt(s.sigma[i].estimate),
                              fmt(s.sigma[i].order), fine.modes.empty() ? "" : std::to_string(fine.modes[i])});
  return out;
}

Output run_converge(const RunConfig& cfg) {
  const auto s = study_one(cfg);
  Output out;
  out.results = json_of(s);
  out.table.columns = {"row", "h", "nodes", "boundary_nodes", "volume", "boundary_measure"};
  const std::size_t k = s.sigma.size();
  for (std::size_t i = 1; i < k; ++i) out.table.columns.push_back("sigma" + std::to_string(i));
  for (std::size_t l = 0; l < s.levels.size(); ++l) {
    const auto& lv = s.levels[l];
    std::vector<std::string> row = {"level" + std::to_string(l), fmt(lv.h), std::to_string(lv.nodes),
                                    std::to_string(lv.boundary_nodes), fmt(lv.volume), fmt(lv.boundary_measure)};
    for (std::size_t i = 1; i < k; ++i) row.push_back(fmt(lv.sigma[i]));
    out.table.rows.push_back(row);
  }
  const char* names[] = {"limit", "estimate", "order"};
  for (int r = 0; r < 3; ++r) {
    std::vector<std::string> row = {names[r], "", "", "", "", ""};
    for (std::size_t i = 1; i < k; ++i) {
      const auto& e = s.sigma[i];
      row.push_back(fmt(r == 0 ? e.limit : r == 1 ? e.estimate : e.order));
    }
    out.table.rows.push_back(row);
  }
  return out;
}

Output run_chain(const RunConfig& cfg, std::ostream& log) {
  const auto& d = cfg.domains.front();
  const auto c = proof_chain_check(d.planar, cfg.form, cfg.weights.front().weight, cfg.verify);
  Output out;
  out.results = json_of(c);
  out.table.columns = {"profile", "link", "lower", "upper", "margin", "slack", "holds"};
  for (const auto* p : {&c.profile, &c.capped}) {
    const std::string name = p == &c.profile ? "continued" : "capped";
    for (const auto& l : p->links)
      out.table.rows.push_back({name, field(l.name), fmt(l.lower), fmt(l.upper), fmt(l.margin), fmt(l.slack),
                                l.holds() ? "yes" : "no"});
  }
  if (!c.pass()) {
    log << "flagged: chain audit failed for " << describe(d, cfg.weights.front()) << "\n";
    out.status = kExitViolation;
  }
  return out;
}

void write_outputs(const RunConfig& cfg, const RunOptions& ro, const Output& out) {
  std::filesystem::create_directories(ro.out_dir);
  const auto base = std::filesystem::path(ro.out_dir) / cfg.prefix;
  const std::string command = to_string(cfg.command);
  if (cfg.format == "json" || cfg.format == "both") {
    ordered_json doc = {{"schema", "steklov-" + command},
                        {"version", kSchemaVersion},
                        {"config", resolved_config(cfg)},
                        {"results", out.results}};
    std::ofstream f(base.string() + ".json");
    if (!f) throw Error(Error::Kind::Io, "cannot write " + base.string() + ".json");
    f << doc.dump(2) << "\n";
  }
  if (cfg.format == "csv" || cfg.format == "both") {
    std::ofstream f(base.string() + ".csv");
    if (!f) throw Error(Error::Kind::Io, "cannot write " + base.string() + ".csv");
    f << "# steklov-" << command << " csv v" << kSchemaVersion << "\n";
    for (const auto& line : resolved_config_lines(cfg)) f << "# " << line << "\n";
    for (std::size_t i = 0; i < out.table.columns.size(); ++i) f << (i ? "," : "") << out.table.columns[i];
    f << "\n";
    for (const auto& row : out.table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << row[i];
      f << "\n";
    }
  }
}

}  // namespace

int run(RunConfig cfg, const RunOptions& opt, std::ostream& log) {
  expand_random_weights(cfg);
  Output out;
  try {
    switch (cfg.command) {
      case Command::Ball: out = run_ball(cfg, opt, log); break;
      case Command::Spectrum: out = run_spectrum(cfg); break;
      case Command::Verify: out = run_verify(cfg, opt, log, false); break;
      case Command::Sweep: out = run_verify(cfg, opt, log, true); break;
      case Command::Converge: out = run_converge(cfg); break;
      case Command::Chain: out = run_chain(cfg, log); break;
    }
  } catch (const std::exception& e) {
    std::string id;
    if (!cfg.domains.empty()) id = describe(cfg.domains.front(), cfg.weights.front()) + ": ";
    log << "error: " << id << e.what() << "\n";
    return kExitError;
  }
  write_outputs(cfg, opt, out);
  return out.status;
}

}  // namespace steklov::cli
