#include "dmetrics_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dmetrics/analysis.hpp"
#include "dmetrics/error.hpp"
#include "dmetrics/io.hpp"
#include "dmetrics/paths.hpp"

namespace dmetrics::cli {
namespace {

using nlohmann::json;

struct Common {
  std::string domain_path;
  double h = 0.0;  // 0: 0.01 x domain scale
  std::size_t m = 10'000;
  std::uint64_t seed = 42;
  std::string out_path;
  std::size_t max_nodes = 10'000'000;
};

struct PairArgs {
  std::string x;
  std::string y;
};

struct SampleArgs {
  std::string policy = "uniform";
  std::size_t pairs = 1000;
  double min_depth = 0.0;  // 0: 5 h
};

void add_common(CLI::App& cmd, Common& c) {
  cmd.add_option("--domain", c.domain_path, "Domain file (JSON)")->required();
  cmd.add_option("--h", c.h, "Grid spacing (default 0.01 x domain scale)")->check(CLI::PositiveNumber);
  cmd.add_option("--m", c.m, "Boundary atlas size")->check(CLI::Range(std::size_t{8}, std::size_t{100'000'000}));
  cmd.add_option("--seed", c.seed, "Sample seed");
  cmd.add_option("--out", c.out_path, "Output file (default stdout)");
  cmd.add_option("--max-nodes", c.max_nodes, "Grid node cap");
}

void add_pair(CLI::App& cmd, PairArgs& p) {
  cmd.add_option("--x", p.x, "First point, comma separated")->required();
  cmd.add_option("--y", p.y, "Second point, comma separated")->required();
}

void add_sample(CLI::App& cmd, SampleArgs& s) {
  cmd.add_option("--policy", s.policy, "uniform | boundary_biased | adversarial");
  cmd.add_option("--pairs", s.pairs, "Number of sampled pairs");
  cmd.add_option("--min-depth", s.min_depth, "Smallest d_D of sampled points (default 5 h)")
      ->check(CLI::PositiveNumber);
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Output sink: the named file or the command's stdout stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw InvalidArgument("cannot write " + path);
    os_ = file_.get();
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

Point checked_point(const Domain& D, const std::string& text, const char* name) {
  Point p = parse_point(text);
  if (p.dim() != D.dim()) {
    throw InvalidArgument(std::string("--") + name + " has dimension " + std::to_string(p.dim()) +
                          ", domain has n = " + std::to_string(D.dim()));
  }
  D.dist_to_boundary(p);
  return p;
}

double spacing(const Common& c, const Domain& D) { return c.h > 0.0 ? c.h : 0.01 * D.scale(); }

void print_row(std::ostream& os, const std::string& name, const MetricValue& v) {
  os << std::left << std::setw(12) << name << std::setw(18) << fmt(v.value);
  if (v.is_exact()) {
    os << "exact";
  } else {
    os << '[' << fmt(v.lower) << ", " << fmt(v.upper) << ']';
  }
  if (v.pseudometric) os << "  (pseudometric)";
  os << '\n';
}

int cmd_dist(const Common& c, const PairArgs& p, bool as_json, std::ostream& out) {
  const Domain D = load_domain(c.domain_path);
  const Point x = checked_point(D, p.x, "x");
  const Point y = checked_point(D, p.y, "y");
  const double min_depth = 0.5 * std::min(D.dist_to_boundary(x), D.dist_to_boundary(y));
  const Workspace ws(D, spacing(c, D), c.m, min_depth, true, c.max_nodes);
  const PairEvaluation ev = evaluate_pair(ws, x, y);
  if (!ev.ok()) throw NumericalFailure(ev.failure);
  Sink sink(c.out_path, out);
  if (as_json) {
    json j;
    j["domain"] = domain_to_json(D);
    j["x"] = to_string(x);
    j["y"] = to_string(y);
    j["h"] = ws.h();
    j["m"] = ws.atlas().size();
    j["metrics"] = {{"alpha", to_json(ev.alpha)},       {"j", to_json(ev.j)},
                    {"jprime", to_json(ev.jprime)},     {"k", to_json(ev.k)},
                    {"lambda", to_json(ev.lambda)},     {"rho", to_json(ev.rho)},
                    {"alphatilde", to_json(ev.alphatilde)},
                    {"log_density", to_json(MetricValue::exact(ev.log_density))}};
    *sink << j.dump(2) << '\n';
    return ok;
  }
  auto& os = *sink;
  os << "domain  " << D.describe() << '\n'
     << "x       " << to_string(x) << '\n'
     << "y       " << to_string(y) << '\n'
     << "h       " << fmt(ws.h()) << "   atlas " << ws.atlas().size() << "   nodes " << ws.grid().node_count()
     << '\n'
     << std::left << std::setw(12) << "metric" << std::setw(18) << "value" << "bracket\n";
  print_row(os, "alpha", ev.alpha);
  print_row(os, "j", ev.j);
  print_row(os, "jprime", ev.jprime);
  print_row(os, "k", ev.k);
  print_row(os, "lambda", ev.lambda);
  print_row(os, "rho", ev.rho);
  print_row(os, "alphatilde", ev.alphatilde);
  print_row(os, "log_density", MetricValue::exact(ev.log_density));
  return ok;
}

int cmd_geodesic(const Common& c, const PairArgs& p, const std::string& weight, std::ostream& out,
                 std::ostream& err) {
  const Domain D = load_domain(c.domain_path);
  const Point x = checked_point(D, p.x, "x");
  const Point y = checked_point(D, p.y, "y");
  const double min_depth = 0.5 * std::min(D.dist_to_boundary(x), D.dist_to_boundary(y));
  const bool inner = weight == "inner_diameter";
  const WeightKind w = inner ? WeightKind::euclidean : parse_weight_kind(weight);
  const Workspace ws(D, spacing(c, D), c.m, min_depth, w == WeightKind::apollonian, c.max_nodes);
  const PathResult r = inner ? inner_diameter(D, x, y, ws.grid())
                             : shortest_path(ws.grid(), D, x, y, w, ws.alpha_weights());
  Sink sink(c.out_path, out);
  write_polyline_csv(*sink, r.path);
  err << weight << ' ' << fmt(r.metric.value) << " [" << fmt(r.metric.lower) << ", " << fmt(r.metric.upper)
      << "]  vertices " << r.path.size() << "  snap " << fmt(r.snap_error) << '\n';
  return ok;
}

struct SampleRun {
  PairSample sample;
  std::unique_ptr<Workspace> ws;
  std::vector<PairEvaluation> evals;
};

SampleRun run_sample(const Common& c, const SampleArgs& s) {
  const Domain D = load_domain(c.domain_path);
  const double h = spacing(c, D);
  const PairPolicy policy = parse_pair_policy(s.policy);
  const double floor = s.min_depth > 0.0 ? s.min_depth : 5.0 * h;
  SampleRun run;
  run.sample = sample_pairs(D, policy, s.pairs, c.seed, floor);
  if (run.sample.pairs.empty()) throw InvalidArgument("empty pair sample");
  const double min_depth = 0.5 * min_sample_depth(D, run.sample);
  run.ws = std::make_unique<Workspace>(D, h, c.m, min_depth, true, c.max_nodes);
  run.evals = evaluate_pairs(*run.ws, run.sample);
  return run;
}

void write_csv(const std::string& path, const std::vector<PairEvaluation>& evals) {
  if (path.empty()) return;
  std::ofstream f(path);
  if (!f) throw InvalidArgument("cannot write " + path);
  write_pairs_csv(f, evals);
}

int cmd_constants(const Common& c, const SampleArgs& s, const std::string& csv, std::ostream& out) {
  const SampleRun run = run_sample(c, s);
  const ConstantsReport report = constants_report(*run.ws, run.sample, run.evals, false);
  write_csv(csv, run.evals);
  Sink sink(c.out_path, out);
  *sink << to_json(report).dump(2) << '\n';
  return ok;
}

int cmd_verify(const Common& c, const SampleArgs& s, const std::string& csv, std::ostream& out) {
  const SampleRun run = run_sample(c, s);
  const auto checks = verify_inequalities(*run.ws, run.evals);
  write_csv(csv, run.evals);
  json j;
  j["domain"] = run.ws->domain().describe();
  j["policy"] = std::string(to_string(run.sample.policy));
  j["seed"] = run.sample.seed;
  j["h"] = run.ws->h();
  j["atlas_size"] = run.ws->atlas().size();
  j["pairs"] = run.evals.size();
  std::size_t failed_pairs = 0;
  for (const auto& ev : run.evals) failed_pairs += ev.ok() ? 0 : 1;
  j["failed_pairs"] = failed_pairs;
  j["inequalities"] = json::array();
  for (const auto& ch : checks) j["inequalities"].push_back(to_json(ch));
  const std::size_t failures = total_failures(checks);
  j["failures"] = failures;
  Sink sink(c.out_path, out);
  *sink << j.dump(2) << '\n';
  return failures == 0 ? ok : verification_failed;
}

Polyline read_polyline_csv(const std::string& path, std::size_t dim) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read " + path);
  Polyline p;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Point v = parse_point(line);
    if (v.dim() != dim) throw InvalidArgument(path + ": vertex dimension mismatch");
    p.vertices.push_back(std::move(v));
  }
  return p;
}

int cmd_chain(const Common& c, const PairArgs& p, const std::string& path_csv, std::ostream& out) {
  const Domain D = load_domain(c.domain_path);
  Polyline path;
  if (!path_csv.empty()) {
    path = read_polyline_csv(path_csv, D.dim());
  } else {
    if (p.x.empty() || p.y.empty()) throw InvalidArgument("chain needs --path or both --x and --y");
    const Point x = checked_point(D, p.x, "x");
    const Point y = checked_point(D, p.y, "y");
    path.vertices = {x, y};
  }
  validate_polyline(D, path);
  double min_depth = std::numeric_limits<double>::infinity();
  for (const Point& v : path.vertices) min_depth = std::min(min_depth, D.dist_to_boundary(v));
  const Workspace ws(D, spacing(c, D), c.m, 0.5 * min_depth, false, c.max_nodes);
  if (path_csv.empty()) {
    path = shortest_path(ws.grid(), D, path.vertices.front(), path.vertices.back(), WeightKind::quasihyperbolic)
               .path;
  }
  const ChainDiagnostics diag = chain_diagnostics(D, ws.grid(), path);
  json j = to_json(diag);
  j["domain"] = D.describe();
  j["h"] = ws.h();
  j["path_vertices"] = path.size();
  Sink sink(c.out_path, out);
  *sink << j.dump(2) << '\n';
  return ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conformal-type metrics on Euclidean domains", "dmetrics"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  Common c_dist, c_geo, c_const, c_verify, c_chain;
  PairArgs p_dist, p_geo, p_chain;
  SampleArgs s_const, s_verify;
  bool dist_json = false;
  std::string weight = "quasihyperbolic";
  std::string const_csv, verify_csv, chain_path;

  auto* dist = app.add_subcommand("dist", "All metrics for one pair, with brackets");
  add_common(*dist, c_dist);
  add_pair(*dist, p_dist);
  dist->add_flag("--json", dist_json, "JSON output");

  auto* geo = app.add_subcommand("geodesic", "Witness polyline (CSV) for one pair");
  add_common(*geo, c_geo);
  add_pair(*geo, p_geo);
  geo->add_option("--weight", weight, "euclidean | quasihyperbolic | apollonian | inner_diameter");

  auto* cons = app.add_subcommand("constants", "Constants report for a pair sample");
  add_common(*cons, c_const);
  add_sample(*cons, s_const);
  cons->add_option("--csv", const_csv, "Per-pair metric table");

  auto* ver = app.add_subcommand("verify", "Inequality suite over a pair sample");
  add_common(*ver, c_verify);
  add_sample(*ver, s_verify);
  ver->add_option("--csv", verify_csv, "Per-pair metric table");

  auto* chain = app.add_subcommand("chain", "Dyadic chain diagnostics along a path");
  add_common(*chain, c_chain);
  chain->add_option("--x", p_chain.x, "Start point (path = quasihyperbolic geodesic to --y)");
  chain->add_option("--y", p_chain.y, "End point");
  chain->add_option("--path", chain_path, "Polyline CSV with header x0,x1[,x2]");

  std::string command = "dmetrics";
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (dist->parsed()) {
      command = "dist";
      return cmd_dist(c_dist, p_dist, dist_json, out);
    }
    if (geo->parsed()) {
      command = "geodesic";
      return cmd_geodesic(c_geo, p_geo, weight, out, err);
    }
    if (cons->parsed()) {
      command = "constants";
      return cmd_constants(c_const, s_const, const_csv, out);
    }
    if (ver->parsed()) {
      command = "verify";
      return cmd_verify(c_verify, s_verify, verify_csv, out);
    }
    command = "chain";
    return cmd_chain(c_chain, p_chain, chain_path, out);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage_error;
  } catch (const NumericalFailure& e) {
    err << "dmetrics " << command << ": " << e.what() << '\n';
    return numerical_failure;
  } catch (const std::exception& e) {
    err << "dmetrics " << command << ": " << e.what() << '\n';
    return usage_error;
  }
}

}  // namespace dmetrics::cli
