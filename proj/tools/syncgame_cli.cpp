// syncgame: command-line front end.
//
//   syncgame chi-f GRAPH [--exact]
//   syncgame proj-rank GRAPH --dim K --rank R [--restarts N] [--seed S] [--equal-trace]
//   syncgame value GAME --type loc|q [--dim K] [--restarts N] [--seed S]
//   syncgame orthogonalize MATRICES GRAPH [--order ascending|max-degree-last] [--outputs M]
//   syncgame discretize MATRIX --outputs M
//   syncgame product GRAPH --outputs M
//   syncgame membership CORRELATION
//
// Graphs are DIMACS, or graph JSON when the file ends in ".json". A game
// argument may also be a DIMACS graph together with --colors C, which builds
// the coloring game. Reports are JSON on stdout (or --out).
//
// Exit codes: 0 ok, 2 bad input, 3 size cap exceeded, 4 infeasible,
// 5 a certificate failed re-verification.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "syncgame/json_io.hpp"
#include "syncgame/syncgame.hpp"

using namespace syncgame;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitTooLarge = 3;
constexpr int kExitInfeasible = 4;
constexpr int kExitInvariant = 5;

struct RunConfig {
  std::string command;
  std::vector<std::string> inputs;
  std::size_t dim = 0;
  std::size_t rank = 0;
  std::size_t outputs = 0;
  std::size_t colors = 0;
  std::size_t restarts = 1;
  std::uint64_t seed = 0;
  double tol = kDefaultTolerance;
  bool exact = false;
  bool equal_trace = false;
  bool parallel = false;
  std::string order = "ascending";
  std::string type = "loc";
  std::string distribution = "uniform-all-pairs";
  std::string out;
};

/// A failed re-verification; reported with exit code 5 after printing.
struct VerificationFailure {
  std::string what;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

json parse_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
}

Graph load_graph(const std::string& path) {
  if (ends_with(path, ".json")) return io::graph_from_json(parse_json(path));
  return parse_dimacs(read_file(path));
}

Game load_game(const RunConfig& cfg, const std::string& path) {
  if (cfg.colors > 0) {
    return coloring_game(load_graph(path), cfg.colors, parse_distribution_mode(cfg.distribution));
  }
  return io::game_from_json(parse_json(path));
}

json config_json(const RunConfig& cfg) {
  return {{"command", cfg.command},   {"inputs", cfg.inputs},     {"dim", cfg.dim},
          {"rank", cfg.rank},         {"outputs", cfg.outputs},   {"colors", cfg.colors},
          {"restarts", cfg.restarts}, {"seed", cfg.seed},         {"tol", cfg.tol},
          {"exact", cfg.exact},       {"equal_trace", cfg.equal_trace}, {"order", cfg.order},
          {"type", cfg.type},         {"distribution", cfg.distribution}};
}

void check(bool ok, const std::string& what) {
  if (!ok) throw VerificationFailure{what};
}

// ---------------------------------------------------------------------------
// Commands

json cmd_chi_f(const RunConfig& cfg) {
  const Graph g = load_graph(cfg.inputs.at(0));
  const auto r = fractional_chromatic(g, cfg.exact);
  json report = io::to_json(r);
  // Primal: every vertex covered; dual: no independent set overloaded.
  std::vector<double> cover(g.vertex_count(), 0.0);
  for (std::size_t i = 0; i < r.sets.size(); ++i)
    for (const auto v : r.sets[i]) cover[v] += r.set_weights[i];
  const double min_cover = cover.empty() ? 1.0 : *std::min_element(cover.begin(), cover.end());
  double max_load = 0.0;
  for (const auto s : maximal_independent_sets(g)) {
    double load = 0.0;
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
      if (s >> v & 1u) load += r.vertex_weights[v];
    max_load = std::max(max_load, load);
  }
  double dual_total = 0.0;
  for (const double y : r.vertex_weights) dual_total += y;
  report["verification"] = {{"min_vertex_cover", min_cover},
                            {"max_independent_set_load", max_load},
                            {"dual_objective", dual_total},
                            {"duality_gap", std::abs(dual_total - r.value)}};
  check(min_cover >= 1.0 - 1e-9, "primal weights do not cover every vertex");
  check(max_load <= 1.0 + 1e-9, "dual weights overload an independent set");
  check(std::abs(dual_total - r.value) <= 1e-9, "primal and dual objectives differ");
  return report;
}

json cmd_proj_rank(const RunConfig& cfg, bool& infeasible) {
  const Graph g = load_graph(cfg.inputs.at(0));
  ProjectiveRankOptions opt;
  opt.dim = cfg.dim;
  opt.rank = cfg.rank;
  opt.restarts = cfg.restarts;
  opt.seed = cfg.seed;
  opt.equal_trace = cfg.equal_trace;
  opt.order = parse_elimination_order(cfg.order);
  const auto c = projective_rank_certificate(g, opt);
  json report = io::to_json(c);
  infeasible = c.infeasible;
  const double residual = max_edge_residual(g, c.projections);
  double min_trace = 1.0;
  for (const auto& p : c.projections) min_trace = std::min(min_trace, p.trace());
  report["verification"] = {{"orthogonality_residual", residual},
                            {"min_trace", min_trace},
                            {"lambda_residual", std::abs(min_trace - c.lambda)}};
  if (!c.infeasible) {
    check(residual <= 1e-10, "edge projections are not orthogonal");
    check(std::abs(min_trace - c.lambda) <= 1e-9, "reported lambda differs from the traces");
  }
  return report;
}

json cmd_value(const RunConfig& cfg) {
  const Game g = load_game(cfg, cfg.inputs.at(0));
  ValueReport r;
  if (cfg.type == "loc") {
    r = local_sync_value(g);
  } else if (cfg.type == "q") {
    SeesawOptions opt;
    opt.dim = cfg.dim == 0 ? 1 : cfg.dim;
    opt.restarts = cfg.restarts;
    opt.seed = cfg.seed;
    opt.parallel = cfg.parallel;
    r = seesaw_sync_value(g, opt);
  } else {
    throw Error(ErrorCode::ParseError, "--type must be 'loc' or 'q'");
  }
  json report = io::to_json(r);
  bool full_support = true;
  for (const auto& w : g.distribution()) full_support = full_support && w > 0;
  report["distribution_full_support"] = full_support;
  report["synchronous_game"] = is_synchronous_game(g);
  report["bound_kind"] = cfg.type == "loc" ? "exact" : "lower";
  // Independent recomputation from the certificate.
  const CorrelationMatrix p = r.strategy ? deterministic_correlation(g.outputs(), *r.strategy) : from_pvm(*r.pvm);
  const double recomputed = game_value(p, g);
  report["verification"] = {{"recomputed_value", recomputed},
                            {"residual", std::abs(recomputed - r.value)},
                            {"certificate_synchronous", is_synchronous(p)}};
  if (r.exact_value) {
    report["verification"]["exact_residual"] = std::abs(to_double(*r.exact_value) - recomputed);
  }
  if (!r.sweep_history.empty()) {
    bool monotone = true;
    for (std::size_t i = 1; i < r.sweep_history.size(); ++i)
      monotone = monotone && r.sweep_history[i] >= r.sweep_history[i - 1];
    report["verification"]["history_monotone"] = monotone;
    check(monotone, "see-saw history is not monotone");
  }
  check(std::abs(recomputed - r.value) <= 1e-9, "value does not match its certificate");
  return report;
}

json cmd_orthogonalize(const RunConfig& cfg) {
  const auto ms = io::matrices_from_json(parse_json(cfg.inputs.at(0)));
  const Graph g = load_graph(cfg.inputs.at(1));
  std::vector<Projection> es;
  for (const auto& m : ms) es.emplace_back(m, cfg.tol);
  const auto kind = parse_elimination_order(cfg.order);
  json report;
  if (cfg.outputs > 0) {
    const std::size_t m = cfg.outputs;
    if (es.size() != g.vertex_count() * m) {
      throw Error(ErrorCode::DimensionMismatch, "labeled input needs n*m projections (vertex-major)");
    }
    std::vector<std::vector<Projection>> table(g.vertex_count());
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
      for (std::size_t i = 0; i < m; ++i) table[v].push_back(es[v * m + i]);
    const auto r = orthogonalize_labeled(g, table, m, kind, cfg.tol);
    report = io::to_json(r.product_result);
    report["max_label_sum_norm"] = r.max_label_sum_norm;
    const Graph product = cartesian_product_complete(g, m);
    const double residual = max_edge_residual(product, r.product_result.projections);
    report["verification"] = {{"orthogonality_residual", residual},
                              {"label_sums_below_identity", r.max_label_sum_norm <= 1.0 + 1e-10}};
    check(residual <= 1e-10, "labeled projections are not orthogonal");
    check(r.max_label_sum_norm <= 1.0 + 1e-10, "labels sum above the identity");
  } else {
    const auto r = orthogonalize_family(g, es, kind);
    report = io::to_json(r);
    const double residual = max_edge_residual(g, r.projections);
    report["verification"] = {{"orthogonality_residual", residual}};
    check(residual <= 1e-10, "projections are not orthogonal across edges");
  }
  report["order_kind"] = to_string(kind);
  return report;
}

json cmd_discretize(const RunConfig& cfg) {
  const auto ms = io::matrices_from_json(parse_json(cfg.inputs.at(0)));
  if (ms.size() != 1) throw Error(ErrorCode::ParseError, "expected a single matrix");
  const Unitary u(ms.front(), cfg.tol);
  const auto d = discretize_unitary(u, cfg.outputs);
  json report = io::to_json(d);
  const double recomputed = operator_norm(d.u_tilde.matrix() - u.matrix());
  report["verification"] = {{"recomputed_distance", recomputed},
                            {"u_tilde_unitarity_defect", unitarity_defect(d.u_tilde.matrix())}};
  check(d.sum_residual <= 1e-10, "arc projections do not sum to the identity");
  check(recomputed <= d.bound + 1e-10, "distance exceeds 2 sin(pi/m)");
  return report;
}

std::string cmd_product(const RunConfig& cfg) {
  const Graph g = load_graph(cfg.inputs.at(0));
  return to_dimacs(cartesian_product_complete(g, cfg.outputs));
}

json cmd_membership(const RunConfig& cfg) {
  const CorrelationMatrix p = io::correlation_from_json(parse_json(cfg.inputs.at(0)));
  const auto r = local_sync_membership(p);
  json report = io::to_json(r);
  report["synchronous"] = is_synchronous(p);
  if (r.member) {
    // Rebuild p from the reported weights.
    std::vector<std::pair<double, CorrelationMatrix>> parts;
    for (const auto& [f, w] : r.weights) parts.emplace_back(w, deterministic_correlation(p.outputs(), f));
    std::vector<double> rebuilt(p.entries().size(), 0.0);
    for (const auto& [w, c] : parts)
      for (std::size_t i = 0; i < rebuilt.size(); ++i) rebuilt[i] += w * c.entries()[i];
    double err = 0.0;
    for (std::size_t i = 0; i < rebuilt.size(); ++i) err = std::max(err, std::abs(rebuilt[i] - p.entries()[i]));
    report["verification"] = {{"reconstruction_error", err}};
    check(err <= kMembershipTolerance, "weights do not reconstruct the correlation");
  } else {
    double hp = 0.0;
    for (std::size_t i = 0; i < p.entries().size(); ++i) hp += r.separator[i] * p.entries()[i];
    const double best_local = max_over_deterministic(r.separator, p.inputs(), p.outputs());
    report["verification"] = {{"separator_on_p", hp}, {"separator_max_over_local", best_local},
                              {"margin", hp - best_local}};
    check(hp - best_local > kMembershipTolerance, "separator does not separate");
  }
  return report;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::TooLarge: return kExitTooLarge;
    case ErrorCode::InvariantViolation: return kExitInvariant;
    default: return kExitInput;
  }
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.out, std::ios::binary);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write '" + cfg.out + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synchronous nonlocal games: values, correlations and graph parameters"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "Base seed for random restarts")->capture_default_str();
    sub->add_option("--tol", cfg.tol, "Validation tolerance for input matrices")->capture_default_str();
    sub->add_option("--out", cfg.out, "Write the report to this file instead of stdout");
  };

  auto* chi = app.add_subcommand("chi-f", "Fractional chromatic number of a graph");
  chi->add_option("graph", cfg.inputs, "DIMACS or graph JSON file")->required()->expected(1);
  chi->add_flag("--exact", cfg.exact, "Solve the LP in rational arithmetic");
  add_common(chi);

  auto* rank = app.add_subcommand("proj-rank", "Search for a projective-rank certificate");
  rank->add_option("graph", cfg.inputs, "DIMACS or graph JSON file")->required()->expected(1);
  rank->add_option("--dim", cfg.dim, "Matrix dimension k")->required();
  rank->add_option("--rank", cfg.rank, "Projection rank r")->required();
  rank->add_option("--restarts", cfg.restarts, "Random restarts")->capture_default_str();
  rank->add_option("--order", cfg.order, "ascending or max-degree-last")->capture_default_str();
  rank->add_flag("--equal-trace", cfg.equal_trace, "Also report the induced two-output correlation");
  add_common(rank);

  auto* value = app.add_subcommand("value", "Local value or see-saw quantum lower bound of a game");
  value->add_option("game", cfg.inputs, "Game JSON, or a graph with --colors")->required()->expected(1);
  value->add_option("--type", cfg.type, "loc or q")->capture_default_str();
  value->add_option("--dim", cfg.dim, "Matrix dimension k for --type q");
  value->add_option("--restarts", cfg.restarts, "See-saw restarts")->capture_default_str();
  value->add_option("--colors", cfg.colors, "Treat the input as a graph and play its coloring game");
  value->add_option("--distribution", cfg.distribution,
                    "uniform-all-pairs or uniform-constraints (with --colors)")
      ->capture_default_str();
  value->add_flag("--parallel", cfg.parallel, "Run see-saw restarts concurrently");
  add_common(value);

  auto* orth = app.add_subcommand("orthogonalize", "Make a projection family orthogonal across edges");
  orth->add_option("inputs", cfg.inputs, "Matrix list JSON, then graph")->required()->expected(2);
  orth->add_option("--order", cfg.order, "ascending or max-degree-last")->capture_default_str();
  orth->add_option("--outputs", cfg.outputs, "Labels per vertex m (labeled form on G x K_m)");
  add_common(orth);

  auto* disc = app.add_subcommand("discretize", "Spectral-arc discretization of a unitary");
  disc->add_option("matrix", cfg.inputs, "Matrix JSON file")->required()->expected(1);
  disc->add_option("--outputs", cfg.outputs, "Number of arcs m")->required();
  add_common(disc);

  auto* prod = app.add_subcommand("product", "Print G x K_m as DIMACS");
  prod->add_option("graph", cfg.inputs, "DIMACS or graph JSON file")->required()->expected(1);
  prod->add_option("--outputs", cfg.outputs, "m")->required();
  add_common(prod);

  auto* memb = app.add_subcommand("membership", "Test membership in the local synchronous set");
  memb->add_option("correlation", cfg.inputs, "Correlation JSON file")->required()->expected(1);
  add_common(memb);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  json report;
  int status = kExitOk;
  try {
    if (cfg.command == "product") {
      emit(cfg, cmd_product(cfg));
      return kExitOk;
    }
    bool infeasible = false;
    try {
      if (cfg.command == "chi-f") report = cmd_chi_f(cfg);
      else if (cfg.command == "proj-rank") report = cmd_proj_rank(cfg, infeasible);
      else if (cfg.command == "value") report = cmd_value(cfg);
      else if (cfg.command == "orthogonalize") report = cmd_orthogonalize(cfg);
      else if (cfg.command == "discretize") report = cmd_discretize(cfg);
      else if (cfg.command == "membership") report = cmd_membership(cfg);
      report["verified"] = true;
    } catch (const VerificationFailure& f) {
      report["verified"] = false;
      report["verification_failure"] = f.what;
      status = kExitInvariant;
    }
    if (infeasible && status == kExitOk) status = kExitInfeasible;
    json wrapped = {{"tool", "syncgame"}, {"version", kVersion}, {"config", config_json(cfg)},
                    {"report", report}};
    emit(cfg, wrapped.dump(2) + "\n");
    if (status == kExitOk && cfg.command == "value") {
      std::cerr << cfg.type << " value " << report["value"].get<double>() << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return status;
}
