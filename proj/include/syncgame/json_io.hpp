#pragma once

// JSON encodings for matrices, graphs, games, correlations and reports.
//
//   matrix:      {"dim": k, "re": [k*k row-major], "im": [k*k row-major]}
//   graph:       {"n": n, "edges": [[u, v], ...]}            (1-based, as DIMACS)
//   game:        {"n": n, "m": m, "rules": [x][y][a][b], "gamma": [x][y]}
//                or {"coloring": {"graph": <graph> | "dimacs": "...",
//                                 "colors": c, "distribution": "...", "gamma": ...}}
//   correlation: {"n": n, "m": m, "p": [x][y][a][b]}
//   pvm family:  {"dim": k, "measurements": [[<matrix>, ...], ...]}

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "syncgame/correlation.hpp"
#include "syncgame/error.hpp"
#include "syncgame/game.hpp"
#include "syncgame/graph.hpp"
#include "syncgame/matrix.hpp"
#include "syncgame/optimization.hpp"
#include "syncgame/projection_calculus.hpp"
#include "syncgame/rational.hpp"

namespace syncgame::io {

using nlohmann::json;

namespace detail {

inline const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::ParseError, std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

inline std::size_t require_size(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw Error(ErrorCode::ParseError, std::string("field '") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

inline void require_array(const json& j, std::size_t size, const std::string& what) {
  if (!j.is_array() || j.size() != size) {
    throw Error(ErrorCode::ParseError, what + " must be an array of length " + std::to_string(size));
  }
}

inline Rational rational_from_json(const json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_number()) return Rational(j.get<double>());
  throw Error(ErrorCode::ParseError, "expected a number or a rational string");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Matrices

inline json to_json(const Matrix& m) {
  json re = json::array();
  json im = json::array();
  for (const auto& e : m.entries()) {
    re.push_back(e.real());
    im.push_back(e.imag());
  }
  return {{"dim", m.dim()}, {"re", re}, {"im", im}};
}

inline Matrix matrix_from_json(const json& j) {
  const std::size_t k = detail::require_size(j, "dim");
  if (k == 0) throw Error(ErrorCode::ParseError, "matrix dimension must be positive");
  const json& re = detail::require(j, "re");
  detail::require_array(re, k * k, "re");
  std::vector<Complex> entries(k * k);
  const bool has_im = j.contains("im");
  if (has_im) detail::require_array(j.at("im"), k * k, "im");
  for (std::size_t i = 0; i < k * k; ++i) {
    if (!re[i].is_number() || (has_im && !j.at("im")[i].is_number())) {
      throw Error(ErrorCode::ParseError, "matrix entries must be numbers");
    }
    entries[i] = Complex(re[i].get<double>(), has_im ? j.at("im")[i].get<double>() : 0.0);
  }
  return Matrix(k, std::move(entries));
}

/// Either a bare array of matrices or {"matrices": [...]} / {"projections": [...]}.
inline std::vector<Matrix> matrices_from_json(const json& j) {
  const json* list = &j;
  if (j.is_object()) {
    if (j.contains("matrices")) list = &j.at("matrices");
    else if (j.contains("projections")) list = &j.at("projections");
    else return {matrix_from_json(j)};
  }
  if (!list->is_array()) throw Error(ErrorCode::ParseError, "expected an array of matrices");
  std::vector<Matrix> out;
  for (const auto& item : *list) out.push_back(matrix_from_json(item));
  return out;
}

inline json to_json(const std::vector<Projection>& ps) {
  json out = json::array();
  for (const auto& p : ps) out.push_back(to_json(p.matrix()));
  return out;
}

inline json to_json(const PVMFamily& f) {
  json ms = json::array();
  for (const auto& row : f.measurements()) ms.push_back(to_json(row));
  return {{"dim", f.dim()}, {"measurements", ms}};
}

inline PVMFamily pvm_family_from_json(const json& j, double tol = kDefaultTolerance) {
  const json& ms = detail::require(j, "measurements");
  if (!ms.is_array()) throw Error(ErrorCode::ParseError, "measurements must be an array");
  std::vector<std::vector<Matrix>> rows;
  for (const auto& row : ms) rows.push_back(matrices_from_json(row));
  return PVMFamily::from_matrices(rows, tol);
}

// ---------------------------------------------------------------------------
// Graphs

inline json to_json(const Graph& g) {
  json edges = json::array();
  for (const auto& [u, v] : g.edges()) edges.push_back({u + 1, v + 1});
  return {{"n", g.vertex_count()}, {"edges", edges}};
}

inline Graph graph_from_json(const json& j) {
  const std::size_t n = detail::require_size(j, "n");
  Graph g(n);
  const json& edges = detail::require(j, "edges");
  if (!edges.is_array()) throw Error(ErrorCode::ParseError, "edges must be an array");
  for (const auto& e : edges) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
      throw Error(ErrorCode::ParseError, "edge must be a pair of integers");
    }
    const auto u = e[0].get<long long>();
    const auto v = e[1].get<long long>();
    if (u < 1 || v < 1 || u > static_cast<long long>(n) || v > static_cast<long long>(n)) {
      throw Error(ErrorCode::ParseError, "edge endpoint out of range");
    }
    g.add_edge(static_cast<std::size_t>(u - 1), static_cast<std::size_t>(v - 1));
  }
  return g;
}

// ---------------------------------------------------------------------------
// Games

inline json to_json(const Game& g) {
  const std::size_t n = g.inputs();
  const std::size_t m = g.outputs();
  json rules = json::array();
  json gamma = json::array();
  for (std::size_t x = 0; x < n; ++x) {
    json rx = json::array();
    json gx = json::array();
    for (std::size_t y = 0; y < n; ++y) {
      json rxy = json::array();
      for (std::size_t a = 0; a < m; ++a) {
        json rxya = json::array();
        for (std::size_t b = 0; b < m; ++b) rxya.push_back(g.rule(x, y, a, b) ? 1 : 0);
        rxy.push_back(rxya);
      }
      rx.push_back(rxy);
      gx.push_back(to_string(g.gamma(x, y)));
    }
    rules.push_back(rx);
    gamma.push_back(gx);
  }
  return {{"n", n}, {"m", m}, {"rules", rules}, {"gamma", gamma}};
}

inline std::vector<Rational> gamma_from_json(const json& j, std::size_t n) {
  detail::require_array(j, n, "gamma");
  std::vector<Rational> gamma;
  for (const auto& row : j) {
    detail::require_array(row, n, "gamma row");
    for (const auto& v : row) gamma.push_back(detail::rational_from_json(v));
  }
  return gamma;
}

inline Game game_from_json(const json& j) {
  if (j.is_object() && j.contains("coloring")) {
    const json& c = j.at("coloring");
    Graph g;
    if (c.contains("graph")) g = graph_from_json(c.at("graph"));
    else if (c.contains("dimacs")) g = parse_dimacs(c.at("dimacs").get<std::string>());
    else throw Error(ErrorCode::ParseError, "coloring game needs 'graph' or 'dimacs'");
    const std::size_t colors = detail::require_size(c, "colors");
    const auto mode = parse_distribution_mode(c.value("distribution", std::string("uniform-all-pairs")));
    std::optional<std::vector<Rational>> custom;
    if (mode == DistributionMode::Custom) custom = gamma_from_json(detail::require(c, "gamma"), g.vertex_count());
    return coloring_game(g, colors, mode, std::move(custom));
  }
  if (j.is_object() && j.contains("trivial")) {
    const json& t = j.at("trivial");
    return trivial_game(detail::require_size(t, "n"), detail::require_size(t, "m"));
  }
  const std::size_t n = detail::require_size(j, "n");
  const std::size_t m = detail::require_size(j, "m");
  const json& rules = detail::require(j, "rules");
  std::vector<std::uint8_t> table;
  detail::require_array(rules, n, "rules");
  for (const auto& rx : rules) {
    detail::require_array(rx, n, "rules[x]");
    for (const auto& rxy : rx) {
      detail::require_array(rxy, m, "rules[x][y]");
      for (const auto& rxya : rxy) {
        detail::require_array(rxya, m, "rules[x][y][a]");
        for (const auto& v : rxya) {
          if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
            throw Error(ErrorCode::ParseError, "rule entries must be 0 or 1");
          }
          table.push_back(static_cast<std::uint8_t>(v.get<int>()));
        }
      }
    }
  }
  return Game(n, m, std::move(table), gamma_from_json(detail::require(j, "gamma"), n));
}

// ---------------------------------------------------------------------------
// Correlations

inline json to_json(const CorrelationMatrix& p) {
  const std::size_t n = p.inputs();
  const std::size_t m = p.outputs();
  json out = json::array();
  for (std::size_t x = 0; x < n; ++x) {
    json px = json::array();
    for (std::size_t y = 0; y < n; ++y) {
      json pxy = json::array();
      for (std::size_t a = 0; a < m; ++a) {
        json pxya = json::array();
        for (std::size_t b = 0; b < m; ++b) pxya.push_back(p(x, y, a, b));
        pxy.push_back(pxya);
      }
      px.push_back(pxy);
    }
    out.push_back(px);
  }
  return {{"n", n}, {"m", m}, {"p", out}};
}

inline CorrelationMatrix correlation_from_json(const json& j) {
  const std::size_t n = detail::require_size(j, "n");
  const std::size_t m = detail::require_size(j, "m");
  const json& p = detail::require(j, "p");
  std::vector<double> flat;
  detail::require_array(p, n, "p");
  for (const auto& px : p) {
    detail::require_array(px, n, "p[x]");
    for (const auto& pxy : px) {
      detail::require_array(pxy, m, "p[x][y]");
      for (const auto& pxya : pxy) {
        detail::require_array(pxya, m, "p[x][y][a]");
        for (const auto& v : pxya) {
          if (!v.is_number()) throw Error(ErrorCode::ParseError, "probabilities must be numbers");
          flat.push_back(v.get<double>());
        }
      }
    }
  }
  try {
    return CorrelationMatrix(n, m, std::move(flat));
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

// ---------------------------------------------------------------------------
// Reports

inline json strategy_to_json(const std::vector<std::size_t>& f) {
  json out = json::array();
  for (const auto v : f) out.push_back(v + 1);
  return out;
}

inline json to_json(const ValueReport& r) {
  json out = {{"value", r.value},
              {"verified_value", r.verified_value},
              {"verification_residual", std::abs(r.value - r.verified_value)},
              {"dim", r.dim},
              {"restarts", r.restarts},
              {"best_restart", r.best_restart},
              {"seed", r.seed},
              {"converged", r.converged},
              {"sweep_history", r.sweep_history}};
  if (r.exact_value) out["exact_value"] = to_string(*r.exact_value);
  if (r.strategy) out["strategy"] = strategy_to_json(*r.strategy);
  if (r.pvm) out["pvm"] = to_json(*r.pvm);
  return out;
}

inline json to_json(const FractionalChromaticResult& r) {
  json sets = json::array();
  for (std::size_t i = 0; i < r.sets.size(); ++i) {
    json members = json::array();
    for (const auto v : r.sets[i]) members.push_back(v + 1);
    json entry = {{"vertices", members}, {"weight", r.set_weights[i]}};
    if (i < r.exact_set_weights.size()) entry["exact_weight"] = r.exact_set_weights[i];
    sets.push_back(entry);
  }
  json out = {{"chi_f", r.value},
              {"independent_sets", r.independent_sets},
              {"lp_iterations", r.lp_iterations},
              {"weights", sets},
              {"vertex_weights", r.vertex_weights}};
  if (r.exact_value) out["exact_chi_f"] = to_string(*r.exact_value);
  return out;
}

inline json to_json(const MembershipResult& r) {
  json out = {{"member", r.member}, {"basis", r.basis}, {"lp_iterations", r.lp_iterations}};
  if (r.member) {
    json ws = json::array();
    for (const auto& [f, w] : r.weights) ws.push_back({{"strategy", strategy_to_json(f)}, {"weight", w}});
    out["weights"] = ws;
    out["reconstruction_error"] = r.reconstruction_error;
  } else {
    out["separator"] = r.separator;
    out["bound"] = r.bound;
    out["margin"] = r.margin;
  }
  return out;
}

inline json to_json(const OrthogonalizationResult& r) {
  json overlaps = json::array();
  for (const auto& e : r.input_overlaps) overlaps.push_back({{"edge", {e.u + 1, e.v + 1}}, {"overlap", e.overlap}});
  json steps = json::array();
  for (const auto& s : r.steps) {
    steps.push_back({{"vertex", s.vertex + 1},
                     {"earlier_neighbors", s.earlier_neighbors},
                     {"overlap", s.overlap},
                     {"max_neighbor_distance", s.max_neighbor_distance},
                     {"distance", s.distance},
                     {"lemma_bound", s.lemma_bound},
                     {"certified_bound", s.certified_bound},
                     {"certified", s.certified()}});
  }
  json order = json::array();
  for (const auto v : r.order) order.push_back(v + 1);
  return {{"order", order},
          {"input_overlaps", overlaps},
          {"max_input_overlap", r.max_input_overlap},
          {"distances", r.distances},
          {"trace_drift", r.trace_drift},
          {"steps", steps},
          {"all_steps_certified", r.all_steps_certified()},
          {"orthogonality_residual", r.orthogonality_residual},
          {"projections", to_json(r.projections)}};
}

inline json to_json(const Discretization& d) {
  json arcs = json::array();
  for (const auto& e : d.arcs) arcs.push_back(to_json(e.matrix()));
  return {{"m", d.arcs.size()},
          {"phases", d.phases},
          {"distance", d.distance},
          {"bound", d.bound},
          {"within_bound", d.distance <= d.bound + 1e-10},
          {"sum_residual", d.sum_residual},
          {"u_tilde", to_json(d.u_tilde.matrix())},
          {"arcs", arcs}};
}

inline json to_json(const RankCertificate& c) {
  json out = {{"dim", c.dim},
              {"rank", c.target_rank},
              {"infeasible", c.infeasible},
              {"lambda", c.lambda},
              {"exact_lambda", to_string(c.exact_lambda)},
              {"rank_drift", c.rank_drift},
              {"ranks", c.ranks},
              {"distances", c.distances},
              {"orthogonality_residual", c.orthogonality_residual},
              {"overlap_before_orthogonalization", c.overlap_before},
              {"restarts_used", c.restarts_used},
              {"best_restart", c.best_restart},
              {"seed", c.seed},
              {"projections", to_json(c.projections)}};
  if (!c.infeasible) {
    out["xi_upper_bound"] = c.bound();
    out["exact_xi_upper_bound"] = to_string(Rational(1) / c.exact_lambda);
  }
  if (c.correlation) {
    out["trace_spread"] = c.trace_spread;
    out["correlation"] = to_json(*c.correlation);
    out["correlation_synchronous"] = c.correlation_synchronous;
    out["correlation_edge_max"] = c.correlation_edge_max;
  }
  return out;
}

}  // namespace syncgame::io
