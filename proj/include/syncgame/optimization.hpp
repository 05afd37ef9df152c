#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "syncgame/correlation.hpp"
#include "syncgame/error.hpp"
#include "syncgame/game.hpp"
#include "syncgame/graph.hpp"
#include "syncgame/matrix.hpp"
#include "syncgame/projection_calculus.hpp"
#include "syncgame/rational.hpp"
#include "syncgame/simplex.hpp"

namespace syncgame {

inline constexpr std::size_t kLocalValueStrategyCap = 10'000'000;
inline constexpr double kValueRecheckTolerance = 1e-9;

struct ValueReport {
  double value = 0.0;
  std::optional<Rational> exact_value;
  std::optional<std::vector<std::size_t>> strategy;  // local certificate
  std::optional<PVMFamily> pvm;                      // quantum certificate
  double verified_value = 0.0;  // game_value of the certificate's correlation
  std::size_t dim = 0;
  std::size_t restarts = 0;
  std::size_t best_restart = 0;
  std::uint64_t seed = 0;
  bool converged = false;
  std::vector<double> sweep_history;
};

// ---------------------------------------------------------------------------
// Local synchronous value

namespace detail {

inline Rational exact_deterministic_value(const Game& g, const std::vector<std::size_t>& f) {
  Rational total = 0;
  for (std::size_t x = 0; x < g.inputs(); ++x)
    for (std::size_t y = 0; y < g.inputs(); ++y)
      if (g.rule(x, y, f[x], f[y])) total += g.gamma(x, y);
  return total;
}

inline double deterministic_value(const Game& g, const std::vector<std::size_t>& f) {
  double total = 0.0;
  for (std::size_t x = 0; x < g.inputs(); ++x)
    for (std::size_t y = 0; y < g.inputs(); ++y)
      if (g.rule(x, y, f[x], f[y])) total += g.weight(x, y);
  return total;
}

}  // namespace detail

/// Exact maximum of the game value over deterministic strategies f: X -> O
/// (the extreme points of the local synchronous set). Ties go to the
/// lexicographically smallest f.
inline ValueReport local_sync_value(const Game& g, std::size_t cap = kLocalValueStrategyCap) {
  const std::size_t n = g.inputs();
  const std::size_t m = g.outputs();
  const std::size_t count = strategy_count(n, m, cap);
  if (count > cap) throw Error(ErrorCode::TooLarge, "m^n exceeds " + std::to_string(cap));

  std::vector<std::size_t> best = decode_strategy(0, n, m);
  double best_value = detail::deterministic_value(g, best);
  Rational best_exact = detail::exact_deterministic_value(g, best);
  for (std::size_t idx = 1; idx < count; ++idx) {
    const auto f = decode_strategy(idx, n, m);
    const double v = detail::deterministic_value(g, f);
    if (v < best_value - 1e-9) continue;
    // Near ties are settled in exact arithmetic.
    const bool clearly_better = v > best_value + 1e-9;
    const Rational exact = detail::exact_deterministic_value(g, f);
    if (clearly_better || exact > best_exact) {
      best = f;
      best_value = v;
      best_exact = exact;
    }
  }
  ValueReport out;
  out.exact_value = best_exact;
  out.value = to_double(best_exact);
  out.verified_value = game_value(deterministic_correlation(m, best), g);
  out.strategy = best;
  out.dim = 1;
  out.converged = true;
  if (std::abs(out.verified_value - out.value) > kValueRecheckTolerance) {
    throw Error(ErrorCode::InvariantViolation, "local value failed re-verification");
  }
  return out;
}

// ---------------------------------------------------------------------------
// See-saw lower bound for the synchronous quantum value

/// tr_k(sum gamma lambda E_{x,i} E_{y,j}), the see-saw objective.
inline double strategy_objective(const Game& g, const std::vector<std::vector<Matrix>>& e) {
  double total = 0.0;
  for (std::size_t x = 0; x < g.inputs(); ++x)
    for (std::size_t y = 0; y < g.inputs(); ++y) {
      const double w = g.weight(x, y);
      if (w == 0.0) continue;
      for (std::size_t i = 0; i < g.outputs(); ++i)
        for (std::size_t j = 0; j < g.outputs(); ++j)
          if (g.rule(x, y, i, j)) total += w * normalized_trace_of_product(e[x][i], e[y][j]).real();
    }
  return total;
}

/// B = sum gamma_{x,y} lambda(x,y,i,j) E_{x,i} E_{y,j}; tr_k(B) is the value
/// of the family.
inline Matrix b_element(const Game& g, const PVMFamily& f) {
  Matrix b = Matrix::zero(f.dim());
  for (std::size_t x = 0; x < g.inputs(); ++x)
    for (std::size_t y = 0; y < g.inputs(); ++y) {
      const double w = g.weight(x, y);
      if (w == 0.0) continue;
      for (std::size_t i = 0; i < g.outputs(); ++i)
        for (std::size_t j = 0; j < g.outputs(); ++j)
          if (g.rule(x, y, i, j)) b += (f(x, i).matrix() * f(y, j).matrix()) * Complex(w);
    }
  return b;
}

/// Block-diagonal family E_{x,a} = A_{x,a} (+) B_{x,a} in M_{k1 + k2}.
inline PVMFamily direct_sum(const PVMFamily& a, const PVMFamily& b) {
  if (a.inputs() != b.inputs() || a.outputs() != b.outputs()) {
    throw Error(ErrorCode::ShapeMismatch, "direct sum of families with different shapes");
  }
  const std::size_t k1 = a.dim();
  const std::size_t k = k1 + b.dim();
  std::vector<std::vector<Projection>> out(a.inputs());
  for (std::size_t x = 0; x < a.inputs(); ++x) {
    for (std::size_t i = 0; i < a.outputs(); ++i) {
      Matrix m(k);
      for (std::size_t r = 0; r < k1; ++r)
        for (std::size_t c = 0; c < k1; ++c) m(r, c) = a(x, i).matrix()(r, c);
      for (std::size_t r = 0; r < b.dim(); ++r)
        for (std::size_t c = 0; c < b.dim(); ++c) m(k1 + r, k1 + c) = b(x, i).matrix()(r, c);
      out[x].push_back(Projection::trusted(std::move(m)));
    }
  }
  return PVMFamily(std::move(out));
}

struct SeesawOptions {
  std::size_t dim = 1;
  std::size_t restarts = 1;
  std::uint64_t seed = 0;
  std::size_t sweeps_max = 200;
  bool parallel = false;
};

inline constexpr double kSeesawImprovement = 1e-10;
inline constexpr double kSeesawZeroEigen = 1e-12;

namespace detail {

// R_{x,i}: the matrix paired with E_{x,i} in the objective once every other
// input is fixed. The (x,x) term is linear in E_x because
// tr(E_{x,i} E_{x,j}) = [i = j] tr(E_{x,i}).
inline std::vector<Matrix> seesaw_fields(const Game& g, const std::vector<std::vector<Matrix>>& e,
                                         std::size_t x) {
  const std::size_t n = g.inputs();
  const std::size_t m = g.outputs();
  const std::size_t k = e[0][0].dim();
  std::vector<Matrix> r(m, Matrix::zero(k));
  for (std::size_t i = 0; i < m; ++i) {
    const double diag = g.weight(x, x) * (g.rule(x, x, i, i) ? 1.0 : 0.0);
    if (diag != 0.0)
      for (std::size_t d = 0; d < k; ++d) r[i](d, d) += diag;
    for (std::size_t y = 0; y < n; ++y) {
      if (y == x) continue;
      for (std::size_t j = 0; j < m; ++j) {
        const double c = g.weight(x, y) * (g.rule(x, y, i, j) ? 1.0 : 0.0) +
                         g.weight(y, x) * (g.rule(y, x, j, i) ? 1.0 : 0.0);
        if (c != 0.0) r[i] += e[y][j] * Complex(c);
      }
    }
  }
  return r;
}

// Best split of the subspace S = E_i + E_j between outputs i and j:
// E_i = positive spectral projection of (R_i - R_j) compressed to S.
inline void exchange_update(Matrix& ei, Matrix& ej, const Matrix& ri, const Matrix& rj) {
  const std::size_t k = ei.dim();
  const auto span = range_vectors(hermitian_part(ei + ej));
  if (span.empty()) return;
  const auto eig = hermitian_eigensystem(hermitian_part(compress(ri - rj, span)), 1e-6);
  const auto vs = lift(span, eig.vectors);
  std::vector<Vec> pos;
  std::vector<Vec> rest;
  for (std::size_t c = 0; c < vs.size(); ++c) (eig.values[c] > kSeesawZeroEigen ? pos : rest).push_back(vs[c]);
  ei = projector(pos, k);
  ej = projector(rest, k);
}

inline void seesaw_update_input(const Game& g, std::vector<std::vector<Matrix>>& e, std::size_t x) {
  const std::size_t m = g.outputs();
  const std::size_t k = e[0][0].dim();
  if (m == 1) return;
  const auto r = seesaw_fields(g, e, x);
  if (m == 2) {
    const auto eig = hermitian_eigensystem(hermitian_part(r[0] - r[1]), 1e-6);
    std::vector<std::size_t> pos;
    std::vector<std::size_t> rest;
    for (std::size_t c = 0; c < k; ++c) (eig.values[c] > kSeesawZeroEigen ? pos : rest).push_back(c);
    e[x][0] = projector_onto_columns(eig.vectors, pos);
    e[x][1] = projector_onto_columns(eig.vectors, rest);
    return;
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) exchange_update(e[x][i], e[x][j], r[i], r[j]);
}

struct SeesawRun {
  std::vector<std::vector<Matrix>> family;
  std::vector<double> history;
  bool converged = false;
};

inline SeesawRun seesaw_run(const Game& g, std::vector<std::vector<Matrix>> e, std::size_t sweeps_max) {
  SeesawRun run;
  run.history.push_back(strategy_objective(g, e));
  for (std::size_t sweep = 0; sweep < sweeps_max; ++sweep) {
    auto previous = e;
    for (std::size_t x = 0; x < g.inputs(); ++x) seesaw_update_input(g, e, x);
    const double value = strategy_objective(g, e);
    if (value < run.history.back()) {
      // A round-off loss: keep the previous family and stop.
      e = std::move(previous);
      run.converged = true;
      break;
    }
    const double gain = value - run.history.back();
    run.history.push_back(value);
    if (gain < kSeesawImprovement) {
      run.converged = true;
      break;
    }
  }
  run.family = std::move(e);
  return run;
}

inline std::vector<std::vector<Matrix>> to_matrices(const PVMFamily& f) {
  std::vector<std::vector<Matrix>> out(f.inputs());
  for (std::size_t x = 0; x < f.inputs(); ++x)
    for (std::size_t a = 0; a < f.outputs(); ++a) out[x].push_back(f(x, a).matrix());
  return out;
}

inline PVMFamily to_family(const std::vector<std::vector<Matrix>>& e) {
  std::vector<std::vector<Projection>> out(e.size());
  for (std::size_t x = 0; x < e.size(); ++x)
    for (const auto& m : e[x]) out[x].push_back(Projection::trusted(m));
  return PVMFamily(std::move(out));
}

}  // namespace detail

/// Alternating exact maximization over one input's measurement at a time,
/// in dimension k. Restart 0 starts from the best deterministic strategy
/// embedded as scalar projections; later restarts from random PVMs. The
/// result is a certified lower bound on the synchronous quantum value.
inline ValueReport seesaw_sync_value(const Game& g, const SeesawOptions& opt) {
  if (opt.dim == 0) throw Error(ErrorCode::InvalidArgument, "dimension must be at least 1");
  if (opt.restarts == 0) throw Error(ErrorCode::InvalidArgument, "need at least one restart");
  const std::size_t n = g.inputs();
  const std::size_t m = g.outputs();

  auto start_for = [&](std::size_t restart) {
    if (restart == 0 && strategy_count(n, m, kLocalValueStrategyCap) <= kLocalValueStrategyCap) {
      const auto local = local_sync_value(g);
      return detail::to_matrices(deterministic_pvm(opt.dim, m, *local.strategy));
    }
    std::vector<std::vector<Matrix>> e(n);
    for (std::size_t x = 0; x < n; ++x)
      for (const auto& p : random_pvm(opt.dim, m, mix_seed(opt.seed, restart, x))) e[x].push_back(p.matrix());
    return e;
  };
  auto run_restart = [&](std::size_t restart) {
    return detail::seesaw_run(g, start_for(restart), opt.sweeps_max);
  };

  std::vector<detail::SeesawRun> runs;
  if (opt.parallel && opt.restarts > 1) {
    std::vector<std::future<detail::SeesawRun>> futures;
    for (std::size_t r = 0; r < opt.restarts; ++r)
      futures.push_back(std::async(std::launch::async, run_restart, r));
    for (auto& f : futures) runs.push_back(f.get());
  } else {
    for (std::size_t r = 0; r < opt.restarts; ++r) runs.push_back(run_restart(r));
  }

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].history.back() > runs[best].history.back()) best = r;

  ValueReport out;
  out.value = runs[best].history.back();
  out.sweep_history = runs[best].history;
  out.converged = runs[best].converged;
  out.dim = opt.dim;
  out.restarts = opt.restarts;
  out.best_restart = best;
  out.seed = opt.seed;
  out.pvm = detail::to_family(runs[best].family);
  out.verified_value = game_value(from_pvm(*out.pvm), g);
  if (std::abs(out.verified_value - out.value) > kValueRecheckTolerance) {
    throw Error(ErrorCode::InvariantViolation, "see-saw value failed re-verification");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fractional chromatic number

inline constexpr std::size_t kFractionalChromaticCap = 25;

/// Maximal independent sets as vertex bitmasks (Bron-Kerbosch with pivoting
/// on the complement graph), ascending.
inline std::vector<std::uint32_t> maximal_independent_sets(const Graph& g) {
  const std::size_t n = g.vertex_count();
  if (n > 32) throw Error(ErrorCode::TooLarge, "independent-set enumeration is limited to 32 vertices");
  const std::uint32_t all = n == 32 ? 0xffffffffu : ((1u << n) - 1u);
  std::vector<std::uint32_t> non_adjacent(n);
  for (std::size_t v = 0; v < n; ++v) {
    std::uint32_t adj = 0;
    for (const auto w : g.neighbors(v)) adj |= 1u << w;
    non_adjacent[v] = all & ~adj & ~(1u << v);
  }
  std::vector<std::uint32_t> out;
  auto expand = [&](auto&& self, std::uint32_t r, std::uint32_t p, std::uint32_t x) -> void {
    if (p == 0 && x == 0) {
      out.push_back(r);
      return;
    }
    std::size_t pivot = 0;
    int best = -1;
    for (std::uint32_t px = p | x; px; px &= px - 1) {
      const auto u = static_cast<std::size_t>(__builtin_ctz(px));
      const int c = __builtin_popcount(p & non_adjacent[u]);
      if (c > best) {
        best = c;
        pivot = u;
      }
    }
    for (std::uint32_t cand = p & ~non_adjacent[pivot]; cand; cand &= cand - 1) {
      const auto v = static_cast<std::size_t>(__builtin_ctz(cand));
      const std::uint32_t bit = 1u << v;
      self(self, r | bit, p & non_adjacent[v], x & non_adjacent[v]);
      p &= ~bit;
      x |= bit;
    }
  };
  expand(expand, 0u, all, 0u);
  std::sort(out.begin(), out.end());
  return out;
}

struct FractionalChromaticResult {
  double value = 0.0;
  std::optional<Rational> exact_value;
  std::vector<std::vector<std::size_t>> sets;  // independent sets with positive weight
  std::vector<double> set_weights;
  std::vector<std::string> exact_set_weights;
  /// Optimal dual: vertex weights with total value and at most 1 on every
  /// independent set (a fractional clique).
  std::vector<double> vertex_weights;
  std::size_t independent_sets = 0;
  std::size_t lp_iterations = 0;
};

namespace detail {

template <class T>
FractionalChromaticResult solve_fractional_chromatic(const Graph& g, const std::vector<std::uint32_t>& sets) {
  const std::size_t n = g.vertex_count();
  const std::size_t s = sets.size();
  // Columns: one weight per set, then one surplus per vertex.
  LpProblem<T> lp;
  lp.rows = n;
  lp.columns = s + n;
  lp.rhs.assign(n, T(1));
  lp.cost.assign(s + n, T(0));
  for (std::size_t j = 0; j < s; ++j) lp.cost[j] = T(-1);
  lp.column = [&sets, s](std::size_t j, SparseColumn<T>& out) {
    if (j >= s) {
      out.emplace_back(j - s, T(-1));
      return;
    }
    for (std::uint32_t bits = sets[j]; bits; bits &= bits - 1)
      out.emplace_back(static_cast<std::size_t>(__builtin_ctz(bits)), T(1));
  };
  const auto r = solve_lp(lp);
  if (r.status != LpStatus::Optimal) {
    throw Error(ErrorCode::InvariantViolation,
                std::string("fractional chromatic LP ended ") + to_string(r.status));
  }
  FractionalChromaticResult out;
  out.independent_sets = s;
  out.lp_iterations = r.iterations;
  for (std::size_t j = 0; j < s; ++j) {
    if (!(r.x[j] > T(0))) continue;
    std::vector<std::size_t> members;
    for (std::uint32_t bits = sets[j]; bits; bits &= bits - 1)
      members.push_back(static_cast<std::size_t>(__builtin_ctz(bits)));
    out.sets.push_back(std::move(members));
    if constexpr (std::is_same_v<T, Rational>) {
      out.set_weights.push_back(to_double(r.x[j]));
      out.exact_set_weights.push_back(to_string(r.x[j]));
    } else {
      out.set_weights.push_back(r.x[j]);
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    if constexpr (std::is_same_v<T, Rational>) {
      out.vertex_weights.push_back(to_double(-r.duals[v]));
    } else {
      out.vertex_weights.push_back(-r.duals[v]);
    }
  }
  if constexpr (std::is_same_v<T, Rational>) {
    out.exact_value = -r.objective;
    out.value = to_double(*out.exact_value);
  } else {
    out.value = -r.objective;
  }
  return out;
}

}  // namespace detail

/// min sum_S w_S  s.t.  sum_{S containing v} w_S >= 1, w >= 0, over maximal
/// independent sets S.
inline FractionalChromaticResult fractional_chromatic(const Graph& g, bool exact) {
  const std::size_t n = g.vertex_count();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "graph has no vertices");
  if (n > kFractionalChromaticCap) {
    throw Error(ErrorCode::TooLarge, "fractional chromatic number is limited to " +
                                         std::to_string(kFractionalChromaticCap) + " vertices");
  }
  const auto sets = maximal_independent_sets(g);
  return exact ? detail::solve_fractional_chromatic<Rational>(g, sets)
               : detail::solve_fractional_chromatic<double>(g, sets);
}

// ---------------------------------------------------------------------------
// Projective-rank certificates

inline constexpr double kOrthogonalizationSwitch = 1e-6;
inline constexpr double kOverlapFloor = 1e-24;

struct ProjectiveRankOptions {
  std::size_t dim = 1;
  std::size_t rank = 1;
  std::size_t restarts = 1;
  std::uint64_t seed = 0;
  bool equal_trace = false;
  std::size_t sweeps_max = 500;
  EliminationOrder order = EliminationOrder::Ascending;
};

struct RankCertificate {
  std::size_t dim = 0;
  std::size_t target_rank = 0;
  std::vector<Projection> projections;
  std::vector<std::size_t> ranks;
  std::vector<double> distances;  // |e_v - e~_v|_2 from the orthogonalization
  double lambda = 0.0;            // min_v tr(e~_v)
  Rational exact_lambda = 0;      // min rank / k
  bool rank_drift = false;        // some vertex lost rank while orthogonalizing
  bool infeasible = false;
  double orthogonality_residual = 0.0;
  double overlap_before = 0.0;    // total edge overlap handed to the orthogonalizer
  std::size_t restarts_used = 0;
  std::size_t best_restart = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> order;
  // equal_trace extras
  double trace_spread = 0.0;
  std::optional<CorrelationMatrix> correlation;
  double correlation_edge_max = 0.0;  // max p(1,1|v,w) over edges
  bool correlation_synchronous = false;

  /// Upper bound 1/lambda on the projective rank; infinite when infeasible.
  double bound() const { return lambda > 0.0 ? 1.0 / lambda : std::numeric_limits<double>::infinity(); }
};

/// sum over edges of tr(e_v e_w), evaluated as |e_v e_w|_2^2: a sum of
/// squares, so it keeps relative accuracy all the way down.
inline double total_edge_overlap(const Graph& g, const std::vector<Projection>& es) {
  double total = 0.0;
  for (const auto& [v, w] : g.edges()) {
    const double d = two_norm(es[v].matrix() * es[w].matrix());
    total += d * d;
  }
  return total;
}

namespace detail {

inline std::vector<Projection> minimize_overlap(const Graph& g, std::vector<Projection> es, std::size_t rank,
                                                std::size_t sweeps_max) {
  const std::size_t k = es.front().dim();
  std::vector<std::size_t> lowest(rank);
  for (std::size_t i = 0; i < rank; ++i) lowest[i] = i;
  double previous = total_edge_overlap(g, es);
  for (std::size_t sweep = 0; sweep < sweeps_max && previous > kOverlapFloor; ++sweep) {
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
      if (g.degree(v) == 0) continue;
      Matrix field = Matrix::zero(k);
      for (const auto w : g.neighbors(v)) field += es[w].matrix();
      const auto eig = hermitian_eigensystem(hermitian_part(field));
      es[v] = Projection::trusted(projector_onto_columns(eig.vectors, lowest));
    }
    const double now = total_edge_overlap(g, es);
    // Above the switch any progress counts; below it, keep polishing while
    // the overlap still shrinks geometrically. Near-shared directions of
    // neighbors otherwise survive as spurious rank in the joins.
    const bool stalled = previous <= kOrthogonalizationSwitch ? now > previous * (1.0 - 1e-3) : previous - now < 1e-14;
    previous = now;
    if (stalled) break;
  }
  return es;
}

}  // namespace detail

/// Searches for rank-r projections in M_k, one per vertex, orthogonal across
/// edges: coordinate descent on the total edge overlap (each vertex moves to
/// the r lowest eigenvectors of the sum of its neighbors), then exact
/// orthogonalization. lambda = min tr(e~_v) certifies projective rank <= 1/lambda.
inline RankCertificate projective_rank_certificate(const Graph& g, const ProjectiveRankOptions& opt) {
  const std::size_t n = g.vertex_count();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "graph has no vertices");
  if (opt.rank < 1 || opt.rank > opt.dim) {
    throw Error(ErrorCode::RankOutOfRange, "need 1 <= rank <= dim");
  }
  if (opt.restarts == 0) throw Error(ErrorCode::InvalidArgument, "need at least one restart");

  std::optional<RankCertificate> best;
  for (std::size_t restart = 0; restart < opt.restarts; ++restart) {
    std::vector<Projection> es;
    for (std::size_t v = 0; v < n; ++v)
      es.push_back(random_projection(opt.dim, opt.rank, mix_seed(opt.seed, restart, v)));
    es = detail::minimize_overlap(g, std::move(es), opt.rank, opt.sweeps_max);

    RankCertificate cert;
    cert.dim = opt.dim;
    cert.target_rank = opt.rank;
    cert.seed = opt.seed;
    cert.best_restart = restart;
    cert.overlap_before = total_edge_overlap(g, es);
    const auto orth = orthogonalize_family(g, es, opt.order);
    cert.projections = orth.projections;
    cert.distances = orth.distances;
    cert.order = orth.order;
    cert.orthogonality_residual = orth.orthogonality_residual;
    std::size_t min_rank = opt.dim;
    for (const auto& p : cert.projections) {
      cert.ranks.push_back(p.rank());
      min_rank = std::min(min_rank, p.rank());
    }
    cert.rank_drift = min_rank < opt.rank;
    cert.exact_lambda = Rational(static_cast<long long>(min_rank), static_cast<long long>(opt.dim));
    cert.lambda = std::numeric_limits<double>::infinity();
    for (const auto& p : cert.projections) cert.lambda = std::min(cert.lambda, p.trace());
    cert.infeasible = min_rank == 0;
    if (cert.infeasible) cert.lambda = 0.0;

    if (!best || cert.exact_lambda > best->exact_lambda) best = std::move(cert);
    best->restarts_used = restart + 1;
    if (!best->rank_drift) break;
  }

  RankCertificate out = std::move(*best);
  if (opt.equal_trace && !out.infeasible) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    std::vector<std::vector<Projection>> pvms;
    for (const auto& p : out.projections) {
      lo = std::min(lo, p.trace());
      hi = std::max(hi, p.trace());
      pvms.push_back({p, p.complement()});
    }
    out.trace_spread = hi - lo;
    out.correlation = from_pvm(PVMFamily(std::move(pvms)));
    out.correlation_synchronous = is_synchronous(*out.correlation);
    for (const auto& [v, w] : g.edges())
      out.correlation_edge_max = std::max(out.correlation_edge_max, (*out.correlation)(v, w, 0, 0));
  }
  return out;
}

}  // namespace syncgame
