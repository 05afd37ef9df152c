#pragma once

// Constructive perturbation theory for finite families of projections in M_k:
// the canonical form of a projection pair, the near-orthogonal-to-orthogonal
// correction of one projection against another, graph-driven
// orthogonalization, and discretization of unitaries onto spectral arcs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "syncgame/error.hpp"
#include "syncgame/graph.hpp"
#include "syncgame/matrix.hpp"

namespace syncgame {

inline constexpr double kAngleSnap = 1e-10;
inline constexpr double kPhaseWrap = 1e-14;

// ---------------------------------------------------------------------------
// Two-projection canonical form

/// In canonical coordinates the pair is
///   p = 1_{a0} + 0_{b0} + sum_t [[1,0],[0,0]] + 1_{a1} + 0_{b1}
///   q = 0_{a0} + 1_{b0} + sum_t Q(t)          + 1_{a1} + 0_{b1}
/// with Q(t) = [[t, sqrt(t(1-t))], [sqrt(t(1-t)), 1-t]], and basis maps
/// canonical coordinates onto the input space.
struct TwoProjectionForm {
  std::size_t a0 = 0;
  std::size_t b0 = 0;
  std::size_t a1 = 0;
  std::size_t b1 = 0;
  std::vector<double> angles;
  Unitary basis = Unitary::identity(1);

  std::size_t dim() const { return a0 + b0 + 2 * angles.size() + a1 + b1; }
  std::size_t angle_offset() const { return a0 + b0; }
  std::size_t a1_offset() const { return a0 + b0 + 2 * angles.size(); }
  std::size_t b1_offset() const { return a1_offset() + a1; }

  std::size_t rank_p() const { return a0 + angles.size() + a1; }
  std::size_t rank_q() const { return b0 + angles.size() + a1; }

  Matrix canonical_p() const {
    Matrix m(dim());
    for (std::size_t i = 0; i < a0; ++i) m(i, i) = 1.0;
    for (std::size_t s = 0; s < angles.size(); ++s) {
      const std::size_t o = angle_offset() + 2 * s;
      m(o, o) = 1.0;
    }
    for (std::size_t i = 0; i < a1; ++i) m(a1_offset() + i, a1_offset() + i) = 1.0;
    return m;
  }

  Matrix canonical_q() const {
    Matrix m(dim());
    for (std::size_t i = 0; i < b0; ++i) m(a0 + i, a0 + i) = 1.0;
    for (std::size_t s = 0; s < angles.size(); ++s) {
      const std::size_t o = angle_offset() + 2 * s;
      const double t = angles[s];
      const double c = std::sqrt(t * (1.0 - t));
      m(o, o) = t;
      m(o, o + 1) = c;
      m(o + 1, o) = c;
      m(o + 1, o + 1) = 1.0 - t;
    }
    for (std::size_t i = 0; i < a1; ++i) m(a1_offset() + i, a1_offset() + i) = 1.0;
    return m;
  }

  /// Column indices of the basis spanning a given block.
  std::vector<std::size_t> columns(std::size_t offset, std::size_t count) const {
    std::vector<std::size_t> cols(count);
    for (std::size_t i = 0; i < count; ++i) cols[i] = offset + i;
    return cols;
  }
};

/// Operator-norm reconstruction error max(|B P B* - p|, |B Q B* - q|).
inline double reconstruction_error(const TwoProjectionForm& form, const Projection& p,
                                   const Projection& q) {
  const Matrix& b = form.basis.matrix();
  return std::max(operator_norm(conjugate(b, form.canonical_p()) - p.matrix()),
                  operator_norm(conjugate(b, form.canonical_q()) - q.matrix()));
}

namespace detail {

using Vec = std::vector<Complex>;

inline Vec column(const Matrix& m, std::size_t c) {
  Vec v(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i) v[i] = m(i, c);
  return v;
}

inline Vec act(const Matrix& m, const Vec& v) {
  Vec out(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i) {
    Complex s{};
    for (std::size_t j = 0; j < m.dim(); ++j) s += m(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

inline Complex inner(const Vec& a, const Vec& b) {
  Complex s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline double normalize(Vec& v) {
  const double n = std::sqrt(std::max(0.0, inner(v, v).real()));
  if (n > 0.0)
    for (auto& e : v) e /= n;
  return n;
}

/// Orthonormal columns spanning the selected eigenvectors, compressed
/// operator c_{ij} = <y_i, m y_j>.
inline Matrix compress(const Matrix& m, const std::vector<Vec>& ys) {
  Matrix c(ys.size());
  std::vector<Vec> mys;
  mys.reserve(ys.size());
  for (const auto& y : ys) mys.push_back(act(m, y));
  for (std::size_t i = 0; i < ys.size(); ++i)
    for (std::size_t j = 0; j < ys.size(); ++j) c(i, j) = inner(ys[i], mys[j]);
  return c;
}

/// Vectors sum_j coeffs(j, c) ys[j] for each column c of coeffs.
inline std::vector<Vec> lift(const std::vector<Vec>& ys, const Matrix& coeffs) {
  const std::size_t k = ys.front().size();
  std::vector<Vec> out(coeffs.dim(), Vec(k));
  for (std::size_t c = 0; c < coeffs.dim(); ++c)
    for (std::size_t j = 0; j < ys.size(); ++j)
      for (std::size_t i = 0; i < k; ++i) out[c][i] += coeffs(j, c) * ys[j][i];
  return out;
}

inline std::vector<Vec> range_vectors(const Matrix& projection) {
  const auto eig = hermitian_eigensystem(projection);
  std::vector<Vec> out;
  for (const std::size_t c : range_columns(eig)) out.push_back(column(eig.vectors, c));
  return out;
}

inline Matrix projector(const std::vector<Vec>& vs, std::size_t k) {
  Matrix out(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      Complex s{};
      for (const auto& v : vs) s += v[i] * std::conj(v[j]);
      out(i, j) = s;
      out(j, i) = std::conj(s);
    }
    out(i, i) = out(i, i).real();
  }
  return out;
}

inline Matrix matrix_from_columns(const std::vector<Vec>& vs, std::size_t k) {
  Matrix out(k);
  for (std::size_t c = 0; c < vs.size(); ++c)
    for (std::size_t i = 0; i < k; ++i) out(i, c) = vs[c][i];
  return out;
}

}  // namespace detail

/// Canonical form from the spectrum of q compressed to the range of p
/// (equivalently of pqp): eigenvalue 1 gives a1, 0 gives a0, t in (0,1)
/// gives a 2x2 block whose second vector is the normalized (1-p) q x.
/// Eigenvalues within kAngleSnap of 0 or 1 snap to the corners.
inline TwoProjectionForm two_projection_form(const Projection& p, const Projection& q) {
  using namespace detail;
  if (p.dim() != q.dim()) throw Error(ErrorCode::DimensionMismatch, "projection pair dimensions differ");
  const std::size_t k = p.dim();
  const Matrix& pm = p.matrix();
  const Matrix& qm = q.matrix();

  const auto eig_p = hermitian_eigensystem(pm);
  std::vector<Vec> range_p;
  std::vector<Vec> kernel_p;
  for (std::size_t c = 0; c < k; ++c)
    (eig_p.values[c] > 0.5 ? range_p : kernel_p).push_back(column(eig_p.vectors, c));

  std::vector<Vec> a0_vecs;
  std::vector<Vec> a1_vecs;
  std::vector<std::pair<Vec, Vec>> blocks;
  std::vector<double> angles;
  if (!range_p.empty()) {
    const auto eig = hermitian_eigensystem(hermitian_part(compress(qm, range_p)));
    const auto xs = lift(range_p, eig.vectors);
    const Matrix one_minus_p = Matrix::identity(k) - pm;
    for (std::size_t c = 0; c < xs.size(); ++c) {
      const double t = eig.values[c];
      if (t <= kAngleSnap) {
        a0_vecs.push_back(xs[c]);
      } else if (t >= 1.0 - kAngleSnap) {
        a1_vecs.push_back(xs[c]);
      } else {
        Vec w = act(one_minus_p, act(qm, xs[c]));
        for (const auto& [_, prev] : blocks) {
          const Complex d = inner(prev, w);
          for (std::size_t i = 0; i < k; ++i) w[i] -= d * prev[i];
        }
        if (normalize(w) <= 0.0) {
          throw Error(ErrorCode::DegenerateAngle, "angle block with vanishing partner vector");
        }
        blocks.emplace_back(xs[c], std::move(w));
        angles.push_back(t);
      }
    }
  }

  // Remaining space: range(1 - p) minus the partner vectors; q is 1 or 0 there.
  std::vector<Vec> b0_vecs;
  std::vector<Vec> b1_vecs;
  std::vector<Vec> partners;
  for (const auto& blk : blocks) partners.push_back(blk.second);
  const Matrix rest = projector(kernel_p, k) - projector(partners, k);
  const auto rest_vecs = range_vectors(hermitian_part(rest));
  if (rest_vecs.size() + range_p.size() + blocks.size() != k) {
    throw Error(ErrorCode::DegenerateAngle, "complement dimension does not match the angle count");
  }
  if (!rest_vecs.empty()) {
    const auto eig = hermitian_eigensystem(hermitian_part(compress(qm, rest_vecs)));
    const auto zs = lift(rest_vecs, eig.vectors);
    for (std::size_t c = 0; c < zs.size(); ++c) {
      const double v = eig.values[c];
      if (v > 1e-6 && v < 1.0 - 1e-6) {
        throw Error(ErrorCode::DegenerateAngle,
                    "q is not a corner on the complement (eigenvalue " + std::to_string(v) + ")");
      }
      (v > 0.5 ? b0_vecs : b1_vecs).push_back(zs[c]);
    }
  }

  std::vector<Vec> ordered;
  ordered.reserve(k);
  ordered.insert(ordered.end(), a0_vecs.begin(), a0_vecs.end());
  ordered.insert(ordered.end(), b0_vecs.begin(), b0_vecs.end());
  for (const auto& [x, w] : blocks) {
    ordered.push_back(x);
    ordered.push_back(w);
  }
  ordered.insert(ordered.end(), a1_vecs.begin(), a1_vecs.end());
  ordered.insert(ordered.end(), b1_vecs.begin(), b1_vecs.end());

  TwoProjectionForm form;
  form.a0 = a0_vecs.size();
  form.b0 = b0_vecs.size();
  form.a1 = a1_vecs.size();
  form.b1 = b1_vecs.size();
  form.angles = std::move(angles);
  form.basis = Unitary::trusted(matrix_from_columns(ordered, k));
  return form;
}

// ---------------------------------------------------------------------------
// Correction of q against p

struct QqtResult {
  TwoProjectionForm form;
  Projection q_prime = Projection::zero(1);
  Unitary u = Unitary::identity(1);
  Projection q_tilde = Projection::zero(1);
  double delta = 0.0;
  double trace_gap = 0.0;         // tr q - tr q'
  double u_distance = 0.0;        // |u - 1|_2
  double q_prime_distance = 0.0;  // |q - q'|_2
  double q_tilde_distance = 0.0;  // |q - q~|_2
  std::size_t rank_p = 0;
  std::size_t rank_q = 0;
  std::size_t rank_q_prime = 0;
  std::size_t rank_q_tilde = 0;
};

/// With delta = tr(pq): q' is orthogonal to p and lies under u* q u, where u
/// rotates each angle block by [[sqrt(1-t), sqrt t], [-sqrt t, sqrt(1-t)]];
/// q~ extends q' to trace min(tr q, 1 - tr p) while staying orthogonal to p.
inline QqtResult lemma_qqt(const Projection& p, const Projection& q) {
  using namespace detail;
  QqtResult out;
  out.form = two_projection_form(p, q);
  const TwoProjectionForm& f = out.form;
  const std::size_t k = p.dim();
  const Matrix& basis = f.basis.matrix();
  out.delta = normalized_trace_of_product(p.matrix(), q.matrix()).real();

  // q': the b0 block plus the second coordinate of every angle block.
  std::vector<std::size_t> q_prime_cols = f.columns(f.a0, f.b0);
  for (std::size_t s = 0; s < f.angles.size(); ++s) q_prime_cols.push_back(f.angle_offset() + 2 * s + 1);
  out.q_prime = Projection::trusted(projector_onto_columns(basis, q_prime_cols));

  Matrix u_canonical = Matrix::identity(k);
  for (std::size_t s = 0; s < f.angles.size(); ++s) {
    const std::size_t o = f.angle_offset() + 2 * s;
    const double c = std::sqrt(1.0 - f.angles[s]);
    const double sn = std::sqrt(f.angles[s]);
    u_canonical(o, o) = c;
    u_canonical(o, o + 1) = sn;
    u_canonical(o + 1, o) = -sn;
    u_canonical(o + 1, o + 1) = c;
  }
  out.u = Unitary::trusted(conjugate(basis, u_canonical));

  out.rank_p = f.rank_p();
  out.rank_q = f.rank_q();
  out.rank_q_prime = f.b0 + f.angles.size();

  if (out.rank_q >= k - out.rank_p) {
    // q~ = 1 - p, read off the canonical basis so that q' <= q~ holds exactly.
    std::vector<std::size_t> cols = f.columns(f.a0, f.b0);
    for (std::size_t s = 0; s < f.angles.size(); ++s) cols.push_back(f.angle_offset() + 2 * s + 1);
    for (std::size_t i = 0; i < f.b1; ++i) cols.push_back(f.b1_offset() + i);
    out.q_tilde = Projection::trusted(projector_onto_columns(basis, cols));
    out.rank_q_tilde = k - out.rank_p;
  } else {
    // r: top eigenvectors of Z (u* q u - q') Z on the range of
    // Z = (1-p) meet (1-q') = 1 - join(p, q').
    const std::size_t need = out.rank_q - out.rank_q_prime;
    const std::vector<Projection> pair{p, out.q_prime};
    const Matrix z = Matrix::identity(k) - join(pair).matrix();
    const auto zs = range_vectors(z);
    if (zs.size() < need) {
      throw Error(ErrorCode::InvariantViolation, "(1-p) meet (1-q') is too small for q~");
    }
    const Matrix& um = out.u.matrix();
    const Matrix target = um.adjoint() * q.matrix() * um - out.q_prime.matrix();
    const auto eig = hermitian_eigensystem(hermitian_part(compress(target, zs)), 1e-6);
    const auto rs = lift(zs, eig.vectors);
    std::vector<Vec> chosen(rs.end() - static_cast<std::ptrdiff_t>(need), rs.end());
    out.q_tilde = Projection::trusted(out.q_prime.matrix() + projector(chosen, k));
    out.rank_q_tilde = out.rank_q;
  }

  out.trace_gap = q.trace() - out.q_prime.trace();
  out.u_distance = two_norm(out.u.matrix() - Matrix::identity(k));
  out.q_prime_distance = two_norm(q.matrix() - out.q_prime.matrix());
  out.q_tilde_distance = two_norm(q.matrix() - out.q_tilde.matrix());
  return out;
}

/// Each conclusion of the qqt construction evaluated on its output.
struct QqtCertificate {
  double q_prime_perp_p = 0.0;        // (i)   |q' p|
  double q_prime_under_uqu = 0.0;     // (ii)  |(u* q u) q' - q'|
  double trace_gap_excess = 0.0;      // (iii) (tr q - tr q') - delta
  double u_distance_excess = 0.0;     // (iv)  |u-1|_2 - 2 sqrt(delta)
  double q_prime_excess = 0.0;        // (v)   |q-q'|_2 - 5 sqrt(delta)
  double q_prime_under_q_tilde = 0.0; // (vi)  |q~ q' - q'|
  double q_tilde_perp_p = 0.0;        // (vii) |q~ p|
  bool rank_identity = false;         // (viii) rank q~ = min(rank q, k - rank p)
  double q_tilde_excess = 0.0;        // (ix)  |q-q~|_2 - 6 sqrt(delta)

  bool holds(double residual_tol, double slack) const {
    return q_prime_perp_p <= residual_tol && q_prime_under_uqu <= residual_tol &&
           q_prime_under_q_tilde <= residual_tol && q_tilde_perp_p <= residual_tol &&
           trace_gap_excess <= slack && u_distance_excess <= slack && q_prime_excess <= slack &&
           q_tilde_excess <= slack && rank_identity;
  }
};

/// Re-evaluates all nine conclusions from the matrices alone.
inline QqtCertificate certify_qqt(const Projection& p, const Projection& q, const QqtResult& r) {
  const std::size_t k = p.dim();
  const Matrix& qp = r.q_prime.matrix();
  const Matrix& qt = r.q_tilde.matrix();
  const Matrix& u = r.u.matrix();
  const double delta = std::max(0.0, normalized_trace_of_product(p.matrix(), q.matrix()).real());
  const double sd = std::sqrt(delta);
  QqtCertificate c;
  c.q_prime_perp_p = operator_norm(qp * p.matrix());
  c.q_prime_under_uqu = operator_norm(u.adjoint() * q.matrix() * u * qp - qp);
  c.trace_gap_excess = (q.trace() - r.q_prime.trace()) - delta;
  c.u_distance_excess = two_norm(u - Matrix::identity(k)) - 2.0 * sd;
  c.q_prime_excess = two_norm(q.matrix() - qp) - 5.0 * sd;
  c.q_prime_under_q_tilde = operator_norm(qt * qp - qp);
  c.q_tilde_perp_p = operator_norm(qt * p.matrix());
  c.rank_identity = r.q_tilde.rank() == std::min(q.rank(), k - p.rank());
  c.q_tilde_excess = two_norm(q.matrix() - qt) - 6.0 * sd;
  return c;
}

// ---------------------------------------------------------------------------
// Graph-driven orthogonalization

enum class EliminationOrder { Ascending, MaxDegreeLast };

inline const char* to_string(EliminationOrder o) {
  return o == EliminationOrder::Ascending ? "ascending" : "max-degree-last";
}

inline EliminationOrder parse_elimination_order(const std::string& name) {
  if (name == "ascending") return EliminationOrder::Ascending;
  if (name == "max-degree-last") return EliminationOrder::MaxDegreeLast;
  throw Error(ErrorCode::ParseError, "unknown elimination order '" + name + "'");
}

inline std::vector<std::size_t> elimination_order(const Graph& g, EliminationOrder kind) {
  std::vector<std::size_t> order(g.vertex_count());
  for (std::size_t v = 0; v < order.size(); ++v) order[v] = v;
  if (kind == EliminationOrder::MaxDegreeLast) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return g.degree(a) < g.degree(b); });
  }
  return order;
}

struct OrthogonalizationStep {
  std::size_t vertex = 0;
  std::size_t earlier_neighbors = 0;
  double overlap = 0.0;            // tr(e_v f), f the join of corrected earlier neighbors
  double max_neighbor_distance = 0.0;
  double distance = 0.0;           // |e_v - e~_v|_2
  double lemma_bound = 0.0;        // 5 sqrt(overlap)
  double certified_bound = 0.0;    // 5 sqrt(deg (delta_max + max d)) + 1e-6

  bool certified() const { return distance <= certified_bound; }
};

struct EdgeOverlap {
  std::size_t u = 0;
  std::size_t v = 0;
  double overlap = 0.0;
};

struct OrthogonalizationResult {
  std::vector<Projection> projections;
  std::vector<double> distances;
  std::vector<double> trace_drift;  // tr e_v - tr e~_v
  std::vector<std::size_t> order;
  std::vector<OrthogonalizationStep> steps;
  std::vector<EdgeOverlap> input_overlaps;
  double max_input_overlap = 0.0;
  double orthogonality_residual = 0.0;  // max over edges of |e~_v e~_w|

  bool all_steps_certified() const {
    return std::all_of(steps.begin(), steps.end(), [](const auto& s) { return s.certified(); });
  }
};

inline double max_edge_residual(const Graph& g, std::span<const Projection> es) {
  double worst = 0.0;
  for (const auto& [v, w] : g.edges())
    worst = std::max(worst, operator_norm(es[v].matrix() * es[w].matrix()));
  return worst;
}

/// Vertices are corrected in the given order; each one is replaced by the q'
/// of the qqt construction against the join of its already-corrected
/// neighbors, which makes every edge exactly orthogonal.
inline OrthogonalizationResult orthogonalize_family(const Graph& g, std::span<const Projection> es,
                                                    std::vector<std::size_t> order) {
  const std::size_t n = g.vertex_count();
  if (es.size() != n) throw Error(ErrorCode::DimensionMismatch, "need one projection per vertex");
  if (order.size() != n) throw Error(ErrorCode::InvalidArgument, "order must list every vertex once");
  {
    std::vector<bool> seen(n, false);
    for (const auto v : order) {
      if (v >= n || seen[v]) throw Error(ErrorCode::InvalidArgument, "order is not a permutation");
      seen[v] = true;
    }
  }
  OrthogonalizationResult out;
  out.order = order;
  if (n == 0) return out;
  const std::size_t k = es.front().dim();
  for (const auto& e : es)
    if (e.dim() != k) throw Error(ErrorCode::DimensionMismatch, "family mixes dimensions");

  for (const auto& [v, w] : g.edges()) {
    const double o = normalized_trace_of_product(es[v].matrix(), es[w].matrix()).real();
    out.input_overlaps.push_back({v, w, o});
    out.max_input_overlap = std::max(out.max_input_overlap, o);
  }

  std::vector<Projection> corrected(es.begin(), es.end());
  std::vector<double> distance(n, 0.0);
  std::vector<bool> done(n, false);
  for (const std::size_t v : order) {
    std::vector<Projection> earlier;
    double max_d = 0.0;
    for (const std::size_t w : g.neighbors(v)) {
      if (!done[w]) continue;
      earlier.push_back(corrected[w]);
      max_d = std::max(max_d, distance[w]);
    }
    OrthogonalizationStep step;
    step.vertex = v;
    step.earlier_neighbors = earlier.size();
    step.max_neighbor_distance = max_d;
    if (!earlier.empty()) {
      const Projection f = join(earlier, k);
      const QqtResult r = lemma_qqt(f, es[v]);
      corrected[v] = r.q_prime;
      distance[v] = r.q_prime_distance;
      step.overlap = r.delta;
    }
    step.distance = distance[v];
    step.lemma_bound = 5.0 * std::sqrt(std::max(0.0, step.overlap));
    step.certified_bound =
        5.0 * std::sqrt(double(step.earlier_neighbors) * (out.max_input_overlap + max_d)) + 1e-6;
    out.steps.push_back(step);
    done[v] = true;
  }

  out.orthogonality_residual = max_edge_residual(g, corrected);
  for (std::size_t v = 0; v < n; ++v) out.trace_drift.push_back(es[v].trace() - corrected[v].trace());
  out.distances = std::move(distance);
  out.projections = std::move(corrected);
  return out;
}

inline OrthogonalizationResult orthogonalize_family(const Graph& g, std::span<const Projection> es,
                                                    EliminationOrder kind = EliminationOrder::Ascending) {
  return orthogonalize_family(g, es, elimination_order(g, kind));
}

struct LabeledOrthogonalization {
  /// projections[v][i]
  std::vector<std::vector<Projection>> projections;
  OrthogonalizationResult product_result;
  double max_label_sum_norm = 0.0;  // max_v |sum_i e~_{v,i}|
};

/// e_{v,i} with sum_i e_{v,i} <= 1 for each v: orthogonalizes on G [] K_m, so
/// labels at one vertex become mutually orthogonal and equal labels across
/// an edge become orthogonal.
inline LabeledOrthogonalization orthogonalize_labeled(const Graph& g,
                                                      const std::vector<std::vector<Projection>>& es,
                                                      std::size_t m,
                                                      EliminationOrder kind = EliminationOrder::Ascending,
                                                      double tol = kDefaultTolerance) {
  const std::size_t n = g.vertex_count();
  if (es.size() != n) throw Error(ErrorCode::DimensionMismatch, "need one label table row per vertex");
  if (m == 0) throw Error(ErrorCode::InvalidArgument, "m must be at least 1");
  std::vector<Projection> flat;
  for (std::size_t v = 0; v < n; ++v) {
    if (es[v].size() != m) throw Error(ErrorCode::DimensionMismatch, "each vertex needs m projections");
    Matrix sum = Matrix::zero(es[v].front().dim());
    for (const auto& e : es[v]) {
      sum += e.matrix();
      flat.push_back(e);
    }
    if (const double norm = operator_norm(sum); norm > 1.0 + tol) {
      throw Error(ErrorCode::SumExceedsIdentity,
                  "labels at vertex " + std::to_string(v) + " sum to norm " + std::to_string(norm));
    }
  }
  const Graph product = cartesian_product_complete(g, m);
  LabeledOrthogonalization out;
  out.product_result = orthogonalize_family(product, flat, kind);
  out.projections.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    Matrix sum = Matrix::zero(flat.front().dim());
    for (std::size_t i = 0; i < m; ++i) {
      out.projections[v].push_back(out.product_result.projections[v * m + i]);
      sum += out.projections[v].back().matrix();
    }
    out.max_label_sum_norm = std::max(out.max_label_sum_norm, operator_norm(sum));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spectral-arc discretization of unitaries

struct UnitarySpectrum {
  std::vector<double> phases;  // t in [0, 1), eigenvalue exp(2 pi i t)
  Matrix vectors;
};

/// Diagonalizes a unitary through the Hermitian pencil Re u + alpha Im u;
/// clusters of that pencil are re-split by Im u.
inline UnitarySpectrum unitary_spectrum(const Unitary& u) {
  using namespace detail;
  const std::size_t k = u.dim();
  const Matrix& um = u.matrix();
  const Matrix ua = um.adjoint();
  const Matrix re = hermitian_part((um + ua) * Complex(0.5));
  const Matrix im = hermitian_part((um - ua) * Complex(0.0, -0.5));
  constexpr double alpha = 0.6180339887498949;
  const auto eig = hermitian_eigensystem(hermitian_part(re + im * Complex(alpha)));

  std::vector<Vec> vecs;
  for (std::size_t c = 0; c < k; ++c) vecs.push_back(column(eig.vectors, c));
  std::size_t start = 0;
  while (start < k) {
    std::size_t end = start + 1;
    while (end < k && eig.values[end] - eig.values[end - 1] < 1e-7) ++end;
    if (end - start > 1) {
      std::vector<Vec> cluster(vecs.begin() + start, vecs.begin() + end);
      const auto sub = hermitian_eigensystem(hermitian_part(compress(im, cluster)), 1e-6);
      const auto rotated = lift(cluster, sub.vectors);
      std::copy(rotated.begin(), rotated.end(), vecs.begin() + start);
    }
    start = end;
  }

  UnitarySpectrum out{std::vector<double>(k), matrix_from_columns(vecs, k)};
  for (std::size_t c = 0; c < k; ++c) {
    const Complex lambda = inner(vecs[c], act(um, vecs[c]));
    double angle = std::atan2(lambda.imag(), lambda.real());
    if (angle < 0.0) angle += 2.0 * std::numbers::pi;
    if (angle >= 2.0 * std::numbers::pi - kPhaseWrap) angle = 0.0;
    out.phases[c] = angle / (2.0 * std::numbers::pi);
  }
  return out;
}

struct Discretization {
  std::vector<Projection> arcs;  // arcs[j-1] covers phases in [(j-1)/m, j/m)
  Unitary u_tilde = Unitary::identity(1);
  std::vector<double> phases;
  double distance = 0.0;      // |u~ - u| in operator norm
  double bound = 0.0;         // |1 - omega| = 2 sin(pi/m)
  double sum_residual = 0.0;  // |sum_j e_j - 1|
};

/// u~ = sum_j omega^j e_j with omega = exp(2 pi i / m), where e_j is the
/// spectral projection of u for the half-open arc [(j-1)/m, j/m).
inline Discretization discretize_unitary(const Unitary& u, std::size_t m) {
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "discretization needs m >= 2");
  const std::size_t k = u.dim();
  const auto spectrum = unitary_spectrum(u);
  std::vector<std::vector<std::size_t>> members(m);
  for (std::size_t c = 0; c < k; ++c) {
    auto j = static_cast<std::size_t>(std::floor(spectrum.phases[c] * double(m)));
    members[std::min(j, m - 1)].push_back(c);
  }
  Discretization out;
  out.phases = spectrum.phases;
  Matrix sum = Matrix::zero(k);
  Matrix u_tilde = Matrix::zero(k);
  for (std::size_t j = 0; j < m; ++j) {
    Matrix e = projector_onto_columns(spectrum.vectors, members[j]);
    const Complex omega_j = std::polar(1.0, 2.0 * std::numbers::pi * double(j + 1) / double(m));
    sum += e;
    u_tilde += e * omega_j;
    out.arcs.push_back(Projection::trusted(std::move(e)));
  }
  out.sum_residual = operator_norm(sum - Matrix::identity(k));
  out.distance = operator_norm(u_tilde - u.matrix());
  out.bound = 2.0 * std::sin(std::numbers::pi / double(m));
  out.u_tilde = Unitary::trusted(std::move(u_tilde));
  return out;
}

}  // namespace syncgame
