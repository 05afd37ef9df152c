#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "syncgame/graph.hpp"
#include "syncgame/projection_calculus.hpp"

using namespace syncgame;

namespace {

Matrix tilted(double t) {
  const double s = std::sqrt(t * (1.0 - t));
  Matrix q(2);
  q(0, 0) = t;
  q(0, 1) = s;
  q(1, 0) = s;
  q(1, 1) = 1.0 - t;
  return q;
}

Projection coordinate_block(std::size_t k, std::size_t start, std::size_t size) {
  Matrix m(k);
  for (std::size_t i = start; i < start + size; ++i) m(i, i) = 1.0;
  return Projection::trusted(m);
}

// Vertex v owns coordinates [v*rank, (v+1)*rank); each block is tilted by exp(i eps H_v).
std::vector<Projection> perturbed_family(std::size_t n, std::size_t k, std::size_t rank, double eps,
                                         std::uint64_t seed) {
  std::vector<Projection> out;
  for (std::size_t v = 0; v < n; ++v) {
    const Matrix u = exp_i_hermitian(random_hermitian(k, mix_seed(seed, v)), eps);
    out.push_back(Projection::trusted(hermitian_part(conjugate(u, coordinate_block(k, v * rank, rank).matrix()))));
  }
  return out;
}

void expect_qqt_conclusions(const Projection& p, const Projection& q) {
  const auto r = lemma_qqt(p, q);
  const auto c = certify_qqt(p, q, r);
  EXPECT_LE(c.q_prime_perp_p, 1e-10);
  EXPECT_LE(c.q_prime_under_uqu, 1e-10);
  EXPECT_LE(c.q_prime_under_q_tilde, 1e-10);
  EXPECT_LE(c.q_tilde_perp_p, 1e-10);
  EXPECT_LE(c.trace_gap_excess, 1e-10);
  EXPECT_LE(c.u_distance_excess, 1e-8);
  EXPECT_LE(c.q_prime_excess, 1e-8);
  EXPECT_LE(c.q_tilde_excess, 1e-8);
  EXPECT_TRUE(c.rank_identity);
  EXPECT_TRUE(c.holds(1e-10, 1e-8));
}

}  // namespace

TEST(TwoProjectionForm, EqualRankOneProjections) {
  const Projection e11 = Projection::trusted(Matrix::unit(2, 0, 0));
  const auto f = two_projection_form(e11, e11);
  EXPECT_EQ(f.a1, 1u);
  EXPECT_EQ(f.b1, 1u);
  EXPECT_EQ(f.a0 + f.b0 + f.angles.size(), 0u);
}

TEST(TwoProjectionForm, OrthogonalRankOneProjections) {
  const auto f = two_projection_form(Projection::trusted(Matrix::unit(2, 0, 0)),
                                     Projection::trusted(Matrix::unit(2, 1, 1)));
  EXPECT_EQ(f.a0, 1u);
  EXPECT_EQ(f.b0, 1u);
  EXPECT_TRUE(f.angles.empty());
}

TEST(TwoProjectionForm, HalfAngle) {
  const Projection p = Projection::trusted(Matrix::unit(2, 0, 0));
  const Projection q = Projection::trusted(tilted(0.5));
  const auto f = two_projection_form(p, q);
  ASSERT_EQ(f.angles.size(), 1u);
  EXPECT_NEAR(f.angles[0], 0.5, 1e-12);
  EXPECT_EQ(f.a0 + f.b0 + f.a1 + f.b1, 0u);
  EXPECT_LE(reconstruction_error(f, p, q), 1e-12);
}

TEST(TwoProjectionForm, CanonicalBlocksMatchLayout) {
  TwoProjectionForm f;
  f.a0 = 1;
  f.b0 = 1;
  f.angles = {0.25};
  f.a1 = 1;
  f.b1 = 1;
  f.basis = Unitary::identity(6);
  const Matrix p = f.canonical_p();
  const Matrix q = f.canonical_q();
  EXPECT_EQ(p(0, 0), Complex(1.0));
  EXPECT_EQ(q(1, 1), Complex(1.0));
  EXPECT_EQ(p(2, 2), Complex(1.0));
  EXPECT_NEAR(q(2, 3).real(), std::sqrt(0.25 * 0.75), 1e-15);
  EXPECT_EQ(p(4, 4), Complex(1.0));
  EXPECT_EQ(q(4, 4), Complex(1.0));
  EXPECT_EQ(p(5, 5) + q(5, 5), Complex(0.0));
  EXPECT_EQ(f.dim(), 6u);
}

TEST(TwoProjectionForm, RandomReconstruction) {
  for (std::uint64_t s = 0; s < 60; ++s) {
    const std::size_t k = 2 + s % 40;
    const std::size_t rp = s % (k + 1);
    const std::size_t rq = (s * 7 + 3) % (k + 1);
    const Projection p = random_projection(k, rp, mix_seed(s, 1));
    const Projection q = random_projection(k, rq, mix_seed(s, 2));
    const auto f = two_projection_form(p, q);
    EXPECT_EQ(f.dim(), k);
    EXPECT_EQ(f.rank_p(), rp);
    EXPECT_EQ(f.rank_q(), rq);
    EXPECT_LE(reconstruction_error(f, p, q), 1e-8) << k << " " << rp << " " << rq;
    EXPECT_LE(unitarity_defect(f.basis.matrix()), 1e-10);
  }
}

TEST(TwoProjectionForm, SharedSubspacesGiveCorners) {
  // p and q share a 2-dim range and a 1-dim kernel inside dim 6.
  const Unitary w = random_unitary(6, 5);
  std::vector<std::size_t> pc = {0, 1, 2, 3};
  std::vector<std::size_t> qc = {0, 1, 4};
  const Projection p = Projection::trusted(projector_onto_columns(w.matrix(), pc));
  const Projection q = Projection::trusted(projector_onto_columns(w.matrix(), qc));
  const auto f = two_projection_form(p, q);
  EXPECT_EQ(f.a1, 2u);
  EXPECT_EQ(f.a0, 2u);
  EXPECT_EQ(f.b0, 1u);
  EXPECT_EQ(f.b1, 1u);
  EXPECT_TRUE(f.angles.empty());
  EXPECT_LE(reconstruction_error(f, p, q), 1e-10);
}

TEST(Qqt, OrthogonalInputsAreUntouched) {
  const Projection p = coordinate_block(6, 0, 2);
  const Projection q = coordinate_block(6, 2, 3);
  const auto r = lemma_qqt(p, q);
  EXPECT_NEAR(r.delta, 0.0, 1e-15);
  EXPECT_LE(max_abs_difference(r.q_prime.matrix(), q.matrix()), 1e-12);
  EXPECT_LE(max_abs_difference(r.u.matrix(), Matrix::identity(6)), 1e-12);
  EXPECT_EQ(r.q_tilde.rank(), 3u);
  expect_qqt_conclusions(p, q);
}

TEST(Qqt, EqualRankOneInDimensionTwo) {
  const Projection e11 = Projection::trusted(Matrix::unit(2, 0, 0));
  const auto r = lemma_qqt(e11, e11);
  EXPECT_NEAR(r.delta, 0.5, 1e-15);
  EXPECT_EQ(r.q_prime.rank(), 0u);
  EXPECT_NEAR(r.trace_gap, 0.5, 1e-15);
  EXPECT_LE(max_abs_difference(r.q_tilde.matrix(), Matrix::unit(2, 1, 1)), 1e-12);
  EXPECT_NEAR(r.q_tilde_distance, 1.0, 1e-12);
  EXPECT_LE(r.q_tilde_distance, 6.0 * std::sqrt(0.5));
  expect_qqt_conclusions(e11, e11);
}

TEST(Qqt, HalfAngleRotationDistance) {
  const Projection p = Projection::trusted(Matrix::unit(2, 0, 0));
  const Projection q = Projection::trusted(tilted(0.5));
  const auto r = lemma_qqt(p, q);
  EXPECT_NEAR(r.delta, 0.25, 1e-14);
  EXPECT_NEAR(r.u_distance, std::sqrt(2.0 * (1.0 - std::sqrt(0.5))), 1e-12);
  EXPECT_LE(r.u_distance, 1.0);
  expect_qqt_conclusions(p, q);
}

TEST(Qqt, RandomPairsAllRanks) {
  for (std::size_t k = 2; k <= 7; ++k)
    for (std::size_t rp = 0; rp <= k; ++rp)
      for (std::size_t rq = 0; rq <= k; ++rq) {
        const std::uint64_t s = k * 100 + rp * 10 + rq;
        SCOPED_TRACE(testing::Message() << k << " " << rp << " " << rq);
        expect_qqt_conclusions(random_projection(k, rp, mix_seed(s, 1)), random_projection(k, rq, mix_seed(s, 2)));
      }
}

TEST(Qqt, SmallOverlapGivesSmallCorrection) {
  const Projection p = coordinate_block(12, 0, 4);
  const Matrix u = exp_i_hermitian(random_hermitian(12, 3), 1e-3);
  const Projection q = Projection::trusted(hermitian_part(conjugate(u, coordinate_block(12, 4, 4).matrix())));
  const auto r = lemma_qqt(p, q);
  EXPECT_LT(r.delta, 1e-5);
  EXPECT_EQ(r.rank_q_prime, 4u);
  EXPECT_LE(r.q_prime_distance, 5.0 * std::sqrt(r.delta) + 1e-8);
  expect_qqt_conclusions(p, q);
}

TEST(Qqt, DimensionMismatch) {
  EXPECT_THROW(lemma_qqt(Projection::identity(2), Projection::identity(3)), Error);
}

TEST(Orthogonalize, AlreadyOrthogonalFamilyUnchanged) {
  const Graph g = cycle_graph(5);
  std::vector<Projection> es;
  for (std::size_t v = 0; v < 5; ++v) es.push_back(coordinate_block(10, 2 * v, 2));
  const auto r = orthogonalize_family(g, es, EliminationOrder::Ascending);
  for (std::size_t v = 0; v < 5; ++v) {
    EXPECT_LE(r.distances[v], 1e-12);
    EXPECT_LE(max_abs_difference(r.projections[v].matrix(), es[v].matrix()), 1e-12);
  }
  EXPECT_LE(r.orthogonality_residual, 1e-12);
}

TEST(Orthogonalize, SingleVertex) {
  const Projection p = random_projection(4, 2, 1);
  const std::vector<Projection> es = {p};
  const auto r = orthogonalize_family(Graph(1), es, EliminationOrder::Ascending);
  EXPECT_LE(max_abs_difference(r.projections[0].matrix(), p.matrix()), 1e-12);
  EXPECT_EQ(r.distances[0], 0.0);
}

TEST(Orthogonalize, PerturbedC5IsMadeExactlyOrthogonal) {
  const Graph g = cycle_graph(5);
  const auto es = perturbed_family(5, 32, 6, 1e-2, 11);
  const auto r = orthogonalize_family(g, es, EliminationOrder::Ascending);
  EXPECT_LE(r.orthogonality_residual, 1e-10);
  EXPECT_LE(max_edge_residual(g, r.projections), 1e-10);
  EXPECT_TRUE(r.all_steps_certified());
  for (const auto& s : r.steps) EXPECT_LE(s.distance, s.lemma_bound + 1e-8);
  for (std::size_t v = 0; v < 5; ++v) {
    EXPECT_NEAR(r.distances[v], two_norm(es[v].matrix() - r.projections[v].matrix()), 1e-12);
    EXPECT_NEAR(r.trace_drift[v], es[v].trace() - r.projections[v].trace(), 1e-12);
  }
}

TEST(Orthogonalize, DistanceShrinksWithOverlap) {
  const Graph g = petersen_graph();
  double previous = 1.0;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    const auto es = perturbed_family(10, 32, 3, eps, 4);
    const auto r = orthogonalize_family(g, es, EliminationOrder::MaxDegreeLast);
    const double worst = *std::max_element(r.distances.begin(), r.distances.end());
    EXPECT_LT(worst, previous);
    previous = worst;
    EXPECT_LE(r.orthogonality_residual, 1e-10);
  }
}

TEST(Orthogonalize, GenericLargeOverlapsStillOrthogonal) {
  const Graph g = complete_graph(4);
  std::vector<Projection> es;
  for (std::size_t v = 0; v < 4; ++v) es.push_back(random_projection(8, 3, v + 40));
  const auto r = orthogonalize_family(g, es, EliminationOrder::Ascending);
  EXPECT_LE(r.orthogonality_residual, 1e-10);
}

TEST(Orthogonalize, OrderValidation) {
  const Graph g = cycle_graph(3);
  std::vector<Projection> es(3, Projection::zero(3));
  EXPECT_THROW(orthogonalize_family(g, es, std::vector<std::size_t>{0, 0, 1}), Error);
  EXPECT_THROW(orthogonalize_family(g, es, std::vector<std::size_t>{0, 1}), Error);
  std::vector<Projection> short_list(2, Projection::zero(3));
  EXPECT_THROW(orthogonalize_family(g, short_list, EliminationOrder::Ascending), Error);
  EXPECT_EQ(parse_elimination_order("max-degree-last"), EliminationOrder::MaxDegreeLast);
  EXPECT_THROW(parse_elimination_order("random"), Error);
}

TEST(Orthogonalize, MaxDegreeLastOrder) {
  Graph star(4);
  for (std::size_t v = 1; v < 4; ++v) star.add_edge(0, v);
  const auto order = elimination_order(star, EliminationOrder::MaxDegreeLast);
  EXPECT_EQ(order.back(), 0u);
  EXPECT_EQ(elimination_order(star, EliminationOrder::Ascending).front(), 0u);
}

TEST(OrthogonalizeLabeled, SingleLabelMatchesPlainFamily) {
  const Graph g = cycle_graph(5);
  const auto es = perturbed_family(5, 16, 3, 1e-2, 8);
  std::vector<std::vector<Projection>> table;
  for (const auto& e : es) table.push_back({e});
  const auto labeled = orthogonalize_labeled(g, table, 1);
  const auto plain = orthogonalize_family(g, es, EliminationOrder::Ascending);
  for (std::size_t v = 0; v < 5; ++v)
    EXPECT_LE(max_abs_difference(labeled.projections[v][0].matrix(), plain.projections[v].matrix()), 1e-12);
}

TEST(OrthogonalizeLabeled, TruncatedPvmOnEdgelessGraphUnchanged) {
  const auto pvm = random_pvm(6, 3, 2);
  std::vector<std::vector<Projection>> table = {{pvm[0], pvm[1]}, {pvm[1], pvm[2]}};
  const auto r = orthogonalize_labeled(Graph(2), table, 2);
  for (std::size_t v = 0; v < 2; ++v)
    for (std::size_t i = 0; i < 2; ++i)
      EXPECT_LE(max_abs_difference(r.projections[v][i].matrix(), table[v][i].matrix()), 1e-10);
}

TEST(OrthogonalizeLabeled, K2TwoLabelsPerturbed) {
  // Four disjoint coordinate pairs in dimension 8, one per (vertex, label);
  // one unitary per vertex keeps its labels orthogonal.
  std::vector<std::vector<Projection>> table(2);
  for (std::size_t v = 0; v < 2; ++v) {
    const Matrix u = exp_i_hermitian(random_hermitian(8, 21 + v), 1e-2);
    for (std::size_t i = 0; i < 2; ++i)
      table[v].push_back(Projection::trusted(hermitian_part(conjugate(u, coordinate_block(8, 4 * i + 2 * v, 2).matrix()))));
  }
  const auto r = orthogonalize_labeled(complete_graph(2), table, 2);
  const auto& e = r.projections;
  EXPECT_LE(operator_norm(e[0][0].matrix() * e[0][1].matrix()), 1e-10);
  EXPECT_LE(operator_norm(e[1][0].matrix() * e[1][1].matrix()), 1e-10);
  EXPECT_LE(operator_norm(e[0][0].matrix() * e[1][0].matrix()), 1e-10);
  EXPECT_LE(operator_norm(e[0][1].matrix() * e[1][1].matrix()), 1e-10);
  EXPECT_LE(r.max_label_sum_norm, 1.0 + 1e-10);
  EXPECT_TRUE(r.product_result.all_steps_certified());
}

TEST(OrthogonalizeLabeled, SumAboveIdentityRejected) {
  const Projection p = random_projection(4, 2, 1);
  std::vector<std::vector<Projection>> table = {{p, p}};
  try {
    orthogonalize_labeled(Graph(1), table, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SumExceedsIdentity);
  }
}

TEST(Discretize, IdentityLandsOnBoundary) {
  const auto d = discretize_unitary(Unitary::identity(3), 4);
  EXPECT_EQ(d.arcs[0].rank(), 3u);
  EXPECT_LE(max_abs_difference(d.u_tilde.matrix(), Matrix::identity(3) * Complex(0, 1)), 1e-14);
  EXPECT_NEAR(d.distance, std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(d.bound, std::sqrt(2.0), 1e-14);
}

TEST(Discretize, EighthTurnPhase) {
  Matrix u(1);
  u(0, 0) = std::polar(1.0, std::numbers::pi / 4);
  const auto d = discretize_unitary(Unitary(u), 4);
  EXPECT_NEAR(d.phases[0], 0.125, 1e-14);
  EXPECT_NEAR(std::abs(d.u_tilde.matrix()(0, 0) - Complex(0, 1)), 0.0, 1e-14);
  EXPECT_NEAR(d.distance, 2.0 * std::sin(std::numbers::pi / 8), 1e-12);
}

TEST(Discretize, PhaseJustBelowFullTurnWraps) {
  Matrix u(1);
  u(0, 0) = std::polar(1.0, -1e-15);
  const auto d = discretize_unitary(Unitary(u), 5);
  EXPECT_EQ(d.phases[0], 0.0);
  EXPECT_EQ(d.arcs[0].rank(), 1u);
}

TEST(Discretize, RandomUnitariesWithinBound) {
  for (std::uint64_t s = 0; s < 15; ++s) {
    const std::size_t k = 1 + s * 2;
    const std::size_t m = 3 + s * 4;
    const Unitary u = random_unitary(k, s);
    const auto d = discretize_unitary(u, m);
    EXPECT_LE(d.sum_residual, 1e-10);
    EXPECT_LE(d.distance, d.bound + 1e-10);
    EXPECT_LE(unitarity_defect(d.u_tilde.matrix()), 1e-10);
    // First-order moment estimate against a random test unitary.
    const Matrix v = random_unitary(k, s + 500).matrix();
    const double moment_gap = std::abs(normalized_trace(d.u_tilde.matrix() * v.adjoint()) -
                                       normalized_trace(u.matrix() * v.adjoint()));
    EXPECT_LE(moment_gap, d.distance + 1e-12);
  }
}

TEST(Discretize, DegenerateSpectrumSplitsCorrectly) {
  // Eigenvalues 1, 1, -1, i in a random basis.
  const Matrix w = random_unitary(4, 9).matrix();
  std::vector<Complex> diag = {1.0, 1.0, -1.0, Complex(0, 1)};
  const Matrix u = conjugate(w, Matrix::diagonal(std::span<const Complex>(diag)));
  const auto d = discretize_unitary(Unitary(u), 8);
  EXPECT_EQ(d.arcs[0].rank(), 2u);
  EXPECT_EQ(d.arcs[2].rank(), 1u);
  EXPECT_EQ(d.arcs[4].rank(), 1u);
  EXPECT_LE(d.distance, d.bound + 1e-10);
}

TEST(Discretize, FineArcsBeatEpsilonOverThree) {
  const double eps = 0.5;
  const auto m = static_cast<std::size_t>(std::floor(6.0 * std::numbers::pi / eps)) + 1;
  const auto d = discretize_unitary(random_unitary(8, 3), m);
  EXPECT_LT(d.bound, eps / 3.0);
  EXPECT_LT(d.distance, eps / 3.0);
}

TEST(Discretize, RejectsSingleArc) {
  EXPECT_THROW(discretize_unitary(Unitary::identity(2), 1), Error);
}
