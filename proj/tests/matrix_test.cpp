#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "syncgame/matrix.hpp"

using namespace syncgame;

namespace {

Matrix pauli_y() {
  Matrix m(2);
  m(0, 1) = Complex(0, -1);
  m(1, 0) = Complex(0, 1);
  return m;
}

Matrix cycle_adjacency(std::size_t n) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, (i + 1) % n) = 1.0;
    m((i + 1) % n, i) = 1.0;
  }
  return m;
}

void expect_decomposition(const Matrix& a, const HermitianEigensystem& eig, double tol) {
  const std::size_t k = a.dim();
  const Matrix& v = eig.vectors;
  EXPECT_LE(oracle::max_entry_gap(oracle::multiply(v.adjoint(), v), Matrix::identity(k)), tol);
  const Matrix d = Matrix::diagonal(std::span<const double>(eig.values));
  EXPECT_LE(oracle::max_entry_gap(oracle::multiply(oracle::multiply(v, d), v.adjoint()), a), tol);
  EXPECT_TRUE(std::is_sorted(eig.values.begin(), eig.values.end()));
}

}  // namespace

TEST(NormalizedTrace, IdentityHasTraceOne) {
  for (std::size_t k : {1, 2, 7, 32}) EXPECT_NEAR(normalized_trace(Matrix::identity(k)).real(), 1.0, 1e-15);
}

TEST(NormalizedTrace, MatrixUnitHasTraceOneOverK) {
  EXPECT_NEAR(normalized_trace(Matrix::unit(4, 2, 2)).real(), 0.25, 1e-15);
  EXPECT_NEAR(std::abs(normalized_trace(Matrix::unit(4, 1, 2))), 0.0, 1e-15);
}

TEST(NormalizedTrace, TwoNormOfRankOneProjection) {
  // |e_11|_2 = (1/k)^{1/2}
  EXPECT_NEAR(two_norm(Matrix::unit(4, 0, 0)), 0.5, 1e-15);
  EXPECT_NEAR(two_norm(Matrix::identity(9)), 1.0, 1e-15);
}

TEST(NormalizedTrace, ProductTraceMatchesExplicitProduct) {
  const Matrix a = random_hermitian(6, 3);
  const Matrix b = random_unitary(6, 4).matrix();
  const Complex direct = normalized_trace(oracle::multiply(a, b));
  EXPECT_LE(std::abs(normalized_trace_of_product(a, b) - direct), 1e-14);
}

TEST(MatrixArithmetic, ProductMatchesNaiveLoop) {
  const Matrix a = random_unitary(5, 1).matrix();
  const Matrix b = random_hermitian(5, 2);
  EXPECT_LE(oracle::max_entry_gap(a * b, oracle::multiply(a, b)), 1e-14);
}

TEST(MatrixArithmetic, DimensionMismatchThrows) {
  try {
    (void)(Matrix::identity(2) + Matrix::identity(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
  EXPECT_THROW(Matrix(3, std::vector<Complex>(8)), Error);
  EXPECT_THROW(Matrix(0), Error);
}

TEST(Eigensystem, DiagonalInput) {
  std::vector<double> d = {3.0, -1.0, 2.0};
  const auto eig = hermitian_eigensystem(Matrix::diagonal(std::span<const double>(d)));
  ASSERT_EQ(eig.values.size(), 3u);
  EXPECT_NEAR(eig.values[0], -1.0, 1e-14);
  EXPECT_NEAR(eig.values[1], 2.0, 1e-14);
  EXPECT_NEAR(eig.values[2], 3.0, 1e-14);
}

TEST(Eigensystem, PauliY) {
  const auto eig = hermitian_eigensystem(pauli_y());
  EXPECT_NEAR(eig.values[0], -1.0, 1e-14);
  EXPECT_NEAR(eig.values[1], 1.0, 1e-14);
  expect_decomposition(pauli_y(), eig, 1e-13);
}

TEST(Eigensystem, CycleAdjacencySpectrum) {
  for (std::size_t n : {3, 5, 8, 13}) {
    const auto eig = hermitian_eigensystem(cycle_adjacency(n));
    const auto expected = oracle::cycle_adjacency_spectrum(n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(eig.values[i], expected[i], 1e-12) << n;
  }
}

TEST(Eigensystem, RandomReconstruction) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t k = 1 + seed % 24;
    const Matrix h = random_hermitian(k, seed);
    expect_decomposition(h, hermitian_eigensystem(h), 1e-12);
  }
}

TEST(Eigensystem, DegenerateSpectrum) {
  const Projection p = random_projection(10, 4, 9);
  const auto eig = hermitian_eigensystem(p.matrix());
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(eig.values[i], 0.0, 1e-12);
  for (std::size_t i = 6; i < 10; ++i) EXPECT_NEAR(eig.values[i], 1.0, 1e-12);
  expect_decomposition(p.matrix(), eig, 1e-12);
}

TEST(Eigensystem, RejectsNonHermitian) {
  Matrix m(2);
  m(0, 1) = 1.0;
  try {
    hermitian_eigensystem(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotHermitian);
  }
}

TEST(OperatorNorm, KnownValues) {
  EXPECT_NEAR(operator_norm(pauli_y()), 1.0, 1e-14);
  EXPECT_NEAR(operator_norm(cycle_adjacency(6)), 2.0, 1e-12);
  Matrix nilpotent(2);
  nilpotent(0, 1) = 3.0;
  EXPECT_NEAR(operator_norm(nilpotent), 3.0, 1e-12);
  EXPECT_NEAR(operator_norm(random_unitary(7, 2).matrix()), 1.0, 1e-12);
}

TEST(ProjectionType, AcceptsProjectionsAndRejectsOthers) {
  EXPECT_NO_THROW(Projection(Matrix::unit(3, 1, 1)));
  EXPECT_NO_THROW(Projection(random_projection(5, 2, 1).matrix()));
  try {
    Projection(Matrix::identity(2) * Complex(0.5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotProjection);
  }
  EXPECT_THROW(Projection(Matrix::unit(2, 0, 1)), Error);
}

TEST(ProjectionType, TraceRankAndComplement) {
  const Projection p = random_projection(8, 3, 5);
  EXPECT_EQ(p.rank(), 3u);
  EXPECT_EQ(oracle::numerical_rank(p.matrix()), 3u);
  EXPECT_NEAR(p.trace(), 3.0 / 8.0, 1e-13);
  EXPECT_EQ(p.complement().rank(), 5u);
  EXPECT_LE(operator_norm(p.matrix() * p.complement().matrix()), 1e-13);
}

TEST(UnitaryType, ValidatesAndExponentialIsUnitary) {
  EXPECT_THROW(Unitary(Matrix::identity(3) * Complex(2.0)), Error);
  const Matrix h = random_hermitian(6, 8);
  const Matrix u = exp_i_hermitian(h, 0.7);
  EXPECT_NO_THROW(Unitary(u, 1e-12));
  EXPECT_LE(unitarity_defect(u), 1e-12);
  // exp(i t H) exp(-i t H) = 1
  EXPECT_LE(oracle::max_entry_gap(u * exp_i_hermitian(h, -0.7), Matrix::identity(6)), 1e-12);
}

TEST(Join, OrthogonalRangesAddRanks) {
  std::vector<Projection> ps = {Projection::trusted(Matrix::unit(4, 0, 0)),
                                Projection::trusted(Matrix::unit(4, 2, 2))};
  const Projection j = join(ps);
  EXPECT_EQ(j.rank(), 2u);
  Matrix expected = Matrix::unit(4, 0, 0) + Matrix::unit(4, 2, 2);
  EXPECT_LE(max_abs_difference(j.matrix(), expected), 1e-13);
}

TEST(Join, GenericRangesSpanTheirSum) {
  const Projection a = random_projection(10, 3, 1);
  const Projection b = random_projection(10, 4, 2);
  std::vector<Projection> ps = {a, b};
  const Projection j = join(ps);
  EXPECT_EQ(j.rank(), 7u);
  EXPECT_LE(operator_norm(j.matrix() * a.matrix() - a.matrix()), 1e-10);
  EXPECT_LE(operator_norm(j.matrix() * b.matrix() - b.matrix()), 1e-10);
}

TEST(Join, OverlappingRangesDoNotDoubleCount) {
  const Projection a = random_projection(6, 3, 11);
  std::vector<Projection> ps = {a, a, Projection::zero(6)};
  EXPECT_EQ(join(ps).rank(), 3u);
  std::vector<Projection> none = {Projection::zero(6)};
  EXPECT_EQ(join(none).rank(), 0u);
}

TEST(Join, EmptyListNeedsDimension) {
  EXPECT_THROW(join(std::span<const Projection>{}), Error);
  EXPECT_EQ(join(std::span<const Projection>{}, 3).rank(), 0u);
}

TEST(RandomGenerators, DeterministicInSeed) {
  EXPECT_EQ(max_abs_difference(random_unitary(5, 42).matrix(), random_unitary(5, 42).matrix()), 0.0);
  EXPECT_GT(max_abs_difference(random_unitary(5, 42).matrix(), random_unitary(5, 43).matrix()), 1e-3);
}

TEST(RandomGenerators, UnitaryAndProjectionValidity) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const std::size_t k = 1 + s * 3;
    EXPECT_LE(unitarity_defect(random_unitary(k, s).matrix()), 1e-12);
    for (std::size_t r = 0; r <= k; r += std::max<std::size_t>(1, k / 3)) {
      const Projection p = random_projection(k, r, s);
      EXPECT_NO_THROW(Projection(p.matrix(), 1e-12));
      EXPECT_EQ(p.rank(), r);
    }
  }
  EXPECT_THROW(random_projection(3, 4, 0), Error);
}

TEST(RandomGenerators, PvmPartsSumToIdentity) {
  const auto pvm = random_pvm(7, 3, 1);
  ASSERT_EQ(pvm.size(), 3u);
  EXPECT_EQ(pvm[0].rank(), 3u);
  EXPECT_EQ(pvm[1].rank(), 2u);
  EXPECT_EQ(pvm[2].rank(), 2u);
  Matrix sum = Matrix::zero(7);
  for (const auto& e : pvm) sum += e.matrix();
  EXPECT_LE(operator_norm(sum - Matrix::identity(7)), 1e-12);
  EXPECT_THROW(random_pvm(3, 0, 0), Error);
}

TEST(RandomGenerators, HermitianHasUnitNorm) {
  const Matrix h = random_hermitian(9, 3);
  EXPECT_EQ(hermitian_defect(h), 0.0);
  EXPECT_NEAR(operator_norm(h), 1.0, 1e-12);
}
