#pragma once

// Dense complex matrices in M_k(C) with the normalized trace tr_k(I) = 1.
// The unnormalized rank of a projection p is k * normalized_trace(p).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "syncgame/error.hpp"

namespace syncgame {

using Complex = std::complex<double>;

inline constexpr double kDefaultTolerance = 1e-8;
inline constexpr double kJacobiThreshold = 1e-13;
inline constexpr int kMaxJacobiSweeps = 100;
inline constexpr double kJoinRelativeCutoff = 1e-8;

class Matrix {
 public:
  Matrix() : Matrix(1) {}

  explicit Matrix(std::size_t dim) : dim_(dim), entries_(dim * dim) {
    if (dim == 0) throw Error(ErrorCode::InvalidArgument, "matrix dimension must be positive");
  }

  Matrix(std::size_t dim, std::vector<Complex> entries) : dim_(dim), entries_(std::move(entries)) {
    if (dim == 0) throw Error(ErrorCode::InvalidArgument, "matrix dimension must be positive");
    if (entries_.size() != dim * dim) {
      throw Error(ErrorCode::DimensionMismatch,
                  "expected " + std::to_string(dim * dim) + " entries, got " +
                      std::to_string(entries_.size()));
    }
  }

  static Matrix zero(std::size_t dim) { return Matrix(dim); }

  static Matrix identity(std::size_t dim) {
    Matrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix diagonal(std::span<const Complex> values) {
    Matrix m(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
  }

  static Matrix diagonal(std::span<const double> values) {
    Matrix m(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
  }

  /// Matrix unit e_{ij} (0-based).
  static Matrix unit(std::size_t dim, std::size_t i, std::size_t j) {
    Matrix m(dim);
    m(i, j) = 1.0;
    return m;
  }

  std::size_t dim() const noexcept { return dim_; }

  Complex& operator()(std::size_t i, std::size_t j) { return entries_[i * dim_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }

  std::span<const Complex> entries() const noexcept { return entries_; }

  Matrix adjoint() const {
    Matrix out(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
  }

  Matrix& operator+=(const Matrix& other) {
    check_same_dim(other);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
    return *this;
  }

  Matrix& operator-=(const Matrix& other) {
    check_same_dim(other);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
    return *this;
  }

  Matrix& operator*=(Complex s) {
    for (auto& e : entries_) e *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, Complex s) { return a *= s; }
  friend Matrix operator*(Complex s, Matrix a) { return a *= s; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    a.check_same_dim(b);
    const std::size_t k = a.dim_;
    Matrix out(k);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t l = 0; l < k; ++l) {
        const Complex ail = a(i, l);
        if (ail == Complex{}) continue;
        const Complex* brow = &b.entries_[l * k];
        Complex* orow = &out.entries_[i * k];
        for (std::size_t j = 0; j < k; ++j) orow[j] += ail * brow[j];
      }
    }
    return out;
  }

  void check_same_dim(const Matrix& other) const {
    if (other.dim_ != dim_) {
      throw Error(ErrorCode::DimensionMismatch,
                  std::to_string(dim_) + " vs " + std::to_string(other.dim_));
    }
  }

 private:
  std::size_t dim_;
  std::vector<Complex> entries_;
};

// ---------------------------------------------------------------------------
// Scalar functionals and norms

inline Complex normalized_trace(const Matrix& m) {
  Complex sum{};
  for (std::size_t i = 0; i < m.dim(); ++i) sum += m(i, i);
  return sum / static_cast<double>(m.dim());
}

/// tr_k(a b) without forming the product.
inline Complex normalized_trace_of_product(const Matrix& a, const Matrix& b) {
  a.check_same_dim(b);
  const std::size_t k = a.dim();
  Complex sum{};
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) sum += a(i, j) * b(j, i);
  return sum / static_cast<double>(k);
}

/// ||m||_2 = tr_k(m* m)^{1/2}.
inline double two_norm(const Matrix& m) {
  double sum = 0.0;
  for (const auto& e : m.entries()) sum += std::norm(e);
  return std::sqrt(sum / static_cast<double>(m.dim()));
}

inline double frobenius_norm(const Matrix& m) {
  double sum = 0.0;
  for (const auto& e : m.entries()) sum += std::norm(e);
  return std::sqrt(sum);
}

inline double max_abs_entry(const Matrix& m) {
  double best = 0.0;
  for (const auto& e : m.entries()) best = std::max(best, std::abs(e));
  return best;
}

inline double max_abs_difference(const Matrix& a, const Matrix& b) {
  a.check_same_dim(b);
  double best = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) best = std::max(best, std::abs(a(i, j) - b(i, j)));
  return best;
}

/// Max-entry distance between m and its adjoint.
inline double hermitian_defect(const Matrix& m) {
  double best = 0.0;
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = i; j < m.dim(); ++j)
      best = std::max(best, std::abs(m(i, j) - std::conj(m(j, i))));
  return best;
}

inline Matrix hermitian_part(const Matrix& m) {
  Matrix out(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i) {
    out(i, i) = m(i, i).real();
    for (std::size_t j = i + 1; j < m.dim(); ++j) {
      const Complex v = 0.5 * (m(i, j) + std::conj(m(j, i)));
      out(i, j) = v;
      out(j, i) = std::conj(v);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hermitian eigensolver (cyclic complex Jacobi)

struct HermitianEigensystem {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column i is the eigenvector for values[i]
};

namespace detail {

inline double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      if (i != j) sum += std::norm(a(i, j));
  return std::sqrt(sum);
}

// Annihilates a(p,q) with G = diag(1, conj(phase)) * [[c, s], [-s, c]] acting
// on coordinates (p, q): a <- G* a G, v <- v G.
inline void jacobi_rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q, double skip_below) {
  const Complex apq = a(p, q);
  const double r = std::abs(apq);
  if (r <= skip_below) return;
  const Complex phase = apq / r;
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double tau = (aqq - app) / (2.0 * r);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;
  const Complex gpp = c;
  const Complex gpq = s;
  const Complex gqp = -s * std::conj(phase);
  const Complex gqq = c * std::conj(phase);

  const std::size_t k = a.dim();
  for (std::size_t i = 0; i < k; ++i) {
    const Complex aip = a(i, p);
    const Complex aiq = a(i, q);
    a(i, p) = aip * gpp + aiq * gqp;
    a(i, q) = aip * gpq + aiq * gqq;
  }
  for (std::size_t j = 0; j < k; ++j) {
    const Complex apj = a(p, j);
    const Complex aqj = a(q, j);
    a(p, j) = std::conj(gpp) * apj + std::conj(gqp) * aqj;
    a(q, j) = std::conj(gpq) * apj + std::conj(gqq) * aqj;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();
  for (std::size_t i = 0; i < k; ++i) {
    const Complex vip = v(i, p);
    const Complex viq = v(i, q);
    v(i, p) = vip * gpp + viq * gqp;
    v(i, q) = vip * gpq + viq * gqq;
  }
}

}  // namespace detail

/// m = V diag(values) V* with values ascending. Deterministic for identical input.
inline HermitianEigensystem hermitian_eigensystem(const Matrix& m, double tol = kDefaultTolerance) {
  if (const double defect = hermitian_defect(m); defect > tol) {
    throw Error(ErrorCode::NotHermitian, "hermitian defect " + std::to_string(defect));
  }
  const std::size_t k = m.dim();
  Matrix a = hermitian_part(m);
  Matrix v = Matrix::identity(k);
  const double scale = std::max(1.0, frobenius_norm(a));
  const double skip_below = 1e-18 * scale;
  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    if (detail::off_diagonal_norm(a) <= kJacobiThreshold * scale) break;
    for (std::size_t p = 0; p + 1 < k; ++p)
      for (std::size_t q = p + 1; q < k; ++q) detail::jacobi_rotate(a, v, p, q, skip_below);
  }

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x).real() < a(y, y).real();
  });
  HermitianEigensystem out{std::vector<double>(k), Matrix(k)};
  for (std::size_t c = 0; c < k; ++c) {
    out.values[c] = a(order[c], order[c]).real();
    for (std::size_t i = 0; i < k; ++i) out.vectors(i, c) = v(i, order[c]);
  }
  return out;
}

/// Largest singular value, from the top eigenvalue of m* m.
inline double operator_norm(const Matrix& m) {
  const Matrix gram = hermitian_part(m.adjoint() * m);
  const auto eig = hermitian_eigensystem(gram);
  return std::sqrt(std::max(0.0, eig.values.back()));
}

/// Sum over the selected columns c of v_c v_c*; exactly Hermitian.
inline Matrix projector_onto_columns(const Matrix& vectors, std::span<const std::size_t> columns) {
  const std::size_t k = vectors.dim();
  Matrix out(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      Complex sum{};
      for (const std::size_t c : columns) sum += vectors(i, c) * std::conj(vectors(j, c));
      out(i, j) = sum;
      out(j, i) = std::conj(sum);
    }
    out(i, i) = out(i, i).real();
  }
  return out;
}

/// exp(i t H) for Hermitian H.
inline Matrix exp_i_hermitian(const Matrix& h, double t) {
  const auto eig = hermitian_eigensystem(h);
  const std::size_t k = h.dim();
  Matrix scaled = eig.vectors;
  for (std::size_t c = 0; c < k; ++c) {
    const Complex phase = std::polar(1.0, t * eig.values[c]);
    for (std::size_t i = 0; i < k; ++i) scaled(i, c) *= phase;
  }
  return scaled * eig.vectors.adjoint();
}

// ---------------------------------------------------------------------------
// Validated strong types

class Projection {
 public:
  /// Throws NotProjection unless m is Hermitian (max entry) and idempotent
  /// (operator norm) within tol.
  explicit Projection(Matrix m, double tol = kDefaultTolerance) : matrix_(std::move(m)) {
    if (const double h = hermitian_defect(matrix_); h > tol) {
      throw Error(ErrorCode::NotProjection, "hermitian defect " + std::to_string(h));
    }
    if (const double d = operator_norm(matrix_ * matrix_ - matrix_); d > tol) {
      throw Error(ErrorCode::NotProjection, "idempotence defect " + std::to_string(d));
    }
  }

  /// For matrices that are projections by construction.
  static Projection trusted(Matrix m) { return Projection(std::move(m), Trusted{}); }

  static Projection zero(std::size_t dim) { return trusted(Matrix::zero(dim)); }
  static Projection identity(std::size_t dim) { return trusted(Matrix::identity(dim)); }

  const Matrix& matrix() const noexcept { return matrix_; }
  std::size_t dim() const noexcept { return matrix_.dim(); }
  double trace() const { return normalized_trace(matrix_).real(); }
  std::size_t rank() const {
    return static_cast<std::size_t>(std::llround(std::max(0.0, trace() * double(dim()))));
  }
  Projection complement() const { return trusted(Matrix::identity(dim()) - matrix_); }

 private:
  struct Trusted {};
  Projection(Matrix m, Trusted) : matrix_(std::move(m)) {}
  Matrix matrix_;
};

class Unitary {
 public:
  explicit Unitary(Matrix m, double tol = kDefaultTolerance) : matrix_(std::move(m)) {
    const Matrix gram = matrix_ * matrix_.adjoint();
    if (const double d = operator_norm(gram - Matrix::identity(dim())); d > tol) {
      throw Error(ErrorCode::NotUnitary, "unitarity defect " + std::to_string(d));
    }
  }

  static Unitary trusted(Matrix m) { return Unitary(std::move(m), Trusted{}); }
  static Unitary identity(std::size_t dim) { return trusted(Matrix::identity(dim)); }

  const Matrix& matrix() const noexcept { return matrix_; }
  std::size_t dim() const noexcept { return matrix_.dim(); }

 private:
  struct Trusted {};
  Unitary(Matrix m, Trusted) : matrix_(std::move(m)) {}
  Matrix matrix_;
};

inline double unitarity_defect(const Matrix& u) {
  return operator_norm(u * u.adjoint() - Matrix::identity(u.dim()));
}

/// u m u*
inline Matrix conjugate(const Matrix& u, const Matrix& m) { return u * m * u.adjoint(); }

// ---------------------------------------------------------------------------
// Join of projections

/// Orthogonal projection onto the span of the union of the ranges. The
/// range is read off the eigenvalues of sum(ps) that are at least
/// kJoinRelativeCutoff times the largest one.
inline Projection join(std::span<const Projection> ps, std::size_t dim) {
  Matrix sum = Matrix::zero(dim);
  for (const auto& p : ps) sum += p.matrix();
  const auto eig = hermitian_eigensystem(sum);
  const double top = eig.values.back();
  if (top <= 0.0) return Projection::zero(dim);
  std::vector<std::size_t> columns;
  for (std::size_t c = 0; c < dim; ++c)
    if (eig.values[c] >= kJoinRelativeCutoff * top) columns.push_back(c);
  return Projection::trusted(projector_onto_columns(eig.vectors, columns));
}

inline Projection join(std::span<const Projection> ps) {
  if (ps.empty()) throw Error(ErrorCode::InvalidArgument, "join of an empty list needs a dimension");
  const std::size_t dim = ps.front().dim();
  for (const auto& p : ps)
    if (p.dim() != dim) throw Error(ErrorCode::DimensionMismatch, "join operands differ in dimension");
  return join(ps, dim);
}

/// Eigenvectors with eigenvalue above 1/2 span the range of a projection.
inline std::vector<std::size_t> range_columns(const HermitianEigensystem& eig) {
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < eig.values.size(); ++c)
    if (eig.values[c] > 0.5) cols.push_back(c);
  return cols;
}

// ---------------------------------------------------------------------------
// Seeded random generators

/// Haar unitary: modified Gram-Schmidt (two passes) on a complex Gaussian matrix.
inline Unitary random_unitary(std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) g(i, j) = Complex(normal(rng), normal(rng));
  for (std::size_t c = 0; c < k; ++c) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t prev = 0; prev < c; ++prev) {
        Complex dot{};
        for (std::size_t i = 0; i < k; ++i) dot += std::conj(g(i, prev)) * g(i, c);
        for (std::size_t i = 0; i < k; ++i) g(i, c) -= dot * g(i, prev);
      }
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < k; ++i) norm += std::norm(g(i, c));
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < k; ++i) g(i, c) /= norm;
  }
  return Unitary::trusted(std::move(g));
}

inline Projection random_projection(std::size_t k, std::size_t rank, std::uint64_t seed) {
  if (rank > k) {
    throw Error(ErrorCode::RankOutOfRange,
                "rank " + std::to_string(rank) + " exceeds dimension " + std::to_string(k));
  }
  const Unitary u = random_unitary(k, seed);
  std::vector<std::size_t> cols(rank);
  std::iota(cols.begin(), cols.end(), std::size_t{0});
  return Projection::trusted(projector_onto_columns(u.matrix(), cols));
}

/// m projections summing to the identity; part sizes differ by at most one,
/// larger parts first.
inline std::vector<Projection> random_pvm(std::size_t k, std::size_t m, std::uint64_t seed) {
  if (m == 0) throw Error(ErrorCode::RankOutOfRange, "a PVM needs at least one outcome");
  const Unitary u = random_unitary(k, seed);
  std::vector<Projection> out;
  out.reserve(m);
  std::size_t start = 0;
  for (std::size_t a = 0; a < m; ++a) {
    const std::size_t size = k / m + (a < k % m ? 1 : 0);
    std::vector<std::size_t> cols(size);
    std::iota(cols.begin(), cols.end(), start);
    start += size;
    out.push_back(Projection::trusted(projector_onto_columns(u.matrix(), cols)));
  }
  return out;
}

/// Random Hermitian matrix with i.i.d. Gaussian entries, scaled to unit operator norm.
inline Matrix random_hermitian(std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix h(k);
  for (std::size_t i = 0; i < k; ++i) {
    h(i, i) = normal(rng);
    for (std::size_t j = i + 1; j < k; ++j) {
      const Complex z(normal(rng), normal(rng));
      h(i, j) = z;
      h(j, i) = std::conj(z);
    }
  }
  const double n = operator_norm(h);
  return n > 0.0 ? h * Complex(1.0 / n) : h;
}

/// Deterministic seed mixing for derived streams (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (a + 1) + 0xbf58476d1ce4e5b9ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace syncgame
