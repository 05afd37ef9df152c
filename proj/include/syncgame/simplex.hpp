#pragma once

// Two-phase revised simplex with Bland's rule over an arbitrary ordered
// field (double or Rational). Columns are produced on demand so that LPs
// with many structured columns (deterministic strategies, independent sets)
// never need a materialized constraint matrix.
//
//   maximize  c.x   subject to  A x = b,  x >= 0.

#include <cstddef>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "syncgame/error.hpp"
#include "syncgame/rational.hpp"

namespace syncgame {

template <class T>
using SparseColumn = std::vector<std::pair<std::size_t, T>>;

template <class T>
struct LpTolerance {
  static T pivot() { return T(1e-9); }
  static T feasibility() { return T(1e-9); }
};

template <>
struct LpTolerance<Rational> {
  static Rational pivot() { return Rational(0); }
  static Rational feasibility() { return Rational(0); }
};

template <class T>
struct LpProblem {
  std::size_t rows = 0;
  std::size_t columns = 0;
  std::vector<T> rhs;
  std::vector<T> cost;
  /// Writes the nonzeros of column j (row index, value) into the output.
  std::function<void(std::size_t, SparseColumn<T>&)> column;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

template <class T>
struct LpResult {
  LpStatus status = LpStatus::IterationLimit;
  T objective{};
  std::vector<T> x;
  /// Basic variable per row; indices >= columns are artificials.
  std::vector<std::size_t> basis;
  /// At optimality: y with y.A_j >= c_j for every column and y.b = objective.
  std::vector<T> duals;
  /// On infeasibility: z with z.A_j <= 0 for every column and z.b > 0.
  std::vector<T> farkas;
  /// Phase-one optimum: total artificial mass left.
  T infeasibility{};
  std::size_t iterations = 0;
};

template <class T>
class RevisedSimplex {
 public:
  explicit RevisedSimplex(const LpProblem<T>& lp, std::size_t max_iterations = 0)
      : lp_(lp),
        rows_(lp.rows),
        cols_(lp.columns),
        max_iterations_(max_iterations ? max_iterations : 200 * (lp.rows + lp.columns) + 1000) {
    if (lp.rhs.size() != rows_ || lp.cost.size() != cols_ || !lp.column) {
      throw Error(ErrorCode::InvalidArgument, "inconsistent LP dimensions");
    }
  }

  LpResult<T> solve() {
    LpResult<T> result;
    sign_.assign(rows_, T(1));
    rhs_ = lp_.rhs;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (rhs_[i] < T(0)) {
        sign_[i] = T(-1);
        rhs_[i] = -rhs_[i];
      }
    }
    binv_.assign(rows_ * rows_, T(0));
    for (std::size_t i = 0; i < rows_; ++i) binv_[i * rows_ + i] = T(1);
    basis_.resize(rows_);
    for (std::size_t i = 0; i < rows_; ++i) basis_[i] = cols_ + i;
    xb_ = rhs_;
    in_basis_.assign(cols_ + rows_, false);
    for (std::size_t i = 0; i < rows_; ++i) in_basis_[cols_ + i] = true;

    // Phase one: maximize -sum(artificials).
    phase_ = 1;
    const LpStatus p1 = iterate(result.iterations);
    if (p1 == LpStatus::IterationLimit) {
      result.status = p1;
      return result;
    }
    T artificial_mass(0);
    for (std::size_t i = 0; i < rows_; ++i)
      if (basis_[i] >= cols_) artificial_mass += xb_[i];
    result.infeasibility = artificial_mass;
    if (artificial_mass > LpTolerance<T>::feasibility()) {
      const auto y = duals();
      result.farkas.resize(rows_);
      for (std::size_t i = 0; i < rows_; ++i) result.farkas[i] = -y[i] * sign_[i];
      result.status = LpStatus::Infeasible;
      result.basis = basis_;
      return result;
    }
    drive_out_artificials();

    phase_ = 2;
    const LpStatus p2 = iterate(result.iterations);
    result.status = p2;
    result.basis = basis_;
    result.x.assign(cols_, T(0));
    for (std::size_t i = 0; i < rows_; ++i)
      if (basis_[i] < cols_) result.x[basis_[i]] = xb_[i];
    T obj(0);
    for (std::size_t j = 0; j < cols_; ++j) obj += lp_.cost[j] * result.x[j];
    result.objective = obj;
    const auto y = duals();
    result.duals.resize(rows_);
    for (std::size_t i = 0; i < rows_; ++i) result.duals[i] = y[i] * sign_[i];
    return result;
  }

 private:
  T phase_cost(std::size_t j) const {
    if (phase_ == 1) return j >= cols_ ? T(-1) : T(0);
    return j >= cols_ ? T(0) : lp_.cost[j];
  }

  // Column j in the sign-normalized row space.
  void load_column(std::size_t j, SparseColumn<T>& out) const {
    out.clear();
    if (j >= cols_) {
      out.emplace_back(j - cols_, T(1));
      return;
    }
    lp_.column(j, out);
    for (auto& [row, value] : out) value *= sign_[row];
  }

  std::vector<T> duals() const {
    std::vector<T> y(rows_, T(0));
    for (std::size_t i = 0; i < rows_; ++i) {
      const T cb = phase_cost(basis_[i]);
      if (cb == T(0)) continue;
      for (std::size_t r = 0; r < rows_; ++r) y[r] += cb * binv_[i * rows_ + r];
    }
    return y;
  }

  std::vector<T> ftran(const SparseColumn<T>& a) const {
    std::vector<T> d(rows_, T(0));
    for (std::size_t i = 0; i < rows_; ++i) {
      T sum(0);
      for (const auto& [row, value] : a) sum += binv_[i * rows_ + row] * value;
      d[i] = sum;
    }
    return d;
  }

  void pivot(std::size_t leave_row, std::size_t entering, const std::vector<T>& d) {
    const T inv = T(1) / d[leave_row];
    T* prow = &binv_[leave_row * rows_];
    for (std::size_t c = 0; c < rows_; ++c) prow[c] *= inv;
    xb_[leave_row] *= inv;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == leave_row || d[i] == T(0)) continue;
      const T f = d[i];
      T* row = &binv_[i * rows_];
      for (std::size_t c = 0; c < rows_; ++c) row[c] -= f * prow[c];
      xb_[i] -= f * xb_[leave_row];
    }
    in_basis_[basis_[leave_row]] = false;
    in_basis_[entering] = true;
    basis_[leave_row] = entering;
  }

  LpStatus iterate(std::size_t& iterations) {
    const T eps = LpTolerance<T>::pivot();
    SparseColumn<T> col;
    while (true) {
      if (iterations >= max_iterations_) return LpStatus::IterationLimit;
      const auto y = duals();
      // Bland: first improving structural column. Artificials never re-enter.
      std::size_t entering = cols_;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (in_basis_[j]) continue;
        load_column(j, col);
        T reduced = phase_cost(j);
        for (const auto& [row, value] : col) reduced -= y[row] * value;
        if (reduced > eps) {
          entering = j;
          break;
        }
      }
      if (entering == cols_) return LpStatus::Optimal;
      load_column(entering, col);
      const auto d = ftran(col);
      std::size_t leave = rows_;
      T best_ratio{};
      for (std::size_t i = 0; i < rows_; ++i) {
        if (!(d[i] > eps)) continue;
        const T ratio = xb_[i] / d[i];
        if (leave == rows_ || ratio < best_ratio ||
            (ratio == best_ratio && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave == rows_) return LpStatus::Unbounded;
      pivot(leave, entering, d);
      for (auto& v : xb_)
        if (v < T(0) && v > -eps) v = T(0);
      ++iterations;
    }
  }

  // Degenerate pivots replacing zero-level artificials; rows where no
  // structural column has a nonzero entry are redundant and keep theirs.
  void drive_out_artificials() {
    const T eps = LpTolerance<T>::pivot();
    SparseColumn<T> col;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (basis_[r] < cols_) continue;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (in_basis_[j]) continue;
        load_column(j, col);
        T dr(0);
        for (const auto& [row, value] : col) dr += binv_[r * rows_ + row] * value;
        if (dr > eps || dr < -eps) {
          pivot(r, j, ftran(col));
          break;
        }
      }
    }
  }

  const LpProblem<T>& lp_;
  std::size_t rows_;
  std::size_t cols_;
  std::size_t max_iterations_;
  int phase_ = 1;
  std::vector<T> sign_;
  std::vector<T> rhs_;
  std::vector<T> binv_;
  std::vector<T> xb_;
  std::vector<std::size_t> basis_;
  std::vector<bool> in_basis_;
};

template <class T>
LpResult<T> solve_lp(const LpProblem<T>& lp, std::size_t max_iterations = 0) {
  return RevisedSimplex<T>(lp, max_iterations).solve();
}

}  // namespace syncgame
