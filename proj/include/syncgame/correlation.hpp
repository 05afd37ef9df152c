#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "syncgame/error.hpp"
#include "syncgame/game.hpp"
#include "syncgame/matrix.hpp"
#include "syncgame/simplex.hpp"

namespace syncgame {

inline constexpr double kNegativeClamp = 1e-12;
inline constexpr double kRowSumTolerance = 1e-10;
inline constexpr double kMarginalTolerance = 1e-8;
inline constexpr double kSyncTolerance = 1e-8;

/// p(a,b|x,y) stored in [x][y][a][b] order.
class CorrelationMatrix {
 public:
  /// Entries in [-1e-12, 0) are clamped to zero; anything more negative, or a
  /// block (x,y) whose entries do not sum to one within 1e-10, is rejected.
  CorrelationMatrix(std::size_t n, std::size_t m, std::vector<double> p)
      : n_(n), m_(m), p_(std::move(p)) {
    if (n == 0 || m == 0) throw Error(ErrorCode::InvalidCorrelation, "empty correlation");
    if (p_.size() != n * n * m * m) {
      throw Error(ErrorCode::InvalidCorrelation, "expected n^2 m^2 entries");
    }
    for (auto& v : p_) {
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidCorrelation, "non-finite entry");
      if (v < 0.0) {
        if (v < -kNegativeClamp) {
          throw Error(ErrorCode::InvalidCorrelation, "negative entry " + std::to_string(v));
        }
        v = 0.0;
      }
    }
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        double sum = 0.0;
        for (std::size_t a = 0; a < m; ++a)
          for (std::size_t b = 0; b < m; ++b) sum += (*this)(x, y, a, b);
        if (std::abs(sum - 1.0) > kRowSumTolerance) {
          throw Error(ErrorCode::InvalidCorrelation, "block (" + std::to_string(x) + "," +
                                                         std::to_string(y) + ") sums to " +
                                                         std::to_string(sum));
        }
      }
    }
  }

  std::size_t inputs() const noexcept { return n_; }
  std::size_t outputs() const noexcept { return m_; }

  std::size_t index(std::size_t x, std::size_t y, std::size_t a, std::size_t b) const {
    return ((x * n_ + y) * m_ + a) * m_ + b;
  }
  double operator()(std::size_t x, std::size_t y, std::size_t a, std::size_t b) const {
    return p_[index(x, y, a, b)];
  }
  const std::vector<double>& entries() const noexcept { return p_; }

 private:
  std::size_t n_;
  std::size_t m_;
  std::vector<double> p_;
};

/// For each input x, m projections E_{x,a} in M_k summing to the identity.
class PVMFamily {
 public:
  PVMFamily(std::vector<std::vector<Projection>> measurements, double tol = kDefaultTolerance)
      : measurements_(std::move(measurements)) {
    if (measurements_.empty() || measurements_.front().empty()) {
      throw Error(ErrorCode::InvalidPVM, "family needs at least one input and one output");
    }
    dim_ = measurements_.front().front().dim();
    const std::size_t m = measurements_.front().size();
    for (std::size_t x = 0; x < measurements_.size(); ++x) {
      const auto& pvm = measurements_[x];
      if (pvm.size() != m) throw Error(ErrorCode::InvalidPVM, "inputs have different output counts");
      Matrix sum = Matrix::zero(dim_);
      for (const auto& e : pvm) {
        if (e.dim() != dim_) throw Error(ErrorCode::InvalidPVM, "projections differ in dimension");
        sum += e.matrix();
      }
      if (const double d = operator_norm(sum - Matrix::identity(dim_)); d > tol) {
        throw Error(ErrorCode::InvalidPVM, "outcomes of input " + std::to_string(x) +
                                               " miss the identity by " + std::to_string(d));
      }
    }
  }

  /// Validates each matrix as a projection first; failures surface as InvalidPVM.
  static PVMFamily from_matrices(const std::vector<std::vector<Matrix>>& ms,
                                 double tol = kDefaultTolerance) {
    std::vector<std::vector<Projection>> out;
    for (const auto& row : ms) {
      std::vector<Projection> pvm;
      for (const auto& m : row) {
        try {
          pvm.emplace_back(m, tol);
        } catch (const Error& e) {
          throw Error(ErrorCode::InvalidPVM, e.what());
        }
      }
      out.push_back(std::move(pvm));
    }
    return PVMFamily(std::move(out), tol);
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t inputs() const noexcept { return measurements_.size(); }
  std::size_t outputs() const noexcept { return measurements_.front().size(); }
  const Projection& operator()(std::size_t x, std::size_t a) const { return measurements_[x][a]; }
  const std::vector<std::vector<Projection>>& measurements() const noexcept { return measurements_; }

 private:
  std::vector<std::vector<Projection>> measurements_;
  std::size_t dim_ = 0;
};

/// p(a,b|x,y) = Re tr_k(E_{x,a} E_{y,b}).
inline CorrelationMatrix from_pvm(const PVMFamily& f) {
  const std::size_t n = f.inputs();
  const std::size_t m = f.outputs();
  std::vector<double> p(n * n * m * m);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
          p[((x * n + y) * m + a) * m + b] =
              normalized_trace_of_product(f(x, a).matrix(), f(y, b).matrix()).real();
  return CorrelationMatrix(n, m, std::move(p));
}

/// p_f(a,b|x,y) = [f(x) = a][f(y) = b].
inline CorrelationMatrix deterministic_correlation(std::size_t m, const std::vector<std::size_t>& f) {
  const std::size_t n = f.size();
  std::vector<double> p(n * n * m * m, 0.0);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) p[((x * n + y) * m + f[x]) * m + f[y]] = 1.0;
  return CorrelationMatrix(n, m, std::move(p));
}

/// Diagonal embedding of a deterministic strategy: E_{x,a} = I when f(x) = a.
inline PVMFamily deterministic_pvm(std::size_t k, std::size_t m, const std::vector<std::size_t>& f) {
  std::vector<std::vector<Projection>> out;
  for (const std::size_t fx : f) {
    std::vector<Projection> pvm;
    for (std::size_t a = 0; a < m; ++a)
      pvm.push_back(a == fx ? Projection::identity(k) : Projection::zero(k));
    out.push_back(std::move(pvm));
  }
  return PVMFamily(std::move(out));
}

/// Convex combination sum_i w_i p_i of correlations with equal shape.
inline CorrelationMatrix mix(const std::vector<std::pair<double, CorrelationMatrix>>& parts) {
  if (parts.empty()) throw Error(ErrorCode::InvalidArgument, "empty mixture");
  const auto& first = parts.front().second;
  std::vector<double> p(first.entries().size(), 0.0);
  for (const auto& [w, c] : parts) {
    if (c.inputs() != first.inputs() || c.outputs() != first.outputs()) {
      throw Error(ErrorCode::ShapeMismatch, "mixture parts differ in shape");
    }
    for (std::size_t i = 0; i < p.size(); ++i) p[i] += w * c.entries()[i];
  }
  return CorrelationMatrix(first.inputs(), first.outputs(), std::move(p));
}

enum class Side { Alice, Bob };

/// Largest spread of a marginal across the other party's input.
inline double marginal_spread(const CorrelationMatrix& p, Side side) {
  const std::size_t n = p.inputs();
  const std::size_t m = p.outputs();
  double spread = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t a = 0; a < m; ++a) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t y = 0; y < n; ++y) {
        double s = 0.0;
        for (std::size_t b = 0; b < m; ++b) s += side == Side::Alice ? p(x, y, a, b) : p(y, x, b, a);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
      spread = std::max(spread, hi - lo);
    }
  }
  return spread;
}

/// Alice: sum_b p(a,b|x,y0); Bob: sum_b p(b,a|y0,x); y0 = 0 after checking
/// the sum does not depend on y0.
inline double marginal(const CorrelationMatrix& p, Side side, std::size_t a, std::size_t x) {
  const std::size_t n = p.inputs();
  const std::size_t m = p.outputs();
  if (a >= m || x >= n) throw Error(ErrorCode::ShapeMismatch, "marginal index out of range");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double first = 0.0;
  for (std::size_t y = 0; y < n; ++y) {
    double s = 0.0;
    for (std::size_t b = 0; b < m; ++b) s += side == Side::Alice ? p(x, y, a, b) : p(y, x, b, a);
    if (y == 0) first = s;
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  if (hi - lo > kMarginalTolerance) {
    throw Error(ErrorCode::MarginalInconsistent, "marginal varies by " + std::to_string(hi - lo));
  }
  return first;
}

/// p(a,b|x,x) <= tol for all x and a != b.
inline bool is_synchronous(const CorrelationMatrix& p, double tol = kSyncTolerance) {
  for (std::size_t x = 0; x < p.inputs(); ++x)
    for (std::size_t a = 0; a < p.outputs(); ++a)
      for (std::size_t b = 0; b < p.outputs(); ++b)
        if (a != b && p(x, x, a, b) > tol) return false;
  return true;
}

inline void check_shape(const CorrelationMatrix& p, const Game& g) {
  if (p.inputs() != g.inputs() || p.outputs() != g.outputs()) {
    throw Error(ErrorCode::ShapeMismatch, "correlation and game shapes differ");
  }
}

/// No probability mass (beyond tol) on answer pairs the rules forbid.
inline bool is_winning(const CorrelationMatrix& p, const Game& g, double tol = kSyncTolerance) {
  check_shape(p, g);
  for (std::size_t x = 0; x < p.inputs(); ++x)
    for (std::size_t y = 0; y < p.inputs(); ++y)
      for (std::size_t a = 0; a < p.outputs(); ++a)
        for (std::size_t b = 0; b < p.outputs(); ++b)
          if (!g.rule(x, y, a, b) && p(x, y, a, b) > tol) return false;
  return true;
}

/// sum gamma_{x,y} lambda(x,y,a,b) p(a,b|x,y).
inline double game_value(const CorrelationMatrix& p, const Game& g) {
  check_shape(p, g);
  double total = 0.0;
  for (std::size_t x = 0; x < p.inputs(); ++x) {
    for (std::size_t y = 0; y < p.inputs(); ++y) {
      const double w = g.weight(x, y);
      if (w == 0.0) continue;
      double block = 0.0;
      for (std::size_t a = 0; a < p.outputs(); ++a)
        for (std::size_t b = 0; b < p.outputs(); ++b)
          if (g.rule(x, y, a, b)) block += p(x, y, a, b);
      total += w * block;
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Deterministic strategies

/// m^n, or cap + 1 once it exceeds cap.
inline std::size_t strategy_count(std::size_t n, std::size_t m, std::size_t cap) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (total > cap / m) return cap + 1;
    total *= m;
  }
  return total;
}

/// Strategy index in lexicographic order with f(0) most significant.
inline std::vector<std::size_t> decode_strategy(std::size_t index, std::size_t n, std::size_t m) {
  std::vector<std::size_t> f(n);
  for (std::size_t x = n; x-- > 0;) {
    f[x] = index % m;
    index /= m;
  }
  return f;
}

// ---------------------------------------------------------------------------
// Membership in the local synchronous set

inline constexpr std::size_t kMembershipStrategyCap = 1'000'000;
inline constexpr double kMembershipTolerance = 1e-8;

struct MembershipResult {
  bool member = false;
  /// Member: deterministic strategies with positive weight.
  std::vector<std::pair<std::vector<std::size_t>, double>> weights;
  double reconstruction_error = 0.0;
  /// Non-member: <h, p_f> <= bound for every f while <h, p> > bound.
  std::vector<double> separator;
  double bound = 0.0;
  double margin = 0.0;
  std::vector<std::size_t> basis;
  std::size_t lp_iterations = 0;
};

/// Max over deterministic f of <h, p_f>, by enumeration.
inline double max_over_deterministic(const std::vector<double>& h, std::size_t n, std::size_t m) {
  const std::size_t count = strategy_count(n, m, kMembershipStrategyCap);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx < count; ++idx) {
    const auto f = decode_strategy(idx, n, m);
    double s = 0.0;
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) s += h[((x * n + y) * m + f[x]) * m + f[y]];
    best = std::max(best, s);
  }
  return best;
}

/// Decides whether p is a convex combination of the m^n deterministic
/// correlations p_f, via phase one of the simplex method on
///   sum_f w_f p_f = p,  sum_f w_f = 1,  w >= 0.
inline MembershipResult local_sync_membership(const CorrelationMatrix& p,
                                              std::size_t cap = kMembershipStrategyCap) {
  const std::size_t n = p.inputs();
  const std::size_t m = p.outputs();
  const std::size_t count = strategy_count(n, m, cap);
  if (count > cap) {
    throw Error(ErrorCode::TooLarge, "m^n exceeds the strategy cap of " + std::to_string(cap));
  }
  const std::size_t entries = n * n * m * m;

  LpProblem<double> lp;
  lp.rows = entries + 1;
  lp.columns = count;
  lp.rhs = p.entries();
  lp.rhs.push_back(1.0);
  lp.cost.assign(count, 0.0);
  lp.column = [n, m, entries](std::size_t j, SparseColumn<double>& out) {
    const auto f = decode_strategy(j, n, m);
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) out.emplace_back(((x * n + y) * m + f[x]) * m + f[y], 1.0);
    out.emplace_back(entries, 1.0);
  };
  const auto lp_result = solve_lp(lp);
  if (lp_result.status == LpStatus::IterationLimit) {
    throw Error(ErrorCode::InvariantViolation, "membership LP hit the iteration limit");
  }

  MembershipResult out;
  out.basis = lp_result.basis;
  out.lp_iterations = lp_result.iterations;
  if (lp_result.status == LpStatus::Infeasible) {
    out.member = false;
    out.separator.assign(lp_result.farkas.begin(), lp_result.farkas.begin() + entries);
    double hp = 0.0;
    for (std::size_t i = 0; i < entries; ++i) hp += out.separator[i] * p.entries()[i];
    out.bound = max_over_deterministic(out.separator, n, m);
    out.margin = hp - out.bound;
    return out;
  }

  out.member = true;
  std::vector<double> recon(entries, 0.0);
  for (std::size_t j = 0; j < count; ++j) {
    const double w = lp_result.x[j];
    if (w <= 0.0) continue;
    auto f = decode_strategy(j, n, m);
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) recon[((x * n + y) * m + f[x]) * m + f[y]] += w;
    out.weights.emplace_back(std::move(f), w);
  }
  for (std::size_t i = 0; i < entries; ++i)
    out.reconstruction_error =
        std::max(out.reconstruction_error, std::abs(recon[i] - p.entries()[i]));
  return out;
}

}  // namespace syncgame
