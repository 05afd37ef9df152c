#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "syncgame/error.hpp"
#include "syncgame/graph.hpp"
#include "syncgame/rational.hpp"

namespace syncgame {

/// Two-player game with n inputs and m outputs (both 0-based). Rules and
/// input distribution are indexed by the ordered input pair (x, y).
class Game {
 public:
  Game(std::size_t n, std::size_t m, std::vector<std::uint8_t> rules, std::vector<Rational> gamma)
      : n_(n), m_(m), rules_(std::move(rules)), gamma_(std::move(gamma)) {
    if (n == 0 || m == 0) throw Error(ErrorCode::InvalidGame, "game needs inputs and outputs");
    if (rules_.size() != n * n * m * m) {
      throw Error(ErrorCode::InvalidGame, "rule table must have n^2 m^2 entries");
    }
    if (gamma_.size() != n * n) throw Error(ErrorCode::InvalidGame, "distribution must have n^2 entries");
    for (auto r : rules_)
      if (r > 1) throw Error(ErrorCode::InvalidGame, "rule values must be 0 or 1");
    Rational total = 0;
    for (const auto& g : gamma_) {
      if (g < 0) throw Error(ErrorCode::InvalidGame, "negative input probability");
      total += g;
    }
    if (std::abs(to_double(total) - 1.0) > 1e-12) {
      throw Error(ErrorCode::InvalidGame, "input distribution sums to " + to_string(total));
    }
    weights_.reserve(gamma_.size());
    for (const auto& g : gamma_) weights_.push_back(to_double(g));
  }

  std::size_t inputs() const noexcept { return n_; }
  std::size_t outputs() const noexcept { return m_; }

  bool rule(std::size_t x, std::size_t y, std::size_t a, std::size_t b) const {
    return rules_[index(x, y, a, b)] != 0;
  }
  const Rational& gamma(std::size_t x, std::size_t y) const { return gamma_[x * n_ + y]; }
  double weight(std::size_t x, std::size_t y) const { return weights_[x * n_ + y]; }

  std::size_t index(std::size_t x, std::size_t y, std::size_t a, std::size_t b) const {
    return ((x * n_ + y) * m_ + a) * m_ + b;
  }

  const std::vector<std::uint8_t>& rule_table() const noexcept { return rules_; }
  const std::vector<Rational>& distribution() const noexcept { return gamma_; }

 private:
  std::size_t n_;
  std::size_t m_;
  std::vector<std::uint8_t> rules_;
  std::vector<Rational> gamma_;
  std::vector<double> weights_;
};

enum class DistributionMode { UniformAllPairs, UniformConstraints, Custom };

inline const char* to_string(DistributionMode mode) {
  switch (mode) {
    case DistributionMode::UniformAllPairs: return "uniform-all-pairs";
    case DistributionMode::UniformConstraints: return "uniform-constraints";
    case DistributionMode::Custom: return "custom";
  }
  return "unknown";
}

inline DistributionMode parse_distribution_mode(const std::string& name) {
  if (name == "uniform-all-pairs") return DistributionMode::UniformAllPairs;
  if (name == "uniform-constraints") return DistributionMode::UniformConstraints;
  if (name == "custom") return DistributionMode::Custom;
  throw Error(ErrorCode::ParseError, "unknown distribution '" + name + "'");
}

inline std::vector<Rational> uniform_all_pairs(std::size_t n) {
  return std::vector<Rational>(n * n, Rational(1, static_cast<long long>(n * n)));
}

/// Equal weight on the n diagonal pairs and the 2|E| ordered edge pairs.
inline std::vector<Rational> uniform_constraints(const Graph& g) {
  const std::size_t n = g.vertex_count();
  const auto support = static_cast<long long>(n + 2 * g.edge_count());
  std::vector<Rational> gamma(n * n, Rational(0));
  for (std::size_t v = 0; v < n; ++v) gamma[v * n + v] = Rational(1, support);
  for (const auto& [u, v] : g.edges()) {
    gamma[u * n + v] = Rational(1, support);
    gamma[v * n + u] = Rational(1, support);
  }
  return gamma;
}

/// Graph coloring game with c colors: equal vertices must answer equally,
/// adjacent vertices must answer differently.
inline Game coloring_game(const Graph& g, std::size_t colors, DistributionMode mode,
                          std::optional<std::vector<Rational>> custom = std::nullopt) {
  if (colors == 0) throw Error(ErrorCode::InvalidArgument, "need at least one color");
  const std::size_t n = g.vertex_count();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "coloring game needs a vertex");
  const std::size_t c = colors;
  std::vector<std::uint8_t> rules(n * n * c * c, 1);
  auto at = [&](std::size_t x, std::size_t y, std::size_t a, std::size_t b) {
    return ((x * n + y) * c + a) * c + b;
  };
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t a = 0; a < c; ++a)
      for (std::size_t b = 0; b < c; ++b)
        if (a != b) rules[at(v, v, a, b)] = 0;
  for (const auto& [v, w] : g.edges()) {
    for (std::size_t a = 0; a < c; ++a) {
      rules[at(v, w, a, a)] = 0;
      rules[at(w, v, a, a)] = 0;
    }
  }
  std::vector<Rational> gamma;
  switch (mode) {
    case DistributionMode::UniformAllPairs: gamma = uniform_all_pairs(n); break;
    case DistributionMode::UniformConstraints: gamma = uniform_constraints(g); break;
    case DistributionMode::Custom:
      if (!custom) throw Error(ErrorCode::InvalidArgument, "custom distribution requires a table");
      gamma = std::move(*custom);
      break;
  }
  return Game(n, c, std::move(rules), std::move(gamma));
}

/// Game whose rules accept every answer pair.
inline Game trivial_game(std::size_t n, std::size_t m) {
  return Game(n, m, std::vector<std::uint8_t>(n * n * m * m, 1), uniform_all_pairs(n));
}

/// True iff lambda(x, x, a, b) = 0 whenever a != b.
inline bool is_synchronous_game(const Game& g) {
  for (std::size_t x = 0; x < g.inputs(); ++x)
    for (std::size_t a = 0; a < g.outputs(); ++a)
      for (std::size_t b = 0; b < g.outputs(); ++b)
        if (a != b && g.rule(x, x, a, b)) return false;
  return true;
}

}  // namespace syncgame
