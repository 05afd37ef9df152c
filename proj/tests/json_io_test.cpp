#include <gtest/gtest.h>

#include <string>

#include "syncgame/json_io.hpp"

using namespace syncgame;
using nlohmann::json;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return ErrorCode::InvariantViolation;
}

}  // namespace

TEST(JsonMatrix, RoundTrip) {
  const Matrix u = random_unitary(3, 1).matrix();
  const Matrix back = io::matrix_from_json(json::parse(io::to_json(u).dump()));
  EXPECT_EQ(max_abs_difference(u, back), 0.0);
}

TEST(JsonMatrix, ImaginaryPartOptional) {
  const auto m = io::matrix_from_json(json::parse(R"({"dim": 2, "re": [1, 0, 0, 0]})"));
  EXPECT_EQ(m(0, 0), Complex(1.0));
}

TEST(JsonMatrix, Errors) {
  EXPECT_EQ(code_of([] { io::matrix_from_json(json::parse(R"({"re": [1]})")); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { io::matrix_from_json(json::parse(R"({"dim": 2, "re": [1, 0, 0]})")); }),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { io::matrix_from_json(json::parse(R"({"dim": 1, "re": ["a"]})")); }),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { io::matrix_from_json(json::parse(R"({"dim": 0, "re": []})")); }), ErrorCode::ParseError);
}

TEST(JsonMatrix, ListForms) {
  const json one = io::to_json(Matrix::identity(2));
  EXPECT_EQ(io::matrices_from_json(json::array({one, one})).size(), 2u);
  EXPECT_EQ(io::matrices_from_json(json{{"matrices", json::array({one})}}).size(), 1u);
  EXPECT_EQ(io::matrices_from_json(json{{"projections", json::array({one, one, one})}}).size(), 3u);
  EXPECT_EQ(io::matrices_from_json(one).size(), 1u);
}

TEST(JsonGraph, OneBasedRoundTrip) {
  const Graph g = petersen_graph();
  const json j = io::to_json(g);
  EXPECT_EQ(j["edges"][0][0].get<int>(), 1);
  EXPECT_EQ(io::graph_from_json(j), g);
  EXPECT_EQ(code_of([] { io::graph_from_json(json::parse(R"({"n": 2, "edges": [[1, 3]]})")); }),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { io::graph_from_json(json::parse(R"({"n": 2, "edges": [[1, 1]]})")); }),
            ErrorCode::LoopEdge);
}

TEST(JsonGame, ExplicitRoundTripKeepsExactWeights) {
  const Game g = coloring_game(cycle_graph(5), 2, DistributionMode::UniformConstraints);
  const Game back = io::game_from_json(json::parse(io::to_json(g).dump()));
  EXPECT_EQ(back.rule_table(), g.rule_table());
  EXPECT_EQ(back.distribution(), g.distribution());
}

TEST(JsonGame, NamedColoringGame) {
  const Game g = io::game_from_json(json::parse(R"({"coloring": {"dimacs": "p edge 3 3\ne 1 2\ne 2 3\ne 1 3\n", "colors": 3}})"));
  EXPECT_EQ(g.inputs(), 3u);
  EXPECT_EQ(g.outputs(), 3u);
  EXPECT_EQ(g.gamma(0, 1), Rational(1, 9));
  const Game h = io::game_from_json(json::parse(
      R"({"coloring": {"graph": {"n": 2, "edges": [[1, 2]]}, "colors": 2, "distribution": "custom",
          "gamma": [["1/2", 0], [0, "0.5"]]}})"));
  EXPECT_EQ(h.gamma(0, 0), Rational(1, 2));
  EXPECT_EQ(h.gamma(1, 1), Rational(1, 2));
}

TEST(JsonGame, TrivialGame) {
  const Game g = io::game_from_json(json::parse(R"({"trivial": {"n": 2, "m": 3}})"));
  EXPECT_EQ(g.outputs(), 3u);
  EXPECT_FALSE(is_synchronous_game(g));
}

TEST(JsonGame, Errors) {
  EXPECT_EQ(code_of([] { io::game_from_json(json::parse(R"({"n": 1, "m": 1, "rules": [[[[2]]]], "gamma": [[1]]})")); }),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { io::game_from_json(json::parse(R"({"n": 1, "m": 1, "rules": [[[[1]]]], "gamma": [["1/3"]]})")); }),
            ErrorCode::InvalidGame);
  EXPECT_EQ(code_of([] { io::game_from_json(json::parse(R"({"coloring": {"colors": 2}})")); }),
            ErrorCode::ParseError);
}

TEST(JsonCorrelation, RoundTripAndValidation) {
  const auto p = deterministic_correlation(2, {0, 1, 1});
  const auto back = io::correlation_from_json(json::parse(io::to_json(p).dump()));
  EXPECT_EQ(back.entries(), p.entries());
  EXPECT_EQ(code_of([] { io::correlation_from_json(json::parse(R"({"n": 1, "m": 1, "p": [[[[0.5]]]]})")); }),
            ErrorCode::ParseError);
}

TEST(JsonPvm, RoundTrip) {
  std::vector<std::vector<Projection>> rows = {random_pvm(3, 2, 1), random_pvm(3, 2, 2)};
  const PVMFamily f(rows);
  const PVMFamily back = io::pvm_family_from_json(json::parse(io::to_json(f).dump()));
  EXPECT_EQ(back.inputs(), 2u);
  EXPECT_EQ(max_abs_difference(back(1, 1).matrix(), f(1, 1).matrix()), 0.0);
}

TEST(JsonReports, ValueReportCarriesBothSides) {
  const auto r = local_sync_value(coloring_game(cycle_graph(5), 2, DistributionMode::UniformAllPairs));
  const json j = io::to_json(r);
  EXPECT_EQ(j["exact_value"], "23/25");
  EXPECT_EQ(j["strategy"].size(), 5u);
  EXPECT_LE(j["verification_residual"].get<double>(), 1e-12);
}

TEST(JsonReports, DiscretizationReport) {
  const json j = io::to_json(discretize_unitary(Unitary::identity(2), 4));
  EXPECT_NEAR(j["distance"].get<double>(), std::sqrt(2.0), 1e-12);
  EXPECT_TRUE(j["within_bound"].get<bool>());
  EXPECT_EQ(j["arcs"].size(), 4u);
}
