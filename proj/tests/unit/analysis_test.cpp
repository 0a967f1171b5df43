#include <gtest/gtest.h>

#include <algorithm>

#include "apv/analysis.hpp"
#include "apv/ballot_log.hpp"
#include "apv/comparison.hpp"

using namespace apv;

namespace {

const Scenario& S(const char* id) { return *find_builtin(id); }
Ballot B(const char* labels) { return parse_ballot(labels, CandidateSet::letters(5)); }

bool contains(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

}  // namespace

TEST(Rounding, HalfUpToCents) {
  EXPECT_EQ(format_dollars(Rational(13)), "0.13");
  EXPECT_EQ(format_dollars(Rational(25, 2)), "0.13");
  EXPECT_EQ(format_dollars(Rational(-10, 3)), "-0.03");
  EXPECT_EQ(format_dollars(Rational(45, 4)), "0.11");
  EXPECT_EQ(format_dollars(Rational(45, 2)), "0.23");
  EXPECT_EQ(format_dollars(Rational(-100)), "-1.00");
  EXPECT_EQ(format_dollars(Rational(0)), "0.00");
  EXPECT_EQ(truncate_cents(Rational(25, 2)), 12);
  EXPECT_EQ(truncate_cents(Rational(-10, 3)), -3);
  EXPECT_EQ(exact_dollars(Rational(13)), "13/100");
}

TEST(HeuristicGrid, Scenario1bRowZero) {
  const auto grid = heuristic_grid(S("1b"), {1, 2, 3}, {0}, UniformSubsets{});
  EXPECT_EQ(format_dollars(grid.at(1, 0).max_eu), "0.13");
  EXPECT_EQ(format_dollars(grid.at(2, 0).max_eu), "0.26");
  EXPECT_EQ(format_dollars(grid.at(3, 0).max_eu), "0.36");
  EXPECT_TRUE(contains(grid.at(1, 0).maximizing_strategies, "Take-1"));
  EXPECT_TRUE(contains(grid.at(2, 0).maximizing_strategies, "Take-1"));
  EXPECT_TRUE(contains(grid.at(3, 0).maximizing_strategies, "Take-2"));
}

TEST(HeuristicGrid, Scenario3NonHeuristicMaximizer) {
  const auto cell = heuristic_grid(S("3"), {2}, {0}, UniformSubsets{}).at(2, 0);
  EXPECT_EQ(cell.max_eu, Rational(25));
  EXPECT_TRUE(contains(cell.maximizing_strategies, "Regret"));
  EXPECT_TRUE(cell.has_non_heuristic_maximizer());
  EXPECT_NE(std::find(cell.other_maximizers.begin(), cell.other_maximizers.end(), B("CE")), cell.other_maximizers.end());
  EXPECT_EQ(describe_maximizers(cell, CandidateSet::letters(5)), "Regret, [C,E], [A,C,E], [B,C,E]");
}

TEST(HeuristicGrid, Scenario2aEverythingMaximizes) {
  const auto cell = heuristic_grid(S("2a"), {1}, {0}, UniformSubsets{}).at(1, 0);
  EXPECT_EQ(cell.max_eu, Rational(0));
  EXPECT_TRUE(cell.all_ballots_maximize(5));
  EXPECT_EQ(cell.maximizing_strategies.size(), cell.heuristic_eu.size());
}

TEST(HeuristicGrid, CellMaxEqualsBestResponse) {
  const CompletionModel model = SingleVote{true};
  for (const auto& s : builtin_scenarios()) {
    const auto grid = heuristic_grid(s, {1, 2, 3}, {0, 1, 3}, model);
    for (const auto& cell : grid.cells)
      ASSERT_EQ(cell.max_eu, best_response(s.with_missing_voters(cell.n), cell.k, model).max_eu);
  }
}

TEST(HeuristicGrid, CsvCarriesTheTableValues) {
  const auto grid = heuristic_grid(S("3"), {1, 2, 3}, {0}, UniformSubsets{});
  const std::string csv = render_grid_csv(grid);
  const std::string table = render_grid_table(grid, false);
  EXPECT_NE(csv.find("3,3,0,-0.03,-1/30,\"Regret\""), std::string::npos) << csv;
  EXPECT_NE(table.find("-0.03 Regret"), std::string::npos) << table;
}

TEST(BallotLog, RoundTrip) {
  const std::vector<BallotRecord> records = {
      {"s000001", "3", 1, 0, B("ABE")}, {"s000001", "1b", 2, 1, Ballot()}, {"s000002", "4", 3, 0, B("CD")}};
  const std::string csv = write_ballot_log(records);
  EXPECT_EQ(csv, "session_id,scenario_id,k,n,ballot\ns000001,3,1,0,ABE\ns000001,1b,2,1,\ns000002,4,3,0,CD\n");
  EXPECT_EQ(parse_ballot_log(csv), records);
}

TEST(BallotLog, Errors) {
  EXPECT_THROW(parse_ballot_log("wrong,header\n"), ParseError);
  EXPECT_THROW(parse_ballot_log("session_id,scenario_id,k,n,ballot\ns,99,1,0,A\n"), DataError);
  EXPECT_THROW(parse_ballot_log("session_id,scenario_id,k,n,ballot\ns,3,1,0\n"), ParseError);
  EXPECT_THROW(parse_ballot_log("session_id,scenario_id,k,n,ballot\ns,3,x,0,A\n"), ParseError);
  EXPECT_THROW(parse_ballot_log("session_id,scenario_id,k,n,ballot\ns,3,1,0,Q\n"), ParseError);
}

TEST(StrategyProportions, AllTruthful) {
  const Ballot t = truthful_ballot(S("3").utilities);
  const auto out = strategy_proportions({{"a", "3", 1, 0, t}, {"b", "3", 1, 0, t}, {"c", "3", 1, 0, t}});
  ASSERT_EQ(out.size(), 1U);
  EXPECT_EQ(out[0].percent("Truth"), 100.0);
}

TEST(StrategyProportions, MixedScenario3) {
  const auto out = strategy_proportions(
      {{"a", "3", 1, 0, B("E")}, {"b", "3", 1, 0, B("E")}, {"c", "3", 1, 0, B("ABE")}, {"d", "3", 1, 0, B("")}});
  ASSERT_EQ(out.size(), 1U);
  EXPECT_EQ(out[0].percent("Take-1"), 50.0);
  EXPECT_EQ(out[0].percent("Truth"), 25.0);
  EXPECT_EQ(out[0].percent("Abstain"), 25.0);
}

TEST(StrategyProportions, EmptyAndUnknown) {
  EXPECT_TRUE(strategy_proportions({}).empty());
  EXPECT_THROW(strategy_proportions({{"a", "nope", 1, 0, B("E")}}), DataError);
}

TEST(StrategyProportions, PrecedenceAndSumTo100) {
  // Scenario 4's truthful ballot is also Take-3; Truth wins by precedence.
  EXPECT_EQ(strategy_category(classify_ballot(B("ACD"), S("4").utilities)), "Truth");
  // a scenario where everything is disliked: the empty ballot is truthful and regret-minimizing
  EXPECT_EQ(strategy_category(classify_ballot(Ballot(), {-1, -2})), "Truth");

  std::vector<BallotRecord> records;
  for (std::uint32_t bits = 0; bits < 32; ++bits)
    for (const char* id : {"1b", "3"}) records.push_back({"s", id, 2, 1, Ballot::from_bits(bits)});
  for (const auto& summary : strategy_proportions(records)) {
    double total = 0;
    for (const auto& [cat, _] : summary.counts) total += summary.percent(cat);
    EXPECT_NEAR(total, 100.0, 1e-9);
  }
}

TEST(ComparisonReport, CoversEveryPublishedCellAndFlagsKnownDiscrepancies) {
  const auto report = comparison_report(UniformSubsets{});
  EXPECT_EQ(report.rows.size(), published_cells().size());

  for (int k : {1, 2, 3}) {
    const auto* row = report.find("1b", k, 0);
    ASSERT_NE(row, nullptr);
    EXPECT_TRUE(row->value_match) << k;
  }
  for (int k : {1, 2, 3}) EXPECT_TRUE(report.find("3", k, 0)->value_match) << k;

  const auto* s4 = report.find("4", 3, 0);
  ASSERT_NE(s4, nullptr);
  EXPECT_FALSE(s4->value_match);
  EXPECT_EQ(s4->oracle_cents, Rational(35));
  EXPECT_NE(s4->note.find("known discrepancy"), std::string::npos);

  const std::string text = report.render();
  EXPECT_NE(text.find("MISMATCH"), std::string::npos);
  EXPECT_NE(text.find("0.35"), std::string::npos);

  // 1a: 0.125 prints as 0.13 but the published 0.12 is its truncation
  const auto* s1a = report.find("1a-reconstructed", 1, 0);
  EXPECT_FALSE(s1a->value_match);
  EXPECT_TRUE(s1a->value_match_truncated);
}
