#include <gtest/gtest.h>

#include "apv/expected_utility.hpp"
#include "apv/scenario.hpp"

using namespace apv;

namespace {

const Scenario& S(const char* id) { return *find_builtin(id); }

Ballot B(const char* labels) { return parse_ballot(labels, CandidateSet::letters(5)); }

}  // namespace

TEST(ExpectedUtilityExact, NoMissingVoters) {
  EXPECT_EQ(expected_utility_exact(S("1b"), B("D"), 1, UniformSubsets{}), Rational(13));
  EXPECT_EQ(expected_utility_exact(S("3"), B("ABCE"), 3, UniformSubsets{}), Rational(-10, 3));
}

TEST(ExpectedUtilityExact, Scenario2aIsZeroForEveryBallot) {
  for (std::uint32_t bits = 0; bits < 32; ++bits)
    for (int k : {1, 2}) EXPECT_EQ(expected_utility_exact(S("2a"), Ballot::from_bits(bits), k, UniformSubsets{}), Rational(0));
}

// Frozen from tests/oracle/freeze_values.py (explicit enumeration of tuples
// and of tie-broken winning sets).
TEST(ExpectedUtilityExact, OneMissingVoterReferences) {
  const Scenario s = S("3").with_missing_voters(1);
  EXPECT_EQ(expected_utility_exact(s, B("ABE"), 1, UniformSubsets{}), Rational(1387, 128));
  EXPECT_EQ(Rational(1387, 128) / Rational(100), Rational::parse("34675/10000") / Rational(32));
  EXPECT_EQ(expected_utility_exact(s, B("E"), 1, UniformSubsets{}), Rational(75, 8));
  EXPECT_EQ(expected_utility_exact(s, B("ABCE"), 1, UniformSubsets{}), Rational(3281, 384));
}

TEST(ExpectedUtilityBruteforce, MatchesReferences) {
  const Scenario s = S("3").with_missing_voters(1);
  EXPECT_EQ(expected_utility_bruteforce(s, B("ABE"), 1, UniformSubsets{}), Rational(1387, 128));
  EXPECT_EQ(expected_utility_bruteforce(s, B("E"), 1, UniformSubsets{}), Rational(75, 8));
}

TEST(ExpectedUtilityBruteforce, EqualsExactOnSmallGrid) {
  const CompletionModel models[] = {UniformSubsets{}, IndependentApproval{Rational(1, 4)}, SingleVote{false},
                                    SingleVote{true}};
  for (const auto& s : builtin_scenarios())
    for (const auto& model : models)
      for (int n : {0, 1, 2})
        for (int k : {1, 2, 3})
          for (std::uint32_t bits : {0U, 1U, 7U, 17U, 22U, 31U}) {
            const Scenario sn = s.with_missing_voters(n);
            const Ballot b = Ballot::from_bits(bits);
            ASSERT_EQ(expected_utility_exact(sn, b, k, model), expected_utility_bruteforce(sn, b, k, model))
                << s.id << " n=" << n << " k=" << k << " ballot=" << bits;
          }
}

TEST(ExpectedUtilityBruteforce, RefusesInfeasibleEnumeration) {
  EXPECT_THROW(expected_utility_bruteforce(S("3").with_missing_voters(6), B("E"), 1, UniformSubsets{}), ResourceError);
  EXPECT_NO_THROW(expected_utility_bruteforce(S("3").with_missing_voters(6), B("E"), 1, SingleVote{false}));
}

TEST(ExpectedUtilityExact, NoMissingVotersCollapsesForEveryModel) {
  const CompletionModel models[] = {UniformSubsets{}, IndependentApproval{Rational(1, 3)}, SingleVote{true},
                                    Weighted{{{B("AB"), Rational(1, 2)}, {B(""), Rational(1, 2)}}}};
  for (const auto& s : builtin_scenarios())
    for (const auto& model : models)
      for (int k : {1, 2, 3})
        for (std::uint32_t bits = 0; bits < 32; ++bits) {
          const Ballot b = Ballot::from_bits(bits);
          ASSERT_EQ(expected_utility_exact(s, b, k, model),
                    expected_outcome_utility(winner_distribution(tally(s.base_scores, b), k), s.utilities));
        }
}

TEST(ExpectedUtilityExact, RejectsBadK) {
  EXPECT_THROW(expected_utility_exact(S("3"), B("E"), 0, UniformSubsets{}), ModelError);
  EXPECT_THROW(expected_utility_exact(S("3"), B("E"), 6, UniformSubsets{}), ModelError);
}

TEST(ExpectedUtilityMc, DeterministicForFixedSeed) {
  const Scenario s = S("3").with_missing_voters(1);
  const auto a = expected_utility_mc(s, B("ABE"), 1, UniformSubsets{}, 5000, 42);
  const auto b = expected_utility_mc(s, B("ABE"), 1, UniformSubsets{}, 5000, 42);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(ExpectedUtilityMc, TieBreakOnlyNoise) {
  const auto est = expected_utility_mc(S("1b"), B("D"), 1, UniformSubsets{}, 1000, 7);
  EXPECT_GT(est.std_error, 0);
  EXPECT_LE(std::abs(est.estimate - 13.0), 4 * est.std_error);
}

TEST(ExpectedUtilityMc, CloseToExactWithOneMissingVoter) {
  const Scenario s = S("3").with_missing_voters(1);
  const auto est = expected_utility_mc(s, B("ABE"), 1, UniformSubsets{}, 100000, 2024);
  EXPECT_LE(std::abs(est.estimate - Rational(1387, 128).to_double()), 4 * est.std_error);
}

TEST(ExpectedUtilityMc, ZeroUtilityIsExactlyZero) {
  Scenario s = S("3").with_missing_voters(3);
  s.utilities.assign(5, 0);
  for (std::uint64_t seed : {1ULL, 99ULL}) {
    const auto est = expected_utility_mc(s, B("AC"), 2, UniformSubsets{}, 500, seed);
    EXPECT_EQ(est.estimate, 0.0);
    EXPECT_EQ(est.std_error, 0.0);
  }
  EXPECT_THROW(expected_utility_mc(s, B("AC"), 2, UniformSubsets{}, 0, 1), ModelError);
}
