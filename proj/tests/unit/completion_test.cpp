#include <gtest/gtest.h>

#include <map>

#include "apv/completion.hpp"

using namespace apv;

namespace {

Rational total(const IncrementDistribution& d) {
  Rational s;
  for (const auto& [_, p] : d) s += p;
  return s;
}

}  // namespace

TEST(IncrementDistribution, NoMissingVotersIsAPointMass) {
  for (const CompletionModel& model :
       {CompletionModel{UniformSubsets{}}, CompletionModel{SingleVote{true}}, CompletionModel{IndependentApproval{Rational(1, 4)}}}) {
    const auto d = increment_distribution(model, 5, 0);
    ASSERT_EQ(d.size(), 1U);
    EXPECT_EQ(d.begin()->first, IncrementVector(5, 0));
    EXPECT_EQ(d.begin()->second, Rational(1));
  }
}

TEST(IncrementDistribution, SingleCandidateIsBinomial) {
  const auto d = increment_distribution(UniformSubsets{}, 1, 2);
  ASSERT_EQ(d.size(), 3U);
  EXPECT_EQ(d.at({0}), Rational(1, 4));
  EXPECT_EQ(d.at({1}), Rational(1, 2));
  EXPECT_EQ(d.at({2}), Rational(1, 4));
}

TEST(IncrementDistribution, UniformMatchesEnumerationOfAllBallotTriples) {
  // Oracle: enumerate all 32^3 ordered ballot triples.
  std::map<IncrementVector, Rational> oracle;
  const Rational each(1, 32 * 32 * 32);
  for (std::uint32_t a = 0; a < 32; ++a)
    for (std::uint32_t b = 0; b < 32; ++b)
      for (std::uint32_t c = 0; c < 32; ++c) {
        IncrementVector v(5, 0);
        for (std::uint32_t bits : {a, b, c})
          for (int j = 0; j < 5; ++j) v[j] += (bits >> j) & 1;
        oracle[v] += each;
      }
  const auto d = increment_distribution(UniformSubsets{}, 5, 3);
  EXPECT_EQ(d.size(), 1024U);
  EXPECT_EQ(d, (IncrementDistribution(oracle.begin(), oracle.end())));
  EXPECT_EQ(d.at({1, 2, 0, 3, 1}), Rational(27, 32768));
}

TEST(IncrementDistribution, ProductFormEqualsConvolution) {
  // The same law expressed as an explicit weighted model goes through n-fold
  // convolution instead of the product of binomials.
  for (const Rational p : {Rational(1, 2), Rational(1, 4), Rational(2, 3)}) {
    const CompletionModel product = IndependentApproval{p};
    const CompletionModel explicit_law = Weighted{ballot_law(product, 4)};
    for (int n = 0; n <= 3; ++n) EXPECT_EQ(increment_distribution(product, 4, n), increment_distribution(explicit_law, 4, n));
  }
}

TEST(IncrementDistribution, IndependentHalfEqualsUniform) {
  for (int n = 0; n <= 3; ++n)
    EXPECT_EQ(increment_distribution(IndependentApproval{Rational(1, 2)}, 5, n), increment_distribution(UniformSubsets{}, 5, n));
}

TEST(IncrementDistribution, SingleVoteSupport) {
  const auto d = increment_distribution(SingleVote{false}, 3, 2);
  EXPECT_EQ(total(d), Rational(1));
  EXPECT_EQ(d.at({2, 0, 0}), Rational(1, 9));
  EXPECT_EQ(d.at({1, 1, 0}), Rational(2, 9));
  EXPECT_FALSE(d.contains({0, 0, 0}));

  const auto a = increment_distribution(SingleVote{true}, 3, 2);
  EXPECT_EQ(a.at({0, 0, 0}), Rational(1, 16));
  EXPECT_EQ(total(a), Rational(1));
}

TEST(IncrementDistribution, DegenerateProbabilities) {
  const auto none = increment_distribution(IndependentApproval{Rational(0)}, 5, 3);
  ASSERT_EQ(none.size(), 1U);
  EXPECT_EQ(none.begin()->first, IncrementVector(5, 0));
  const auto all = increment_distribution(IndependentApproval{Rational(1)}, 5, 3);
  ASSERT_EQ(all.size(), 1U);
  EXPECT_EQ(all.begin()->first, IncrementVector(5, 3));
}

TEST(IncrementDistribution, RejectsInvalidParameters) {
  EXPECT_THROW(increment_distribution(IndependentApproval{Rational(3, 2)}, 5, 1), ModelError);
  EXPECT_THROW(increment_distribution(Weighted{{{Ballot::of({0}), Rational(1, 2)}}}, 5, 1), ModelError);
  EXPECT_THROW(increment_distribution(Weighted{{{Ballot::of({0}), Rational(3, 2)}, {Ballot(), Rational(-1, 2)}}}, 5, 1),
               ModelError);
  EXPECT_THROW(increment_distribution(Weighted{{{Ballot::of({7}), Rational(1)}}}, 5, 1), ModelError);
  EXPECT_THROW(increment_distribution(UniformSubsets{}, 5, -1), ModelError);
}

TEST(IncrementDistribution, ExplicitResourceErrorWhenTooLarge) {
  EXPECT_THROW(increment_distribution(UniformSubsets{}, 16, 4), ResourceError);
}

TEST(ParseModel, AllVariants) {
  const auto c = CandidateSet::letters(5);
  EXPECT_EQ(parse_model("uniform-subsets", c), CompletionModel{UniformSubsets{}});
  EXPECT_EQ(parse_model("independent:1/4", c), CompletionModel{IndependentApproval{Rational(1, 4)}});
  EXPECT_EQ(parse_model("single-vote", c), CompletionModel{SingleVote{false}});
  EXPECT_EQ(parse_model("single-vote-abstain", c), CompletionModel{SingleVote{true}});
  const auto w = parse_model("weighted:AB=1/2,E=1/4,=1/4", c);
  EXPECT_EQ(w, CompletionModel{(Weighted{{{Ballot::of({0, 1}), Rational(1, 2)},
                                          {Ballot::of({4}), Rational(1, 4)},
                                          {Ballot(), Rational(1, 4)}}})});
  EXPECT_EQ(describe_model(w, c), "weighted:AB=1/2,E=1/4,=1/4");
  EXPECT_THROW(parse_model("gaussian", c), ParseError);
  EXPECT_THROW(parse_model("weighted:AB=1/2", c), ModelError);
}

TEST(DrawBallot, EmpiricalFrequenciesFollowTheLaw) {
  const auto cands = CandidateSet::letters(5);
  const CompletionModel model = parse_model("weighted:AB=1/2,E=1/3,=1/6", cands);
  Engine engine(3);
  std::map<std::uint32_t, int> counts;
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) ++counts[draw_ballot(model, 5, engine).bits()];
  ASSERT_EQ(counts.size(), 3U);
  EXPECT_NEAR(counts[Ballot::of({0, 1}).bits()], draws / 2, 600);
  EXPECT_NEAR(counts[Ballot::of({4}).bits()], draws / 3, 600);
  EXPECT_NEAR(counts[0], draws / 6, 600);

  Engine e2(4);
  int approvals = 0;
  for (int i = 0; i < 20000; ++i) approvals += draw_ballot(IndependentApproval{Rational(1, 4)}, 5, e2).size();
  EXPECT_NEAR(approvals / 100000.0, 0.25, 0.01);
}
