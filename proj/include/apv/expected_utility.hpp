#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "apv/completion.hpp"
#include "apv/election.hpp"
#include "apv/rational.hpp"
#include "apv/scenario.hpp"

namespace apv {

// Exact expected utility of focal ballots for one (scenario, k, model).
// The increment law of the missing voters is computed once and reused, which
// makes evaluating all 2^m ballots cheap.
class ExpectedUtilityEvaluator {
 public:
  ExpectedUtilityEvaluator(const Scenario& scenario, int k, const CompletionModel& model)
      : scenario_(scenario),
        k_(k),
        increments_(increment_distribution(model, scenario.m(), scenario.missing_voters)) {
    scenario_.validate();
    detail::check_k(k, static_cast<std::size_t>(scenario_.m()));
  }

  Rational operator()(Ballot ballot) const {
    const ScoreVector base = tally(scenario_.base_scores, ballot);
    ScoreVector scores(base.size());
    Rational total;
    for (const auto& [inc, prob] : increments_) {
      for (std::size_t c = 0; c < base.size(); ++c) scores[c] = base[c] + inc[c];
      const Rational eu = expected_outcome_utility(winner_distribution(scores, k_), scenario_.utilities);
      if (!eu.is_zero()) total += prob * eu;
    }
    return total;
  }

  const Scenario& scenario() const { return scenario_; }
  int k() const { return k_; }

 private:
  Scenario scenario_;
  int k_;
  IncrementDistribution increments_;
};

// Expected utility (cents) of casting `ballot` when scenario.missing_voters
// further ballots are drawn from `model` and ties are broken uniformly.
inline Rational expected_utility_exact(const Scenario& scenario, Ballot ballot, int k, const CompletionModel& model) {
  return ExpectedUtilityEvaluator(scenario, k, model)(ballot);
}

// Reference computation: enumerates every ordered n-tuple of missing ballots
// with its joint probability. Throws ResourceError rather than truncating
// when the tuple count exceeds kMaxEnumeration.
inline Rational expected_utility_bruteforce(const Scenario& scenario, Ballot ballot, int k,
                                            const CompletionModel& model) {
  scenario.validate();
  detail::check_k(k, static_cast<std::size_t>(scenario.m()));
  const int n = scenario.missing_voters;
  const BallotLaw law = ballot_law(model, scenario.m());
  std::uint64_t tuples = 1;
  for (int i = 0; i < n; ++i) {
    tuples *= law.size();
    if (tuples > kMaxEnumeration)
      throw ResourceError("brute-force enumeration of " + std::to_string(law.size()) + "^" + std::to_string(n) +
                          " missing-ballot tuples exceeds the limit of " + std::to_string(kMaxEnumeration));
  }

  const ScoreVector base = tally(scenario.base_scores, ballot);
  std::vector<std::size_t> pick(n, 0);
  ScoreVector scores(base.size());
  Rational total;
  while (true) {
    scores = base;
    Rational prob(1);
    for (int i = 0; i < n; ++i) {
      const auto& [b, w] = law[pick[i]];
      prob *= w;
      for (int c : b.members()) ++scores[c];
    }
    total += prob * expected_outcome_utility(winner_distribution(scores, k), scenario.utilities);

    int i = n - 1;
    while (i >= 0 && pick[i] + 1 == law.size()) pick[i--] = 0;
    if (i < 0) break;
    ++pick[i];
  }
  return total;
}

struct MonteCarloEstimate {
  double estimate = 0;   // cents
  double std_error = 0;  // cents
  std::uint64_t samples = 0;
};

// Sample mean of realized utility over seeded draws of the missing ballots
// and of the tie-break. Deterministic in (seed, samples).
inline MonteCarloEstimate expected_utility_mc(const Scenario& scenario, Ballot ballot, int k,
                                              const CompletionModel& model, std::uint64_t samples,
                                              std::uint64_t seed) {
  scenario.validate();
  validate_model(model, scenario.m());
  detail::check_k(k, static_cast<std::size_t>(scenario.m()));
  if (samples < 1) throw ModelError("sample count must be positive");

  Engine engine(seed);
  const ScoreVector base = tally(scenario.base_scores, ballot);
  ScoreVector scores;
  double mean = 0, m2 = 0;
  for (std::uint64_t i = 1; i <= samples; ++i) {
    scores = base;
    for (int v = 0; v < scenario.missing_voters; ++v)
      for (int c : draw_ballot(model, scenario.m(), engine).members()) ++scores[c];
    const double x = static_cast<double>(set_utility(sample_winning_set(scores, k, engine), scenario.utilities));
    const double delta = x - mean;
    mean += delta / static_cast<double>(i);
    m2 += delta * (x - mean);
  }
  MonteCarloEstimate out;
  out.estimate = mean;
  out.samples = samples;
  out.std_error = samples > 1 ? std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples)) : 0.0;
  return out;
}

}  // namespace apv
