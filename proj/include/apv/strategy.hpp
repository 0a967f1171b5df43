#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "apv/completion.hpp"
#include "apv/election.hpp"
#include "apv/errors.hpp"
#include "apv/expected_utility.hpp"
#include "apv/rational.hpp"
#include "apv/scenario.hpp"

namespace apv {

// Approves every candidate with strictly positive utility.
inline Ballot truthful_ballot(const UtilityVector& u) {
  Ballot b;
  for (std::size_t c = 0; c < u.size(); ++c)
    if (u[c] > 0) b = b.with(static_cast<int>(c));
  return b;
}

// Approves every candidate with non-negative utility, i.e. everyone except the
// disliked candidates.
inline Ballot regret_min_ballot(const UtilityVector& u) {
  Ballot b;
  for (std::size_t c = 0; c < u.size(); ++c)
    if (u[c] >= 0) b = b.with(static_cast<int>(c));
  return b;
}

// The x highest-utility candidates among those with positive utility.
// No tie-breaking: a utility tie across the x boundary is a DomainError.
inline Ballot take_x_best(const UtilityVector& u, int x) {
  std::vector<int> positive;
  for (std::size_t c = 0; c < u.size(); ++c)
    if (u[c] > 0) positive.push_back(static_cast<int>(c));
  if (x < 1 || x > static_cast<int>(positive.size()))
    throw DomainError("take-" + std::to_string(x) + "-best needs 1 <= x <= " + std::to_string(positive.size()) +
                      " (positive-utility candidates)");
  std::stable_sort(positive.begin(), positive.end(), [&](int a, int b) { return u[a] > u[b]; });
  if (x < static_cast<int>(positive.size()) && u[positive[x - 1]] == u[positive[x]])
    throw DomainError("take-" + std::to_string(x) + "-best: utility tie at the selection boundary");
  Ballot b;
  for (int i = 0; i < x; ++i) b = b.with(positive[i]);
  return b;
}

// Every approved candidate is weakly preferred to every disapproved one.
inline bool is_sincere(Ballot ballot, const UtilityVector& u) {
  bool any_in = false, any_out = false;
  std::int64_t min_in = 0, max_out = 0;
  for (std::size_t c = 0; c < u.size(); ++c) {
    if (ballot.contains(static_cast<int>(c))) {
      min_in = any_in ? std::min(min_in, u[c]) : u[c];
      any_in = true;
    } else {
      max_out = any_out ? std::max(max_out, u[c]) : u[c];
      any_out = true;
    }
  }
  return !any_in || !any_out || min_in >= max_out;
}

struct HeuristicLabel {
  enum class Kind { Truthful, TakeXBest, RegretMinimization, Abstain, Other };
  Kind kind = Kind::Other;
  int x = 0;  // only for TakeXBest

  std::string name() const {
    switch (kind) {
      case Kind::Truthful: return "Truth";
      case Kind::TakeXBest: return "Take-" + std::to_string(x);
      case Kind::RegretMinimization: return "Regret";
      case Kind::Abstain: return "Abstain";
      case Kind::Other: break;
    }
    return "Other";
  }

  static HeuristicLabel truthful() { return {Kind::Truthful, 0}; }
  static HeuristicLabel take(int x) { return {Kind::TakeXBest, x}; }
  static HeuristicLabel regret() { return {Kind::RegretMinimization, 0}; }
  static HeuristicLabel abstain() { return {Kind::Abstain, 0}; }
  static HeuristicLabel other() { return {Kind::Other, 0}; }

  friend bool operator==(const HeuristicLabel&, const HeuristicLabel&) = default;
};

struct Classification {
  std::vector<HeuristicLabel> labels;
  bool sincere = false;

  bool has(const HeuristicLabel& l) const { return std::find(labels.begin(), labels.end(), l) != labels.end(); }
};

// The heuristic ballots defined for a utility vector, in a fixed order:
// Truth, Take-1..Take-p (skipping x with a boundary tie), Regret, Abstain.
inline std::vector<std::pair<HeuristicLabel, Ballot>> heuristic_ballots(const UtilityVector& u) {
  std::vector<std::pair<HeuristicLabel, Ballot>> out;
  const Ballot truth = truthful_ballot(u);
  out.emplace_back(HeuristicLabel::truthful(), truth);
  for (int x = 1; x <= truth.size(); ++x) {
    try {
      out.emplace_back(HeuristicLabel::take(x), take_x_best(u, x));
    } catch (const DomainError&) {
      // boundary tie: take-x undefined for this x
    }
  }
  out.emplace_back(HeuristicLabel::regret(), regret_min_ballot(u));
  out.emplace_back(HeuristicLabel::abstain(), Ballot());
  return out;
}

// All labels whose generator produces exactly this ballot, plus the sincere flag.
inline Classification classify_ballot(Ballot ballot, const UtilityVector& u) {
  Classification out;
  for (const auto& [label, b] : heuristic_ballots(u))
    if (b == ballot) out.labels.push_back(label);
  if (out.labels.empty()) out.labels.push_back(HeuristicLabel::other());
  out.sincere = is_sincere(ballot, u);
  return out;
}

struct BestResponse {
  Rational max_eu;
  std::vector<Ballot> maximizers;  // ascending by bit pattern
};

// Exhaustive search over all 2^m ballots.
inline BestResponse best_response(const Scenario& scenario, int k, const CompletionModel& model) {
  if (scenario.m() > kMaxCandidates) throw ModelError("too many candidates for exhaustive search");
  const ExpectedUtilityEvaluator eval(scenario, k, model);
  BestResponse out;
  const std::uint32_t count = std::uint32_t{1} << scenario.m();
  for (std::uint32_t bits = 0; bits < count; ++bits) {
    const Ballot b = Ballot::from_bits(bits);
    const Rational eu = eval(b);
    if (out.maximizers.empty() || eu > out.max_eu) {
      out.max_eu = eu;
      out.maximizers.assign(1, b);
    } else if (eu == out.max_eu) {
      out.maximizers.push_back(b);
    }
  }
  return out;
}

}  // namespace apv
