#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "apv/election.hpp"
#include "apv/errors.hpp"
#include "apv/random.hpp"
#include "apv/rational.hpp"

namespace apv {

// Distributions over a single missing voter's ballot. Missing voters are
// independent and identically distributed.

// Uniform over all 2^m subsets.
struct UniformSubsets {
  friend bool operator==(const UniformSubsets&, const UniformSubsets&) = default;
};

// Each candidate approved independently with probability p.
struct IndependentApproval {
  Rational p{1, 2};
  friend bool operator==(const IndependentApproval&, const IndependentApproval&) = default;
};

// Exactly one uniformly chosen candidate; abstention is one more equally
// likely outcome when allowed.
struct SingleVote {
  bool allow_abstain = false;
  friend bool operator==(const SingleVote&, const SingleVote&) = default;
};

// Explicit finite law; weights must sum to one.
struct Weighted {
  std::vector<std::pair<Ballot, Rational>> entries;
  friend bool operator==(const Weighted&, const Weighted&) = default;
};

using CompletionModel = std::variant<UniformSubsets, IndependentApproval, SingleVote, Weighted>;

// Law of a single missing ballot as (ballot, probability) pairs with positive
// probability, ordered by ballot bits.
using BallotLaw = std::vector<std::pair<Ballot, Rational>>;

// Added approvals per candidate -> probability.
using IncrementVector = std::vector<int>;
using IncrementDistribution = std::map<IncrementVector, Rational>;

// Largest number of increment vectors / ballots enumerated before giving up.
inline constexpr std::uint64_t kMaxEnumeration = std::uint64_t{1} << 25;

inline void validate_model(const CompletionModel& model, int m) {
  if (m < 1 || m > kMaxCandidates) throw ModelError("candidate count out of range");
  if (const auto* ia = std::get_if<IndependentApproval>(&model)) {
    if (ia->p < Rational(0) || ia->p > Rational(1))
      throw ModelError("approval probability " + ia->p.str() + " outside [0,1]");
  } else if (const auto* w = std::get_if<Weighted>(&model)) {
    if (w->entries.empty()) throw ModelError("weighted model has no ballots");
    Rational sum;
    for (const auto& [b, weight] : w->entries) {
      if (weight < Rational(0)) throw ModelError("negative weight " + weight.str());
      if (b.span() > m) throw ModelError("weighted ballot approves a candidate outside 0.." + std::to_string(m - 1));
      sum += weight;
    }
    if (sum != Rational(1)) throw ModelError("weights sum to " + sum.str() + ", expected 1");
  }
}

namespace detail {

inline Rational pow(Rational base, int e) {
  Rational r(1);
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

inline std::int64_t binomial(int n, int j) {
  std::int64_t r = 1;
  for (int i = 1; i <= j; ++i) r = r * (n - j + i) / i;
  return r;
}

// Per-candidate approval probability for the product-form models.
inline const Rational* product_form_p(const CompletionModel& model, Rational& storage) {
  if (std::holds_alternative<UniformSubsets>(model)) {
    storage = Rational(1, 2);
    return &storage;
  }
  if (const auto* ia = std::get_if<IndependentApproval>(&model)) {
    storage = ia->p;
    return &storage;
  }
  return nullptr;
}

}  // namespace detail

inline BallotLaw ballot_law(const CompletionModel& model, int m) {
  validate_model(model, m);
  BallotLaw law;
  Rational p;
  if (detail::product_form_p(model, p)) {
    const Rational q = Rational(1) - p;
    for (std::uint32_t bits = 0; bits < (std::uint32_t{1} << m); ++bits) {
      const Ballot b = Ballot::from_bits(bits);
      Rational w = detail::pow(p, b.size()) * detail::pow(q, m - b.size());
      if (!w.is_zero()) law.emplace_back(b, w);
    }
  } else if (const auto* sv = std::get_if<SingleVote>(&model)) {
    const Rational w(1, m + (sv->allow_abstain ? 1 : 0));
    if (sv->allow_abstain) law.emplace_back(Ballot(), w);
    for (int c = 0; c < m; ++c) law.emplace_back(Ballot::of({c}), w);
  } else {
    std::map<Ballot, Rational> merged;
    for (const auto& [b, weight] : std::get<Weighted>(model).entries)
      if (!weight.is_zero()) merged[b] += weight;
    law.assign(merged.begin(), merged.end());
  }
  return law;
}

// Joint law of the approvals added by n missing voters.
//
// Product-form models (uniform subsets, independent approval) factor across
// candidates, so the joint law is a product of Binomial(n, p) marginals. The
// other models are handled by n-fold convolution of the single-ballot law.
inline IncrementDistribution increment_distribution(const CompletionModel& model, int m, int n) {
  validate_model(model, m);
  if (n < 0) throw ModelError("negative number of missing voters");
  IncrementDistribution out;
  if (n == 0) {
    out.emplace(IncrementVector(m, 0), Rational(1));
    return out;
  }

  Rational p;
  if (detail::product_form_p(model, p)) {
    std::uint64_t count = 1;
    for (int c = 0; c < m; ++c) {
      count *= static_cast<std::uint64_t>(n + 1);
      if (count > kMaxEnumeration)
        throw ResourceError("increment support (" + std::to_string(n + 1) + "^" + std::to_string(m) +
                            ") too large to enumerate exactly");
    }
    std::vector<Rational> marginal(n + 1);
    for (int j = 0; j <= n; ++j)
      marginal[j] = Rational(detail::binomial(n, j)) * detail::pow(p, j) * detail::pow(Rational(1) - p, n - j);

    IncrementVector v(m, 0);
    while (true) {
      Rational prob(1);
      for (int c = 0; c < m && !prob.is_zero(); ++c) prob *= marginal[v[c]];
      if (!prob.is_zero()) out.emplace_hint(out.end(), v, prob);
      int c = m - 1;
      while (c >= 0 && v[c] == n) v[c--] = 0;
      if (c < 0) break;
      ++v[c];
    }
    return out;
  }

  const BallotLaw law = ballot_law(model, m);
  out.emplace(IncrementVector(m, 0), Rational(1));
  for (int voter = 0; voter < n; ++voter) {
    IncrementDistribution next;
    for (const auto& [v, prob] : out) {
      for (const auto& [b, w] : law) {
        IncrementVector u = v;
        for (int c : b.members()) ++u[c];
        next[u] += prob * w;
      }
    }
    if (next.size() > kMaxEnumeration) throw ResourceError("increment support too large to enumerate exactly");
    out = std::move(next);
  }
  return out;
}

// Draws one missing ballot.
inline Ballot draw_ballot(const CompletionModel& model, int m, Engine& engine) {
  return std::visit(
      [&](const auto& mdl) -> Ballot {
        using T = std::decay_t<decltype(mdl)>;
        if constexpr (std::is_same_v<T, UniformSubsets>) {
          return Ballot::from_bits(static_cast<std::uint32_t>(uniform_below(engine, std::uint64_t{1} << m)));
        } else if constexpr (std::is_same_v<T, IndependentApproval>) {
          Ballot b;
          const auto num = static_cast<std::uint64_t>(mdl.p.num());
          const auto den = static_cast<std::uint64_t>(mdl.p.den());
          for (int c = 0; c < m; ++c)
            if (uniform_below(engine, den) < num) b = b.with(c);
          return b;
        } else if constexpr (std::is_same_v<T, SingleVote>) {
          const auto options = static_cast<std::uint64_t>(m + (mdl.allow_abstain ? 1 : 0));
          const auto pick = static_cast<int>(uniform_below(engine, options));
          return pick == m ? Ballot() : Ballot::of({pick});
        } else {
          // common denominator over the weights
          std::int64_t den = 1;
          for (const auto& [b, w] : mdl.entries) den = std::lcm(den, w.den());
          auto x = static_cast<std::int64_t>(uniform_below(engine, static_cast<std::uint64_t>(den)));
          for (const auto& [b, w] : mdl.entries) {
            x -= w.num() * (den / w.den());
            if (x < 0) return b;
          }
          return mdl.entries.back().first;
        }
      },
      model);
}

inline std::string describe_model(const CompletionModel& model, const CandidateSet& candidates) {
  return std::visit(
      [&](const auto& mdl) -> std::string {
        using T = std::decay_t<decltype(mdl)>;
        if constexpr (std::is_same_v<T, UniformSubsets>) {
          return "uniform-subsets";
        } else if constexpr (std::is_same_v<T, IndependentApproval>) {
          return "independent:" + mdl.p.str();
        } else if constexpr (std::is_same_v<T, SingleVote>) {
          return mdl.allow_abstain ? "single-vote-abstain" : "single-vote";
        } else {
          std::string out = "weighted:";
          for (std::size_t i = 0; i < mdl.entries.size(); ++i) {
            if (i) out += ",";
            out += format_ballot(mdl.entries[i].first, candidates) + "=" + mdl.entries[i].second.str();
          }
          return out;
        }
      },
      model);
}

// Parses "uniform-subsets", "independent:P", "single-vote",
// "single-vote-abstain" or "weighted:AB=1/2,E=1/4,=1/4" (empty ballot before '=').
inline CompletionModel parse_model(std::string_view spec, const CandidateSet& candidates) {
  CompletionModel model;
  if (spec == "uniform-subsets" || spec == "uniform") {
    model = UniformSubsets{};
  } else if (spec.starts_with("independent:")) {
    model = IndependentApproval{Rational::parse(spec.substr(12))};
  } else if (spec == "single-vote") {
    model = SingleVote{false};
  } else if (spec == "single-vote-abstain") {
    model = SingleVote{true};
  } else if (spec.starts_with("weighted:")) {
    Weighted w;
    std::string_view rest = spec.substr(9);
    while (!rest.empty()) {
      auto comma = rest.find(',');
      std::string_view item = rest.substr(0, comma);
      auto eq = item.find('=');
      if (eq == std::string_view::npos) throw ParseError("weighted entry '" + std::string(item) + "' lacks '='");
      w.entries.emplace_back(parse_ballot(item.substr(0, eq), candidates), Rational::parse(item.substr(eq + 1)));
      rest = comma == std::string_view::npos ? std::string_view() : rest.substr(comma + 1);
    }
    model = std::move(w);
  } else {
    throw ParseError("unknown completion model '" + std::string(spec) + "'");
  }
  validate_model(model, candidates.size());
  return model;
}

}  // namespace apv
