#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "apv/errors.hpp"
#include "apv/random.hpp"
#include "apv/rational.hpp"

namespace apv {

inline constexpr int kMaxCandidates = 16;

// Ordered list of distinct candidate labels.
class CandidateSet {
 public:
  CandidateSet() = default;
  explicit CandidateSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty() || static_cast<int>(labels_.size()) > kMaxCandidates)
      throw ValidationError("candidate count must be in 1.." + std::to_string(kMaxCandidates) + ", got " +
                            std::to_string(labels_.size()));
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (labels_[i].empty()) throw ValidationError("candidate labels must be non-empty");
      for (std::size_t j = 0; j < i; ++j)
        if (labels_[i] == labels_[j]) throw ValidationError("duplicate candidate label '" + labels_[i] + "'");
    }
  }

  // "A", "B", ... for m candidates.
  static CandidateSet letters(int m) {
    std::vector<std::string> labels;
    for (int i = 0; i < m; ++i) labels.emplace_back(1, static_cast<char>('A' + i));
    return CandidateSet(std::move(labels));
  }

  int size() const { return static_cast<int>(labels_.size()); }
  const std::string& label(int c) const { return labels_.at(c); }
  const std::vector<std::string>& labels() const { return labels_; }

  // -1 when absent.
  int index_of(std::string_view label) const {
    for (int c = 0; c < size(); ++c)
      if (labels_[c] == label) return c;
    return -1;
  }

  friend bool operator==(const CandidateSet&, const CandidateSet&) = default;

 private:
  std::vector<std::string> labels_;
};

// An approval ballot: a subset of candidate indices stored as a bit set.
class Ballot {
 public:
  constexpr Ballot() = default;
  static constexpr Ballot from_bits(std::uint32_t bits) { return Ballot(bits); }
  static Ballot of(std::initializer_list<int> candidates) {
    Ballot b;
    for (int c : candidates) b = b.with(c);
    return b;
  }
  static constexpr Ballot full(int m) { return Ballot((std::uint32_t{1} << m) - 1); }

  constexpr std::uint32_t bits() const { return bits_; }
  constexpr bool contains(int c) const { return (bits_ >> c) & 1U; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr Ballot with(int c) const { return Ballot(bits_ | (std::uint32_t{1} << c)); }
  constexpr Ballot without(int c) const { return Ballot(bits_ & ~(std::uint32_t{1} << c)); }
  constexpr bool subset_of(Ballot other) const { return (bits_ & ~other.bits_) == 0; }
  // Highest candidate index + 1; 0 for the empty ballot.
  constexpr int span() const { return 32 - std::countl_zero(bits_); }

  std::vector<int> members() const {
    std::vector<int> out;
    for (std::uint32_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
  }

  friend constexpr bool operator==(Ballot, Ballot) = default;
  friend constexpr auto operator<=>(Ballot a, Ballot b) { return a.bits_ <=> b.bits_; }

 private:
  constexpr explicit Ballot(std::uint32_t bits) : bits_(bits) {}
  std::uint32_t bits_ = 0;
};

// Approved labels concatenated in candidate order, e.g. "ABE"; "" for abstention.
inline std::string format_ballot(Ballot ballot, const CandidateSet& candidates) {
  std::string out;
  for (int c : ballot.members()) out += candidates.label(c);
  return out;
}

// Inverse of format_ballot. Labels must appear in candidate order.
inline Ballot parse_ballot(std::string_view text, const CandidateSet& candidates) {
  Ballot b;
  std::size_t pos = 0;
  int next = 0;
  while (pos < text.size()) {
    bool matched = false;
    for (int c = next; c < candidates.size(); ++c) {
      const std::string& lab = candidates.label(c);
      if (text.substr(pos, lab.size()) == lab) {
        b = b.with(c);
        pos += lab.size();
        next = c + 1;
        matched = true;
        break;
      }
    }
    if (!matched) throw ValidationError("cannot parse ballot '" + std::string(text) + "' at offset " + std::to_string(pos));
  }
  return b;
}

inline Ballot ballot_from_labels(const std::vector<std::string>& labels, const CandidateSet& candidates) {
  Ballot b;
  for (const auto& lab : labels) {
    int c = candidates.index_of(lab);
    if (c < 0) throw ValidationError("unknown candidate '" + lab + "'");
    if (b.contains(c)) throw ValidationError("candidate '" + lab + "' approved twice");
    b = b.with(c);
  }
  return b;
}

// Approval counts per candidate.
using ScoreVector = std::vector<int>;
// Utility per candidate in integer cents.
using UtilityVector = std::vector<std::int64_t>;

// Inclusion probability of each candidate in the k-winner set.
struct WinnerDistribution {
  int k = 0;
  std::vector<Rational> inclusion;

  friend bool operator==(const WinnerDistribution&, const WinnerDistribution&) = default;
};

inline ScoreVector tally(const ScoreVector& base_scores, Ballot own_ballot) {
  if (own_ballot.span() > static_cast<int>(base_scores.size()))
    throw ModelError("ballot approves a candidate outside the score vector");
  ScoreVector out = base_scores;
  for (int c : own_ballot.members()) ++out[c];
  return out;
}

namespace detail {

inline void check_k(int k, std::size_t m) {
  if (k < 1 || k > static_cast<int>(m))
    throw ModelError("number of winners k=" + std::to_string(k) + " outside 1.." + std::to_string(m));
}

struct Cutoff {
  int score;     // k-th largest score
  int above;     // candidates strictly above the cutoff
  int tied;      // candidates exactly at the cutoff
  int open;      // slots left for tied candidates
};

inline Cutoff find_cutoff(const ScoreVector& scores, int k) {
  int buf[kMaxCandidates] = {};
  const int m = static_cast<int>(scores.size());
  std::copy(scores.begin(), scores.end(), buf);
  std::nth_element(buf, buf + (k - 1), buf + m, std::greater<>());
  Cutoff cut{buf[k - 1], 0, 0, 0};
  for (int s : scores) {
    if (s > cut.score) ++cut.above;
    else if (s == cut.score) ++cut.tied;
  }
  cut.open = k - cut.above;
  return cut;
}

}  // namespace detail

// Inclusion probabilities under uniform random tie-breaking among the
// candidates tied at the k-th highest score.
inline WinnerDistribution winner_distribution(const ScoreVector& scores, int k) {
  if (scores.empty() || static_cast<int>(scores.size()) > kMaxCandidates)
    throw ModelError("score vector length must be in 1.." + std::to_string(kMaxCandidates));
  detail::check_k(k, scores.size());
  const auto cut = detail::find_cutoff(scores, k);
  const Rational at_cutoff(cut.open, cut.tied);
  WinnerDistribution dist{k, std::vector<Rational>(scores.size())};
  for (std::size_t c = 0; c < scores.size(); ++c) {
    if (scores[c] > cut.score) dist.inclusion[c] = 1;
    else if (scores[c] == cut.score) dist.inclusion[c] = at_cutoff;
  }
  return dist;
}

// Expected total utility (cents) of the winning set.
inline Rational expected_outcome_utility(const WinnerDistribution& dist, const UtilityVector& utilities) {
  if (dist.inclusion.size() != utilities.size())
    throw ModelError("distribution covers " + std::to_string(dist.inclusion.size()) + " candidates, utilities " +
                     std::to_string(utilities.size()));
  Rational total;
  for (std::size_t c = 0; c < utilities.size(); ++c)
    if (!dist.inclusion[c].is_zero() && utilities[c] != 0) total += dist.inclusion[c] * utilities[c];
  return total;
}

// Utility of a concrete winning set.
inline std::int64_t set_utility(Ballot winners, const UtilityVector& utilities) {
  std::int64_t total = 0;
  for (int c : winners.members()) total += utilities.at(c);
  return total;
}

// Draws one winning set: every candidate above the cutoff, plus a uniformly
// random subset of the cutoff-tied candidates filling the open slots.
inline Ballot sample_winning_set(const ScoreVector& scores, int k, Engine& engine) {
  detail::check_k(k, scores.size());
  const auto cut = detail::find_cutoff(scores, k);
  Ballot winners;
  int tied[kMaxCandidates];
  int ntied = 0;
  for (int c = 0; c < static_cast<int>(scores.size()); ++c) {
    if (scores[c] > cut.score) winners = winners.with(c);
    else if (scores[c] == cut.score) tied[ntied++] = c;
  }
  // partial Fisher-Yates
  for (int i = 0; i < cut.open; ++i) {
    int j = i + static_cast<int>(uniform_below(engine, static_cast<std::uint64_t>(ntied - i)));
    std::swap(tied[i], tied[j]);
    winners = winners.with(tied[i]);
  }
  return winners;
}

inline Ballot sample_winning_set(const ScoreVector& scores, int k, std::uint64_t seed) {
  Engine engine(seed);
  return sample_winning_set(scores, k, engine);
}

}  // namespace apv
