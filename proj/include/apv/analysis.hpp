#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "apv/completion.hpp"
#include "apv/election.hpp"
#include "apv/expected_utility.hpp"
#include "apv/rational.hpp"
#include "apv/scenario.hpp"
#include "apv/strategy.hpp"

namespace apv {

// Rounds a cent amount to whole cents, halves toward +infinity.
inline std::int64_t round_half_up_cents(const Rational& cents) { return (cents + Rational(1, 2)).floor(); }

// Drops the fractional cent toward zero.
inline std::int64_t truncate_cents(const Rational& cents) {
  return cents.num() / cents.den();
}

// "0.13", "-0.03", "1.00".
inline std::string format_cents_as_dollars(std::int64_t cents) {
  const std::int64_t mag = std::llabs(cents);
  std::string frac = std::to_string(mag % 100);
  if (frac.size() < 2) frac.insert(0, "0");
  return (cents < 0 ? "-" : "") + std::to_string(mag / 100) + "." + frac;
}

inline std::string format_dollars(const Rational& cents) { return format_cents_as_dollars(round_half_up_cents(cents)); }

// Exact value in dollars as a rational string, e.g. "13/100".
inline std::string exact_dollars(const Rational& cents) { return (cents / Rational(100)).str(); }

struct GridCell {
  int k = 0;
  int n = 0;
  std::vector<std::pair<HeuristicLabel, Rational>> heuristic_eu;
  Rational max_eu;
  // Names of heuristics whose ballot attains max_eu exactly.
  std::vector<std::string> maximizing_strategies;
  // Maximizing ballots not produced by any heuristic.
  std::vector<Ballot> other_maximizers;
  std::size_t maximizer_count = 0;

  bool has_non_heuristic_maximizer() const { return !other_maximizers.empty(); }
  bool all_ballots_maximize(int m) const { return maximizer_count == (std::size_t{1} << m); }
};

struct HeuristicGrid {
  std::string scenario_id;
  CandidateSet candidates;
  std::vector<int> ks;
  std::vector<int> ns;
  std::vector<GridCell> cells;  // row-major by n, then k

  const GridCell& at(int k, int n) const {
    for (const auto& c : cells)
      if (c.k == k && c.n == n) return c;
    throw ModelError("grid has no cell k=" + std::to_string(k) + " n=" + std::to_string(n));
  }
};

inline GridCell evaluate_cell(const Scenario& scenario, int k, int n, const CompletionModel& model) {
  const Scenario s = scenario.with_missing_voters(n);
  const ExpectedUtilityEvaluator eval(s, k, model);
  const auto heuristics = heuristic_ballots(s.utilities);

  GridCell cell;
  cell.k = k;
  cell.n = n;
  const BestResponse br = best_response(s, k, model);
  cell.max_eu = br.max_eu;
  cell.maximizer_count = br.maximizers.size();
  for (const auto& [label, ballot] : heuristics) {
    const Rational eu = eval(ballot);
    cell.heuristic_eu.emplace_back(label, eu);
    if (eu == br.max_eu) cell.maximizing_strategies.push_back(label.name());
  }
  for (Ballot b : br.maximizers) {
    const bool is_heuristic = std::any_of(heuristics.begin(), heuristics.end(),
                                          [&](const auto& h) { return h.second == b; });
    if (!is_heuristic) cell.other_maximizers.push_back(b);
  }
  return cell;
}

inline HeuristicGrid heuristic_grid(const Scenario& scenario, const std::vector<int>& ks, const std::vector<int>& ns,
                                    const CompletionModel& model) {
  HeuristicGrid grid{scenario.id, scenario.candidates, ks, ns, {}};
  for (int n : ns) {
    if (n < 0) throw ModelError("negative number of missing voters");
    for (int k : ks) grid.cells.push_back(evaluate_cell(scenario, k, n, model));
  }
  return grid;
}

// "Take-1, [C,E]" style list of the cell's maximizers.
inline std::string describe_maximizers(const GridCell& cell, const CandidateSet& candidates) {
  if (cell.all_ballots_maximize(candidates.size())) return "all";
  std::string out;
  for (const auto& name : cell.maximizing_strategies) out += (out.empty() ? "" : ", ") + name;
  for (Ballot b : cell.other_maximizers) {
    std::string lab;
    for (int c : b.members()) lab += (lab.empty() ? "" : ",") + candidates.label(c);
    out += (out.empty() ? "[" : ", [") + lab + "]";
  }
  return out;
}

inline std::string render_grid_table(const HeuristicGrid& grid, bool exact) {
  std::ostringstream os;
  os << "Scenario " << grid.scenario_id << ": maximum expected utility (dollars) and maximizing strategies\n";
  os << "n\\k";
  for (int k : grid.ks) os << "\t" << k;
  os << "\n";
  for (int n : grid.ns) {
    os << n;
    for (int k : grid.ks) {
      const auto& cell = grid.at(k, n);
      os << "\t" << (exact ? exact_dollars(cell.max_eu) : format_dollars(cell.max_eu)) << " "
         << describe_maximizers(cell, grid.candidates);
    }
    os << "\n";
  }
  return os.str();
}

inline std::string render_grid_csv(const HeuristicGrid& grid) {
  std::ostringstream os;
  os << "scenario,k,n,max_eu_dollars,max_eu_exact_dollars,maximizers\n";
  for (const auto& cell : grid.cells) {
    os << grid.scenario_id << "," << cell.k << "," << cell.n << "," << format_dollars(cell.max_eu) << ","
       << exact_dollars(cell.max_eu) << ",\"" << describe_maximizers(cell, grid.candidates) << "\"\n";
  }
  return os.str();
}

}  // namespace apv
