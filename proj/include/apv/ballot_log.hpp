#pragma once

#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "apv/chi_square.hpp"
#include "apv/election.hpp"
#include "apv/errors.hpp"
#include "apv/scenario.hpp"
#include "apv/strategy.hpp"

namespace apv {

inline constexpr std::string_view kBallotLogHeader = "session_id,scenario_id,k,n,ballot";

struct BallotRecord {
  std::string session_id;
  std::string scenario_id;
  int k = 0;
  int n = 0;
  Ballot ballot;

  friend bool operator==(const BallotRecord&, const BallotRecord&) = default;
};

using ScenarioResolver = std::function<const Scenario*(std::string_view)>;

inline const Scenario* resolve_builtin(std::string_view id) { return find_builtin(id); }

inline std::string write_ballot_log(const std::vector<BallotRecord>& records, const ScenarioResolver& resolve = resolve_builtin) {
  std::string out(kBallotLogHeader);
  out += "\n";
  for (const auto& r : records) {
    const Scenario* s = resolve(r.scenario_id);
    if (!s) throw DataError("unknown scenario id '" + r.scenario_id + "'");
    out += r.session_id + "," + r.scenario_id + "," + std::to_string(r.k) + "," + std::to_string(r.n) + "," +
           format_ballot(r.ballot, s->candidates) + "\n";
  }
  return out;
}

inline std::vector<BallotRecord> parse_ballot_log(std::string_view text, const ScenarioResolver& resolve = resolve_builtin) {
  std::vector<BallotRecord> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1) {
      if (line != kBallotLogHeader)
        throw ParseError("ballot log line 1: expected header '" + std::string(kBallotLogHeader) + "'");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    const std::string where = "ballot log line " + std::to_string(line_no);
    if (fields.size() != 5) throw ParseError(where + ": expected 5 fields, got " + std::to_string(fields.size()));
    BallotRecord r;
    r.session_id = fields[0];
    r.scenario_id = fields[1];
    try {
      r.k = std::stoi(std::string(fields[2]));
      r.n = std::stoi(std::string(fields[3]));
    } catch (const std::exception&) {
      throw ParseError(where + ": k and n must be integers");
    }
    const Scenario* s = resolve(r.scenario_id);
    if (!s) throw DataError(where + ": unknown scenario id '" + r.scenario_id + "'");
    try {
      r.ballot = parse_ballot(fields[4], s->candidates);
    } catch (const ValidationError& e) {
      throw ParseError(where + ": " + e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

// Collapses a classification to one category. Precedence:
// Truth > Regret > Take-X > Abstain > Other.
inline std::string strategy_category(const Classification& cls) {
  using K = HeuristicLabel::Kind;
  for (K kind : {K::Truthful, K::RegretMinimization, K::TakeXBest, K::Abstain})
    for (const auto& l : cls.labels)
      if (l.kind == kind) return l.name();
  return "Other";
}

inline constexpr std::string_view kCategoryPrecedenceNote =
    "categories are mutually exclusive by precedence Truth > Regret > Take-X > Abstain > Other";

struct ConditionKey {
  std::string scenario_id;
  int k = 0;
  int n = 0;
  friend auto operator<=>(const ConditionKey&, const ConditionKey&) = default;
};

struct ConditionSummary {
  ConditionKey condition;
  std::int64_t total = 0;
  std::map<std::string, std::int64_t> counts;

  double percent(const std::string& category) const {
    auto it = counts.find(category);
    return it == counts.end() || total == 0 ? 0.0 : 100.0 * static_cast<double>(it->second) / static_cast<double>(total);
  }
};

inline std::vector<ConditionSummary> strategy_proportions(const std::vector<BallotRecord>& records,
                                                          const ScenarioResolver& resolve = resolve_builtin) {
  std::map<ConditionKey, ConditionSummary> by_condition;
  for (const auto& r : records) {
    const Scenario* s = resolve(r.scenario_id);
    if (!s) throw DataError("unknown scenario id '" + r.scenario_id + "'");
    ConditionKey key{r.scenario_id, r.k, r.n};
    auto& summary = by_condition[key];
    summary.condition = key;
    ++summary.total;
    ++summary.counts[strategy_category(classify_ballot(r.ballot, s->utilities))];
  }
  std::vector<ConditionSummary> out;
  for (auto& [_, s] : by_condition) out.push_back(std::move(s));
  return out;
}

// Rows are the given conditions, columns the union of observed categories.
// Categories never observed in any of the rows are dropped.
inline ContingencyTable contingency_table(const std::vector<ConditionSummary>& rows) {
  std::map<std::string, int> columns;
  for (const auto& r : rows)
    for (const auto& [cat, _] : r.counts) columns.emplace(cat, 0);
  int idx = 0;
  for (auto& [_, i] : columns) i = idx++;
  ContingencyTable t;
  for (const auto& r : rows) {
    std::vector<std::int64_t> row(columns.size(), 0);
    for (const auto& [cat, count] : r.counts) row[columns.at(cat)] = count;
    t.counts.push_back(std::move(row));
  }
  return t;
}

inline std::string render_proportions(const std::vector<ConditionSummary>& summaries) {
  std::ostringstream os;
  os << "# " << kCategoryPrecedenceNote << "\n";
  os << "scenario,k,n,total,category,count,percent\n";
  for (const auto& s : summaries)
    for (const auto& [cat, count] : s.counts) {
      char pct[32];
      std::snprintf(pct, sizeof pct, "%.1f", s.percent(cat));
      os << s.condition.scenario_id << "," << s.condition.k << "," << s.condition.n << "," << s.total << "," << cat
         << "," << count << "," << pct << "\n";
    }
  return os.str();
}

}  // namespace apv
