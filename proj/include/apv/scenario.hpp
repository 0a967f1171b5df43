#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "apv/election.hpp"
#include "apv/errors.hpp"

namespace apv {

// A partial election profile as seen by the focal voter.
struct Scenario {
  std::string id;
  CandidateSet candidates;
  UtilityVector utilities;    // cents
  ScoreVector base_scores;    // approvals cast so far
  int missing_voters = 0;
  std::string description;
  // Data reconstructed rather than read off a published table.
  bool provisional = false;

  int m() const { return candidates.size(); }

  Scenario with_missing_voters(int n) const {
    Scenario s = *this;
    s.missing_voters = n;
    return s;
  }

  // Throws ValidationError naming the violated invariant.
  void validate() const {
    const auto m = static_cast<std::size_t>(candidates.size());
    if (m == 0) throw ValidationError("scenario '" + id + "': no candidates");
    if (utilities.size() != m)
      throw ValidationError("scenario '" + id + "': " + std::to_string(utilities.size()) + " utilities for " +
                            std::to_string(m) + " candidates");
    if (base_scores.size() != m)
      throw ValidationError("scenario '" + id + "': " + std::to_string(base_scores.size()) + " vote counts for " +
                            std::to_string(m) + " candidates");
    for (int v : base_scores)
      if (v < 0) throw ValidationError("scenario '" + id + "': negative vote count");
    if (missing_voters < 0) throw ValidationError("scenario '" + id + "': negative missing_voters");
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// The six scenarios of the study. Utilities are cents, candidates A..E.
inline const std::vector<Scenario>& builtin_scenarios() {
  static const std::vector<Scenario> all = [] {
    auto make = [](std::string id, UtilityVector u, ScoreVector votes, std::string desc, bool provisional = false) {
      Scenario s{std::move(id), CandidateSet::letters(5), std::move(u), std::move(votes), 0, std::move(desc),
                 provisional};
      s.validate();
      return s;
    };
    return std::vector<Scenario>{
        make("1a-reconstructed", {5, 10, 1, 0, 25}, {3, 3, 3, 4, 3},
             "Candidate with trivial utility (non-leading). Vote counts reconstructed, not published.", true),
        make("1b", {5, 10, 1, 25, 0}, {3, 3, 4, 3, 3}, "Leader with trivial utility."),
        make("2a", {5, 10, 0, 0, 25}, {1, 1, 4, 4, 1}, "Neutral candidates dominate; one and two winners."),
        make("2b", {10, 0, 0, 0, 25}, {1, 4, 4, 4, 1}, "Neutral candidates dominate; three winners."),
        make("3", {5, 10, 0, -100, 25}, {3, 3, 4, 4, 4}, "Disliked candidate."),
        make("4", {10, 0, 15, 20, 0}, {3, 4, 3, 3, 3}, "Neutral leader."),
    };
  }();
  return all;
}

// Looks up a built-in scenario; "1a" is accepted for "1a-reconstructed".
inline const Scenario* find_builtin(std::string_view id) {
  if (id == "1a") id = "1a-reconstructed";
  for (const auto& s : builtin_scenarios())
    if (s.id == id) return &s;
  return nullptr;
}

inline std::string serialize_scenario(const Scenario& s) {
  nlohmann::ordered_json j;
  j["id"] = s.id;
  j["candidates"] = s.candidates.labels();
  j["utilities_cents"] = s.utilities;
  j["votes"] = s.base_scores;
  j["missing_voters"] = s.missing_voters;
  j["description"] = s.description;
  if (s.provisional) j["provisional"] = true;
  return j.dump(2) + "\n";
}

inline Scenario parse_scenario(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("scenario file: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("scenario file: top-level value must be an object");
  static const char* const known[] = {"id", "candidates", "utilities_cents", "votes",
                                      "missing_voters", "description", "provisional"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known))
      throw ParseError("scenario file: unknown key '" + key + "'");
  }
  auto field = [&](const char* key) -> const nlohmann::json& {
    if (!j.contains(key)) throw ParseError(std::string("scenario file: missing key '") + key + "'");
    return j.at(key);
  };
  Scenario s;
  try {
    s.id = field("id").get<std::string>();
    s.candidates = CandidateSet(field("candidates").get<std::vector<std::string>>());
    s.utilities = field("utilities_cents").get<UtilityVector>();
    s.base_scores = field("votes").get<ScoreVector>();
    s.missing_voters = j.value("missing_voters", 0);
    s.description = j.value("description", std::string());
    s.provisional = j.value("provisional", false);
  } catch (const nlohmann::json::type_error& e) {
    throw ParseError(std::string("scenario file: ") + e.what());
  }
  s.validate();
  return s;
}

// Resolves a built-in id, or else reads a scenario file. DataError when neither exists.
inline Scenario load_scenario(const std::string& selector) {
  if (const Scenario* s = find_builtin(selector)) return *s;
  std::ifstream in(selector);
  if (!in) throw DataError("no built-in scenario or readable file named '" + selector + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

}  // namespace apv
