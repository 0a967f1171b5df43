#pragma once

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "apv/ballot_log.hpp"
#include "apv/completion.hpp"
#include "apv/election.hpp"
#include "apv/errors.hpp"
#include "apv/random.hpp"
#include "apv/scenario.hpp"

namespace apv {

struct ElectionSpec {
  std::string scenario_id;
  int k = 1;
  int n = 0;
  friend bool operator==(const ElectionSpec&, const ElectionSpec&) = default;
};

// Elections every participant plays, and the extra ones per multi-winner group.
struct PlaylistConfig {
  std::vector<ElectionSpec> single_winner;
  std::vector<ElectionSpec> two_winner;
  std::vector<ElectionSpec> three_winner;

  std::vector<ElectionSpec> for_group(int group) const {
    std::vector<ElectionSpec> out = single_winner;
    const auto& extra = group == 2 ? two_winner : three_winner;
    out.insert(out.end(), extra.begin(), extra.end());
    return out;
  }

  // Single-winner elections ordered by missing votes 0, 1, 3; then the
  // group's multi-winner elections in the same order of uncertainty.
  // Scenario 4 is played with missing votes only in the single-winner block.
  static PlaylistConfig study_default() {
    PlaylistConfig cfg;
    for (int n : {0, 1, 3}) {
      for (const char* id : {"1a-reconstructed", "1b", "2a", "3", "4"}) cfg.single_winner.push_back({id, 1, n});
      for (const char* id : {"1a-reconstructed", "1b", "2a", "3"}) cfg.two_winner.push_back({id, 2, n});
      for (const char* id : {"1a-reconstructed", "1b", "2b", "3"}) cfg.three_winner.push_back({id, 3, n});
      if (n == 0) {
        cfg.two_winner.push_back({"4", 2, 0});
        cfg.three_winner.push_back({"4", 3, 0});
      }
    }
    return cfg;
  }

  // {"single_winner": [{"scenario": "1b", "k": 1, "n": 0}, ...], "two_winner": [...], "three_winner": [...]}
  static PlaylistConfig parse(std::string_view text) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("playlist file: ") + e.what());
    }
    PlaylistConfig cfg;
    auto read = [&](const char* key, std::vector<ElectionSpec>& dst) {
      if (!j.contains(key)) return;
      for (const auto& e : j.at(key)) {
        ElectionSpec spec{e.at("scenario").get<std::string>(), e.at("k").get<int>(), e.value("n", 0)};
        const Scenario* s = find_builtin(spec.scenario_id);
        if (!s) throw DataError("playlist: unknown scenario '" + spec.scenario_id + "'");
        if (spec.k < 1 || spec.k > s->m() || spec.n < 0) throw ValidationError("playlist: invalid k or n");
        dst.push_back(std::move(spec));
      }
    };
    try {
      read("single_winner", cfg.single_winner);
      read("two_winner", cfg.two_winner);
      read("three_winner", cfg.three_winner);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("playlist file: ") + e.what());
    }
    return cfg;
  }
};

struct ElectionResult {
  Ballot ballot;
  std::vector<Ballot> missing_ballots;
  Ballot winners;
  std::int64_t delta_cents = 0;
  friend bool operator==(const ElectionResult&, const ElectionResult&) = default;
};

struct SessionRecord {
  std::string id;
  int group = 2;  // 2- or 3-winner block
  std::uint64_t seed = 0;
  std::string model;  // completion model used for missing ballots
  std::vector<ElectionSpec> playlist;
  std::vector<ElectionResult> results;

  std::size_t cursor() const { return results.size(); }
  bool done() const { return results.size() >= playlist.size(); }
  friend bool operator==(const SessionRecord&, const SessionRecord&) = default;
};

// What the participant sees before voting. Contains no information about
// missing ballots or winners.
struct ElectionView {
  std::size_t index = 0;
  std::size_t total = 0;
  std::string scenario_id;
  int k = 1;
  int n = 0;
  std::vector<std::string> candidates;
  std::vector<std::int64_t> utilities_cents;
  std::vector<int> votes;
  std::string remaining_text;
};

struct SessionDone {
  std::int64_t total_cents = 0;
  std::int64_t payout_cents = 0;
};

struct SubmitOutcome {
  std::size_t index = 0;
  Ballot winners;
  std::int64_t delta_cents = 0;
  std::vector<Ballot> missing_ballots;
  std::int64_t total_cents = 0;
};

struct SessionSummary {
  std::string id;
  int group = 2;
  std::int64_t total_cents = 0;
  std::int64_t payout_cents = 0;  // max(total, 0)
  std::size_t played = 0;
  std::size_t playlist_length = 0;
  std::vector<std::pair<ElectionSpec, ElectionResult>> history;
};

// Append-only newline-delimited JSON file. Each append is a single write()
// followed by fsync(). A trailing line without its newline is the remnant of
// an interrupted append and is dropped (and cut off) when the log is opened.
class EventLog {
 public:
  explicit EventLog(std::filesystem::path path) : path_(std::move(path)) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) throw ServiceError("cannot open event log " + path_.string());
  }
  ~EventLog() {
    if (fd_ >= 0) ::close(fd_);
  }
  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  std::vector<nlohmann::json> read_all() {
    std::ifstream in(path_, std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::vector<nlohmann::json> events;
    std::size_t pos = 0, line_no = 0;
    while (pos < content.size()) {
      const std::size_t eol = content.find('\n', pos);
      if (eol == std::string::npos) {
        if (::ftruncate(fd_, static_cast<off_t>(pos)) != 0) throw ServiceError("cannot truncate partial log record");
        break;
      }
      ++line_no;
      try {
        events.push_back(nlohmann::json::parse(content.substr(pos, eol - pos)));
      } catch (const nlohmann::json::parse_error& e) {
        throw ServiceError("event log line " + std::to_string(line_no) + " is corrupt: " + e.what());
      }
      pos = eol + 1;
    }
    return events;
  }

  void append(const nlohmann::json& event) {
    const std::string line = event.dump() + "\n";
    std::lock_guard lock(mutex_);
    std::size_t written = 0;
    while (written < line.size()) {
      const ssize_t w = ::write(fd_, line.data() + written, line.size() - written);
      if (w < 0) {
        if (errno == EINTR) continue;
        throw ServiceError("event log write failed");
      }
      written += static_cast<std::size_t>(w);
    }
    if (::fsync(fd_) != 0) throw ServiceError("event log fsync failed");
  }

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  int fd_ = -1;
  std::mutex mutex_;
};

struct ServiceConfig {
  std::filesystem::path data_dir = "apv-data";
  CompletionModel model = UniformSubsets{};
  PlaylistConfig playlist = PlaylistConfig::study_default();
};

struct ExportFilter {
  std::optional<std::string> scenario_id;
  std::optional<int> k;
  std::optional<int> n;
};

// Session state machine for the voting experiment. All state changes are
// written to the event log before they become visible; constructing a service
// over an existing data directory replays the log.
class ExperimentService {
 public:
  explicit ExperimentService(ServiceConfig config)
      : config_(std::move(config)), log_(config_.data_dir / "events.ndjson") {
    for (const auto& event : log_.read_all()) apply(event);
  }

  SessionRecord create_session(std::optional<int> group = std::nullopt, std::optional<std::uint64_t> seed = std::nullopt) {
    if (group && *group != 2 && *group != 3) throw ValidationError("group must be 2 or 3");
    const std::uint64_t root = seed ? *seed : (std::uint64_t{std::random_device{}()} << 32) ^ std::random_device{}();
    int g = 0;
    if (group) {
      g = *group;
    } else {
      Engine engine(derive_seed(root, {0x67726f7570}));
      g = 2 + static_cast<int>(uniform_below(engine, 2));
    }

    std::unique_lock lock(sessions_mutex_);
    SessionRecord rec;
    char id[32];
    std::snprintf(id, sizeof id, "s%06llu", static_cast<unsigned long long>(next_id_));
    rec.id = id;
    rec.group = g;
    rec.seed = root;
    rec.model = describe_model(config_.model, CandidateSet::letters(5));
    rec.playlist = config_.playlist.for_group(g);

    nlohmann::json event = {{"type", "session_created"}, {"session_id", rec.id}, {"group", rec.group},
                            {"seed", rec.seed},          {"model", rec.model},   {"playlist", nlohmann::json::array()}};
    for (const auto& e : rec.playlist) event["playlist"].push_back({e.scenario_id, e.k, e.n});
    log_.append(event);

    ++next_id_;
    auto entry = std::make_shared<Entry>();
    entry->record = rec;
    sessions_.emplace(rec.id, std::move(entry));
    return rec;
  }

  std::variant<ElectionView, SessionDone> current_election(const std::string& session_id) const {
    auto entry = find(session_id);
    std::lock_guard lock(entry->mutex);
    const SessionRecord& rec = entry->record;
    if (rec.done()) {
      const std::int64_t total = total_of(rec);
      return SessionDone{total, std::max<std::int64_t>(total, 0)};
    }
    const ElectionSpec& spec = rec.playlist[rec.cursor()];
    const Scenario& s = scenario(spec.scenario_id);
    ElectionView view;
    view.index = rec.cursor();
    view.total = rec.playlist.size();
    view.scenario_id = spec.scenario_id;
    view.k = spec.k;
    view.n = spec.n;
    view.candidates = s.candidates.labels();
    view.utilities_cents = s.utilities;
    view.votes = s.base_scores;
    view.remaining_text = spec.n == 0 ? "All other voters have voted."
                          : spec.n == 1 ? "1 voter has not yet voted."
                                        : std::to_string(spec.n) + " voters have not yet voted.";
    return view;
  }

  // expected_index, when given, must equal the session cursor; a mismatch is
  // reported as a conflict (double submission).
  SubmitOutcome submit_ballot(const std::string& session_id, Ballot ballot,
                              std::optional<std::size_t> expected_index = std::nullopt) {
    auto entry = find(session_id);
    std::lock_guard lock(entry->mutex);
    SessionRecord& rec = entry->record;
    if (rec.done()) throw ConflictError("session " + session_id + " has no open election");
    const std::size_t index = rec.cursor();
    if (expected_index && *expected_index != index)
      throw ConflictError("election " + std::to_string(*expected_index) + " already submitted; open election is " +
                          std::to_string(index));
    const ElectionSpec& spec = rec.playlist[index];
    const Scenario& s = scenario(spec.scenario_id);
    if (ballot.span() > s.m()) throw ValidationError("ballot approves an unknown candidate");

    const CompletionModel model = parse_model(rec.model, s.candidates);
    ElectionResult result = resolve(rec.seed, index, spec, s, model, ballot);

    nlohmann::json event = {{"type", "ballot_submitted"},
                            {"session_id", rec.id},
                            {"index", index},
                            {"ballot", format_ballot(ballot, s.candidates)},
                            {"missing", nlohmann::json::array()},
                            {"winners", format_ballot(result.winners, s.candidates)},
                            {"delta_cents", result.delta_cents}};
    for (Ballot b : result.missing_ballots) event["missing"].push_back(format_ballot(b, s.candidates));
    log_.append(event);

    rec.results.push_back(result);
    return SubmitOutcome{index, result.winners, result.delta_cents, result.missing_ballots, total_of(rec)};
  }

  SessionSummary session_summary(const std::string& session_id) const {
    auto entry = find(session_id);
    std::lock_guard lock(entry->mutex);
    const SessionRecord& rec = entry->record;
    SessionSummary out;
    out.id = rec.id;
    out.group = rec.group;
    out.played = rec.cursor();
    out.playlist_length = rec.playlist.size();
    std::int64_t from_winners = 0;
    for (std::size_t i = 0; i < rec.results.size(); ++i) {
      out.history.emplace_back(rec.playlist[i], rec.results[i]);
      out.total_cents += rec.results[i].delta_cents;
      from_winners += set_utility(rec.results[i].winners, scenario(rec.playlist[i].scenario_id).utilities);
    }
    if (from_winners != out.total_cents)
      throw ServiceError("earnings ledger of session " + rec.id + " disagrees with its winning sets");
    out.payout_cents = std::max<std::int64_t>(out.total_cents, 0);
    return out;
  }

  std::string export_log(const ExportFilter& filter = {}) const {
    std::vector<BallotRecord> rows;
    std::shared_lock lock(sessions_mutex_);
    for (const auto& [id, entry] : sessions_) {  // std::map: ordered by session id
      std::lock_guard session_lock(entry->mutex);
      const SessionRecord& rec = entry->record;
      for (std::size_t i = 0; i < rec.results.size(); ++i) {
        const ElectionSpec& spec = rec.playlist[i];
        if (filter.scenario_id && *filter.scenario_id != spec.scenario_id) continue;
        if (filter.k && *filter.k != spec.k) continue;
        if (filter.n && *filter.n != spec.n) continue;
        rows.push_back({rec.id, spec.scenario_id, spec.k, spec.n, rec.results[i].ballot});
      }
    }
    return write_ballot_log(rows);
  }

  SessionRecord record(const std::string& session_id) const {
    auto entry = find(session_id);
    std::lock_guard lock(entry->mutex);
    return entry->record;
  }

  std::vector<std::string> session_ids() const {
    std::shared_lock lock(sessions_mutex_);
    std::vector<std::string> ids;
    for (const auto& [id, _] : sessions_) ids.push_back(id);
    return ids;
  }

  const ServiceConfig& config() const { return config_; }

  // Outcome of one election: a pure function of (seed, index, election, ballot).
  static ElectionResult resolve(std::uint64_t seed, std::size_t index, const ElectionSpec& spec, const Scenario& s,
                                const CompletionModel& model, Ballot ballot) {
    ElectionResult result;
    result.ballot = ballot;
    ScoreVector scores = tally(s.base_scores, ballot);
    Engine missing_engine(derive_seed(seed, {index, 1}));
    for (int v = 0; v < spec.n; ++v) {
      const Ballot b = draw_ballot(model, s.m(), missing_engine);
      result.missing_ballots.push_back(b);
      for (int c : b.members()) ++scores[c];
    }
    Engine tie_engine(derive_seed(seed, {index, 2}));
    result.winners = sample_winning_set(scores, spec.k, tie_engine);
    result.delta_cents = set_utility(result.winners, s.utilities);
    return result;
  }

 private:
  struct Entry {
    mutable std::mutex mutex;
    SessionRecord record;
  };

  static const Scenario& scenario(const std::string& id) {
    const Scenario* s = find_builtin(id);
    if (!s) throw DataError("unknown scenario '" + id + "'");
    return *s;
  }

  static std::int64_t total_of(const SessionRecord& rec) {
    std::int64_t total = 0;
    for (const auto& r : rec.results) total += r.delta_cents;
    return total;
  }

  std::shared_ptr<Entry> find(const std::string& id) const {
    std::shared_lock lock(sessions_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw NotFoundError("unknown session '" + id + "'");
    return it->second;
  }

  void apply(const nlohmann::json& event) {
    const std::string type = event.at("type").get<std::string>();
    if (type == "session_created") {
      SessionRecord rec;
      rec.id = event.at("session_id").get<std::string>();
      rec.group = event.at("group").get<int>();
      rec.seed = event.at("seed").get<std::uint64_t>();
      rec.model = event.at("model").get<std::string>();
      for (const auto& e : event.at("playlist"))
        rec.playlist.push_back({e.at(0).get<std::string>(), e.at(1).get<int>(), e.at(2).get<int>()});
      auto entry = std::make_shared<Entry>();
      entry->record = std::move(rec);
      next_id_ = std::max<std::uint64_t>(next_id_, std::stoull(entry->record.id.substr(1)) + 1);
      sessions_.emplace(entry->record.id, std::move(entry));
    } else if (type == "ballot_submitted") {
      auto it = sessions_.find(event.at("session_id").get<std::string>());
      if (it == sessions_.end()) throw ServiceError("event log: ballot for unknown session");
      SessionRecord& rec = it->second->record;
      const auto index = event.at("index").get<std::size_t>();
      if (index != rec.cursor() || rec.done()) throw ServiceError("event log: out-of-order ballot for " + rec.id);
      const Scenario& s = scenario(rec.playlist[index].scenario_id);
      ElectionResult r;
      r.ballot = parse_ballot(event.at("ballot").get<std::string>(), s.candidates);
      for (const auto& b : event.at("missing")) r.missing_ballots.push_back(parse_ballot(b.get<std::string>(), s.candidates));
      r.winners = parse_ballot(event.at("winners").get<std::string>(), s.candidates);
      r.delta_cents = event.at("delta_cents").get<std::int64_t>();
      rec.results.push_back(std::move(r));
    } else {
      throw ServiceError("event log: unknown event type '" + type + "'");
    }
  }

  ServiceConfig config_;
  EventLog log_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t next_id_ = 1;
};

}  // namespace apv
