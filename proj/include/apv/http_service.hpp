#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include <httplib.h>
#include <json.hpp>

#include "apv/analysis.hpp"
#include "apv/errors.hpp"
#include "apv/experiment.hpp"

namespace apv {

namespace detail {

inline nlohmann::json labels_json(Ballot b, const CandidateSet& cands) {
  nlohmann::json arr = nlohmann::json::array();
  for (int c : b.members()) arr.push_back(cands.label(c));
  return arr;
}

inline void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <class Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const NotFoundError& e) {
    send_json(res, 404, {{"error", e.what()}});
  } catch (const ConflictError& e) {
    send_json(res, 409, {{"error", e.what()}});
  } catch (const ValidationError& e) {
    send_json(res, 400, {{"error", e.what()}});
  } catch (const ParseError& e) {
    send_json(res, 400, {{"error", e.what()}});
  } catch (const nlohmann::json::exception& e) {
    send_json(res, 400, {{"error", std::string("malformed request: ") + e.what()}});
  } catch (const std::exception& e) {
    send_json(res, 500, {{"error", e.what()}});
  }
}

}  // namespace detail

// Routes:
//   POST /sessions                {"group"?: 2|3, "seed"?: uint}
//   GET  /sessions/{id}/current
//   POST /sessions/{id}/ballot    {"approved": ["A","B"], "election"?: index}
//   GET  /sessions/{id}/summary
//   GET  /export?scenario=&k=&n=  (text/csv)
inline void mount_routes(httplib::Server& server, ExperimentService& service) {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  server.Post("/sessions", [&service](const httplib::Request& req, httplib::Response& res) {
    detail::guarded(res, [&] {
      std::optional<int> group;
      std::optional<std::uint64_t> seed;
      if (!req.body.empty()) {
        const auto body = nlohmann::json::parse(req.body);
        if (body.contains("group") && !body["group"].is_null()) group = body["group"].get<int>();
        if (body.contains("seed") && !body["seed"].is_null()) seed = body["seed"].get<std::uint64_t>();
      }
      const SessionRecord rec = service.create_session(group, seed);
      nlohmann::json playlist = nlohmann::json::array();
      for (const auto& e : rec.playlist) playlist.push_back({{"scenario", e.scenario_id}, {"k", e.k}, {"n", e.n}});
      detail::send_json(res, 201, {{"session_id", rec.id}, {"group", rec.group}, {"seed", rec.seed},
                                   {"playlist", playlist}});
    });
  });

  server.Get(R"(/sessions/([^/]+)/current)", [&service](const httplib::Request& req, httplib::Response& res) {
    detail::guarded(res, [&] {
      const auto state = service.current_election(req.matches[1]);
      if (const auto* done = std::get_if<SessionDone>(&state)) {
        detail::send_json(res, 200, {{"done", true}, {"total_cents", done->total_cents},
                                     {"payout_cents", done->payout_cents},
                                     {"payout_dollars", format_cents_as_dollars(done->payout_cents)}});
        return;
      }
      const auto& v = std::get<ElectionView>(state);
      nlohmann::json dollars = nlohmann::json::array();
      for (auto u : v.utilities_cents) dollars.push_back(format_cents_as_dollars(u));
      detail::send_json(res, 200, {{"done", false},
                                   {"election", v.index},
                                   {"elections_total", v.total},
                                   {"scenario", v.scenario_id},
                                   {"k", v.k},
                                   {"missing_voters", v.n},
                                   {"remaining_text", v.remaining_text},
                                   {"candidates", v.candidates},
                                   {"utilities_cents", v.utilities_cents},
                                   {"utilities_dollars", dollars},
                                   {"votes", v.votes}});
    });
  });

  server.Post(R"(/sessions/([^/]+)/ballot)", [&service](const httplib::Request& req, httplib::Response& res) {
    detail::guarded(res, [&] {
      const std::string id = req.matches[1];
      const auto body = nlohmann::json::parse(req.body);
      if (!body.contains("approved") || !body["approved"].is_array())
        throw ValidationError("body must contain an 'approved' array");
      const auto labels = body["approved"].get<std::vector<std::string>>();
      const auto state = service.current_election(id);
      if (std::holds_alternative<SessionDone>(state)) throw ConflictError("session " + id + " has no open election");
      const auto& view = std::get<ElectionView>(state);
      const CandidateSet cands(view.candidates);
      const Ballot ballot = ballot_from_labels(labels, cands);
      std::optional<std::size_t> expected;
      if (body.contains("election") && !body["election"].is_null()) expected = body["election"].get<std::size_t>();
      const SubmitOutcome out = service.submit_ballot(id, ballot, expected);
      nlohmann::json missing = nlohmann::json::array();
      for (Ballot b : out.missing_ballots) missing.push_back(detail::labels_json(b, cands));
      detail::send_json(res, 200, {{"election", out.index},
                                   {"winners", detail::labels_json(out.winners, cands)},
                                   {"delta_cents", out.delta_cents},
                                   {"delta_dollars", format_cents_as_dollars(out.delta_cents)},
                                   {"missing_ballots", missing},
                                   {"total_cents", out.total_cents}});
    });
  });

  server.Get(R"(/sessions/([^/]+)/summary)", [&service](const httplib::Request& req, httplib::Response& res) {
    detail::guarded(res, [&] {
      const SessionSummary s = service.session_summary(req.matches[1]);
      nlohmann::json history = nlohmann::json::array();
      for (const auto& [spec, r] : s.history) {
        const CandidateSet& cands = find_builtin(spec.scenario_id)->candidates;
        nlohmann::json missing = nlohmann::json::array();
        for (Ballot b : r.missing_ballots) missing.push_back(detail::labels_json(b, cands));
        history.push_back({{"scenario", spec.scenario_id}, {"k", spec.k}, {"n", spec.n},
                           {"ballot", detail::labels_json(r.ballot, cands)},
                           {"winners", detail::labels_json(r.winners, cands)},
                           {"missing_ballots", missing}, {"delta_cents", r.delta_cents}});
      }
      detail::send_json(res, 200, {{"session_id", s.id},
                                   {"group", s.group},
                                   {"total_cents", s.total_cents},
                                   {"payout_cents", s.payout_cents},
                                   {"payout_dollars", format_cents_as_dollars(s.payout_cents)},
                                   {"played", s.played},
                                   {"playlist_length", s.playlist_length},
                                   {"history", history}});
    });
  });

  server.Get("/export", [&service](const httplib::Request& req, httplib::Response& res) {
    detail::guarded(res, [&] {
      ExportFilter filter;
      auto int_param = [&](const char* key) -> std::optional<int> {
        if (!req.has_param(key) || req.get_param_value(key).empty()) return std::nullopt;
        try {
          return std::stoi(req.get_param_value(key));
        } catch (const std::exception&) {
          throw ValidationError(std::string("query parameter '") + key + "' must be an integer");
        }
      };
      if (req.has_param("scenario") && !req.get_param_value("scenario").empty())
        filter.scenario_id = req.get_param_value("scenario");
      filter.k = int_param("k");
      filter.n = int_param("n");
      res.status = 200;
      res.set_content(service.export_log(filter), "text/csv");
    });
  });
}

}  // namespace apv
