#pragma once

#include <algorithm>
#include <csignal>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "apv/analysis.hpp"
#include "apv/ballot_log.hpp"
#include "apv/comparison.hpp"
#include "apv/completion.hpp"
#include "apv/errors.hpp"
#include "apv/expected_utility.hpp"
#include "apv/experiment.hpp"
#include "apv/http_service.hpp"
#include "apv/scenario.hpp"
#include "apv/strategy.hpp"

namespace apv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

inline constexpr const char* kDataDirEnv = "APV_DATA_DIR";

namespace detail {

inline httplib::Server* active_server = nullptr;

inline void stop_server(int) {
  if (active_server) active_server->stop();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string labelled(Ballot b, const Scenario& s) {
  const std::string text = format_ballot(b, s.candidates);
  return text.empty() ? "{}" : text;
}

}  // namespace detail

// Runs the command line; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Approval voting under missing-vote uncertainty: expected utility, heuristics, experiment service"};
  app.require_subcommand(1);

  std::string scenario_sel;
  std::string model_spec = "uniform-subsets";
  std::string format = "table";
  bool exact = false;
  std::vector<int> ks{1, 2, 3};
  std::vector<int> ns{0, 1, 3};
  int k = 1;
  int n = -1;
  std::string ballot_text;
  std::string log_path;
  std::uint64_t samples = 10000;
  std::uint64_t seed = 0;
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string data_dir = std::getenv(kDataDirEnv) ? std::getenv(kDataDirEnv) : "apv-data";
  std::string playlist_path;

  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--model", model_spec,
                    "Completion model: uniform-subsets | independent:P | single-vote | single-vote-abstain | "
                    "weighted:AB=1/2,E=1/2")
        ->capture_default_str();
  };
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"table", "csv"}))->capture_default_str();
    sub->add_flag("--exact", exact, "Print exact rationals instead of rounded dollars");
  };

  auto* analyze = app.add_subcommand("analyze", "Heuristic performance grid over k and n");
  analyze->add_option("--scenario", scenario_sel, "Built-in scenario id or scenario JSON file")->required();
  analyze->add_option("--k", ks, "Comma-separated winner counts")->delimiter(',');
  analyze->add_option("--n", ns, "Comma-separated missing-voter counts")->delimiter(',');
  add_model(analyze);
  add_format(analyze);

  auto* best = app.add_subcommand("best-response", "All expected-utility maximizing ballots");
  best->add_option("--scenario", scenario_sel, "Built-in scenario id or scenario JSON file")->required();
  best->add_option("--k", k, "Number of winners")->capture_default_str();
  best->add_option("--n", n, "Missing voters (default: the scenario's own)");
  add_model(best);
  add_format(best);

  auto* classify = app.add_subcommand("classify", "Classify ballots into heuristic strategies");
  auto* log_opt = classify->add_option("--log", log_path, "Ballot log CSV (session_id,scenario_id,k,n,ballot)");
  auto* sc_opt = classify->add_option("--scenario", scenario_sel, "Scenario for a single --ballot");
  classify->add_option("--ballot", ballot_text, "Approved labels, e.g. ABE")->needs(sc_opt);
  log_opt->excludes(sc_opt);

  auto* compare = app.add_subcommand("compare", "Compare recomputed values with the published tables");
  add_model(compare);
  add_format(compare);

  auto* mc = app.add_subcommand("mc", "Monte Carlo estimate of a ballot's expected utility");
  mc->add_option("--scenario", scenario_sel, "Built-in scenario id or scenario JSON file")->required();
  mc->add_option("--ballot", ballot_text, "Approved labels, e.g. ABE (empty for abstention)");
  mc->add_option("--k", k, "Number of winners")->capture_default_str();
  mc->add_option("--n", n, "Missing voters (default: the scenario's own)");
  mc->add_option("--samples", samples, "Number of samples")->capture_default_str()->check(CLI::PositiveNumber);
  mc->add_option("--seed", seed, "Random seed")->capture_default_str();
  add_model(mc);

  auto* serve = app.add_subcommand("serve", "Run the experiment HTTP service");
  serve->add_option("--port", port, "Listen port")->capture_default_str();
  serve->add_option("--host", host, "Listen address")->capture_default_str();
  serve->add_option("--data", data_dir, std::string("Data directory (env ") + kDataDirEnv + ")")->capture_default_str();
  serve->add_option("--playlist", playlist_path, "Playlist JSON overriding the study default");
  add_model(serve);

  std::vector<std::string> args;
  for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    // subcommand --help surfaces here too
    if (e.get_exit_code() == 0) {
      for (auto* sub : app.get_subcommands()) out << sub->help();
      if (app.get_subcommands().empty()) out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (analyze->parsed()) {
      const Scenario s = load_scenario(scenario_sel);
      const auto grid = heuristic_grid(s, ks, ns, parse_model(model_spec, s.candidates));
      out << (format == "csv" ? render_grid_csv(grid) : render_grid_table(grid, exact));
    } else if (best->parsed()) {
      Scenario s = load_scenario(scenario_sel);
      if (n >= 0) s = s.with_missing_voters(n);
      const BestResponse br = best_response(s, k, parse_model(model_spec, s.candidates));
      const std::string value = exact ? exact_dollars(br.max_eu) : format_dollars(br.max_eu);
      if (format == "csv") {
        out << "scenario,k,n,max_eu_dollars,ballot,labels\n";
        for (Ballot b : br.maximizers) {
          std::string labels;
          for (const auto& l : classify_ballot(b, s.utilities).labels) labels += (labels.empty() ? "" : ";") + l.name();
          out << s.id << "," << k << "," << s.missing_voters << "," << value << "," << format_ballot(b, s.candidates)
              << "," << labels << "\n";
        }
      } else {
        out << "Scenario " << s.id << ", k=" << k << ", n=" << s.missing_voters << ": max expected utility " << value
            << " dollars\n";
        out << br.maximizers.size() << " maximizing ballot(s):\n";
        for (Ballot b : br.maximizers) {
          std::string labels;
          for (const auto& l : classify_ballot(b, s.utilities).labels) labels += (labels.empty() ? "" : ", ") + l.name();
          out << "  " << detail::labelled(b, s) << "  [" << labels << "]\n";
        }
      }
    } else if (classify->parsed()) {
      if (!log_path.empty()) {
        const auto records = parse_ballot_log(detail::read_file(log_path));
        out << render_proportions(strategy_proportions(records));
      } else if (!scenario_sel.empty()) {
        const Scenario s = load_scenario(scenario_sel);
        const Ballot b = parse_ballot(ballot_text, s.candidates);
        const Classification cls = classify_ballot(b, s.utilities);
        std::string labels;
        for (const auto& l : cls.labels) labels += (labels.empty() ? "" : ", ") + l.name();
        out << detail::labelled(b, s) << ": " << labels << "; sincere=" << (cls.sincere ? "true" : "false")
            << "; category=" << strategy_category(cls) << "\n";
      } else {
        err << "error: classify needs --log or --scenario/--ballot\n";
        return kExitUsage;
      }
    } else if (compare->parsed()) {
      const auto report = comparison_report(parse_model(model_spec, CandidateSet::letters(5)));
      out << (format == "csv" ? report.render_csv() : report.render());
    } else if (mc->parsed()) {
      Scenario s = load_scenario(scenario_sel);
      if (n >= 0) s = s.with_missing_voters(n);
      const Ballot b = parse_ballot(ballot_text, s.candidates);
      const auto est = expected_utility_mc(s, b, k, parse_model(model_spec, s.candidates), samples, seed);
      char line[160];
      std::snprintf(line, sizeof line, "estimate %.6f dollars, std error %.6f, samples %llu, seed %llu\n",
                    est.estimate / 100.0, est.std_error / 100.0, static_cast<unsigned long long>(est.samples),
                    static_cast<unsigned long long>(seed));
      out << line;
    } else if (serve->parsed()) {
      ServiceConfig cfg;
      cfg.data_dir = data_dir;
      cfg.model = parse_model(model_spec, CandidateSet::letters(5));
      if (!playlist_path.empty()) cfg.playlist = PlaylistConfig::parse(detail::read_file(playlist_path));
      ExperimentService service(std::move(cfg));
      httplib::Server server;
      mount_routes(server, service);
      detail::active_server = &server;
      std::signal(SIGINT, detail::stop_server);
      std::signal(SIGTERM, detail::stop_server);
      err << "listening on " << host << ":" << port << ", data in " << data_dir << "\n";
      const bool ok = server.listen(host, port);
      detail::active_server = nullptr;
      if (!ok) throw ServiceError("cannot listen on " + host + ":" + std::to_string(port));
    }
  } catch (const ModelError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace apv::cli
