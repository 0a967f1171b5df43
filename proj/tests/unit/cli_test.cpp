#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "apv/cli.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "apv");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = apv::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, sep)) out.push_back(field);
  return out;
}

}  // namespace

TEST(Cli, AnalyzeScenario1b) {
  const auto r = run({"analyze", "--scenario", "1b", "--k", "1,2,3", "--n", "0", "--model", "uniform-subsets"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("0\t0.13 Take-1\t0.26 Take-1, [C,D]\t0.36 Take-2, [B,C,D]"), std::string::npos) << r.out;
}

TEST(Cli, CsvParsesBackToTableValues) {
  const auto table = run({"analyze", "--scenario", "3", "--n", "0,1"});
  const auto csv = run({"analyze", "--scenario", "3", "--n", "0,1", "--format", "csv"});
  ASSERT_EQ(table.code, 0);
  ASSERT_EQ(csv.code, 0);
  // table cell for (k, n)
  std::map<std::pair<int, int>, std::string> from_table;
  std::stringstream ts(table.out);
  std::string line;
  std::getline(ts, line);
  std::getline(ts, line);  // header
  while (std::getline(ts, line)) {
    const auto cols = split(line, '\t');
    const int n = std::stoi(cols[0]);
    for (std::size_t i = 1; i < cols.size(); ++i) from_table[{static_cast<int>(i), n}] = cols[i];
  }
  std::stringstream cs(csv.out);
  std::getline(cs, line);
  int rows = 0;
  while (std::getline(cs, line)) {
    const auto cols = split(line, ',');
    const int k = std::stoi(cols[1]), n = std::stoi(cols[2]);
    const std::string value = cols[3];
    const auto quote = line.find('"');
    const std::string maximizers = line.substr(quote + 1, line.rfind('"') - quote - 1);
    EXPECT_EQ(from_table.at({k, n}), value + " " + maximizers);
    ++rows;
  }
  EXPECT_EQ(rows, 6);
}

TEST(Cli, BestResponseScenario3) {
  const auto r = run({"best-response", "--scenario", "3", "--k", "2", "--n", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("max expected utility 0.25"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("  ABCE  [Regret]"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("  CE  [Other]"), std::string::npos) << r.out;

  const auto exact = run({"best-response", "--scenario", "3", "--k", "3", "--exact"});
  EXPECT_NE(exact.out.find("-1/30"), std::string::npos) << exact.out;
}

TEST(Cli, ExitCodes) {
  const auto missing = run({"analyze", "--scenario", "missing.json"});
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("missing.json"), std::string::npos);

  EXPECT_EQ(run({"analyze", "--scenario", "3", "--bogus"}).code, 1);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"analyze", "--scenario", "3", "--format", "xml"}).code, 1);
  EXPECT_EQ(run({"best-response", "--scenario", "3", "--k", "9"}).code, 1);
  EXPECT_EQ(run({"analyze", "--scenario", "3", "--model", "nope"}).code, 2);
}

TEST(Cli, HelpOnEverySubcommand) {
  for (const char* sub : {"analyze", "best-response", "classify", "compare", "mc", "serve"}) {
    const auto r = run({sub, "--help"});
    EXPECT_EQ(r.code, 0) << sub;
    EXPECT_NE(r.out.find(sub), std::string::npos) << sub << "\n" << r.out;
  }
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, Classify) {
  const auto one = run({"classify", "--scenario", "4", "--ballot", "ACD"});
  ASSERT_EQ(one.code, 0) << one.err;
  EXPECT_EQ(one.out, "ACD: Truth, Take-3; sincere=true; category=Truth\n");

  const auto path = std::filesystem::temp_directory_path() / "apv-cli-test-log.csv";
  {
    std::ofstream f(path);
    f << "session_id,scenario_id,k,n,ballot\na,3,1,0,E\nb,3,1,0,E\nc,3,1,0,ABE\nd,3,1,0,\n";
  }
  const auto log = run({"classify", "--log", path.string()});
  std::filesystem::remove(path);
  ASSERT_EQ(log.code, 0) << log.err;
  EXPECT_NE(log.out.find("3,1,0,4,Take-1,2,50.0"), std::string::npos) << log.out;
  EXPECT_NE(log.out.find("3,1,0,4,Abstain,1,25.0"), std::string::npos) << log.out;
  EXPECT_NE(log.out.find("precedence"), std::string::npos);

  EXPECT_EQ(run({"classify", "--log", "/nonexistent.csv"}).code, 2);
  EXPECT_EQ(run({"classify"}).code, 1);
}

TEST(Cli, Compare) {
  const auto r = run({"compare"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("MISMATCH"), std::string::npos);
  const auto csv = run({"compare", "--format", "csv"});
  EXPECT_NE(csv.out.find("4,3,0,0.32,0.35,7/20,MISMATCH"), std::string::npos) << csv.out;
}

TEST(Cli, MonteCarloIsDeterministic) {
  const std::vector<std::string> args = {"mc", "--scenario", "3", "--ballot", "ABE", "--k", "1", "--n", "1",
                                         "--samples", "2000", "--seed", "5"};
  const auto a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("estimate "), std::string::npos);
}

TEST(Cli, BinaryExitCode) {
  const std::string cmd = std::string(APV_CLI_PATH) + " analyze --scenario /nonexistent/missing.json 2>/dev/null";
  const int status = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 2);
}
