#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "cli.hpp"
#include "qsn/experiments.hpp"
#include "qsn/output.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "qsn");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return qsn::cli::run(static_cast<int>(argv.size()), argv.data());
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qsn_cli_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("invalid parameters exit 2 before anything is written") {
  const fs::path out = scratch("badp");
  CHECK(run_cli({"gen-graphs", "--model", "er", "--n", "20", "--p", "1.3", "--out", out}) == 2);
  CHECK_FALSE(fs::exists(out));
  CHECK(run_cli({"sweep", "--n", "25", "--out", out}) == 2);
  CHECK_FALSE(fs::exists(out));
  CHECK(run_cli({"attack", "--q", "1.5", "--out", out}) == 2);
  CHECK(run_cli({"nonsense"}) == 2);
}

TEST_CASE("non-empty output directories are refused without --force") {
  const fs::path out = scratch("busy");
  const std::vector<std::string> args{"gen-graphs", "--n", "10", "--count", "3", "--out", out};
  CHECK(run_cli(args) == 0);
  CHECK(run_cli(args) == 4);
  auto forced = args;
  forced.push_back("--force");
  CHECK(run_cli(forced) == 0);
  fs::remove_all(out);
}

TEST_CASE("reruns are byte-identical for any worker count") {
  const fs::path a = scratch("run1");
  const fs::path b = scratch("run8");
  const std::vector<std::string> base{"attack", "--n", "8", "--p", "0.5", "--count", "3",
                                      "--realizations", "2", "--fields", "0,0.7,2",
                                      "--strategy", "preferential", "--seed", "5"};
  auto one = base;
  one.insert(one.end(), {"--jobs", "1", "--out", a.string()});
  auto eight = base;
  eight.insert(eight.end(), {"--jobs", "8", "--out", b.string()});
  REQUIRE(run_cli(one) == 0);
  REQUIRE(run_cli(eight) == 0);
  for (const char* file : {"results.csv", "meta.json"})
    CHECK(qsn::read_text_file(a / file) == qsn::read_text_file(b / file));
  for (const auto& e : fs::directory_iterator(a / "histograms"))
    CHECK(qsn::read_text_file(e.path()) ==
          qsn::read_text_file(b / "histograms" / e.path().filename()));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("attack with q = 0 reproduces the sweep") {
  const fs::path s = scratch("sweep");
  const fs::path t = scratch("attack0");
  const std::vector<std::string> common{"--n", "8", "--p", "0.5", "--count", "3",
                                        "--fields", "0,1", "--seed", "3"};
  auto sweep = common;
  sweep.insert(sweep.begin(), "sweep");
  sweep.insert(sweep.end(), {"--out", s.string()});
  auto attack = common;
  attack.insert(attack.begin(), "attack");
  attack.insert(attack.end(), {"--q", "0", "--out", t.string()});
  REQUIRE(run_cli(sweep) == 0);
  REQUIRE(run_cli(attack) == 0);
  const auto rs = qsn::parse_results_csv(qsn::read_text_file(s / "results.csv"));
  const auto ra = qsn::parse_results_csv(qsn::read_text_file(t / "results.csv"));
  REQUIRE(rs.size() == ra.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    CHECK(rs[i].mean == ra[i].mean);
    CHECK(rs[i].sample_count == ra[i].sample_count);
  }
  fs::remove_all(s);
  fs::remove_all(t);
}

TEST_CASE("report: collapse output and input errors") {
  const fs::path s = scratch("rep_sweep");
  const fs::path t = scratch("rep_attack");
  const fs::path r = scratch("rep_out");
  const fs::path bad = scratch("rep_bad");
  REQUIRE(run_cli({"sweep", "--n", "8", "--p", "0.5", "--count", "2", "--lambdas", "0,0.5,1",
                   "--out", s}) == 0);
  REQUIRE(run_cli({"attack", "--n", "8", "--p", "0.5", "--count", "2", "--lambdas", "0,0.5,1",
                   "--realizations", "2", "--out", t}) == 0);
  CHECK(run_cli({"report", s, t, "--out", r}) == 0);
  CHECK(fs::exists(r / "collapse_summary.csv"));
  CHECK(fs::exists(r / "collapse_er_n8.csv"));
  REQUIRE(run_cli({"attack", "--n", "8", "--p", "0.5", "--count", "2", "--lambdas", "0,0.5,2",
                   "--realizations", "2", "--out", bad}) == 0);
  CHECK(run_cli({"report", s, bad, "--out", r, "--force"}) == 2);
  CHECK(run_cli({"report", s / "missing", "--out", r, "--force"}) == 4);
  for (const auto& p : {s, t, r, bad}) fs::remove_all(p);
}

TEST_CASE("single ground state and classical commands") {
  const fs::path g = scratch("gs");
  CHECK(run_cli({"ground-state", "--n", "6", "--p", "0.6", "--field", "0.8", "--out", g}) == 0);
  CHECK(fs::exists(g));
  const fs::path c = scratch("classical");
  CHECK(run_cli({"classical", "--sizes", "20", "--count", "10", "--out", c}) == 0);
  CHECK(fs::exists(c / "results.csv"));
  fs::remove_all(g);
  fs::remove_all(c);
}
