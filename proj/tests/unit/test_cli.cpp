#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "rankbound/cli.hpp"

using namespace rankbound;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

}  // namespace

TEST_CASE("bound prints value, status and baselines") {
  const Run r = cli({"bound", "--gen", "A_alpha:0.5", "--kind", "cpsd", "--t", "1"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("status: optimal") != std::string::npos);
  CHECK(r.out.find("value: 1.33333") != std::string::npos);
  CHECK(r.out.find("analytic_cpsd = 1.333333333") != std::string::npos);
  CHECK(r.out.find("sqrt_rank = 1.414213562") != std::string::npos);
}

TEST_CASE("sweep writes one CSV row per grid point") {
  const Run r = cli({"sweep", "--family", "A_alpha", "--p1", "0:1:0.5", "--kind", "cpsd", "--t", "1"});
  CHECK(r.code == kExitOk);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 4);
  CHECK(ls[0] == kCsvHeader);
  CHECK(ls[1].rfind("0,,cpsd,1,none,2.0000", 0) == 0);
  CHECK(ls[3].find(",optimal") != std::string::npos);
}

TEST_CASE("an empty sweep grid prints only the header") {
  const Run r = cli({"sweep", "--family", "A_alpha", "--p1", "1:0:0.5"});
  CHECK(r.code == kExitOk);
  CHECK(r.out == std::string(kCsvHeader) + "\n");
}

TEST_CASE("export to stdout starts with the SDPA header") {
  const Run r = cli({"export", "--gen", "A_alpha:0.5", "--kind", "cpsd", "--t", "1", "--stdout"});
  CHECK(r.code == kExitOk);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() >= 3);
  CHECK(ls[0] == "3");
  CHECK(ls[1] == "3");
  CHECK(ls[2] == "3 1 1");
}

TEST_CASE("bound reads matrix files") {
  const std::string path = "cli_test_matrix.csv";
  std::ofstream(path) << "1, 0.5\n0.5, 1\n";
  const Run r = cli({"bound", "--file", path, "--kind", "cpsd", "--t", "2"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("value: 1.5") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("exit codes") {
  CHECK(cli({"bound", "--gen", "nope:1"}).code == kExitInput);
  CHECK(cli({"bound", "--gen", "A_alpha:0.5", "--kind", "bogus"}).code == kExitInput);
  CHECK(cli({"bound", "--file", "does/not/exist.csv"}).code == kExitInput);
  CHECK(cli({"bound", "--gen", "A_alpha:x"}).code == kExitInput);
  CHECK(cli({"bound", "--gen", "A_alpha:0.5", "--t", "0"}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
}

TEST_CASE("check reports each level") {
  const Run r = cli({"check", "--gen", "A_alpha:0.5", "--t", "2"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("level 1: status optimal") != std::string::npos);
  CHECK(r.out.find("level 2: status optimal") != std::string::npos);
  CHECK(r.out.find("result: inconclusive") != std::string::npos);
}
