#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "ewl/cli.hpp"

using json = nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ewl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = ewl::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::stringstream ss(s);
  std::string l;
  while (std::getline(ss, l)) v.push_back(l);
  return v;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ewl_test_" + name);
}

}  // namespace

TEST_CASE("classify: Neumann example") {
  const auto r = cli({"classify", "--N", "3", "--p", "2", "--q", "2", "--a", "0", "--b", "0", "--bc", "neumann",
                      "--If", "1", "--Ig", "0"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["schema_version"] == 1);
  CHECK(j["result"]["verdict"] == "BlowUp");
  CHECK(j["result"]["branch"] == "ViaF");
  CHECK(j["result"]["delta"].get<double>() == doctest::Approx(2.0));
}

TEST_CASE("classify: dimension two") {
  const auto r = cli({"classify", "--N", "2", "--p", "3", "--q", "5", "--If", "1", "--Ig", "1"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["result"]["branch"] == "DimensionTwo");
}

TEST_CASE("exit codes") {
  CHECK(cli({"classify", "--N", "3", "--q", "2"}).code == 2);
  CHECK(cli({"classify", "--N", "3", "--p", "2", "--q", "2", "--bogus", "1"}).code == 2);
  CHECK(cli({}).code == 2);
  const auto bad = cli({"classify", "--N", "3", "--p", "0.5", "--q", "2", "--If", "1"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("p > 1") != std::string::npos);
  CHECK(cli({"classify", "--N", "3", "--p", "x", "--q", "2"}).code == 2);
  CHECK(cli({"classify", "--help"}).code == 0);
}

TEST_CASE("fractions and decimals are kept exact") {
  // N=4, p=q=2 lies exactly on the critical curve; 2/1 and 2.0 must agree
  const auto r = cli({"classify", "--N", "4", "--p", "4/2", "--q", "2.0", "--If", "1", "--Ig", "1"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["result"]["verdict"] == "NotCovered");
}

TEST_CASE("sweep: 2x2 grid") {
  const auto r = cli({"sweep", "--N", "3", "--If", "1", "--Ig", "1", "--p-min", "2", "--p-max", "3", "--p-step", "1",
                      "--q-min", "2", "--q-max", "3", "--q-step", "1"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  CHECK(ls.size() == 5);
  CHECK(ls[0] == "p,q,delta,gamma,verdict,branch");
  CHECK(ls[1].rfind("2,2,", 0) == 0);
  CHECK(ls[2].rfind("2,3,", 0) == 0);
}

TEST_CASE("sweep: no boundary data gives NotCovered everywhere") {
  const auto r = cli({"sweep", "--N", "3", "--p-min", "1.5", "--p-max", "4", "--p-step", "0.5", "--q-min", "1.5",
                      "--q-max", "4", "--q-step", "0.5"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  CHECK(ls.size() == 37);
  for (std::size_t i = 1; i < ls.size(); ++i) CHECK(ls[i].find("NotCovered") != std::string::npos);
}

TEST_CASE("sweep: verdict boundary is the level set max(delta,gamma) = 1") {
  const auto r = cli({"sweep", "--N", "3", "--If", "1", "--Ig", "1", "--p-min", "1.1", "--p-max", "4", "--p-step",
                      "0.1", "--q-min", "1.1", "--q-max", "4", "--q-step", "0.1"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 30 * 30 + 1);
  int checked = 0;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    std::stringstream ss(ls[i]);
    std::string p, q, d, g, verdict;
    std::getline(ss, p, ',');
    std::getline(ss, q, ',');
    std::getline(ss, d, ',');
    std::getline(ss, g, ',');
    std::getline(ss, verdict, ',');
    // integer grid indices give an exact test: max(delta,gamma) > 1 iff max(2+2p, 2+2q) > pq - 1
    const long P = std::lround(std::stod(p) * 10), Q = std::lround(std::stod(q) * 10);
    const long num = std::max(2L * 100 + 2L * 10 * P, 2L * 100 + 2L * 10 * Q);  // 100*(2+2p)
    const long den = P * Q - 100;                                             // 100*(pq-1)
    if (num > den) CHECK(verdict == "BlowUp");
    else if (num == den) CHECK(verdict == "NotCovered");
    else CHECK(verdict != "BlowUp");
    ++checked;
  }
  CHECK(checked == 900);
}

TEST_CASE("sweep: degenerate grid fails") {
  const auto r = cli({"sweep", "--N", "3", "--p-min", "2", "--p-max", "2", "--p-step", "1", "--q-min", "2",
                      "--q-max", "3", "--q-step", "1"});
  CHECK(r.code == 1);
}

TEST_CASE("verify-asymptotics: default suite passes") {
  const auto r = cli({"verify-asymptotics"});
  CHECK(r.code == 0);
  const auto ls = lines(r.out);
  CHECK(ls.size() == 23);
  for (std::size_t i = 1; i < ls.size(); ++i) CHECK(ls[i].find(",pass,") != std::string::npos);
}

TEST_CASE("verify-asymptotics: single LL13 case") {
  const auto r = cli({"verify-asymptotics", "--lemma", "LL13", "--N", "3", "--tau", "0.5", "--m", "2", "--format",
                      "json"});
  REQUIRE(r.code == 0);
  const auto row = json::parse(r.out)["result"]["rows"][0];
  CHECK(row["predicted_rate"].get<double>() == doctest::Approx(3 - (0.5 + 3 * 7)));
  CHECK(row["status"] == "pass");
}

TEST_CASE("verify-asymptotics: empty list and bad samples are usage errors") {
  CHECK(cli({"verify-asymptotics", "--lemma", ""}).code == 2);
  CHECK(cli({"verify-asymptotics", "--T", "10,20,50"}).code == 2);
}

TEST_CASE("verify-asymptotics: theta failure marks the row and continues") {
  const auto r = cli({"verify-asymptotics", "--lemma", "LL20", "--functional", "ViaF", "--N", "3", "--p", "2", "--q",
                      "2", "--If", "1", "--Ig", "1", "--theta", "0.5"});
  CHECK(r.code == 1);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 3);
  CHECK(ls[2].find("error") != std::string::npos);
}

TEST_CASE("simulate: manufactured decay case") {
  const auto r = cli({"simulate", "--N", "3", "--p", "3", "--q", "3", "--bc", "neumann", "--initial", "decay_pair",
                      "--t-final", "5", "--sample-dt", "0.5", "--format", "csv"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  CHECK(ls[0] == "t,sup_u,sup_v,energy_proxy,max_err");
  CHECK(ls.size() == 12);
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const double err = std::stod(ls[i].substr(ls[i].rfind(',') + 1));
    CHECK(err < 1e-2);
  }
}

TEST_CASE("simulate: Neumann forcing blows up") {
  const auto r = cli({"simulate", "--N", "3", "--p", "2", "--q", "2", "--bc", "neumann", "--f-val", "1", "--g-val",
                      "1", "--t-final", "20", "--dr", "0.05", "--sample-dt", "1"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out)["result"];
  CHECK(j["verdict"] == "BlewUp");
  CHECK(j["t_blow"].get<double>() > 0);
}

TEST_CASE("simulate: probe on the global candidate agrees") {
  const auto r = cli({"simulate", "--N", "5", "--p", "3", "--q", "3", "--If", "1", "--Ig", "1", "--t-final", "10",
                      "--dr", "0.05", "--sample-dt", "1", "--probe"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out)["result"]["probe"];
  CHECK(j["classified"]["verdict"] == "GlobalCandidate");
  CHECK(j["simulated"] == "BoundedToHorizon");
  CHECK(j["agree"] == true);
}

TEST_CASE("simulate: csv with verdict file") {
  const auto out = temp_file("series.csv"), verdict = temp_file("verdict.json");
  const auto r = cli({"simulate", "--N", "3", "--p", "2", "--q", "2", "--t-final", "1", "--dr", "0.1", "--format",
                      "csv", "--out", out.string(), "--verdict-out", verdict.string()});
  REQUIRE(r.code == 0);
  std::ifstream v(verdict);
  CHECK(json::parse(v)["result"]["verdict"] == "BoundedToHorizon");
  std::ifstream s(out);
  std::string header;
  std::getline(s, header);
  CHECK(header == "t,sup_u,sup_v,energy_proxy");
}

TEST_CASE("exponents") {
  const auto r = cli({"exponents", "--N", "2"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out)["result"];
  CHECK(j["kato"].get<double>() == doctest::Approx(3.0));
  CHECK(j["zhang"].is_null());
}

TEST_CASE("config file: flags override, unknown keys rejected") {
  const auto path = temp_file("config.json");
  {
    std::ofstream f(path);
    f << R"({"N": 3, "p": "2", "q": 2, "bc": "neumann", "If": 1, "Ig": 0})";
  }
  auto r = cli({"classify", "--config", path.string()});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["result"]["branch"] == "ViaF");
  r = cli({"classify", "--config", path.string(), "--If", "0", "--Ig", "1"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["result"]["branch"] == "ViaG");
  {
    std::ofstream f(path);
    f << R"({"N": 3, "p": 2, "q": 2, "colour": "red"})";
  }
  CHECK(cli({"classify", "--config", path.string()}).code == 2);
  {
    std::ofstream f(path);
    f << "{not json";
  }
  CHECK(cli({"classify", "--config", path.string()}).code == 2);
}

TEST_CASE("round trip: a report reproduces itself") {
  const auto first = cli({"classify", "--N", "4", "--p", "1.7", "--q", "52/11", "--a", "-1/2", "--If", "1", "--Ig",
                          "0.25", "--bc", "mixed"});
  REQUIRE(first.code == 0);
  const auto cfg = ewl::report_config(first.out);
  CHECK(cfg.at("q") == "52/11");
  const auto path = temp_file("report.json");
  {
    std::ofstream f(path);
    f << first.out;
  }
  const auto second = cli({"classify", "--config", path.string()});
  REQUIRE(second.code == 0);
  CHECK(second.out == first.out);
}

TEST_CASE("determinism across runs and worker counts") {
  const std::vector<std::string> args = {"sweep", "--N", "4", "--a", "0.5", "--If", "1", "--Ig", "1", "--p-min",
                                         "1.1", "--p-max", "3", "--p-step", "0.1", "--q-min", "1.1", "--q-max", "3",
                                         "--q-step", "0.1"};
  setenv("EWL_THREADS", "1", 1);
  const auto a = cli(args);
  setenv("EWL_THREADS", "4", 1);
  const auto b = cli(args);
  const auto c = cli(args);
  unsetenv("EWL_THREADS");
  CHECK(a.out == b.out);
  CHECK(b.out == c.out);
}
