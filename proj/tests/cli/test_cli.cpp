#include <cstdio>
#include <fstream>
#include <sstream>

#include <doctest.h>
#include <json.hpp>

#include "robenv_cli/app.hpp"
#include "robenv_cli/suites.hpp"

using robenv::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& body) {
  const std::string path = std::string(P_tmpdir) + "/robenv_cli_test_" + name;
  std::ofstream(path) << body;
  return path;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help and usage errors") {
  CHECK(invoke({"--help"}).code == 0);
  CHECK(invoke({"bounds", "--help"}).code == 0);
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  const Result missing = invoke({"bounds", "--n", "3", "--h", "1", "--b", "1"});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("--r") != std::string::npos);
  CHECK(invoke({"bounds", "--r", "1.5", "--n", "3", "--h", "1", "--b", "1"}).code == 2);
  CHECK(invoke({"bounds", "--r", "0.5", "--n", "3", "--h", "1", "--b", "1", "--format", "xml"}).code == 2);
  CHECK(invoke({"verify", "nosuch"}).code == 2);
  CHECK(invoke({"verify", "gaussian", "--mutant", "nosuch"}).code == 2);
}

TEST_CASE("bounds table") {
  const Result r = invoke({"bounds", "--r", "0.5", "--n", "224", "--h", "3", "--b", "8", "--p", "0,1,2"});
  CHECK(r.code == 0);
  CHECK(r.out ==
        "p,upper_size,lower_size,c_upper,c_lower,dominating_term\n"
        "0,325.014,46.4974,0.832555,0.125,theorem1\n"
        "1,325.014,46.4974,0.832555,0.125,theorem1\n"
        "2,4.6962,0.0267408,0.832555,0.125,theorem3\n");
  const Result j = invoke({"bounds", "--r", "0.5", "--n", "224", "--h", "3", "--b", "8", "--format", "json"});
  CHECK(j.code == 0);
  CHECK(nlohmann::json::parse(j.out).size() == 3);
}

TEST_CASE("bounds to a file") {
  const std::string path = std::string(P_tmpdir) + "/robenv_cli_test_bounds.csv";
  CHECK(invoke({"bounds", "--r", "0.25", "--n", "8", "--h", "1", "--b", "2", "--output", path}).code == 0);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "p,upper_size,lower_size,c_upper,c_lower,dominating_term");
  std::remove(path.c_str());
}

TEST_CASE("verify exit codes and determinism") {
  const Result ok = invoke({"verify", "gaussian"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("PASS gaussian") != std::string::npos);
  const Result bad = invoke({"verify", "gaussian", "--mutant", "gaussian-tail-x2"});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("FAIL gaussian") != std::string::npos);
  const Result a = invoke({"verify", "reductions", "--format", "json", "--seed", "3"});
  const Result b = invoke({"verify", "reductions", "--format", "json", "--seed", "3", "--threads", "2"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const auto j = nlohmann::json::parse(a.out);
  CHECK(j.at("config").at("seed") == 3);
}

TEST_CASE("every offered mutant is caught") {
  robenv::cli::SuiteConfig config;
  config.mode_bound_max_n = 50;
  for (const std::string& m : robenv::cli::mutant_names()) {
    config.mutant = m;
    bool caught = false;
    for (const char* suite : {"binomial", "gaussian"}) caught = caught || !robenv::cli::run_suite(suite, config).passed();
    CHECK_MESSAGE(caught, m);
  }
}

TEST_CASE("minimal attack") {
  const std::string img = temp_file("zero.json", R"({"n":2,"h":1,"b":1,"levels":[0,0,0,0]})");
  const Result r = invoke({"attack", "--image", img, "--norm", "0"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("distance") == 2.0);
  CHECK(j.at("witness").at("levels") == nlohmann::json::array({0, 0, 1, 1}));
  const Result s = invoke({"attack", "--image", img, "--method", "sum", "--norm", "2"});
  CHECK(s.code == 0);
  CHECK(nlohmann::json::parse(s.out).at("distance_power") == "2");
  CHECK(invoke({"attack", "--image", img, "--classifier", "constant"}).code == 1);
  CHECK(invoke({"attack", "--image", img, "--classifier", "balanced:1", "--method", "sum"}).code == 2);
}

TEST_CASE("cell-walk attack") {
  const std::string img = temp_file("walk.json", R"({"n":2,"h":1,"b":2,"levels":[0,1,0,1]})");
  const Result r = invoke({"attack", "--image", img, "--method", "findpert", "--radius", "2", "--seed", "5"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("success") == true);
  CHECK(j.at("within_bound") == true);
  const Result none = invoke({"attack", "--image", img, "--method", "findpert", "--radius", "0", "--seed", "5"});
  CHECK(none.code == 1);
  CHECK(nlohmann::json::parse(none.out).at("witness").is_null());
  CHECK(invoke({"attack", "--image", img, "--method", "findpert", "--radius", "1"}).code == 2);
}

TEST_CASE("malformed images") {
  const std::string bad = temp_file("bad.json", R"({"n":2,"h":1,"b":1,"levels":[0,0]})");
  CHECK(invoke({"attack", "--image", bad}).code == 2);
  const std::string syntax = temp_file("syntax.json", "{nope");
  CHECK(invoke({"attack", "--image", syntax}).code == 2);
  CHECK(invoke({"attack", "--image", "/nonexistent/robenv.json"}).code == 2);
}

TEST_CASE("estimates") {
  const Result mc = invoke({"estimate", "--n", "2", "--h", "1", "--b", "2", "--norm", "1", "--size", "1", "--samples",
                            "500", "--seed", "2"});
  CHECK(mc.code == 0);
  const auto j = nlohmann::json::parse(mc.out);
  CHECK(j.at("config").at("samples") == 500);
  CHECK(j.at("report").at("method") == "monte_carlo");
  CHECK(j.at("report").contains("ci_lo"));
  const Result again = invoke({"estimate", "--n", "2", "--h", "1", "--b", "2", "--norm", "1", "--size", "1",
                               "--samples", "500", "--seed", "2"});
  CHECK(again.out == mc.out);
  const Result csv = invoke({"estimate", "--n", "2", "--h", "1", "--b", "1", "--norm", "0", "--size", "1", "--method",
                             "exhaustive", "--format", "csv"});
  CHECK(csv.code == 0);
  CHECK(csv.out == "n,h,b,classifier,label,p,size,method,fraction,ci_lo,ci_hi,samples,seed\n"
                   "2,1,1,sum,0,0,1,exhaustive,0.2,,,,\n");
  CHECK(invoke({"estimate", "--n", "2", "--h", "1", "--b", "2", "--size", "1", "--samples", "0", "--seed", "1"}).code ==
        2);
  CHECK(invoke({"estimate", "--n", "2", "--h", "1", "--b", "2", "--size", "1"}).code == 2);
  CHECK(invoke({"estimate", "--n", "2", "--h", "1", "--b", "2", "--size", "1", "--method", "analytic", "--norm", "0"})
            .code == 2);
}

TEST_CASE("cell-walk attack on a four-level image") {
  const std::string img = temp_file("walk2.json", R"({"n":2,"h":1,"b":2,"levels":[0,0,0,0]})");
  const Result r = invoke({"attack", "--image", img, "--method", "findpert", "--radius", "2", "--seed", "1"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("success") == true);
  CHECK(j.at("distance").get<double>() <= 3.0);
  CHECK(j.at("bound").get<double>() == 3.0);
}

TEST_CASE("estimate covers the exhaustive value") {
  const Result mc = invoke({"estimate", "--n", "3", "--h", "1", "--b", "1", "--norm", "0", "--size", "1", "--samples",
                            "10000", "--seed", "9"});
  const Result ex = invoke({"estimate", "--n", "3", "--h", "1", "--b", "1", "--norm", "0", "--size", "1", "--method",
                            "exhaustive"});
  REQUIRE(mc.code == 0);
  REQUIRE(ex.code == 0);
  const double exact = nlohmann::json::parse(ex.out).at("report").at("fraction").get<double>();
  const auto rep = nlohmann::json::parse(mc.out).at("report");
  CHECK(rep.at("ci_lo").get<double>() <= exact);
  CHECK(exact <= rep.at("ci_hi").get<double>());
}

}  // TEST_SUITE
