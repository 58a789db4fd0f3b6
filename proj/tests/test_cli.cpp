#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <sstream>

#include "fermatec/cli.hpp"

using namespace fermatec;
using namespace fermatec::cli;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> result;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) result.push_back(line);
  return result;
}

}  // namespace

TEST_CASE("k ranges") {
  CHECK(parse_k_range("7") == std::pair<std::uint64_t, std::uint64_t>{7, 7});
  CHECK(parse_k_range("2..9") == std::pair<std::uint64_t, std::uint64_t>{2, 9});
  CHECK_THROWS_AS(parse_k_range("0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_k_range("9..2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_k_range("a..b"), std::invalid_argument);
  CHECK_THROWS_AS(parse_k_range(""), std::invalid_argument);
}

TEST_CASE("test exit codes") {
  const Outcome f4 = invoke({"test", "--form", "f", "--k", "4", "--method", "pepin"});
  CHECK(f4.code == kExitPrime);
  CHECK(f4.out.find("F_4 (5 digits) pepin: prime") == 0);

  const Outcome g3 = invoke({"test", "--form", "g", "--k", "3"});
  CHECK(g3.code == kExitComposite);
  CHECK(g3.out.find("(known-divisor 5)") != std::string::npos);

  const Outcome h1 = invoke({"test", "--form", "h", "--k", "1"});
  CHECK(h1.code == kExitOther);
  CHECK(h1.out.find("not-applicable") != std::string::npos);

  CHECK(invoke({"test", "--form", "f", "--k", "5"}).code == kExitComposite);
  CHECK(invoke({"test", "--form", "g", "--k", "5"}).code == kExitPrime);
}

TEST_CASE("range exit code is the worst outcome") {
  CHECK(invoke({"test", "--form", "f", "--k", "2..4"}).code == kExitPrime);
  CHECK(invoke({"test", "--form", "f", "--k", "2..5"}).code == kExitComposite);
  CHECK(invoke({"test", "--form", "h", "--k", "1..3"}).code == kExitOther);
  CHECK(lines(invoke({"test", "--form", "g", "--k", "2..6"}).out).size() == 5);
}

TEST_CASE("usage errors") {
  CHECK(invoke({}).code == kExitOther);
  CHECK(invoke({"test", "--form", "x", "--k", "3"}).code == kExitOther);
  CHECK(invoke({"test", "--form", "f"}).code == kExitOther);
  CHECK(invoke({"test", "--form", "f", "--k", "0"}).code == kExitOther);
  CHECK(invoke({"test", "--form", "f", "--k", "20"}).code == kExitOther);
  CHECK(invoke({"test", "--form", "g", "--k", "5", "--method", "double"}).code == kExitOther);
  CHECK(invoke({"test", "--form", "f", "--k", "3", "--trace", "--json"}).code == kExitOther);
  CHECK(invoke({"test", "--form", "f", "--k", "3", "--method", "pepin", "--trace"}).code == kExitOther);
  CHECK(invoke({"bench", "--form", "f", "--k", "3", "--methods", "eta,bogus"}).code == kExitOther);
  CHECK(invoke({"verify", "nonsense"}).code == kExitOther);
  CHECK_FALSE(invoke({"test", "--form", "x", "--k", "3"}).err.empty());
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("trace output") {
  const Outcome f2 = invoke({"test", "--form", "f", "--k", "2", "--method", "eta", "--trace"});
  CHECK(f2.code == kExitPrime);
  CHECK(f2.out.find("trace: 5, 4, 1, 0\n") != std::string::npos);
  const Outcome g2 = invoke({"test", "--form", "g", "--k", "2", "--trace"});
  CHECK(g2.out.find("trace: 7, 25, 9, 40\n") != std::string::npos);
}

TEST_CASE("json records") {
  const Outcome g3 = invoke({"test", "--form", "g", "--k", "3", "--json"});
  const json j = json::parse(g3.out);
  CHECK(j.at("form") == "G");
  CHECK(j.at("k") == 3);
  CHECK(j.at("verdict") == "composite");
  CHECK(j.at("witness") == "5");
  std::set<std::string> keys;
  for (const auto& [key, value] : j.items()) keys.insert(key);
  CHECK(keys == std::set<std::string>{"form", "k", "digits", "method", "verdict", "witness", "iterations", "elapsed_ms"});

  const Outcome f4 = invoke({"test", "--form", "f", "--k", "4", "--json"});
  const json p = json::parse(f4.out);
  CHECK_FALSE(p.contains("witness"));
  CHECK(p.at("method") == "double");
  CHECK(p.at("iterations") == 7);

  const auto range = lines(invoke({"test", "--form", "h", "--k", "2..8", "--json"}).out);
  CHECK(range.size() == 7);
  for (const auto& line : range) CHECK_NOTHROW(json::parse(line).get<ReportRecord>());
}

TEST_CASE("json round trip") {
  const TestReport report = run_test(Form::F, 5, Method::Eta);
  const ReportRecord rec = to_record(report);
  const ReportRecord back = json(rec).get<ReportRecord>();
  CHECK(back == rec);

  ReportRecord composite = rec;
  composite.witness = "641";
  CHECK(json(composite).get<ReportRecord>() == composite);

  json extra = rec;
  extra["note"] = "x";
  CHECK_THROWS_AS(extra.get<ReportRecord>(), std::invalid_argument);
  json missing = rec;
  missing.erase("digits");
  CHECK_THROWS_AS(missing.get<ReportRecord>(), std::invalid_argument);
  json typed = rec;
  typed["k"] = "5";
  CHECK_THROWS_AS(typed.get<ReportRecord>(), std::invalid_argument);
  json prime = json(to_record(run_test(Form::F, 4, Method::Eta)));
  prime["witness"] = "3";
  CHECK_THROWS_AS(prime.get<ReportRecord>(), std::invalid_argument);
}

TEST_CASE("bench csv") {
  const Outcome b = invoke({"bench", "--form", "f", "--k", "3..6", "--methods", "eta,double,pepin", "--jobs", "2"});
  CHECK(b.code == 0);
  const auto rows = lines(b.out);
  REQUIRE(rows.size() == 13);
  CHECK(rows[0] == "form,k,method,iterations,elapsed_ms,verdict");
  CHECK(rows[1].rfind("F,3,eta,7,", 0) == 0);
  CHECK(rows[2].rfind("F,3,double,3,", 0) == 0);
  CHECK(rows[3].rfind("F,3,pepin,7,", 0) == 0);
  CHECK(rows[12].rfind("F,6,pepin,63,", 0) == 0);
  CHECK(rows[12].substr(rows[12].rfind(',') + 1) == "composite");
}

TEST_CASE("verify suites") {
  const Outcome s = invoke({"verify", "structure", "--p-max", "500"});
  CHECK(s.code == 0);
  CHECK(s.out.find("verify structure: pass") != std::string::npos);
  CHECK(s.out.find("FAIL") == std::string::npos);
  const Outcome f = invoke({"verify", "facts", "--k-max", "200", "--qr-k-max", "100"});
  CHECK(f.code == 0);
  const Outcome p = invoke({"verify", "properties", "--samples", "100", "--i-k-max", "50", "--i-f-k-max", "8"});
  CHECK(p.code == 0);
}
