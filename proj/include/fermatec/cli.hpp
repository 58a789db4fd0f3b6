#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fermatec/primality.hpp"

namespace fermatec::cli {

// Exit codes shared by all subcommands.
inline constexpr int kExitPrime = 0;
inline constexpr int kExitComposite = 1;
inline constexpr int kExitOther = 2;  // not applicable, usage error, infeasible

// One machine-readable test result.
struct ReportRecord {
  std::string form;  // "F", "G", "H"
  std::uint64_t k = 0;
  std::uint64_t digits = 0;
  std::string method;   // resolved method name
  std::string verdict;  // "prime", "composite", "not-applicable"
  std::optional<std::string> witness;  // factor or known divisor
  std::uint64_t iterations = 0;
  double elapsed_ms = 0.0;

  friend bool operator==(const ReportRecord&, const ReportRecord&) = default;
};

ReportRecord to_record(const TestReport& report);

// Exactly the record's fields; "witness" only when present.
void to_json(nlohmann::json& j, const ReportRecord& r);
// Throws std::invalid_argument on missing, extra or ill-typed fields, or on a
// witness that does not match the verdict.
void from_json(const nlohmann::json& j, ReportRecord& r);

int exit_code_for(const Verdict& verdict);

// "7" or "2..9" (inclusive); throws std::invalid_argument otherwise.
std::pair<std::uint64_t, std::uint64_t> parse_k_range(const std::string& text);

// Runs the command line (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fermatec::cli
