#include "fermatec/cli.hpp"

#include <algorithm>
#include <atomic>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>

#include "fermatec/oracle.hpp"

namespace fermatec::cli {

namespace {

constexpr std::uint64_t kGuardFormGH = 100000;

std::string format_ms(double ms) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << ms;
  return os.str();
}

struct TestCommand {
  std::string form;
  std::string k;
  std::string method = "auto";
  bool trace = false;
  bool json = false;
  std::uint64_t max_k = 14;
};

struct VerifyCommand {
  std::string suite;
  std::uint64_t p_max = 10000;
  std::uint64_t k_max = 10000;
  std::uint64_t qr_k_max = 600;
  std::uint64_t samples = 500;
  std::uint64_t seed = 0x5eed;
  std::uint64_t i_unit_k_max = 1000;
  std::uint64_t i_unit_f_k_max = 16;
};

struct BenchCommand {
  std::string form;
  std::string k;
  std::string methods = "auto";
  unsigned jobs = 1;
  std::uint64_t max_k = 14;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

Form require_form(const std::string& text) {
  auto form = parse_form(text);
  if (!form) throw UsageError("unknown form '" + text + "' (expected f, g or h)");
  return *form;
}

Method require_method(Form form, const std::string& text) {
  auto method = parse_method(text);
  if (!method) throw UsageError("unknown method '" + text + "' (expected eta, double, pepin or auto)");
  if (form != Form::F && (*method == Method::Double || *method == Method::Pepin)) {
    throw UsageError("method " + text + " applies to form f only");
  }
  return *method;
}

void check_feasible(Form form, std::uint64_t k_last, std::uint64_t max_k) {
  const std::uint64_t cap = form == Form::F ? max_k : kGuardFormGH;
  if (k_last > cap) {
    throw UsageError("k = " + std::to_string(k_last) + " exceeds the guard " + std::to_string(cap) +
                     (form == Form::F ? " for form f (raise with --max-k)" : ""));
  }
  if (form == Form::F && k_last > 32) throw UsageError("form f supports k <= 32");
}

std::string describe(const TestReport& report) {
  std::ostringstream os;
  os << form_letter(report.form) << '_' << report.k << " (" << report.digits << " digits) "
     << method_name(report.method) << ": " << report.verdict.label();
  const Verdict& v = report.verdict;
  if (v.is_composite()) {
    os << " (" << reason_name(v.reason());
    if (v.witness()) os << ' ' << v.witness()->to_decimal();
    os << ')';
  } else if (v.is_not_applicable()) {
    os << " (" << v.explanation() << ')';
  } else if (report.accepted_as) {
    os << " (final point " << *report.accepted_as << ')';
  }
  os << " [iterations=" << report.iterations << ", elapsed_ms=" << format_ms(report.elapsed_ms) << ']';
  return os.str();
}

std::string render_trace(const Trace& trace) {
  std::ostringstream os;
  os << "trace: ";
  const auto head = trace.head();
  const auto tail = trace.tail();
  for (std::size_t i = 0; i < head.size(); ++i) os << (i ? ", " : "") << head[i];
  if (trace.truncated()) os << ", ...";
  for (const auto& t : tail) os << ", " << t;
  if (trace.truncated()) os << " (" << trace.total() << " entries)";
  return os.str();
}

int worst(int a, int b) { return std::max(a, b); }

int cmd_test(const TestCommand& cmd, std::ostream& out) {
  const Form form = require_form(cmd.form);
  const Method method = require_method(form, cmd.method);
  const auto [k_first, k_last] = parse_k_range(cmd.k);
  check_feasible(form, k_last, cmd.max_k);
  if (cmd.trace && cmd.json) throw UsageError("--trace cannot be combined with --json");
  if (cmd.trace && resolve_method(form, method) == Method::Pepin) throw UsageError("pepin has no x-coordinate trace");

  int code = kExitPrime;
  RunOptions options;
  options.trace = cmd.trace;
  for (std::uint64_t k = k_first; k <= k_last; ++k) {
    const TestReport report = run_test(form, k, method, options);
    if (cmd.json) {
      out << nlohmann::json(to_record(report)).dump() << '\n';
    } else {
      out << describe(report) << '\n';
      if (report.trace) out << render_trace(*report.trace) << '\n';
    }
    code = worst(code, exit_code_for(report.verdict));
  }
  return code;
}

void print_check(std::ostream& out, bool pass, const std::string& what) {
  out << (pass ? "PASS " : "FAIL ") << what << '\n';
}

bool verify_structure(const VerifyCommand& cmd, std::ostream& out) {
  bool all = true;
  const oracle::PointCountReport counts = oracle::verify_point_counts(cmd.p_max);
  std::ostringstream what;
  what << "#E = p + 1 - 2a for " << counts.curves << " curves over " << counts.primes
       << " primes p = 1 mod 4 below " << cmd.p_max;
  print_check(out, counts.ok(), what.str());
  for (const auto& bad : counts.mismatches) {
    out << "  mismatch p=" << bad.p << " m=" << bad.m << ": " << bad.count << " != " << bad.expected << '\n';
  }
  all = all && counts.ok();

  struct Expected {
    std::uint64_t p;
    std::uint64_t n1;
    std::uint64_t n2;
    const char* label;
  };
  const Expected cases[] = {
      {17, 4, 4, "F_2"}, {13, 2, 4, "G_1"}, {41, 4, 8, "G_2"}, {5, 2, 4, "H_1"}, {113, 8, 16, "H_3"},
  };
  for (const auto& c : cases) {
    std::ostringstream line;
    line << "E(" << c.label << " = " << c.p << ") = Z_" << c.n1 << " + Z_" << c.n2;
    bool pass = false;
    try {
      const oracle::GroupStructure gs = oracle::group_structure(c.p, 1);
      pass = gs.n1 == Natural(c.n1) && gs.n2 == Natural(c.n2);
      if (!pass) line << " (got Z_" << gs.n1 << " + Z_" << gs.n2 << ')';
    } catch (const oracle::StructureMismatch& e) {
      line << " (" << e.what() << ')';
    }
    print_check(out, pass, line.str());
    all = all && pass;
  }
  return all;
}

bool verify_facts(const VerifyCommand& cmd, std::ostream& out) {
  const oracle::ResidueFactReport report = oracle::verify_residue_facts(cmd.k_max, cmd.qr_k_max);
  std::ostringstream div;
  div << "divisibility facts for k <= " << cmd.k_max << " (" << report.divisibility_checks << " checks)";
  std::ostringstream qr;
  qr << "quadratic-character facts for " << report.prime_g.size() << " prime G_k and " << report.prime_h.size()
     << " prime H_k, k <= " << std::min(cmd.k_max, cmd.qr_k_max) << " (" << report.residue_checks << " checks)";
  bool div_ok = true;
  bool qr_ok = true;
  for (const auto& v : report.violations) {
    (v.fact.find("QNR") != std::string::npos || v.fact.find("QR") != std::string::npos ? qr_ok : div_ok) = false;
  }
  print_check(out, div_ok, div.str());
  print_check(out, qr_ok, qr.str());
  for (const auto& v : report.violations) out << "  violation: " << v.fact << " at k=" << v.k << '\n';
  return report.ok();
}

bool verify_properties(const VerifyCommand& cmd, std::ostream& out) {
  bool all = true;
  std::uint64_t checked = 0;
  bool i_ok = true;
  for (Form form : {Form::F, Form::G, Form::H}) {
    const std::uint64_t limit = form == Form::F ? cmd.i_unit_f_k_max : cmd.i_unit_k_max;
    for (std::uint64_t k = 1; k <= limit; ++k) {
      const ModulusRef n = make_modulus(build_modulus(form, k));
      const Residue i = i_unit(n).i;
      ++checked;
      if (!(i * i == -Residue(n, 1))) {
        i_ok = false;
        out << "  i_unit fails for " << n->form()->name() << '\n';
      }
    }
  }
  std::ostringstream iline;
  iline << "i^2 = -1 for " << checked << " moduli (F: k <= " << cmd.i_unit_f_k_max << ", G/H: k <= "
        << cmd.i_unit_k_max << ')';
  print_check(out, i_ok, iline.str());
  all = all && i_ok;

  const oracle::PropertyReport props = oracle::verify_curve_properties(cmd.samples, cmd.seed);
  const auto line = [&](std::uint64_t hits, const char* what) {
    std::ostringstream os;
    os << what << " (" << hits << '/' << props.samples << ')';
    print_check(out, hits == props.samples, os.str());
    all = all && hits == props.samples;
  };
  line(props.eta_matches_affine, "eta_step matches x(P + [i]P)");
  line(props.double_matches_affine, "double_step matches x(2P)");
  line(props.eta_squared_is_minus_double, "eta(eta(x)) = -x(2P)");
  line(props.eta_image_is_square, "x(eta P) is a square");
  for (const auto& f : props.failures) out << "  " << f << '\n';
  return all && props.ok();
}

int cmd_verify(const VerifyCommand& cmd, std::ostream& out) {
  bool pass = false;
  if (cmd.suite == "structure") {
    if (cmd.p_max > oracle::kEnumerationBound) throw UsageError("--p-max is limited to 2^20");
    pass = verify_structure(cmd, out);
  } else if (cmd.suite == "facts") {
    pass = verify_facts(cmd, out);
  } else if (cmd.suite == "properties") {
    pass = verify_properties(cmd, out);
  } else {
    throw UsageError("unknown suite '" + cmd.suite + "' (expected structure, facts or properties)");
  }
  out << (pass ? "verify " + cmd.suite + ": pass" : "verify " + cmd.suite + ": FAIL") << '\n';
  return pass ? 0 : 1;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int cmd_bench(const BenchCommand& cmd, std::ostream& out) {
  const Form form = require_form(cmd.form);
  const auto [k_first, k_last] = parse_k_range(cmd.k);
  check_feasible(form, k_last, cmd.max_k);
  std::vector<Method> methods;
  for (const auto& name : split_list(cmd.methods)) methods.push_back(require_method(form, name));
  if (methods.empty()) throw UsageError("--methods is empty");

  struct Cell {
    std::uint64_t k;
    Method method;
    std::string row;
  };
  std::vector<Cell> cells;
  for (std::uint64_t k = k_first; k <= k_last; ++k) {
    for (Method m : methods) cells.push_back({k, m, {}});
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx = next++; idx < cells.size(); idx = next++) {
      Cell& cell = cells[idx];
      (void)run_test(form, cell.k, cell.method);  // warm-up
      const TestReport report = run_test(form, cell.k, cell.method);
      std::ostringstream row;
      row << form_letter(form) << ',' << cell.k << ',' << method_name(report.method) << ',' << report.iterations
          << ',' << format_ms(report.elapsed_ms) << ',' << report.verdict.label();
      cell.row = row.str();
    }
  };
  const unsigned jobs = std::max(1U, cmd.jobs);
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  out << "form,k,method,iterations,elapsed_ms,verdict\n";
  for (const Cell& cell : cells) out << cell.row << '\n';
  return 0;
}

}  // namespace

ReportRecord to_record(const TestReport& report) {
  ReportRecord r;
  r.form = std::string(1, form_letter(report.form));
  r.k = report.k;
  r.digits = report.digits;
  r.method = method_name(report.method);
  r.verdict = report.verdict.label();
  if (report.verdict.is_composite() && report.verdict.witness()) r.witness = report.verdict.witness()->to_decimal();
  r.iterations = report.iterations;
  r.elapsed_ms = report.elapsed_ms;
  return r;
}

void to_json(nlohmann::json& j, const ReportRecord& r) {
  j = nlohmann::json{{"form", r.form},         {"k", r.k},
                     {"digits", r.digits},     {"method", r.method},
                     {"verdict", r.verdict},   {"iterations", r.iterations},
                     {"elapsed_ms", r.elapsed_ms}};
  if (r.witness) j["witness"] = *r.witness;
}

void from_json(const nlohmann::json& j, ReportRecord& r) {
  static const std::vector<std::string> kRequired = {"form",    "k",          "digits",    "method",
                                                     "verdict", "iterations", "elapsed_ms"};
  if (!j.is_object()) throw std::invalid_argument("report record must be a JSON object");
  for (const auto& key : kRequired) {
    if (!j.contains(key)) throw std::invalid_argument("report record lacks '" + key + "'");
  }
  for (const auto& item : j.items()) {
    if (item.key() != "witness" && std::find(kRequired.begin(), kRequired.end(), item.key()) == kRequired.end()) {
      throw std::invalid_argument("unexpected report field '" + item.key() + "'");
    }
  }
  try {
    r.form = j.at("form").get<std::string>();
    r.k = j.at("k").get<std::uint64_t>();
    r.digits = j.at("digits").get<std::uint64_t>();
    r.method = j.at("method").get<std::string>();
    r.verdict = j.at("verdict").get<std::string>();
    r.iterations = j.at("iterations").get<std::uint64_t>();
    r.elapsed_ms = j.at("elapsed_ms").get<double>();
    r.witness = j.contains("witness") ? std::optional(j.at("witness").get<std::string>()) : std::nullopt;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed report record: ") + e.what());
  }
  if (r.verdict != "prime" && r.verdict != "composite" && r.verdict != "not-applicable") {
    throw std::invalid_argument("unknown verdict '" + r.verdict + "'");
  }
  if (r.witness && r.verdict != "composite") throw std::invalid_argument("witness on a non-composite verdict");
}

int exit_code_for(const Verdict& verdict) {
  switch (verdict.kind()) {
    case Verdict::Kind::Prime:
      return kExitPrime;
    case Verdict::Kind::Composite:
      return kExitComposite;
    case Verdict::Kind::NotApplicable:
      return kExitOther;
  }
  return kExitOther;
}

std::pair<std::uint64_t, std::uint64_t> parse_k_range(const std::string& text) {
  auto parse_one = [&](const std::string& s) {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }) || s.size() > 18) {
      throw std::invalid_argument("invalid k '" + text + "'");
    }
    return std::stoull(s);
  };
  const auto dots = text.find("..");
  std::uint64_t first = 0;
  std::uint64_t last = 0;
  if (dots == std::string::npos) {
    first = last = parse_one(text);
  } else {
    first = parse_one(text.substr(0, dots));
    last = parse_one(text.substr(dots + 2));
  }
  if (first == 0 || first > last) throw std::invalid_argument("invalid k range '" + text + "'");
  return {first, last};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Elliptic-curve primality tests for 2^(2^k)+1, 2^(2k+1)±2^(k+1)+1", "fermatec"};
  app.require_subcommand(1);

  TestCommand test;
  auto* test_cmd = app.add_subcommand("test", "Run a primality test on F_k, G_k or H_k");
  test_cmd->add_option("--form", test.form, "f, g or h")->required();
  test_cmd->add_option("--k", test.k, "k or an inclusive range a..b")->required();
  test_cmd->add_option("--method", test.method, "eta, double, pepin or auto")->capture_default_str();
  test_cmd->add_flag("--trace", test.trace, "Print the visited x-coordinates");
  test_cmd->add_flag("--json", test.json, "One JSON object per run");
  test_cmd->add_option("--max-k", test.max_k, "Guard on k for form f")->capture_default_str();

  VerifyCommand verify;
  auto* verify_cmd = app.add_subcommand("verify", "Run an oracle verification suite");
  verify_cmd->add_option("suite", verify.suite, "structure, facts or properties")->required();
  verify_cmd->add_option("--p-max", verify.p_max, "structure: primes below this bound")->capture_default_str();
  verify_cmd->add_option("--k-max", verify.k_max, "facts: divisibility scan bound")->capture_default_str();
  verify_cmd->add_option("--qr-k-max", verify.qr_k_max, "facts: residue checks bound")->capture_default_str();
  verify_cmd->add_option("--samples", verify.samples, "properties: random points")->capture_default_str();
  verify_cmd->add_option("--seed", verify.seed, "properties: generator seed")->capture_default_str();
  verify_cmd->add_option("--i-k-max", verify.i_unit_k_max, "properties: i_unit bound for g/h")->capture_default_str();
  verify_cmd->add_option("--i-f-k-max", verify.i_unit_f_k_max, "properties: i_unit bound for f")
      ->capture_default_str();

  BenchCommand bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time methods over a range of k; CSV on stdout");
  bench_cmd->add_option("--form", bench.form, "f, g or h")->required();
  bench_cmd->add_option("--k", bench.k, "k or an inclusive range a..b")->required();
  bench_cmd->add_option("--methods", bench.methods, "Comma-separated methods")->capture_default_str();
  bench_cmd->add_option("--jobs", bench.jobs, "Worker threads")->capture_default_str();
  bench_cmd->add_option("--max-k", bench.max_k, "Guard on k for form f")->capture_default_str();

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("fermatec");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitOther;
  }

  try {
    if (test_cmd->parsed()) return cmd_test(test, out);
    if (verify_cmd->parsed()) return cmd_verify(verify, out);
    if (bench_cmd->parsed()) return cmd_bench(bench, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitOther;
}

}  // namespace fermatec::cli
