#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fermatec/curve.hpp"
#include "fermatec/modular.hpp"
#include "fermatec/natural.hpp"

namespace fermatec {

enum class Method { Eta, Double, Pepin, Auto };

std::optional<Method> parse_method(std::string_view text);
std::string method_name(Method method);  // "eta", "double", "pepin", "auto"

// Auto resolves to doubling for F (half the steps) and eta for G/H.
Method resolve_method(Form form, Method method);

enum class CompositeReason { NonzeroFinal, FactorFound, KnownDivisor, PepinFailure };

std::string reason_name(CompositeReason reason);

class Verdict {
 public:
  enum class Kind { Prime, Composite, NotApplicable };

  static Verdict prime() { return Verdict(Kind::Prime); }
  static Verdict nonzero_final();
  static Verdict pepin_failure();
  // Throws std::logic_error unless 1 < g < n and g | n.
  static Verdict factor_found(Natural g, const Natural& n);
  // Throws std::logic_error unless d | n.
  static Verdict known_divisor(std::uint64_t d, const Natural& n);
  static Verdict not_applicable(std::string explanation);

  Kind kind() const { return kind_; }
  bool is_prime() const { return kind_ == Kind::Prime; }
  bool is_composite() const { return kind_ == Kind::Composite; }
  bool is_not_applicable() const { return kind_ == Kind::NotApplicable; }

  // Precondition: is_composite().
  CompositeReason reason() const { return *reason_; }
  // The divisor for FactorFound / KnownDivisor.
  const std::optional<Natural>& witness() const { return witness_; }
  const std::string& explanation() const { return explanation_; }

  // "prime", "composite", "not-applicable"
  std::string label() const;

 private:
  explicit Verdict(Kind kind) : kind_(kind) {}

  Kind kind_;
  std::optional<CompositeReason> reason_;
  std::optional<Natural> witness_;
  std::string explanation_;
};

// Curve and starting point for an eta or doubling run.
struct TestParams {
  Natural m_root;  // m = m_root^4
  Natural x0;
  std::uint64_t iterations = 0;
  std::string accept_set;
};

// Raised by select_params when the fallback search finds nothing below its
// bounds; the caller should fall back to a classical test.
class SearchExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SearchBounds {
  std::uint64_t max_root = 1000;
  std::uint64_t max_x0 = 10000;
};

// Residue-class divisor that settles G_k / H_k without running the curve:
// 5 | G_k iff k ≡ 0,3 (mod 4); 5 | H_k iff k ≡ 1,2 (mod 4); 13 | H_k when
// k ≡ 4 (mod 12). Never fires for k = 1.
std::optional<std::uint64_t> known_divisor(Form form, std::uint64_t k);

// Curve and start point per residue class of k. Throws std::invalid_argument
// when (form, k) is settled by known_divisor or k = 1.
TestParams select_params(Form form, std::uint64_t k, const FormModulus& n, const SearchBounds& bounds = {});

// Bounded record of visited x-states: the first and last `limit` entries.
class Trace {
 public:
  explicit Trace(std::size_t limit = 64) : limit_(limit) {}

  void push(const XState& state);

  std::size_t total() const { return total_; }
  bool truncated() const { return total_ > head_.size() + tail_.size(); }
  const std::vector<std::string>& head() const { return head_; }
  std::vector<std::string> tail() const { return {tail_.begin(), tail_.end()}; }
  // head followed by tail; an elided middle is not marked.
  std::vector<std::string> entries() const;

 private:
  std::size_t limit_;
  std::size_t total_ = 0;
  std::vector<std::string> head_;
  std::deque<std::string> tail_;
};

struct RunOptions {
  bool trace = false;
  std::size_t trace_limit = 64;
};

struct TestReport {
  Form form{};
  std::uint64_t k = 0;
  std::size_t digits = 0;
  Method method = Method::Eta;
  Verdict verdict = Verdict::not_applicable("");
  std::uint64_t iterations = 0;
  std::optional<TestParams> params;
  std::optional<Trace> trace;
  // Which element of E[2] \ {inf} the final state matched, if accepted.
  std::optional<std::string> accepted_as;
  double elapsed_ms = 0.0;
};

// Prime iff 3^((F_k - 1)/2) ≡ -1 (mod F_k).
Verdict pepin_test(std::uint64_t k);

// x0 = 5 on y^2 = x^3 - x, 2^k - 1 eta steps; prime iff the last state is (0,0).
TestReport fermat_eta_test(std::uint64_t k, const RunOptions& options = {});

// x0 = 5 on y^2 = x^3 - x, 2^(k-1) - 1 doublings; prime iff the last x is ±1.
TestReport fermat_double_test(std::uint64_t k, const RunOptions& options = {});

// 2k - 1 eta steps; prime iff the last state is a nontrivial 2-torsion point.
TestReport gk_test(std::uint64_t k, const RunOptions& options = {});
TestReport hk_test(std::uint64_t k, const RunOptions& options = {});

// Dispatches on (form, method). Pepin is wrapped into a report with its
// squaring count as iterations. Throws std::invalid_argument for doubling or
// Pepin on G/H.
TestReport run_test(Form form, std::uint64_t k, Method method, const RunOptions& options = {});

}  // namespace fermatec
