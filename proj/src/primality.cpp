#include "fermatec/primality.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace fermatec {

namespace {

struct TableRow {
  std::uint64_t residue;
  std::uint64_t m_root;
  std::uint64_t x0;
};

// H_k starting values by k mod 48 ...
constexpr std::array<TableRow, 6> kHTable48 = {{
    {8, 19, 8 * 13},
    {12, 20, 5 * 17},
    {20, 2, 13},
    {24, 21, 7 * 257},
    {36, 25, 9 * 673},
    {44, 43, 673},
}};

// ... and, for k ≡ 0, 32 (mod 48), by k mod 144. k ≡ 0 (mod 144) has no row.
constexpr std::array<TableRow, 5> kHTable144 = {{
    {32, 6, 73},
    {48, 18, 2 * 3 * 19},
    {80, 5, 13},
    {96, 99, 3 * 433},
    {128, 65, 2 * 13},
}};

constexpr const char* kTorsionAcceptSet = "x in {0, +sqrt(m), -sqrt(m)}";

std::size_t decimal_digits(const Natural& n) {
  // Exact conversion is quadratic; past ~20k bits the log estimate is used.
  // N is never a power of ten, so floor(log10 N) + 1 from the bit length is
  // off only when N sits within rounding distance of one.
  if (n.bit_length() <= 20000) return n.to_decimal().size();
  return static_cast<std::size_t>(std::floor(static_cast<double>(n.bit_length() - 1) * std::log10(2.0))) + 1;
}

double elapsed_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

TestReport make_report(Form form, std::uint64_t k, Method method, const FormModulus& n, const RunOptions& options) {
  TestReport report;
  report.form = form;
  report.k = k;
  report.digits = decimal_digits(n.value);
  report.method = method;
  if (options.trace) report.trace.emplace(options.trace_limit);
  return report;
}

// Checks the curve root and start point against N. On success returns the
// curve and the initial state; otherwise fills in the verdict.
std::optional<std::pair<CurveParams, XState>> prepare_curve(const ModulusRef& modulus, const TestParams& params,
                                                            TestReport& report) {
  const Natural& n = modulus->value();
  const Natural root_gcd = gcd(params.m_root, n);
  if (!root_gcd.is_one()) {
    report.verdict = root_gcd < n ? Verdict::factor_found(root_gcd, n)
                                  : Verdict::not_applicable("curve parameter m vanishes modulo N");
    return std::nullopt;
  }
  Residue x0(modulus, params.x0);
  if (x0.is_zero()) {
    report.verdict = Verdict::not_applicable("starting x-coordinate vanishes modulo N");
    return std::nullopt;
  }
  const Natural x0_gcd = gcd(x0.value(), n);
  if (!x0_gcd.is_one()) {
    report.verdict = Verdict::factor_found(x0_gcd, n);
    return std::nullopt;
  }
  return std::pair{CurveParams::from_fourth_root(modulus, params.m_root), XState::finite(std::move(x0))};
}

// Applies `step` exactly `steps` times. A FactorFound or an early collapse
// to (0,0)/infinity ends the run as composite. Returns the final state when
// all steps completed.
template <class Step>
std::optional<XState> iterate(XState state, std::uint64_t steps, const Natural& n, Step&& step, TestReport& report) {
  if (report.trace) report.trace->push(state);
  for (std::uint64_t j = 1; j <= steps; ++j) {
    StepResult next = step(state);
    report.iterations = j;
    if (auto* factor = std::get_if<FactorFound>(&next)) {
      report.verdict = Verdict::factor_found(std::move(factor->g), n);
      return std::nullopt;
    }
    state = std::get<XState>(std::move(next));
    if (report.trace) report.trace->push(state);
    if (j < steps && !state.is_finite()) {
      report.verdict = Verdict::nonzero_final();
      return std::nullopt;
    }
  }
  return state;
}

// Shared body of the G_k and H_k tests.
TestReport torsion_test(Form form, std::uint64_t k, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const FormModulus n = build_modulus(form, k);
  TestReport report = make_report(form, k, Method::Eta, n, options);
  const Natural& value = n.value;

  if (k == 1) {
    report.verdict = Verdict::not_applicable(n.name() + " = " + value.to_decimal() +
                                             " is prime; the curve criterion needs k >= 2");
  } else if (auto d = known_divisor(form, k)) {
    report.verdict = Verdict::known_divisor(*d, value);
  } else {
    TestParams params = select_params(form, k, n);
    report.params = params;
    ModulusRef modulus = make_modulus(n);
    if (auto prepared = prepare_curve(modulus, params, report)) {
      const QuarticUnit i = i_unit(modulus);
      const CurveParams& cp = prepared->first;
      auto last = iterate(
          std::move(prepared->second), params.iterations, value,
          [&](const XState& s) { return eta_step(s, cp, i); }, report);
      if (last) {
        if (last->is_zero_point()) {
          report.accepted_as = "(0,0)";
        } else if (last->is_finite() && last->x() == cp.sqrt_m) {
          report.accepted_as = "(+sqrt(m),0)";
        } else if (last->is_finite() && last->x() == -cp.sqrt_m) {
          report.accepted_as = "(-sqrt(m),0)";
        }
        report.verdict = report.accepted_as ? Verdict::prime() : Verdict::nonzero_final();
      }
    }
  }
  report.elapsed_ms = elapsed_since(start);
  return report;
}

TestReport fermat_curve_test(std::uint64_t k, Method method, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const FormModulus n = build_modulus(Form::F, k);
  TestReport report = make_report(Form::F, k, method, n, options);

  if (k == 1) {
    report.verdict = Verdict::not_applicable("F_1 = 5 is prime; the start point x0 = 5 vanishes modulo F_1");
    report.elapsed_ms = elapsed_since(start);
    return report;
  }

  TestParams params = select_params(Form::F, k, n);
  if (method == Method::Double) {
    params.iterations = (std::uint64_t{1} << (k - 1)) - 1;
    params.accept_set = "x in {+sqrt(m), -sqrt(m)}";
  }
  report.params = params;
  ModulusRef modulus = make_modulus(n);
  if (auto prepared = prepare_curve(modulus, params, report)) {
    const CurveParams& cp = prepared->first;
    std::optional<XState> last;
    if (method == Method::Eta) {
      const QuarticUnit i = i_unit(modulus);
      last = iterate(
          std::move(prepared->second), params.iterations, n.value,
          [&](const XState& s) { return eta_step(s, cp, i); }, report);
      if (last) {
        if (last->is_zero_point()) report.accepted_as = "(0,0)";
      }
    } else {
      last = iterate(
          std::move(prepared->second), params.iterations, n.value,
          [&](const XState& s) { return double_step(s, cp); }, report);
      if (last && last->is_finite()) {
        if (last->x() == cp.sqrt_m) report.accepted_as = "(+sqrt(m),0)";
        if (last->x() == -cp.sqrt_m) report.accepted_as = "(-sqrt(m),0)";
      }
    }
    if (last) report.verdict = report.accepted_as ? Verdict::prime() : Verdict::nonzero_final();
  }
  report.elapsed_ms = elapsed_since(start);
  return report;
}

bool is_prime_small(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

}  // namespace

std::optional<Method> parse_method(std::string_view text) {
  if (text == "eta") return Method::Eta;
  if (text == "double") return Method::Double;
  if (text == "pepin") return Method::Pepin;
  if (text == "auto") return Method::Auto;
  return std::nullopt;
}

std::string method_name(Method method) {
  switch (method) {
    case Method::Eta:
      return "eta";
    case Method::Double:
      return "double";
    case Method::Pepin:
      return "pepin";
    case Method::Auto:
      return "auto";
  }
  return "?";
}

Method resolve_method(Form form, Method method) {
  if (method != Method::Auto) return method;
  return form == Form::F ? Method::Double : Method::Eta;
}

std::string reason_name(CompositeReason reason) {
  switch (reason) {
    case CompositeReason::NonzeroFinal:
      return "nonzero-final";
    case CompositeReason::FactorFound:
      return "factor-found";
    case CompositeReason::KnownDivisor:
      return "known-divisor";
    case CompositeReason::PepinFailure:
      return "pepin-failure";
  }
  return "?";
}

Verdict Verdict::nonzero_final() {
  Verdict v(Kind::Composite);
  v.reason_ = CompositeReason::NonzeroFinal;
  return v;
}

Verdict Verdict::pepin_failure() {
  Verdict v(Kind::Composite);
  v.reason_ = CompositeReason::PepinFailure;
  return v;
}

Verdict Verdict::factor_found(Natural g, const Natural& n) {
  if (g <= Natural(1) || g >= n || !(n % g).is_zero()) {
    throw std::logic_error("factor " + g.to_decimal() + " is not a proper divisor of N");
  }
  Verdict v(Kind::Composite);
  v.reason_ = CompositeReason::FactorFound;
  v.witness_ = std::move(g);
  return v;
}

Verdict Verdict::known_divisor(std::uint64_t d, const Natural& n) {
  if (d == 0 || n.mod_u64(d) != 0) throw std::logic_error("known divisor does not divide N");
  Verdict v(Kind::Composite);
  v.reason_ = CompositeReason::KnownDivisor;
  v.witness_ = Natural(d);
  return v;
}

Verdict Verdict::not_applicable(std::string explanation) {
  Verdict v(Kind::NotApplicable);
  v.explanation_ = std::move(explanation);
  return v;
}

std::string Verdict::label() const {
  switch (kind_) {
    case Kind::Prime:
      return "prime";
    case Kind::Composite:
      return "composite";
    case Kind::NotApplicable:
      return "not-applicable";
  }
  return "?";
}

std::optional<std::uint64_t> known_divisor(Form form, std::uint64_t k) {
  if (k < 2) return std::nullopt;
  switch (form) {
    case Form::F:
      return std::nullopt;
    case Form::G:
      if (k % 4 == 0 || k % 4 == 3) return 5;
      return std::nullopt;
    case Form::H:
      if (k % 4 == 1 || k % 4 == 2) return 5;
      if (k % 12 == 4) return 13;
      return std::nullopt;
  }
  return std::nullopt;
}

TestParams select_params(Form form, std::uint64_t k, const FormModulus& n, const SearchBounds& bounds) {
  if (k < 2) throw std::invalid_argument("curve tests need k >= 2");
  if (known_divisor(form, k)) throw std::invalid_argument(n.name() + " is settled by a known divisor");

  TestParams params;
  params.iterations = 2 * k - 1;
  params.accept_set = kTorsionAcceptSet;
  switch (form) {
    case Form::F:
      params.m_root = Natural(1);
      params.x0 = Natural(5);
      params.iterations = (std::uint64_t{1} << k) - 1;
      params.accept_set = "x = 0";
      return params;
    case Form::G:
      if (k % 4 == 2) {
        params.m_root = Natural(1);
        params.x0 = Natural(7);
      } else {
        params.m_root = Natural(3);
        params.x0 = Natural(5);
      }
      return params;
    case Form::H:
      break;
  }

  if (k % 4 == 3) {
    params.m_root = Natural(1);
    params.x0 = Natural(5);
    return params;
  }
  for (const TableRow& row : kHTable48) {
    if (k % 48 == row.residue) {
      params.m_root = Natural(row.m_root);
      params.x0 = Natural(row.x0);
      return params;
    }
  }
  for (const TableRow& row : kHTable144) {
    if (k % 144 == row.residue) {
      params.m_root = Natural(row.m_root);
      params.x0 = Natural(row.x0);
      return params;
    }
  }

  // k ≡ 0 (mod 144): search for a fourth root c (5 or a prime ≡ 3 mod 4)
  // and the smallest x0 with (x0 | N) = -1 and (x0^3 - m x0 | N) = +1.
  const ModulusRef modulus = make_modulus(n);
  for (std::uint64_t c = 3; c <= bounds.max_root; ++c) {
    if (!(c == 5 || (c % 4 == 3 && is_prime_small(c)))) continue;
    if (n.value.mod_u64(c) == 0) continue;
    const Residue root(modulus, c);
    const Residue m = (root * root) * (root * root);
    for (std::uint64_t x = 2; x <= bounds.max_x0; ++x) {
      if (jacobi(Natural(x), n.value) != -1) continue;
      const Residue xr(modulus, x);
      if (jacobi(((xr * xr - m) * xr).value(), n.value) != 1) continue;
      params.m_root = Natural(c);
      params.x0 = Natural(x);
      return params;
    }
  }
  throw SearchExhausted("no starting point found for " + n.name());
}

void Trace::push(const XState& state) {
  ++total_;
  if (head_.size() < limit_) {
    head_.push_back(state.render());
    return;
  }
  tail_.push_back(state.render());
  if (tail_.size() > limit_) tail_.pop_front();
}

std::vector<std::string> Trace::entries() const {
  std::vector<std::string> out = head_;
  out.insert(out.end(), tail_.begin(), tail_.end());
  return out;
}

Verdict pepin_test(std::uint64_t k) {
  const FormModulus n = build_modulus(Form::F, k);
  const ModulusRef modulus = make_modulus(n);
  const Residue r = pow_mod(Residue(modulus, 3), (n.value - Natural(1)) >> 1);
  if (r == -Residue(modulus, 1)) return Verdict::prime();
  return Verdict::pepin_failure();
}

TestReport fermat_eta_test(std::uint64_t k, const RunOptions& options) {
  return fermat_curve_test(k, Method::Eta, options);
}

TestReport fermat_double_test(std::uint64_t k, const RunOptions& options) {
  return fermat_curve_test(k, Method::Double, options);
}

TestReport gk_test(std::uint64_t k, const RunOptions& options) { return torsion_test(Form::G, k, options); }

TestReport hk_test(std::uint64_t k, const RunOptions& options) { return torsion_test(Form::H, k, options); }

TestReport run_test(Form form, std::uint64_t k, Method method, const RunOptions& options) {
  method = resolve_method(form, method);
  if (form != Form::F && method != Method::Eta) {
    throw std::invalid_argument("method " + method_name(method) + " applies to form F only");
  }
  switch (form) {
    case Form::F:
      break;
    case Form::G:
      return gk_test(k, options);
    case Form::H:
      return hk_test(k, options);
  }
  if (method != Method::Pepin) return fermat_curve_test(k, method, options);

  const auto start = std::chrono::steady_clock::now();
  const FormModulus n = build_modulus(Form::F, k);
  TestReport report = make_report(Form::F, k, Method::Pepin, n, RunOptions{});
  report.verdict = pepin_test(k);
  report.iterations = (std::uint64_t{1} << k) - 1;
  report.elapsed_ms = elapsed_since(start);
  return report;
}

}  // namespace fermatec
