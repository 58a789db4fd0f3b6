#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "fermatec/oracle.hpp"
#include "fermatec/primality.hpp"

using namespace fermatec;

namespace {

using Strings = std::vector<std::string>;

Strings traced(Form form, std::uint64_t k, Method method) {
  RunOptions options;
  options.trace = true;
  const TestReport r = run_test(form, k, method, options);
  REQUIRE(r.trace.has_value());
  return r.trace->entries();
}

bool known_fermat_prime(std::uint64_t k) { return k <= 4; }

}  // namespace

TEST_CASE("method names") {
  CHECK(parse_method("eta") == Method::Eta);
  CHECK(parse_method("double") == Method::Double);
  CHECK(parse_method("pepin") == Method::Pepin);
  CHECK(parse_method("auto") == Method::Auto);
  CHECK_FALSE(parse_method("rabin").has_value());
  CHECK(resolve_method(Form::F, Method::Auto) == Method::Double);
  CHECK(resolve_method(Form::G, Method::Auto) == Method::Eta);
  CHECK(resolve_method(Form::H, Method::Auto) == Method::Eta);
  CHECK(method_name(Method::Double) == "double");
  CHECK(reason_name(CompositeReason::KnownDivisor) == "known-divisor");
}

TEST_CASE("verdict witnesses are validated") {
  const Natural f5 = build_modulus(Form::F, 5).value;
  const Verdict v = Verdict::factor_found(Natural(641), f5);
  CHECK(v.is_composite());
  CHECK(v.reason() == CompositeReason::FactorFound);
  CHECK(*v.witness() == Natural(641));
  CHECK(v.label() == "composite");
  CHECK_THROWS_AS(Verdict::factor_found(Natural(643), f5), std::logic_error);
  CHECK_THROWS_AS(Verdict::factor_found(Natural(1), f5), std::logic_error);
  CHECK_THROWS_AS(Verdict::factor_found(f5, f5), std::logic_error);
  CHECK(Verdict::known_divisor(5, Natural(145)).witness() == Natural(5));
  CHECK_THROWS_AS(Verdict::known_divisor(7, Natural(145)), std::logic_error);
  CHECK(Verdict::prime().label() == "prime");
  CHECK(Verdict::not_applicable("x").label() == "not-applicable");
}

TEST_CASE("known divisors") {
  CHECK(known_divisor(Form::G, 3) == 5u);
  CHECK(known_divisor(Form::G, 4) == 5u);
  CHECK_FALSE(known_divisor(Form::G, 2).has_value());
  CHECK_FALSE(known_divisor(Form::G, 5).has_value());
  CHECK(known_divisor(Form::H, 2) == 5u);
  CHECK(known_divisor(Form::H, 5) == 5u);
  CHECK(known_divisor(Form::H, 4) == 13u);
  CHECK(known_divisor(Form::H, 16) == 13u);
  CHECK_FALSE(known_divisor(Form::H, 3).has_value());
  CHECK_FALSE(known_divisor(Form::H, 1).has_value());
  CHECK_FALSE(known_divisor(Form::G, 1).has_value());
  CHECK_FALSE(known_divisor(Form::F, 7).has_value());
  for (std::uint64_t k = 2; k < 300; ++k) {
    for (Form form : {Form::G, Form::H}) {
      if (auto d = known_divisor(form, k)) {
        CHECK(build_modulus(form, k).value.mod_u64(*d) == 0);
      }
    }
  }
}

TEST_CASE("select_params per residue class") {
  auto params = [](Form form, std::uint64_t k) { return select_params(form, k, build_modulus(form, k)); };

  const TestParams g2 = params(Form::G, 2);
  CHECK(g2.m_root == Natural(1));
  CHECK(g2.x0 == Natural(7));
  CHECK(g2.iterations == 3);
  const TestParams g5 = params(Form::G, 5);
  CHECK(g5.m_root == Natural(3));
  CHECK(g5.x0 == Natural(5));
  CHECK(g5.iterations == 9);
  const TestParams h3 = params(Form::H, 3);
  CHECK(h3.m_root == Natural(1));
  CHECK(h3.x0 == Natural(5));

  const std::vector<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>> table = {
      {8, 19, 104},  {12, 20, 85},    {20, 2, 13},  {24, 21, 1799}, {36, 25, 6057},
      {44, 43, 673}, {32, 6, 73},     {48, 18, 114}, {80, 5, 13},   {96, 99, 1299},
      {128, 65, 26}, {56, 19, 104}, {176, 6, 73}};
  for (const auto& [k, c, x0] : table) {
    CAPTURE(k);
    const TestParams p = params(Form::H, k);
    CHECK(p.m_root == Natural(c));
    CHECK(p.x0 == Natural(x0));
    CHECK(p.iterations == 2 * k - 1);
  }

  CHECK(params(Form::F, 6).iterations == 63);
  CHECK(params(Form::F, 6).x0 == Natural(5));

  CHECK_THROWS_AS(params(Form::G, 3), std::invalid_argument);
  CHECK_THROWS_AS(params(Form::H, 4), std::invalid_argument);
  CHECK_THROWS_AS(params(Form::G, 1), std::invalid_argument);
}

TEST_CASE("fallback search for k divisible by 144") {
  for (std::uint64_t k : {144, 288}) {
    CAPTURE(k);
    const FormModulus n = build_modulus(Form::H, k);
    const TestParams p = select_params(Form::H, k, n);
    const Natural c = p.m_root;
    const Natural m = c * c * c * c;
    CHECK(gcd(c, n.value).is_one());
    CHECK(jacobi(p.x0, n.value) == -1);
    const ModulusRef mod = make_modulus(n);
    const Residue x(mod, p.x0);
    CHECK(jacobi((x * x * x - Residue(mod, m) * x).value(), n.value) == 1);
  }
  SearchBounds tiny;
  tiny.max_root = 1;
  tiny.max_x0 = 1;
  CHECK_THROWS_AS(select_params(Form::H, 144, build_modulus(Form::H, 144), tiny), SearchExhausted);
}

TEST_CASE("Pepin for small Fermat numbers") {
  for (std::uint64_t k = 1; k <= 12; ++k) {
    CAPTURE(k);
    CHECK(pepin_test(k).is_prime() == known_fermat_prime(k));
  }
  CHECK(pepin_test(5).reason() == CompositeReason::PepinFailure);
}

TEST_CASE("Fermat methods agree") {
  for (std::uint64_t k = 2; k <= 11; ++k) {
    CAPTURE(k);
    const TestReport eta = fermat_eta_test(k);
    const TestReport dbl = fermat_double_test(k);
    const TestReport pep = run_test(Form::F, k, Method::Pepin);
    CHECK(eta.verdict.is_prime() == known_fermat_prime(k));
    CHECK(dbl.verdict.is_prime() == known_fermat_prime(k));
    CHECK(pep.verdict.is_prime() == known_fermat_prime(k));
    CHECK(eta.iterations == (std::uint64_t{1} << k) - 1);
    CHECK(dbl.iterations == (std::uint64_t{1} << (k - 1)) - 1);
    CHECK(pep.iterations == (std::uint64_t{1} << k) - 1);
  }
  CHECK(fermat_eta_test(1).verdict.is_not_applicable());
  CHECK(fermat_double_test(1).verdict.is_not_applicable());
}

TEST_CASE("desk traces") {
  CHECK(traced(Form::F, 2, Method::Eta) == Strings{"5", "4", "1", "0"});
  CHECK(traced(Form::F, 2, Method::Double) == Strings{"5", "16"});
  CHECK(traced(Form::F, 3, Method::Eta) == Strings{"5", "13", "35", "58", "59", "16", "1", "0"});
  CHECK(traced(Form::F, 3, Method::Double) == Strings{"5", "222", "59", "256"});
  CHECK(traced(Form::F, 4, Method::Double) ==
        Strings{"5", "56254", "25064", "39312", "40394", "62237", "4079", "65536"});
  const Strings f4 = traced(Form::F, 4, Method::Eta);
  REQUIRE(f4.size() == 16);
  CHECK(Strings(f4.end() - 3, f4.end()) == Strings{"256", "1", "0"});
  CHECK(traced(Form::G, 2, Method::Eta) == Strings{"7", "25", "9", "40"});
  CHECK(traced(Form::G, 5, Method::Eta) ==
        Strings{"5", "1749", "1874", "1447", "1759", "688", "1154", "1557", "585", "2104"});
  CHECK(traced(Form::H, 3, Method::Eta) == Strings{"5", "77", "105", "52", "98", "112"});
}

TEST_CASE("G and H verdicts") {
  const TestReport g5 = gk_test(5);
  CHECK(g5.verdict.is_prime());
  CHECK(g5.accepted_as == "(-sqrt(m),0)");
  CHECK(g5.iterations == 9);

  const TestReport g3 = gk_test(3);
  CHECK(g3.verdict.reason() == CompositeReason::KnownDivisor);
  CHECK(g3.verdict.witness() == Natural(5));
  CHECK(g3.iterations == 0);

  CHECK(hk_test(4).verdict.witness() == Natural(13));
  CHECK(hk_test(1).verdict.is_not_applicable());
  CHECK(gk_test(1).verdict.is_not_applicable());
  CHECK(hk_test(36).verdict.is_prime());

  // Compare against Miller-Rabin wherever the curve test runs.
  for (std::uint64_t k = 2; k <= 120; ++k) {
    for (Form form : {Form::G, Form::H}) {
      CAPTURE(k);
      const TestReport r = run_test(form, k, Method::Eta);
      const bool mr = oracle::miller_rabin(build_modulus(form, k).value) == oracle::MillerRabin::ProbablyPrime;
      CHECK(r.verdict.is_prime() == mr);
      if (r.verdict.is_prime()) CHECK(r.iterations == 2 * k - 1);
      CHECK(r.iterations <= 2 * k - 1);
    }
  }
  CHECK_THROWS_AS(run_test(Form::G, 5, Method::Double), std::invalid_argument);
  CHECK_THROWS_AS(run_test(Form::H, 3, Method::Pepin), std::invalid_argument);
}

TEST_CASE("trace keeps head and tail") {
  RunOptions options;
  options.trace = true;
  options.trace_limit = 4;
  const TestReport r = fermat_eta_test(5, options);
  REQUIRE(r.trace.has_value());
  CHECK(r.trace->total() == 32);
  CHECK(r.trace->truncated());
  CHECK(r.trace->head().size() == 4);
  CHECK(r.trace->tail().size() == 4);
  CHECK(r.trace->head().front() == "5");
}
