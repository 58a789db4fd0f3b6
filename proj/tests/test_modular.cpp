#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fermatec/modular.hpp"

using namespace fermatec;

namespace {

Natural random_below(std::mt19937_64& gen, const Natural& bound) {
  std::vector<Natural::Limb> limbs(bound.limb_count() + 1);
  for (auto& l : limbs) l = gen();
  return Natural::from_limbs(std::move(limbs)) % bound;
}

bool small_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

ModulusRef form_ref(Form form, std::uint64_t k) { return make_modulus(build_modulus(form, k)); }

}  // namespace

TEST_CASE("build_modulus closed forms") {
  CHECK(build_modulus(Form::F, 2).value == Natural(17));
  CHECK(build_modulus(Form::G, 2).value == Natural(41));
  CHECK(build_modulus(Form::H, 3).value == Natural(113));
  CHECK(build_modulus(Form::F, 5).value == Natural(4294967297ULL));
  CHECK(build_modulus(Form::G, 3).value == Natural(145));
  CHECK(build_modulus(Form::H, 4).value == Natural(481));
  CHECK(build_modulus(Form::F, 4).bit_len == 17);
  CHECK(build_modulus(Form::H, 1).value == Natural(5));
  CHECK(build_modulus(Form::G, 1).value == Natural(13));
  CHECK(build_modulus(Form::G, 7).name() == "G_7");
  CHECK_THROWS_AS(build_modulus(Form::F, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_modulus(Form::H, 0), std::invalid_argument);

  for (std::uint64_t k = 1; k < 200; ++k) {
    for (Form form : {Form::G, Form::H}) {
      const FormModulus n = build_modulus(form, k);
      CHECK(n.value.is_odd());
      CHECK(n.value >= Natural(5));
      CHECK(n.bit_len == n.value.bit_length());
    }
  }
}

TEST_CASE("parse_form") {
  CHECK(parse_form("f") == Form::F);
  CHECK(parse_form("G") == Form::G);
  CHECK(parse_form("h") == Form::H);
  CHECK_FALSE(parse_form("x").has_value());
  CHECK_FALSE(parse_form("ff").has_value());
}

TEST_CASE("special_reduce examples") {
  CHECK(special_reduce(Natural(53), build_modulus(Form::F, 2)) == Natural(2));
  CHECK(special_reduce(Natural(1024), build_modulus(Form::G, 2)) == Natural(40));
  CHECK(special_reduce(Natural(0), build_modulus(Form::H, 3)) == Natural(0));
  // Edge values: N itself, N^2 - 1, N - 1.
  for (Form form : {Form::F, Form::G, Form::H}) {
    for (std::uint64_t k = 1; k < 12; ++k) {
      const FormModulus n = build_modulus(form, k);
      CHECK(special_reduce(n.value, n).is_zero());
      CHECK(special_reduce(n.value - Natural(1), n) == n.value - Natural(1));
      const Natural sq = n.value * n.value - Natural(1);
      CHECK(special_reduce(sq, n) == sq % n.value);
    }
  }
}

TEST_CASE("special_reduce matches long division") {
  std::mt19937_64 gen(11);
  for (Form form : {Form::F, Form::G, Form::H}) {
    for (int t = 0; t < 2000; ++t) {
      const std::uint64_t k = form == Form::F ? 2 + gen() % 10 : 2 + gen() % 63;
      const FormModulus n = build_modulus(form, k);
      const Natural x = random_below(gen, n.value * n.value);
      REQUIRE(special_reduce(x, n) == x % n.value);
    }
  }
}

TEST_CASE("residue arithmetic examples") {
  const ModulusRef f2 = form_ref(Form::F, 2);
  CHECK(mul_mod(Residue(f2, 13), Residue(f2, 13)).value() == Natural(16));
  CHECK(mul_mod(Residue(f2, 16), Residue(f2, 16)).value() == Natural(1));
  CHECK(mul_mod(Residue(f2, 9), Residue(f2, 1)) == Residue(f2, 9));
  CHECK(add_mod(Residue(f2, 16), Residue(f2, 5)).value() == Natural(4));
  CHECK(sub_mod(Residue(f2, 3), Residue(f2, 5)).value() == Natural(15));
  CHECK((-Residue(f2, 0)).is_zero());
  CHECK(Residue(f2, 100).value() == Natural(15));

  CHECK(pow_mod(Residue(f2, 3), Natural(8)).value() == Natural(16));
  CHECK(pow_mod(Residue(f2, 5), Natural(8)).value() == Natural(16));
  CHECK(pow_mod(Residue(f2, 7), Natural(0)).value() == Natural(1));

  const ModulusRef other = form_ref(Form::G, 2);
  CHECK_THROWS_AS(Residue(f2, 1) + Residue(other, 1), std::invalid_argument);
}

TEST_CASE("residue ring laws") {
  std::mt19937_64 gen(12);
  for (int t = 0; t < 300; ++t) {
    const Form form = static_cast<Form>(gen() % 3);
    const std::uint64_t k = form == Form::F ? 1 + gen() % 9 : 1 + gen() % 100;
    const ModulusRef n = form_ref(form, k);
    const Residue a(n, random_below(gen, n->value()));
    const Residue b(n, random_below(gen, n->value()));
    const Residue c(n, random_below(gen, n->value()));
    CHECK(a * b == b * a);
    CHECK((a * b) * c == a * (b * c));
    CHECK((a + b) - b == a);
    CHECK((a - b) + b == a);
    CHECK(a * (b + c) == a * b + a * c);
  }
}

TEST_CASE("generic modulus") {
  CHECK_THROWS_AS(make_modulus(Natural(10)), std::invalid_argument);
  CHECK_THROWS_AS(make_modulus(Natural(1)), std::invalid_argument);
  const ModulusRef n = make_modulus(Natural(1000003));
  CHECK(n->form() == nullptr);
  CHECK(pow_mod(Residue(n, 2), Natural(1000002)).value().is_one());
}

TEST_CASE("Fermat little theorem smoke test") {
  std::mt19937_64 gen(13);
  for (std::uint64_t p : {101ULL, 65537ULL, 2147483647ULL, 2305843009213693951ULL}) {
    const ModulusRef n = make_modulus(Natural(p));
    for (int t = 0; t < 20; ++t) {
      const std::uint64_t b = 1 + gen() % (p - 1);
      CHECK(pow_mod(Residue(n, b), Natural(p - 1)).value().is_one());
    }
  }
}

TEST_CASE("gcd") {
  CHECK(gcd(Natural(24), Natural(17)) == Natural(1));
  CHECK(gcd(Natural(641 * 5), build_modulus(Form::F, 5).value) == Natural(641));
  CHECK(gcd(Natural(0), Natural(7)) == Natural(7));
  CHECK(gcd(Natural(7), Natural(0)) == Natural(7));
  CHECK(gcd(Natural(48), Natural(180)) == Natural(12));
  CHECK_THROWS_AS(gcd(Natural(0), Natural(0)), std::invalid_argument);
}

TEST_CASE("inv_mod examples") {
  const ModulusRef f2 = form_ref(Form::F, 2);
  // Exhaustive scan oracle for 6^-1 mod 17.
  std::uint64_t scan = 0;
  for (std::uint64_t c = 1; c < 17; ++c) {
    if (6 * c % 17 == 1) scan = c;
  }
  auto six = inv_mod(Residue(f2, 6));
  REQUIRE(std::holds_alternative<Residue>(six));
  CHECK(std::get<Residue>(six).value() == Natural(scan));
  CHECK(scan == 3);

  auto one = inv_mod(Residue(f2, 1));
  CHECK(std::get<Residue>(one).value().is_one());

  const ModulusRef n25 = make_modulus(Natural(25));
  auto five = inv_mod(Residue(n25, 5));
  REQUIRE(std::holds_alternative<NonInvertible>(five));
  CHECK(std::get<NonInvertible>(five).g == Natural(5));

  auto zero = inv_mod(Residue(n25, 0));
  REQUIRE(std::holds_alternative<NonInvertible>(zero));
  CHECK(std::get<NonInvertible>(zero).g == Natural(25));
}

TEST_CASE("inv_mod property") {
  std::mt19937_64 gen(14);
  for (int t = 0; t < 400; ++t) {
    ModulusRef n;
    if (t % 2 == 0) {
      n = form_ref(static_cast<Form>(gen() % 3), 2 + gen() % 8);
    } else {
      n = make_modulus(Natural((gen() % 100000) * 2 + 3));
    }
    const Residue a(n, random_below(gen, n->value()));
    auto r = inv_mod(a);
    if (auto* inv = std::get_if<Residue>(&r)) {
      CHECK((a * *inv).value().is_one());
    } else {
      const Natural& g = std::get<NonInvertible>(r).g;
      CHECK(g > Natural(1));
      CHECK((n->value() % g).is_zero());
      CHECK((a.value() % g).is_zero());
    }
  }
  // F_5 = 641 * 6700417 surfaces its factor.
  const ModulusRef f5 = form_ref(Form::F, 5);
  auto r = inv_mod(Residue(f5, Natural(641) * Natural(12345)));
  REQUIRE(std::holds_alternative<NonInvertible>(r));
  CHECK(std::get<NonInvertible>(r).g == Natural(641));
}

TEST_CASE("jacobi examples") {
  CHECK(jacobi(Natural(5), Natural(17)) == -1);
  CHECK(jacobi(Natural(1), Natural(17)) == 1);
  CHECK(jacobi(Natural(1), Natural(9)) == 1);
  CHECK(jacobi(Natural(7), Natural(41)) == -1);
  CHECK(jacobi(Natural(5), Natural(25)) == 0);
  CHECK(jacobi(Natural(0), Natural(3)) == 0);
  CHECK(jacobi(Natural(2), Natural(15)) == 1);  // (2|3)(2|5) = (-1)(-1)
  CHECK_THROWS_AS(jacobi(Natural(3), Natural(8)), std::invalid_argument);
  CHECK_THROWS_AS(jacobi(Natural(3), Natural(1)), std::invalid_argument);
}

TEST_CASE("jacobi equals Euler criterion for every prime below 1000") {
  for (std::uint64_t p = 3; p < 1000; p += 2) {
    if (!small_prime(p)) continue;
    const ModulusRef n = make_modulus(Natural(p));
    for (std::uint64_t a = 0; a < p; ++a) {
      const Natural e = pow_mod(Residue(n, a), Natural((p - 1) / 2)).value();
      const int euler = e.is_zero() ? 0 : (e.is_one() ? 1 : -1);
      if (euler == -1) REQUIRE(e == Natural(p - 1));
      REQUIRE(jacobi(Natural(a), Natural(p)) == euler);
    }
  }
}

TEST_CASE("jacobi is multiplicative in the modulus") {
  std::mt19937_64 gen(15);
  for (int t = 0; t < 500; ++t) {
    const std::uint64_t m = 2 * (gen() % 5000) + 3;
    const std::uint64_t n = 2 * (gen() % 5000) + 3;
    const std::uint64_t a = gen() % 100000;
    CHECK(jacobi(Natural(a), Natural(m * n)) == jacobi(Natural(a), Natural(m)) * jacobi(Natural(a), Natural(n)));
  }
}
