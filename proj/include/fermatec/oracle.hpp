#pragma once

// Independent ground truth for the curve tests: classical primality checks,
// exhaustive point counting over small prime fields, and the residue and
// divisibility facts the test drivers rely on. Small-field routines use
// plain 64-bit arithmetic and never touch the special-form reduction.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fermatec/modular.hpp"
#include "fermatec/natural.hpp"

namespace fermatec::oracle {

// Largest prime accepted by the enumeration routines.
inline constexpr std::uint64_t kEnumerationBound = std::uint64_t{1} << 20;

class NoRepresentation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StructureMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// -- word-sized helpers ------------------------------------------------------

std::uint64_t mul_mod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t p);
std::uint64_t pow_mod_u64(std::uint64_t base, std::uint64_t exp, std::uint64_t p);
bool is_prime_u64(std::uint64_t n);  // trial division; intended for n < 2^40
// Euler's criterion: 1, p - 1 or 0 mapped to +1, -1, 0. p an odd prime.
int legendre_u64(std::uint64_t a, std::uint64_t p);
// m^((p - 1) / gcd(4, p - 1)) ≡ 1 (mod p), m ≢ 0.
bool is_fourth_power(std::uint64_t m, std::uint64_t p);
// Some i with i^2 ≡ -1 (mod p), p ≡ 1 (mod 4) prime.
std::uint64_t sqrt_minus_one(std::uint64_t p);
// Tonelli-Shanks; a must be a nonzero square mod the odd prime p.
std::uint64_t sqrt_mod_u64(std::uint64_t a, std::uint64_t p);

// -- classical primality -----------------------------------------------------

// Smallest prime factor of n that is <= bound, by 2 then odd trial divisors.
std::optional<Natural> trial_division(const Natural& n, const Natural& bound);

enum class MillerRabin { ProbablyPrime, Composite };

// Bases {2, 3, ..., 37} below 3.3e24 (deterministic there); 64 bases from a
// fixed-seed generator above. n must be odd and >= 3.
MillerRabin miller_rabin(const Natural& n);
// Same, reducing through the given modulus (special-form reduction for F/G/H).
MillerRabin miller_rabin(const ModulusRef& n);

// -- curves over small prime fields -----------------------------------------

struct TwoSquares {
  std::int64_t a = 0;
  std::uint64_t b = 0;  // even
};

// p = a^2 + b^2, b even, a + b ≡ 1 (mod 4). p prime, p ≡ 1 (mod 4), p <= 2^20.
TwoSquares two_squares(std::uint64_t p);

struct SmallPoint {
  std::uint64_t x = 0;
  std::uint64_t y = 0;
  friend bool operator==(const SmallPoint&, const SmallPoint&) = default;
};

struct CurveEnumeration {
  std::uint64_t p = 0;
  std::uint64_t m = 0;
  std::uint64_t count = 0;         // including the point at infinity
  std::vector<SmallPoint> points;  // affine points, ascending x
  std::optional<TwoSquares> decomposition;  // when p ≡ 1 (mod 4)
  // count == p + 1 - 2a; unset when p ≡ 3 (mod 4).
  std::optional<bool> matches_trace_formula;
};

// Throws std::invalid_argument unless p is a prime <= 2^20 and m is a nonzero
// fourth power mod p.
CurveEnumeration enumerate_curve(std::uint64_t p, std::uint64_t m);

// Quadratic-character table for one prime, reused across many m.
class SmallField {
 public:
  explicit SmallField(std::uint64_t p);

  std::uint64_t p() const { return p_; }
  int chi(std::uint64_t a) const { return chi_[a]; }
  // 1 + sum over x of (1 + chi(x^3 - m x)).
  std::uint64_t count_points(std::uint64_t m) const;
  // Distinct nonzero fourth powers, ascending.
  std::vector<std::uint64_t> fourth_powers() const;

 private:
  std::uint64_t p_;
  std::vector<std::int8_t> chi_;
  std::vector<std::uint32_t> cubes_;
};

struct GroupStructure {
  Natural n1;
  Natural n2;
  Natural order;
};

// Invariant factors of E(p) from the order of every point. Throws
// StructureMismatch if the order histogram disagrees with Z_n1 ⊕ Z_n2.
GroupStructure group_structure(std::uint64_t p, std::uint64_t m);

// -- suites ------------------------------------------------------------------

struct CountMismatch {
  std::uint64_t p;
  std::uint64_t m;
  std::uint64_t count;
  std::uint64_t expected;
};

struct PointCountReport {
  std::uint64_t primes = 0;
  std::uint64_t curves = 0;
  std::vector<CountMismatch> mismatches;
  bool ok() const { return mismatches.empty(); }
};

// #E = p + 1 - 2a for every prime p ≡ 1 (mod 4) below p_max and every
// fourth-power m mod p.
PointCountReport verify_point_counts(std::uint64_t p_max);

struct FactViolation {
  std::string fact;
  std::uint64_t k;
};

struct ResidueFactReport {
  std::uint64_t divisibility_checks = 0;
  std::uint64_t residue_checks = 0;
  std::vector<std::uint64_t> prime_g;  // k with G_k probably prime
  std::vector<std::uint64_t> prime_h;
  std::vector<FactViolation> violations;
  bool ok() const { return violations.empty(); }
};

// (a) 5 | G_k iff k ≡ 0,3 (mod 4); 5 | H_k iff k ≡ 1,2 (mod 4); 13 | H_k when
// k ≡ 4 (mod 12), for 1 <= k <= k_max by direct modular evaluation.
// (b) for 2 <= k <= min(k_max, qr_k_max) with G_k or H_k probably prime, the
// quadratic characters by Euler's criterion: for G_k, 3 is a non-residue iff k
// is even, 5 iff k ≡ 1 (mod 4), 7 always, and -2 is a residue; for H_k, 3 is a
// non-residue iff k is odd, 5 iff k ≡ 3 (mod 4), and 2 is a residue.
ResidueFactReport verify_residue_facts(std::uint64_t k_max, std::uint64_t qr_k_max = 600);

struct PropertyReport {
  std::uint64_t samples = 0;
  std::uint64_t eta_matches_affine = 0;
  std::uint64_t double_matches_affine = 0;
  std::uint64_t eta_squared_is_minus_double = 0;
  std::uint64_t eta_image_is_square = 0;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

// Random points on y^2 = x^3 - m x over small primes p ≡ 1 (mod 4) with m a
// fourth power; compares the x-only steps against affine arithmetic.
PropertyReport verify_curve_properties(std::uint64_t samples, std::uint64_t seed = 0x5eed);

// Every divisor of a Fermat number is ≡ 1 (mod 4).
bool fermat_divisor_check(const Natural& q);

}  // namespace fermatec::oracle
