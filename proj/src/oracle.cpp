#include "fermatec/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "fermatec/curve.hpp"

namespace fermatec::oracle {

__extension__ using Wide = unsigned __int128;

std::uint64_t mul_mod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>(static_cast<Wide>(a) * b % p);
}

std::uint64_t pow_mod_u64(std::uint64_t base, std::uint64_t exp, std::uint64_t p) {
  std::uint64_t result = 1 % p;
  base %= p;
  while (exp != 0) {
    if ((exp & 1U) != 0) result = mul_mod_u64(result, base, p);
    base = mul_mod_u64(base, base, p);
    exp >>= 1;
  }
  return result;
}

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d <= n / d; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

int legendre_u64(std::uint64_t a, std::uint64_t p) {
  const std::uint64_t e = pow_mod_u64(a % p, (p - 1) / 2, p);
  if (e == 0) return 0;
  return e == 1 ? 1 : -1;
}

bool is_fourth_power(std::uint64_t m, std::uint64_t p) {
  if (m % p == 0) return false;
  return pow_mod_u64(m, (p - 1) / std::gcd<std::uint64_t>(4, p - 1), p) == 1;
}

std::uint64_t sqrt_minus_one(std::uint64_t p) {
  if (p % 4 != 1) throw std::invalid_argument("-1 is a square only for p ≡ 1 (mod 4)");
  for (std::uint64_t g = 2; g < p; ++g) {
    if (legendre_u64(g, p) == -1) return pow_mod_u64(g, (p - 1) / 4, p);
  }
  throw std::invalid_argument("no quadratic non-residue found; p is not prime");
}

std::uint64_t sqrt_mod_u64(std::uint64_t a, std::uint64_t p) {
  a %= p;
  if (legendre_u64(a, p) != 1) throw std::invalid_argument("not a nonzero square");
  std::uint64_t q = p - 1;
  unsigned s = 0;
  while (q % 2 == 0) {
    q /= 2;
    ++s;
  }
  std::uint64_t z = 2;
  while (legendre_u64(z, p) != -1) ++z;
  std::uint64_t c = pow_mod_u64(z, q, p);
  std::uint64_t r = pow_mod_u64(a, (q + 1) / 2, p);
  std::uint64_t t = pow_mod_u64(a, q, p);
  unsigned m = s;
  while (t != 1) {
    unsigned i = 0;
    for (std::uint64_t t2 = t; t2 != 1; t2 = mul_mod_u64(t2, t2, p)) ++i;
    std::uint64_t b = c;
    for (unsigned j = 0; j + i + 1 < m; ++j) b = mul_mod_u64(b, b, p);
    r = mul_mod_u64(r, b, p);
    c = mul_mod_u64(b, b, p);
    t = mul_mod_u64(t, c, p);
    m = i;
  }
  return r;
}

std::optional<Natural> trial_division(const Natural& n, const Natural& bound) {
  if (n < Natural(2)) throw std::invalid_argument("trial_division requires n >= 2");
  const std::uint64_t limit = bound.fits_u64() ? bound.to_u64() : ~std::uint64_t{0};
  if (n.is_even()) {
    if (limit >= 2) return Natural(2);
    return std::nullopt;
  }
  std::uint64_t d = 3;
  for (; d <= limit; d += 2) {
    if (Natural(d) * Natural(d) > n) break;
    if (n.mod_u64(d) == 0) return Natural(d);
  }
  // Scanned past sqrt(n) without a hit: n is its own smallest prime factor.
  if (Natural(d) * Natural(d) > n && n <= bound) return n;
  return std::nullopt;
}

namespace {

constexpr std::array<std::uint64_t, 12> kDeterministicBases = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

bool mr_witness_u64(std::uint64_t n, std::uint64_t a) {
  std::uint64_t d = n - 1;
  unsigned s = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++s;
  }
  std::uint64_t x = pow_mod_u64(a, d, n);
  if (x == 1 || x == n - 1) return false;
  for (unsigned r = 1; r < s; ++r) {
    x = mul_mod_u64(x, x, n);
    if (x == n - 1) return false;
  }
  return true;
}

// True when `a` proves n composite.
bool mr_witness(const ModulusRef& n, const Natural& d, std::size_t s, const Natural& a) {
  const Residue minus_one = -Residue(n, 1);
  Residue x = pow_mod(Residue(n, a), d);
  if (x.value().is_one() || x == minus_one) return false;
  for (std::size_t r = 1; r < s; ++r) {
    x = sqr_mod(x);
    if (x == minus_one) return false;
    if (x.value().is_one()) return true;
  }
  return true;
}

}  // namespace

MillerRabin miller_rabin(const ModulusRef& modulus) {
  const Natural& n = modulus->value();
  if (n.is_even() || n < Natural(3)) throw std::invalid_argument("miller_rabin requires odd n >= 3");
  if (n.fits_u64()) {
    const std::uint64_t v = n.to_u64();
    for (std::uint64_t a : kDeterministicBases) {
      if (a % v == 0) continue;
      if (mr_witness_u64(v, a)) return MillerRabin::Composite;
    }
    return MillerRabin::ProbablyPrime;
  }

  const Natural n_minus_1 = n - Natural(1);
  const std::size_t s = n_minus_1.trailing_zeros();
  const Natural d = n_minus_1 >> s;

  static const Natural kDeterministicLimit = Natural::from_decimal("3317044064679887385961981");
  if (n < kDeterministicLimit) {
    for (std::uint64_t a : kDeterministicBases) {
      if (mr_witness(modulus, d, s, Natural(a))) return MillerRabin::Composite;
    }
    return MillerRabin::ProbablyPrime;
  }
  std::mt19937_64 gen(0x243f6a8885a308d3ULL);
  for (int round = 0; round < 64; ++round) {
    const Natural a(std::max<std::uint64_t>(2, gen()));
    if (mr_witness(modulus, d, s, a)) return MillerRabin::Composite;
  }
  return MillerRabin::ProbablyPrime;
}

MillerRabin miller_rabin(const Natural& n) { return miller_rabin(make_modulus(n)); }

TwoSquares two_squares(std::uint64_t p) {
  if (p > kEnumerationBound || p % 4 != 1 || !is_prime_u64(p)) {
    throw std::invalid_argument("two_squares needs a prime p ≡ 1 (mod 4) below 2^20");
  }
  std::optional<TwoSquares> found;
  for (std::uint64_t b = 0; b * b <= p; b += 2) {
    const std::uint64_t rest = p - b * b;
    auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(rest)));
    while (root * root > rest) --root;
    while ((root + 1) * (root + 1) <= rest) ++root;
    if (root * root != rest) continue;
    // Exactly one sign of a satisfies a + b ≡ 1 (mod 4) since a is odd.
    const auto a = static_cast<std::int64_t>(root);
    const auto bb = static_cast<std::int64_t>(b);
    const std::int64_t signed_a = ((a + bb) % 4 + 4) % 4 == 1 ? a : -a;
    if (((signed_a + bb) % 4 + 4) % 4 != 1) throw NoRepresentation("normalization failed");
    if (found) throw NoRepresentation("two representations found; p is not prime");
    found = TwoSquares{signed_a, b};
  }
  if (!found) throw NoRepresentation("no representation as a sum of two squares");
  return *found;
}

CurveEnumeration enumerate_curve(std::uint64_t p, std::uint64_t m) {
  if (p < 3 || p > kEnumerationBound || !is_prime_u64(p)) {
    throw std::invalid_argument("enumerate_curve needs an odd prime below 2^20");
  }
  m %= p;
  if (!is_fourth_power(m, p)) throw std::invalid_argument("m is not a nonzero fourth power mod p");

  CurveEnumeration out;
  out.p = p;
  out.m = m;
  out.count = 1;
  for (std::uint64_t x = 0; x < p; ++x) {
    const std::uint64_t x3 = mul_mod_u64(mul_mod_u64(x, x, p), x, p);
    const std::uint64_t mx = mul_mod_u64(m, x, p);
    const std::uint64_t rhs = (x3 + p - mx) % p;
    const int chi = legendre_u64(rhs, p);
    out.count += static_cast<std::uint64_t>(1 + chi);
    if (chi == 0) {
      out.points.push_back({x, 0});
    } else if (chi == 1) {
      const std::uint64_t y = sqrt_mod_u64(rhs, p);
      out.points.push_back({x, std::min(y, p - y)});
      out.points.push_back({x, std::max(y, p - y)});
    }
  }
  if (p % 4 == 1) {
    out.decomposition = two_squares(p);
    const auto expected = static_cast<std::int64_t>(p) + 1 - 2 * out.decomposition->a;
    out.matches_trace_formula = static_cast<std::int64_t>(out.count) == expected;
  }
  return out;
}

SmallField::SmallField(std::uint64_t p) : p_(p), chi_(p, -1), cubes_(p) {
  if (p < 3 || p > kEnumerationBound || !is_prime_u64(p)) throw std::invalid_argument("SmallField needs an odd prime");
  chi_[0] = 0;
  for (std::uint64_t x = 1; x <= p / 2; ++x) chi_[x * x % p] = 1;
  for (std::uint64_t x = 0; x < p; ++x) cubes_[x] = static_cast<std::uint32_t>(x * x % p * x % p);
}

std::uint64_t SmallField::count_points(std::uint64_t m) const {
  m %= p_;
  std::int64_t sum = 0;
  std::uint64_t mx = 0;
  for (std::uint64_t x = 0; x < p_; ++x) {
    const std::uint64_t c = cubes_[x];
    sum += chi_[c >= mx ? c - mx : c + p_ - mx];
    mx += m;
    if (mx >= p_) mx -= p_;
  }
  return static_cast<std::uint64_t>(static_cast<std::int64_t>(p_ + 1) + sum);
}

std::vector<std::uint64_t> SmallField::fourth_powers() const {
  std::vector<bool> seen(p_, false);
  for (std::uint64_t t = 1; t < p_; ++t) {
    const std::uint64_t t2 = t * t % p_;
    seen[t2 * t2 % p_] = true;
  }
  std::vector<std::uint64_t> out;
  for (std::uint64_t v = 1; v < p_; ++v) {
    if (seen[v]) out.push_back(v);
  }
  return out;
}

namespace {

std::vector<std::uint64_t> divisors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      if (d != n / d) out.push_back(n / d);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t fourth_root(std::uint64_t m, std::uint64_t p) {
  for (std::uint64_t t = 1; t < p; ++t) {
    if (pow_mod_u64(t, 4, p) == m % p) return t;
  }
  throw std::invalid_argument("m is not a fourth power");
}

}  // namespace

GroupStructure group_structure(std::uint64_t p, std::uint64_t m) {
  const CurveEnumeration curve = enumerate_curve(p, m);
  const ModulusRef modulus = make_modulus(Natural(p));
  const CurveParams cp = CurveParams::from_fourth_root(modulus, Natural(fourth_root(curve.m, p)));
  const std::vector<std::uint64_t> order_divisors = divisors(curve.count);

  std::map<std::uint64_t, std::uint64_t> histogram{{1, 1}};  // infinity
  for (const SmallPoint& pt : curve.points) {
    const AffinePoint point = AffinePoint::at(Residue(modulus, pt.x), Residue(modulus, pt.y));
    if (!on_curve(point, cp)) throw StructureMismatch("enumerated point is not on the curve");
    std::optional<std::uint64_t> order;
    for (std::uint64_t d : order_divisors) {
      if (scalar_mul(Natural(d), point, cp).is_infinity()) {
        order = d;
        break;
      }
    }
    if (!order) throw StructureMismatch("point order does not divide the group order");
    ++histogram[*order];
  }

  const std::uint64_t n2 = histogram.rbegin()->first;
  const std::uint64_t n1 = curve.count / n2;
  std::ostringstream why;
  if (curve.count % n2 != 0 || n2 % n1 != 0) {
    why << "exponent " << n2 << " is incompatible with order " << curve.count;
    throw StructureMismatch(why.str());
  }
  // Elements of Z_n1 ⊕ Z_n2 with order dividing d: gcd(d, n1) * gcd(d, n2).
  std::map<std::uint64_t, std::uint64_t> expected;
  for (std::uint64_t d : divisors(n2)) {
    std::uint64_t exact = std::gcd(d, n1) * std::gcd(d, n2);
    for (const auto& [e, cnt] : expected) {
      if (d % e == 0) exact -= cnt;
    }
    expected[d] = exact;
  }
  for (const auto& [d, cnt] : expected) {
    const auto it = histogram.find(d);
    const std::uint64_t seen = it == histogram.end() ? 0 : it->second;
    if (seen != cnt) {
      why << "order " << d << ": " << seen << " points, expected " << cnt;
      throw StructureMismatch(why.str());
    }
  }
  return GroupStructure{Natural(n1), Natural(n2), Natural(curve.count)};
}

PointCountReport verify_point_counts(std::uint64_t p_max) {
  PointCountReport report;
  for (std::uint64_t p = 5; p < p_max; p += 4) {
    if (!is_prime_u64(p)) continue;
    ++report.primes;
    const SmallField field(p);
    const TwoSquares ts = two_squares(p);
    const auto expected = static_cast<std::uint64_t>(static_cast<std::int64_t>(p) + 1 - 2 * ts.a);
    for (std::uint64_t m : field.fourth_powers()) {
      ++report.curves;
      const std::uint64_t count = field.count_points(m);
      if (count != expected) report.mismatches.push_back({p, m, count, expected});
    }
  }
  return report;
}

namespace {

std::uint64_t form_mod_small(Form form, std::uint64_t k, std::uint64_t d) {
  const std::uint64_t top = pow_mod_u64(2, 2 * k + 1, d);
  const std::uint64_t mid = pow_mod_u64(2, k + 1, d);
  if (form == Form::G) return (top + mid + 1) % d;
  return (top + d - mid + 1) % d;
}

}  // namespace

ResidueFactReport verify_residue_facts(std::uint64_t k_max, std::uint64_t qr_k_max) {
  ResidueFactReport report;
  auto check = [&](bool holds, const char* fact, std::uint64_t k, std::uint64_t& counter) {
    ++counter;
    if (!holds) report.violations.push_back({fact, k});
  };

  for (std::uint64_t k = 1; k <= k_max; ++k) {
    const bool g5 = form_mod_small(Form::G, k, 5) == 0;
    const bool h5 = form_mod_small(Form::H, k, 5) == 0;
    check(g5 == (k % 4 == 0 || k % 4 == 3), "5 | G_k iff k = 0,3 mod 4", k, report.divisibility_checks);
    check(h5 == (k % 4 == 1 || k % 4 == 2), "5 | H_k iff k = 1,2 mod 4", k, report.divisibility_checks);
    if (k % 12 == 4) {
      check(form_mod_small(Form::H, k, 13) == 0, "13 | H_k when k = 4 mod 12", k, report.divisibility_checks);
    }
  }

  const std::uint64_t last = std::min(k_max, qr_k_max);
  for (std::uint64_t k = 2; k <= last; ++k) {
    for (Form form : {Form::G, Form::H}) {
      const ModulusRef n = make_modulus(build_modulus(form, k));
      if (miller_rabin(n) != MillerRabin::ProbablyPrime) continue;
      (form == Form::G ? report.prime_g : report.prime_h).push_back(k);
      const Natural half = (n->value() - Natural(1)) >> 1;
      const Residue minus_one = -Residue(n, 1);
      auto non_residue = [&](std::uint64_t a) { return pow_mod(Residue(n, a), half) == minus_one; };
      auto residue = [&](const Residue& a) { return pow_mod(a, half).value().is_one(); };
      if (form == Form::G) {
        check(non_residue(3) == (k % 2 == 0), "3 is a QNR mod G_k iff k even", k, report.residue_checks);
        check(non_residue(5) == (k % 4 == 1), "5 is a QNR mod G_k iff k = 1 mod 4", k, report.residue_checks);
        check(non_residue(7), "7 is a QNR mod G_k", k, report.residue_checks);
        check(residue(-Residue(n, 2)), "-2 is a QR mod G_k", k, report.residue_checks);
      } else {
        // H_k ≡ 3 + (-1)^k (mod 3): 3 is a non-residue exactly for odd k.
        check(non_residue(3) == (k % 2 == 1), "3 is a QNR mod H_k iff k odd", k, report.residue_checks);
        check(residue(Residue(n, 2)), "2 is a QR mod H_k", k, report.residue_checks);
        check(non_residue(5) == (k % 4 == 3), "5 is a QNR mod H_k iff k = 3 mod 4", k, report.residue_checks);
      }
    }
  }
  return report;
}

PropertyReport verify_curve_properties(std::uint64_t samples, std::uint64_t seed) {
  std::vector<std::uint64_t> primes;
  for (std::uint64_t p = 13; p < 4000; p += 4) {
    if (is_prime_u64(p)) primes.push_back(p);
  }
  std::mt19937_64 gen(seed);
  PropertyReport report;

  auto fail = [&](std::uint64_t p, std::uint64_t c, std::uint64_t x, const char* what) {
    std::ostringstream os;
    os << what << " (p=" << p << ", m=" << c << "^4, x=" << x << ")";
    report.failures.push_back(os.str());
  };
  auto x_of = [](const AffinePoint& pt) {
    if (pt.is_infinity()) return XState::infinity();
    return XState::from_x(pt.x());
  };

  while (report.samples < samples) {
    const std::uint64_t p = primes[gen() % primes.size()];
    const std::uint64_t c = 1 + gen() % (p - 1);
    const std::uint64_t x = 1 + gen() % (p - 1);
    const std::uint64_t m = pow_mod_u64(c, 4, p);
    const std::uint64_t rhs = (pow_mod_u64(x, 3, p) + p - mul_mod_u64(m, x, p)) % p;
    if (legendre_u64(rhs, p) != 1) continue;

    const ModulusRef modulus = make_modulus(Natural(p));
    const CurveParams cp = CurveParams::from_fourth_root(modulus, Natural(c));
    const QuarticUnit i = QuarticUnit::checked(Residue(modulus, sqrt_minus_one(p)));
    const AffinePoint pt = AffinePoint::at(Residue(modulus, x), Residue(modulus, sqrt_mod_u64(rhs, p)));
    const AffinePoint doubled = scalar_mul(Natural(2), pt, cp);
    if (doubled.is_infinity() || doubled.x().is_zero()) continue;
    ++report.samples;

    const XState start = XState::finite(Residue(modulus, x));
    const StepResult eta = eta_step(start, cp, i);
    const StepResult dbl = double_step(start, cp);
    if (!std::holds_alternative<XState>(eta) || !std::holds_alternative<XState>(dbl)) {
      fail(p, c, x, "x-only step reported a factor of a prime modulus");
      continue;
    }
    const XState& eta_x = std::get<XState>(eta);

    if (eta_x == x_of(affine_add(pt, apply_i(pt, i), cp))) {
      ++report.eta_matches_affine;
    } else {
      fail(p, c, x, "eta_step disagrees with P + [i]P");
    }
    if (std::get<XState>(dbl) == x_of(doubled)) {
      ++report.double_matches_affine;
    } else {
      fail(p, c, x, "double_step disagrees with 2P");
    }
    const StepResult eta_eta = eta_step(eta_x, cp, i);
    if (std::holds_alternative<XState>(eta_eta) && std::get<XState>(eta_eta) == XState::from_x(-doubled.x())) {
      ++report.eta_squared_is_minus_double;
    } else {
      fail(p, c, x, "eta(eta(x)) != -x(2P)");
    }
    if (!eta_x.is_finite() || legendre_u64(eta_x.x().value().to_u64(), p) == 1) {
      ++report.eta_image_is_square;
    } else {
      fail(p, c, x, "x(eta P) is not a square");
    }
  }
  return report;
}

bool fermat_divisor_check(const Natural& q) { return q.mod_u64(4) == 1; }

}  // namespace fermatec::oracle
