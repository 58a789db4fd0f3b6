#include "fermatec/modular.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <stdexcept>
#include <utility>

namespace fermatec {

namespace {

using Limb = Natural::Limb;
__extension__ using Wide = unsigned __int128;

// Sign-magnitude pair used only inside the fold loop.
struct Signed {
  Natural mag;
  bool negative = false;
};

Signed add_signed(Signed a, Signed b) {
  if (a.negative == b.negative) {
    a.mag += b.mag;
    return a;
  }
  if (a.mag >= b.mag) {
    a.mag -= b.mag;
    return a;
  }
  b.mag -= a.mag;
  return b;
}

// hi * fold_constant, where fold_constant is 1 or 2^(k+1) ± 1.
Natural times_fold_constant(const Natural& hi, const FormModulus& n) {
  if (n.form == Form::F) return hi;
  Natural shifted = hi << (n.k + 1);
  if (n.form == Form::G) return shifted + hi;
  return shifted - hi;
}

}  // namespace

std::optional<Form> parse_form(std::string_view text) {
  if (text.size() != 1) return std::nullopt;
  switch (std::tolower(static_cast<unsigned char>(text[0]))) {
    case 'f':
      return Form::F;
    case 'g':
      return Form::G;
    case 'h':
      return Form::H;
    default:
      return std::nullopt;
  }
}

char form_letter(Form form) {
  switch (form) {
    case Form::F:
      return 'F';
    case Form::G:
      return 'G';
    case Form::H:
      return 'H';
  }
  return '?';
}

std::string FormModulus::name() const { return std::string(1, form_letter(form)) + "_" + std::to_string(k); }

FormModulus build_modulus(Form form, std::uint64_t k) {
  if (k == 0) throw std::invalid_argument("form modulus requires k >= 1");
  FormModulus n;
  n.form = form;
  n.k = k;
  switch (form) {
    case Form::F:
      if (k > 32) throw std::invalid_argument("F_k supported for k <= 32");
      n.split_bits = std::size_t{1} << k;
      n.fold_constant = Natural(1);
      n.fold_negative = true;
      n.value = Natural::power_of_two(n.split_bits) + Natural(1);
      break;
    case Form::G:
      n.split_bits = 2 * k + 1;
      n.fold_constant = Natural::power_of_two(k + 1) + Natural(1);
      n.fold_negative = true;
      n.value = Natural::power_of_two(n.split_bits) + n.fold_constant;
      break;
    case Form::H:
      n.split_bits = 2 * k + 1;
      n.fold_constant = Natural::power_of_two(k + 1) - Natural(1);
      n.fold_negative = false;
      n.value = Natural::power_of_two(n.split_bits) - n.fold_constant;
      break;
  }
  n.bit_len = n.value.bit_length();
  return n;
}

Natural special_reduce(const Natural& x, const FormModulus& n) {
  const std::size_t s = n.split_bits;
  Signed acc{x, false};
  // Each fold strictly shrinks the magnitude because fold_constant < 2^s.
  while (acc.mag.bit_length() > s) {
    Natural hi = acc.mag >> s;
    Signed lo{acc.mag.low_bits(s), acc.negative};
    Signed folded{times_fold_constant(hi, n), acc.negative != n.fold_negative};
    acc = add_signed(std::move(lo), std::move(folded));
  }
  // |acc| < 2^s < 2N
  if (acc.mag >= n.value) acc.mag -= n.value;
  if (acc.negative && !acc.mag.is_zero()) return n.value - acc.mag;
  return std::move(acc.mag);
}

Modulus::Modulus(FormModulus form) : value_(form.value), form_(std::move(form)) {}

Modulus::Modulus(Natural value) : value_(std::move(value)) {
  if (value_.is_even() || value_ < Natural(3)) throw std::invalid_argument("modulus must be odd and >= 3");
}

Natural Modulus::reduce(const Natural& x) const {
  if (x < value_) return x;
  if (form_) return special_reduce(x, *form_);
  return x % value_;
}

ModulusRef make_modulus(FormModulus form) { return std::make_shared<const Modulus>(std::move(form)); }

ModulusRef make_modulus(Natural odd_value) { return std::make_shared<const Modulus>(std::move(odd_value)); }

Residue::Residue(ModulusRef modulus, const Natural& value)
    : modulus_(std::move(modulus)), value_(modulus_->reduce(value)) {}

Residue::Residue(ModulusRef modulus, Natural value, Reduced)
    : modulus_(std::move(modulus)), value_(std::move(value)) {}

namespace {

void require_same_modulus(const Residue& a, const Residue& b) {
  if (a.modulus() != b.modulus() && a.modulus()->value() != b.modulus()->value()) {
    throw std::invalid_argument("residues over different moduli");
  }
}

}  // namespace

Residue operator+(const Residue& a, const Residue& b) {
  require_same_modulus(a, b);
  Natural s = a.value_ + b.value_;
  if (s >= a.modulus_->value()) s -= a.modulus_->value();
  return Residue(a.modulus_, std::move(s), Residue::Reduced{});
}

Residue operator-(const Residue& a, const Residue& b) {
  require_same_modulus(a, b);
  if (a.value_ >= b.value_) return Residue(a.modulus_, a.value_ - b.value_, Residue::Reduced{});
  return Residue(a.modulus_, (a.value_ + a.modulus_->value()) - b.value_, Residue::Reduced{});
}

Residue operator-(const Residue& a) {
  if (a.is_zero()) return a;
  return Residue(a.modulus_, a.modulus_->value() - a.value_, Residue::Reduced{});
}

Residue operator*(const Residue& a, const Residue& b) {
  require_same_modulus(a, b);
  return Residue(a.modulus_, a.modulus_->reduce(a.value_ * b.value_), Residue::Reduced{});
}

bool operator==(const Residue& a, const Residue& b) {
  return a.value_ == b.value_ && a.modulus_->value() == b.modulus_->value();
}

Residue add_mod(const Residue& a, const Residue& b) { return a + b; }
Residue sub_mod(const Residue& a, const Residue& b) { return a - b; }
Residue mul_mod(const Residue& a, const Residue& b) { return a * b; }
Residue sqr_mod(const Residue& a) { return a * a; }

Residue pow_mod(const Residue& base, const Natural& exponent) {
  Residue result(base.modulus(), 1);
  for (std::size_t i = exponent.bit_length(); i-- > 0;) {
    result = sqr_mod(result);
    if (exponent.bit(i)) result = result * base;
  }
  return result;
}

Natural gcd(const Natural& a_in, const Natural& b_in) {
  if (a_in.is_zero() && b_in.is_zero()) throw std::invalid_argument("gcd(0, 0) is undefined");
  if (a_in.is_zero()) return b_in;
  if (b_in.is_zero()) return a_in;
  Natural a = a_in;
  Natural b = b_in;
  const std::size_t shift = std::min(a.trailing_zeros(), b.trailing_zeros());
  a >>= a.trailing_zeros();
  while (!b.is_zero()) {
    b >>= b.trailing_zeros();
    if (a > b) std::swap(a, b);
    b -= a;
  }
  return a << shift;
}

namespace {

// Fixed-width limb buffers for the inversion inner loop; all values stay
// below the modulus, which occupies `width` limbs.
class InverseWorkspace {
 public:
  explicit InverseWorkspace(const Natural& modulus)
      : width_(modulus.limb_count()), n_(to_width(modulus)) {}

  std::vector<Limb> to_width(const Natural& x) const {
    std::vector<Limb> out(width_, 0);
    std::copy(x.limbs().begin(), x.limbs().end(), out.begin());
    return out;
  }

  static bool is_zero(const std::vector<Limb>& v) {
    return std::all_of(v.begin(), v.end(), [](Limb l) { return l == 0; });
  }

  static bool less(const std::vector<Limb>& a, const std::vector<Limb>& b) {
    for (std::size_t i = a.size(); i-- > 0;) {
      if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
  }

  // a -= b, returns the borrow out.
  static Limb sub(std::vector<Limb>& a, const std::vector<Limb>& b) {
    Limb borrow = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const Limb ai = a[i];
      const Limb d = ai - b[i] - borrow;
      borrow = (ai < b[i] || (ai == b[i] && borrow != 0)) ? 1 : 0;
      a[i] = d;
    }
    return borrow;
  }

  static Limb add(std::vector<Limb>& a, const std::vector<Limb>& b) {
    Limb carry = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const Wide s = static_cast<Wide>(a[i]) + b[i] + carry;
      a[i] = static_cast<Limb>(s);
      carry = static_cast<Limb>(s >> 64);
    }
    return carry;
  }

  static void shift_right(std::vector<Limb>& a, unsigned bits, Limb top_in) {
    for (std::size_t i = 0; i + 1 < a.size(); ++i) a[i] = (a[i] >> bits) | (a[i + 1] << (64 - bits));
    a.back() = (a.back() >> bits) | (top_in << (64 - bits));
  }

  // x <- x / 2 mod N
  void halve(std::vector<Limb>& x) const {
    Limb carry = 0;
    if ((x[0] & 1U) != 0) carry = add(x, n_);
    shift_right(x, 1, carry);
  }

  // x <- x - y mod N
  void sub_mod(std::vector<Limb>& x, const std::vector<Limb>& y) const {
    if (sub(x, y) != 0) add(x, n_);
  }

  const std::vector<Limb>& n() const { return n_; }

 private:
  std::size_t width_;
  std::vector<Limb> n_;
};

}  // namespace

InverseResult inv_mod(const Residue& a) {
  const Natural& modulus = a.modulus()->value();
  InverseWorkspace ws(modulus);
  // Invariants: x1 * a ≡ u, x2 * a ≡ v (mod N); gcd(u, v) = gcd(a, N).
  std::vector<Limb> u = ws.to_width(a.value());
  std::vector<Limb> v = ws.n();
  std::vector<Limb> x1 = ws.to_width(Natural(1));
  std::vector<Limb> x2 = ws.to_width(Natural(0));

  while (!InverseWorkspace::is_zero(u)) {
    while ((u[0] & 1U) == 0) {
      InverseWorkspace::shift_right(u, 1, 0);
      ws.halve(x1);
    }
    if (InverseWorkspace::less(u, v)) {
      std::swap(u, v);
      std::swap(x1, x2);
    }
    InverseWorkspace::sub(u, v);
    ws.sub_mod(x1, x2);
  }

  Natural g = Natural::from_limbs(std::move(v));
  if (!g.is_one()) return NonInvertible{std::move(g)};
  return Residue(a.modulus(), Natural::from_limbs(std::move(x2)));
}

int jacobi(const Natural& a_in, const Natural& n_in) {
  if (n_in.is_even() || n_in < Natural(3)) throw std::invalid_argument("jacobi requires odd n >= 3");
  Natural a = a_in % n_in;
  Natural n = n_in;
  int result = 1;
  while (!a.is_zero()) {
    const std::size_t tz = a.trailing_zeros();
    a >>= tz;
    const std::uint64_t n8 = n.low_u64() & 7U;
    if ((tz & 1U) != 0 && (n8 == 3 || n8 == 5)) result = -result;
    std::swap(a, n);
    if ((a.low_u64() & 3U) == 3 && (n.low_u64() & 3U) == 3) result = -result;
    a = a % n;
  }
  return n.is_one() ? result : 0;
}

}  // namespace fermatec
