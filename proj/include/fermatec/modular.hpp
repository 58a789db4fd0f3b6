#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "fermatec/natural.hpp"

namespace fermatec {

enum class Form { F, G, H };

// "f", "g", "h" (case-insensitive); nullopt otherwise.
std::optional<Form> parse_form(std::string_view text);
char form_letter(Form form);  // 'F', 'G', 'H'

// One of F_k = 2^(2^k) + 1, G_k = 2^(2k+1) + 2^(k+1) + 1,
// H_k = 2^(2k+1) - 2^(k+1) + 1, together with the constants used by the
// folding reduction: 2^split ≡ fold_sign * fold_constant (mod value).
struct FormModulus {
  Form form{};
  std::uint64_t k = 0;
  Natural value;
  std::size_t bit_len = 0;

  std::size_t split_bits = 0;
  Natural fold_constant;
  bool fold_negative = false;

  std::string name() const;  // e.g. "G_5"
};

// Throws std::invalid_argument for k = 0. F_k additionally needs 2^k to fit a
// machine word, so k < 64.
FormModulus build_modulus(Form form, std::uint64_t k);

// x mod n.value by folding the bits above split_bits back in through the
// modulus congruence. Valid for any x; linear time when x < value^2.
Natural special_reduce(const Natural& x, const FormModulus& n);

// Reduction context shared by residues: either a special-form modulus or a
// generic odd modulus (oracle use, reduced by long division).
class Modulus {
 public:
  explicit Modulus(FormModulus form);
  // Throws std::invalid_argument unless value is odd and >= 3.
  explicit Modulus(Natural value);

  const Natural& value() const { return value_; }
  const FormModulus* form() const { return form_ ? &*form_ : nullptr; }

  Natural reduce(const Natural& x) const;

 private:
  Natural value_;
  std::optional<FormModulus> form_;
};

using ModulusRef = std::shared_ptr<const Modulus>;

ModulusRef make_modulus(FormModulus form);
ModulusRef make_modulus(Natural odd_value);

// An element of Z/NZ, always fully reduced.
class Residue {
 public:
  Residue(ModulusRef modulus, const Natural& value);
  Residue(ModulusRef modulus, std::uint64_t value) : Residue(std::move(modulus), Natural(value)) {}

  const Natural& value() const { return value_; }
  const ModulusRef& modulus() const { return modulus_; }
  bool is_zero() const { return value_.is_zero(); }

  friend Residue operator+(const Residue& a, const Residue& b);
  friend Residue operator-(const Residue& a, const Residue& b);
  friend Residue operator*(const Residue& a, const Residue& b);
  friend Residue operator-(const Residue& a);
  Residue& operator+=(const Residue& b) { return *this = *this + b; }
  Residue& operator-=(const Residue& b) { return *this = *this - b; }
  Residue& operator*=(const Residue& b) { return *this = *this * b; }

  // Value equality; residues over different moduli compare unequal.
  friend bool operator==(const Residue& a, const Residue& b);

 private:
  struct Reduced {};
  Residue(ModulusRef modulus, Natural value, Reduced);

  ModulusRef modulus_;
  Natural value_;
};

Residue add_mod(const Residue& a, const Residue& b);
Residue sub_mod(const Residue& a, const Residue& b);
Residue mul_mod(const Residue& a, const Residue& b);
Residue sqr_mod(const Residue& a);
// Left-to-right binary exponentiation.
Residue pow_mod(const Residue& base, const Natural& exponent);

// gcd(0, 0) throws std::invalid_argument.
Natural gcd(const Natural& a, const Natural& b);

// gcd(a, N) > 1; g carries the shared factor (g == N when a ≡ 0).
struct NonInvertible {
  Natural g;
};

using InverseResult = std::variant<Residue, NonInvertible>;

// Binary extended Euclid against the (odd) modulus.
InverseResult inv_mod(const Residue& a);

// Jacobi symbol (a | n); throws std::invalid_argument unless n is odd and >= 3.
int jacobi(const Natural& a, const Natural& n);

}  // namespace fermatec
