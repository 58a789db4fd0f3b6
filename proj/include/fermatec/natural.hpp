#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fermatec {

// Arbitrary-precision unsigned integer.
//
// Limbs are 64-bit words stored little-endian. The representation is always
// canonical: no leading zero limb, and zero is the empty limb vector. All
// arithmetic is value-semantic; subtraction that would go negative throws
// std::domain_error.
class Natural {
 public:
  using Limb = std::uint64_t;
  static constexpr std::size_t kLimbBits = 64;

  // Operand size (in limbs) at which multiplication switches from
  // schoolbook to Karatsuba.
  static constexpr std::size_t kKaratsubaThreshold = 32;

  Natural() = default;
  Natural(std::uint64_t value);  // NOLINT(google-explicit-constructor)

  static Natural from_limbs(std::vector<Limb> limbs);
  static Natural power_of_two(std::size_t exponent);

  // Parses decimal digits, or lowercase/uppercase hex digits with an optional
  // "0x" prefix. Throws std::invalid_argument on empty or malformed input.
  static Natural from_decimal(std::string_view text);
  static Natural from_hex(std::string_view text);
  // Decimal unless the text starts with "0x".
  static Natural parse(std::string_view text);

  std::string to_decimal() const;
  // Lowercase hexadecimal, no prefix, no leading zeros ("0" for zero).
  std::string to_hex() const;

  bool is_zero() const { return limbs_.empty(); }
  bool is_odd() const { return !limbs_.empty() && (limbs_[0] & 1U) != 0; }
  bool is_even() const { return !is_odd(); }
  bool is_one() const { return limbs_.size() == 1 && limbs_[0] == 1; }

  std::size_t bit_length() const;
  bool bit(std::size_t index) const;
  std::size_t trailing_zeros() const;
  std::size_t limb_count() const { return limbs_.size(); }
  std::span<const Limb> limbs() const { return limbs_; }

  bool fits_u64() const { return limbs_.size() <= 1; }
  // Throws std::overflow_error unless fits_u64().
  std::uint64_t to_u64() const;
  std::uint64_t low_u64() const { return limbs_.empty() ? 0 : limbs_[0]; }

  // this mod 2^bits
  Natural low_bits(std::size_t bits) const;

  // Remainder by a single nonzero word.
  std::uint64_t mod_u64(std::uint64_t divisor) const;

  Natural& operator+=(const Natural& rhs);
  Natural& operator-=(const Natural& rhs);
  Natural& operator*=(const Natural& rhs);
  Natural& operator<<=(std::size_t shift);
  Natural& operator>>=(std::size_t shift);

  friend Natural operator+(Natural lhs, const Natural& rhs) { return lhs += rhs; }
  friend Natural operator-(Natural lhs, const Natural& rhs) { return lhs -= rhs; }
  friend Natural operator*(const Natural& lhs, const Natural& rhs);
  friend Natural operator<<(Natural lhs, std::size_t shift) { return lhs <<= shift; }
  friend Natural operator>>(Natural lhs, std::size_t shift) { return lhs >>= shift; }
  friend Natural operator/(const Natural& lhs, const Natural& rhs);
  friend Natural operator%(const Natural& lhs, const Natural& rhs);

  friend bool operator==(const Natural& lhs, const Natural& rhs) = default;
  friend std::strong_ordering operator<=>(const Natural& lhs, const Natural& rhs);

  friend std::ostream& operator<<(std::ostream& os, const Natural& value);

 private:
  explicit Natural(std::vector<Limb> limbs) : limbs_(std::move(limbs)) { normalize(); }
  void normalize();

  std::vector<Limb> limbs_;
};

// Quotient and remainder; throws std::domain_error on division by zero.
std::pair<Natural, Natural> divmod(const Natural& dividend, const Natural& divisor);

Natural square(const Natural& value);

}  // namespace fermatec
