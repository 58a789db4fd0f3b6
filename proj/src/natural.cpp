#include "fermatec/natural.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <ostream>
#include <stdexcept>

namespace fermatec {

namespace {

using Limb = Natural::Limb;
__extension__ using Wide = unsigned __int128;
using LimbVec = std::vector<Limb>;
using LimbSpan = std::span<const Limb>;

void trim(LimbVec& v) {
  while (!v.empty() && v.back() == 0) v.pop_back();
}

std::size_t trimmed_size(LimbSpan s) {
  std::size_t n = s.size();
  while (n > 0 && s[n - 1] == 0) --n;
  return n;
}

int compare(LimbSpan a, LimbSpan b) {
  const std::size_t na = trimmed_size(a);
  const std::size_t nb = trimmed_size(b);
  if (na != nb) return na < nb ? -1 : 1;
  for (std::size_t i = na; i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  return 0;
}

// out[offset..] += a; out must be large enough to absorb the carry.
void add_at(LimbVec& out, LimbSpan a, std::size_t offset) {
  Limb carry = 0;
  std::size_t i = 0;
  for (; i < a.size(); ++i) {
    Wide s = static_cast<Wide>(out[offset + i]) + a[i] + carry;
    out[offset + i] = static_cast<Limb>(s);
    carry = static_cast<Limb>(s >> 64);
  }
  for (std::size_t j = offset + i; carry != 0; ++j) {
    assert(j < out.size());
    out[j] += carry;
    carry = out[j] == 0 ? 1 : 0;
  }
}

// out -= a, requires out >= a.
void sub_in_place(LimbVec& out, LimbSpan a) {
  Limb borrow = 0;
  std::size_t i = 0;
  for (; i < a.size(); ++i) {
    const Limb ai = a[i];
    const Limb oi = out[i];
    const Limb d = oi - ai - borrow;
    borrow = (oi < ai || (oi == ai && borrow != 0)) ? 1 : 0;
    out[i] = d;
  }
  for (; borrow != 0 && i < out.size(); ++i) {
    borrow = out[i] == 0 ? 1 : 0;
    out[i] -= 1;
  }
  assert(borrow == 0);
}

LimbVec add_spans(LimbSpan a, LimbSpan b) {
  if (a.size() < b.size()) std::swap(a, b);
  LimbVec out(a.begin(), a.end());
  out.push_back(0);
  add_at(out, b, 0);
  return out;
}

void mul_schoolbook(LimbSpan a, LimbSpan b, LimbVec& out) {
  out.assign(a.size() + b.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Limb ai = a[i];
    if (ai == 0) continue;
    Limb carry = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      Wide t = static_cast<Wide>(ai) * b[j] + out[i + j] + carry;
      out[i + j] = static_cast<Limb>(t);
      carry = static_cast<Limb>(t >> 64);
    }
    out[i + b.size()] = carry;
  }
}

void sqr_schoolbook(LimbSpan a, LimbVec& out) {
  const std::size_t n = a.size();
  out.assign(2 * n, 0);
  // Off-diagonal products once, then double, then add the squares.
  for (std::size_t i = 0; i < n; ++i) {
    Limb carry = 0;
    for (std::size_t j = i + 1; j < n; ++j) {
      Wide t = static_cast<Wide>(a[i]) * a[j] + out[i + j] + carry;
      out[i + j] = static_cast<Limb>(t);
      carry = static_cast<Limb>(t >> 64);
    }
    out[i + n] = carry;
  }
  Limb top = 0;
  for (std::size_t i = 0; i < 2 * n; ++i) {
    const Limb next = out[i] >> 63;
    out[i] = (out[i] << 1) | top;
    top = next;
  }
  Limb carry = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Wide sq = static_cast<Wide>(a[i]) * a[i];
    Wide lo = static_cast<Wide>(out[2 * i]) + static_cast<Limb>(sq) + carry;
    out[2 * i] = static_cast<Limb>(lo);
    Wide hi = static_cast<Wide>(out[2 * i + 1]) + static_cast<Limb>(sq >> 64) +
              static_cast<Limb>(lo >> 64);
    out[2 * i + 1] = static_cast<Limb>(hi);
    carry = static_cast<Limb>(hi >> 64);
  }
}

void mul_spans(LimbSpan a, LimbSpan b, LimbVec& out);

void mul_karatsuba(LimbSpan a, LimbSpan b, LimbVec& out) {
  const std::size_t half = (std::max(a.size(), b.size()) + 1) / 2;
  if (a.size() < b.size()) std::swap(a, b);

  out.assign(a.size() + b.size(), 0);
  if (b.size() <= half) {
    // Unbalanced: split only the longer operand.
    LimbVec lo;
    LimbVec hi;
    mul_spans(a.first(half), b, lo);
    mul_spans(a.subspan(half), b, hi);
    add_at(out, LimbSpan(lo.data(), trimmed_size(lo)), 0);
    add_at(out, LimbSpan(hi.data(), trimmed_size(hi)), half);
    return;
  }

  const LimbSpan a0 = a.first(half);
  const LimbSpan a1 = a.subspan(half);
  const LimbSpan b0 = b.first(half);
  const LimbSpan b1 = b.subspan(half);

  LimbVec z0;
  LimbVec z2;
  LimbVec z1;
  mul_spans(a0, b0, z0);
  mul_spans(a1, b1, z2);
  const LimbVec sa = add_spans(a0, a1);
  const LimbVec sb = add_spans(b0, b1);
  mul_spans(LimbSpan(sa.data(), trimmed_size(sa)), LimbSpan(sb.data(), trimmed_size(sb)), z1);
  z1.push_back(0);
  sub_in_place(z1, LimbSpan(z0.data(), trimmed_size(z0)));
  sub_in_place(z1, LimbSpan(z2.data(), trimmed_size(z2)));

  add_at(out, LimbSpan(z0.data(), trimmed_size(z0)), 0);
  add_at(out, LimbSpan(z1.data(), trimmed_size(z1)), half);
  add_at(out, LimbSpan(z2.data(), trimmed_size(z2)), 2 * half);
}

void mul_spans(LimbSpan a, LimbSpan b, LimbVec& out) {
  a = a.first(trimmed_size(a));
  b = b.first(trimmed_size(b));
  if (a.empty() || b.empty()) {
    out.clear();
    return;
  }
  if (std::min(a.size(), b.size()) < Natural::kKaratsubaThreshold) {
    if (a.data() == b.data() && a.size() == b.size()) {
      sqr_schoolbook(a, out);
    } else {
      mul_schoolbook(a, b, out);
    }
    return;
  }
  mul_karatsuba(a, b, out);
}

// Divides in place by a single word, returns the remainder.
Limb div_small_in_place(LimbVec& v, Limb d) {
  Wide rem = 0;
  for (std::size_t i = v.size(); i-- > 0;) {
    Wide cur = (rem << 64) | v[i];
    v[i] = static_cast<Limb>(cur / d);
    rem = cur % d;
  }
  trim(v);
  return static_cast<Limb>(rem);
}

// Knuth, TAOCP vol. 2, algorithm D. Requires divisor with >= 2 limbs.
void div_knuth(LimbSpan u_in, LimbSpan v_in, LimbVec& quotient, LimbVec& remainder) {
  const std::size_t n = v_in.size();
  const std::size_t m = u_in.size() - n;
  const int s = std::countl_zero(v_in[n - 1]);

  LimbVec v(n);
  LimbVec u(u_in.size() + 1);
  for (std::size_t i = n; i-- > 1;) {
    v[i] = (v_in[i] << s) | (s == 0 ? 0 : v_in[i - 1] >> (64 - s));
  }
  v[0] = v_in[0] << s;
  u[u_in.size()] = s == 0 ? 0 : u_in[u_in.size() - 1] >> (64 - s);
  for (std::size_t i = u_in.size(); i-- > 1;) {
    u[i] = (u_in[i] << s) | (s == 0 ? 0 : u_in[i - 1] >> (64 - s));
  }
  u[0] = u_in[0] << s;

  quotient.assign(m + 1, 0);
  const Wide base = static_cast<Wide>(1) << 64;
  for (std::size_t j = m + 1; j-- > 0;) {
    const Wide num = (static_cast<Wide>(u[j + n]) << 64) | u[j + n - 1];
    Wide qhat = num / v[n - 1];
    Wide rhat = num % v[n - 1];
    while (qhat >= base || qhat * v[n - 2] > ((rhat << 64) | u[j + n - 2])) {
      --qhat;
      rhat += v[n - 1];
      if (rhat >= base) break;
    }

    // u[j..j+n] -= qhat * v
    Limb borrow = 0;
    Limb carry = 0;
    for (std::size_t i = 0; i < n; ++i) {
      Wide p = qhat * v[i] + carry;
      carry = static_cast<Limb>(p >> 64);
      const Limb plo = static_cast<Limb>(p);
      const Limb ui = u[i + j];
      const Limb d = ui - plo - borrow;
      borrow = (ui < plo || (ui == plo && borrow != 0)) ? 1 : 0;
      u[i + j] = d;
    }
    const Limb top = u[j + n];
    const Limb d = top - carry - borrow;
    const bool negative = top < carry || (top == carry && borrow != 0);
    u[j + n] = d;

    if (negative) {
      --qhat;
      Limb c = 0;
      for (std::size_t i = 0; i < n; ++i) {
        Wide t = static_cast<Wide>(u[i + j]) + v[i] + c;
        u[i + j] = static_cast<Limb>(t);
        c = static_cast<Limb>(t >> 64);
      }
      u[j + n] += c;
    }
    quotient[j] = static_cast<Limb>(qhat);
  }

  remainder.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    remainder[i] = (u[i] >> s) | (s == 0 ? 0 : u[i + 1] << (64 - s));
  }
  trim(quotient);
  trim(remainder);
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Natural::Natural(std::uint64_t value) {
  if (value != 0) limbs_.push_back(value);
}

Natural Natural::from_limbs(std::vector<Limb> limbs) { return Natural(std::move(limbs)); }

Natural Natural::power_of_two(std::size_t exponent) {
  std::vector<Limb> limbs(exponent / kLimbBits + 1, 0);
  limbs.back() = Limb{1} << (exponent % kLimbBits);
  return Natural(std::move(limbs));
}

void Natural::normalize() { trim(limbs_); }

Natural Natural::from_decimal(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty decimal string");
  constexpr std::size_t kChunk = 19;
  constexpr Limb kChunkBase = 10'000'000'000'000'000'000ULL;
  LimbVec limbs;
  std::size_t pos = 0;
  // First chunk takes the remainder so the rest are full 19-digit groups.
  std::size_t first = text.size() % kChunk;
  if (first == 0) first = kChunk;
  while (pos < text.size()) {
    const std::size_t len = pos == 0 ? first : kChunk;
    Limb chunk = 0;
    Limb scale = 1;
    for (std::size_t i = 0; i < len; ++i) {
      const char c = text[pos + i];
      if (c < '0' || c > '9') throw std::invalid_argument("invalid decimal digit");
      chunk = chunk * 10 + static_cast<Limb>(c - '0');
      scale *= 10;
    }
    if (len == kChunk) scale = kChunkBase;
    Limb carry = chunk;
    for (Limb& l : limbs) {
      Wide t = static_cast<Wide>(l) * scale + carry;
      l = static_cast<Limb>(t);
      carry = static_cast<Limb>(t >> 64);
    }
    if (carry != 0) limbs.push_back(carry);
    pos += len;
  }
  return Natural(std::move(limbs));
}

Natural Natural::from_hex(std::string_view text) {
  if (text.starts_with("0x") || text.starts_with("0X")) text.remove_prefix(2);
  if (text.empty()) throw std::invalid_argument("empty hex string");
  LimbVec limbs((text.size() + 15) / 16, 0);
  for (std::size_t i = 0; i < text.size(); ++i) {
    const int d = hex_digit(text[text.size() - 1 - i]);
    if (d < 0) throw std::invalid_argument("invalid hex digit");
    limbs[i / 16] |= static_cast<Limb>(d) << (4 * (i % 16));
  }
  return Natural(std::move(limbs));
}

Natural Natural::parse(std::string_view text) {
  if (text.starts_with("0x") || text.starts_with("0X")) return from_hex(text);
  return from_decimal(text);
}

std::string Natural::to_decimal() const {
  if (is_zero()) return "0";
  constexpr Limb kChunkBase = 10'000'000'000'000'000'000ULL;
  LimbVec v = limbs_;
  std::vector<Limb> chunks;
  while (!v.empty()) chunks.push_back(div_small_in_place(v, kChunkBase));
  std::string out = std::to_string(chunks.back());
  for (std::size_t i = chunks.size() - 1; i-- > 0;) {
    std::string part = std::to_string(chunks[i]);
    out.append(19 - part.size(), '0');
    out += part;
  }
  return out;
}

std::string Natural::to_hex() const {
  if (is_zero()) return "0";
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(limbs_.size() * 16);
  for (std::size_t i = limbs_.size(); i-- > 0;) {
    for (int shift = 60; shift >= 0; shift -= 4) {
      const char c = kDigits[(limbs_[i] >> shift) & 0xF];
      if (out.empty() && c == '0') continue;
      out.push_back(c);
    }
  }
  return out;
}

std::size_t Natural::bit_length() const {
  if (limbs_.empty()) return 0;
  return limbs_.size() * kLimbBits - static_cast<std::size_t>(std::countl_zero(limbs_.back()));
}

bool Natural::bit(std::size_t index) const {
  const std::size_t w = index / kLimbBits;
  if (w >= limbs_.size()) return false;
  return ((limbs_[w] >> (index % kLimbBits)) & 1U) != 0;
}

std::size_t Natural::trailing_zeros() const {
  for (std::size_t i = 0; i < limbs_.size(); ++i) {
    if (limbs_[i] != 0) return i * kLimbBits + static_cast<std::size_t>(std::countr_zero(limbs_[i]));
  }
  return 0;
}

std::uint64_t Natural::to_u64() const {
  if (!fits_u64()) throw std::overflow_error("Natural does not fit in 64 bits");
  return low_u64();
}

Natural Natural::low_bits(std::size_t bits) const {
  const std::size_t words = bits / kLimbBits;
  if (words >= limbs_.size()) return *this;
  LimbVec out(limbs_.begin(), limbs_.begin() + static_cast<std::ptrdiff_t>(words + 1));
  const std::size_t rem = bits % kLimbBits;
  out.back() &= rem == 0 ? 0 : (~Limb{0} >> (kLimbBits - rem));
  return Natural(std::move(out));
}

std::uint64_t Natural::mod_u64(std::uint64_t divisor) const {
  if (divisor == 0) throw std::domain_error("division by zero");
  Wide rem = 0;
  for (std::size_t i = limbs_.size(); i-- > 0;) {
    rem = ((rem << 64) | limbs_[i]) % divisor;
  }
  return static_cast<std::uint64_t>(rem);
}

Natural& Natural::operator+=(const Natural& rhs) {
  if (limbs_.size() < rhs.limbs_.size()) limbs_.resize(rhs.limbs_.size(), 0);
  limbs_.push_back(0);
  add_at(limbs_, rhs.limbs_, 0);
  normalize();
  return *this;
}

Natural& Natural::operator-=(const Natural& rhs) {
  if (compare(limbs_, rhs.limbs_) < 0) throw std::domain_error("Natural subtraction underflow");
  sub_in_place(limbs_, rhs.limbs_);
  normalize();
  return *this;
}

Natural& Natural::operator*=(const Natural& rhs) {
  LimbVec out;
  mul_spans(limbs_, rhs.limbs_, out);
  limbs_ = std::move(out);
  normalize();
  return *this;
}

Natural operator*(const Natural& lhs, const Natural& rhs) {
  LimbVec out;
  mul_spans(lhs.limbs_, rhs.limbs_, out);
  return Natural(std::move(out));
}

Natural square(const Natural& value) { return value * value; }

Natural& Natural::operator<<=(std::size_t shift) {
  if (is_zero() || shift == 0) return *this;
  const std::size_t words = shift / kLimbBits;
  const std::size_t bits = shift % kLimbBits;
  LimbVec out(limbs_.size() + words + 1, 0);
  for (std::size_t i = 0; i < limbs_.size(); ++i) {
    out[i + words] |= limbs_[i] << bits;
    if (bits != 0) out[i + words + 1] = limbs_[i] >> (kLimbBits - bits);
  }
  limbs_ = std::move(out);
  normalize();
  return *this;
}

Natural& Natural::operator>>=(std::size_t shift) {
  const std::size_t words = shift / kLimbBits;
  const std::size_t bits = shift % kLimbBits;
  if (words >= limbs_.size()) {
    limbs_.clear();
    return *this;
  }
  const std::size_t n = limbs_.size() - words;
  for (std::size_t i = 0; i < n; ++i) {
    Limb v = limbs_[i + words] >> bits;
    if (bits != 0 && i + words + 1 < limbs_.size()) v |= limbs_[i + words + 1] << (kLimbBits - bits);
    limbs_[i] = v;
  }
  limbs_.resize(n);
  normalize();
  return *this;
}

std::strong_ordering operator<=>(const Natural& lhs, const Natural& rhs) {
  const int c = compare(lhs.limbs_, rhs.limbs_);
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::pair<Natural, Natural> divmod(const Natural& dividend, const Natural& divisor) {
  if (divisor.is_zero()) throw std::domain_error("division by zero");
  if (dividend < divisor) return {Natural{}, dividend};
  const auto d = divisor.limbs();
  if (d.size() == 1) {
    LimbVec q(dividend.limbs().begin(), dividend.limbs().end());
    const Limb r = div_small_in_place(q, d[0]);
    return {Natural::from_limbs(std::move(q)), Natural(r)};
  }
  LimbVec q;
  LimbVec r;
  div_knuth(dividend.limbs(), d, q, r);
  return {Natural::from_limbs(std::move(q)), Natural::from_limbs(std::move(r))};
}

Natural operator/(const Natural& lhs, const Natural& rhs) { return divmod(lhs, rhs).first; }

Natural operator%(const Natural& lhs, const Natural& rhs) { return divmod(lhs, rhs).second; }

std::ostream& operator<<(std::ostream& os, const Natural& value) {
  return os << (os.flags() & std::ios::hex ? value.to_hex() : value.to_decimal());
}

}  // namespace fermatec
