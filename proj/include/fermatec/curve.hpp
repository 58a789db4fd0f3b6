#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "fermatec/modular.hpp"
#include "fermatec/natural.hpp"

namespace fermatec {

// The curve y^2 = x^3 - m*x with m = c^4.
struct CurveParams {
  ModulusRef modulus;
  Residue m;
  Natural c;
  Residue sqrt_m;  // c^2

  // Throws std::invalid_argument if gcd(c, N) != 1.
  static CurveParams from_fourth_root(ModulusRef modulus, const Natural& c);
};

// A fixed square root of -1 modulo N.
struct QuarticUnit {
  Residue i;

  // Throws std::invalid_argument unless i^2 ≡ -1.
  static QuarticUnit checked(Residue i);
};

// F: 2^(2^(k-1)). G: (2^k + 1) / 2^k. H: (2^k - 1) / 2^k.
// N = a^2 + b^2 exactly in every case, so i^2 ≡ -1 holds for composite N too.
QuarticUnit i_unit(const ModulusRef& modulus);

// x-coordinate state of a point: a finite nonzero x, the point (0,0), or the
// point at infinity.
class XState {
 public:
  enum class Kind { Finite, Zero, Infinity };

  // Throws std::invalid_argument if x == 0; use from_x to classify.
  static XState finite(Residue x);
  static XState zero_point() { return XState(Kind::Zero, std::nullopt); }
  static XState infinity() { return XState(Kind::Infinity, std::nullopt); }
  // ZeroPoint when x == 0, Finite otherwise.
  static XState from_x(Residue x);

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  bool is_zero_point() const { return kind_ == Kind::Zero; }
  bool is_infinity() const { return kind_ == Kind::Infinity; }
  // Precondition: is_finite().
  const Residue& x() const { return *x_; }

  // "0" for ZeroPoint, "inf" for Infinity, decimal x otherwise.
  std::string render() const;

  friend bool operator==(const XState& a, const XState& b) = default;

 private:
  XState(Kind kind, std::optional<Residue> x) : kind_(kind), x_(std::move(x)) {}

  Kind kind_;
  std::optional<Residue> x_;
};

// A denominator shared a nontrivial factor 1 < g < N with the modulus.
struct FactorFound {
  Natural g;
};

using StepResult = std::variant<XState, FactorFound>;

// x-coordinate of (1 + i)P: x' = (x^2 - m) / (2 i x).
StepResult eta_step(const XState& s, const CurveParams& cp, const QuarticUnit& i);

// x-coordinate of 2P: x' = (x^2 + m)^2 / (4 (x^3 - m x)).
StepResult double_step(const XState& s, const CurveParams& cp);

class AffinePoint {
 public:
  static AffinePoint infinity() { return AffinePoint(); }
  static AffinePoint at(Residue x, Residue y) { return AffinePoint(std::move(x), std::move(y)); }

  bool is_infinity() const { return !coords_.has_value(); }
  const Residue& x() const { return coords_->first; }
  const Residue& y() const { return coords_->second; }

  friend bool operator==(const AffinePoint& a, const AffinePoint& b) = default;

 private:
  AffinePoint() = default;
  AffinePoint(Residue x, Residue y) : coords_(std::pair{std::move(x), std::move(y)}) {}

  std::optional<std::pair<Residue, Residue>> coords_;
};

bool on_curve(const AffinePoint& p, const CurveParams& cp);

AffinePoint negate(const AffinePoint& p);

// [i](x, y) = (-x, i*y)
AffinePoint apply_i(const AffinePoint& p, const QuarticUnit& i);

// Chord-and-tangent addition. Requires a prime modulus; throws
// std::domain_error if a denominator is not invertible.
AffinePoint affine_add(const AffinePoint& p, const AffinePoint& q, const CurveParams& cp);

// Double-and-add over affine_add.
AffinePoint scalar_mul(const Natural& n, const AffinePoint& p, const CurveParams& cp);

}  // namespace fermatec
