#include "fermatec/curve.hpp"

#include <stdexcept>

namespace fermatec {

namespace {

Residue invert_or_throw(const Residue& a) {
  auto r = inv_mod(a);
  if (auto* inv = std::get_if<Residue>(&r)) return *inv;
  throw std::domain_error("non-invertible denominator in affine arithmetic");
}

}  // namespace

CurveParams CurveParams::from_fourth_root(ModulusRef modulus, const Natural& c) {
  if (!gcd(c, modulus->value()).is_one()) throw std::invalid_argument("curve fourth root shares a factor with N");
  Residue root(modulus, c);
  Residue sqrt_m = root * root;
  Residue m = sqrt_m * sqrt_m;
  return CurveParams{std::move(modulus), std::move(m), c, std::move(sqrt_m)};
}

QuarticUnit QuarticUnit::checked(Residue i) {
  const Residue minus_one = -Residue(i.modulus(), 1);
  if (!(i * i == minus_one)) throw std::invalid_argument("not a square root of -1");
  return QuarticUnit{std::move(i)};
}

QuarticUnit i_unit(const ModulusRef& modulus) {
  const FormModulus* form = modulus->form();
  if (form == nullptr) throw std::invalid_argument("i_unit needs a special-form modulus");
  const std::uint64_t k = form->k;
  if (form->form == Form::F) {
    return QuarticUnit{Residue(modulus, Natural::power_of_two(std::size_t{1} << (k - 1)))};
  }
  // N = a^2 + b^2 with b = 2^k, a = 2^k ± 1, so (a / b)^2 ≡ -1.
  const Natural b = Natural::power_of_two(k);
  const Natural a = form->form == Form::G ? b + Natural(1) : b - Natural(1);
  // 2^-k ≡ ((N + 1) / 2)^k
  const Residue half(modulus, (modulus->value() + Natural(1)) >> 1);
  return QuarticUnit{Residue(modulus, a) * pow_mod(half, Natural(k))};
}

XState XState::finite(Residue x) {
  if (x.is_zero()) throw std::invalid_argument("Finite x-state requires x != 0");
  return XState(Kind::Finite, std::move(x));
}

XState XState::from_x(Residue x) {
  if (x.is_zero()) return zero_point();
  return XState(Kind::Finite, std::move(x));
}

std::string XState::render() const {
  switch (kind_) {
    case Kind::Zero:
      return "0";
    case Kind::Infinity:
      return "inf";
    case Kind::Finite:
      break;
  }
  return x_->value().to_decimal();
}

StepResult eta_step(const XState& s, const CurveParams& cp, const QuarticUnit& i) {
  if (!s.is_finite()) return XState::infinity();  // Ker(1 + i) = {inf, (0,0)}
  const Residue& x = s.x();
  const Residue two_i_x = (i.i + i.i) * x;
  auto inv = inv_mod(two_i_x);
  if (auto* bad = std::get_if<NonInvertible>(&inv)) return FactorFound{std::move(bad->g)};
  return XState::from_x((x * x - cp.m) * std::get<Residue>(inv));
}

StepResult double_step(const XState& s, const CurveParams& cp) {
  if (!s.is_finite()) return XState::infinity();
  const Residue& x = s.x();
  const Residue x2 = x * x;
  const Residue cubic = (x2 - cp.m) * x;
  auto inv = inv_mod(cubic + cubic + cubic + cubic);
  if (auto* bad = std::get_if<NonInvertible>(&inv)) {
    // gcd = N: x^3 - m x ≡ 0, a 2-torsion point.
    if (bad->g == cp.modulus->value()) return XState::infinity();
    return FactorFound{std::move(bad->g)};
  }
  const Residue num = x2 + cp.m;
  return XState::from_x(num * num * std::get<Residue>(inv));
}

bool on_curve(const AffinePoint& p, const CurveParams& cp) {
  if (p.is_infinity()) return true;
  const Residue& x = p.x();
  return p.y() * p.y() == (x * x - cp.m) * x;
}

AffinePoint negate(const AffinePoint& p) {
  if (p.is_infinity()) return p;
  return AffinePoint::at(p.x(), -p.y());
}

AffinePoint apply_i(const AffinePoint& p, const QuarticUnit& i) {
  if (p.is_infinity()) return p;
  return AffinePoint::at(-p.x(), i.i * p.y());
}

AffinePoint affine_add(const AffinePoint& p, const AffinePoint& q, const CurveParams& cp) {
  if (p.is_infinity()) return q;
  if (q.is_infinity()) return p;
  Residue slope = p.x();
  if (p.x() == q.x()) {
    if ((p.y() + q.y()).is_zero()) return AffinePoint::infinity();
    // Tangent: (3x^2 - m) / 2y
    const Residue x2 = p.x() * p.x();
    slope = (x2 + x2 + x2 - cp.m) * invert_or_throw(p.y() + p.y());
  } else {
    slope = (q.y() - p.y()) * invert_or_throw(q.x() - p.x());
  }
  Residue x3 = slope * slope - p.x() - q.x();
  Residue y3 = slope * (p.x() - x3) - p.y();
  return AffinePoint::at(std::move(x3), std::move(y3));
}

AffinePoint scalar_mul(const Natural& n, const AffinePoint& p, const CurveParams& cp) {
  AffinePoint acc = AffinePoint::infinity();
  for (std::size_t bit = n.bit_length(); bit-- > 0;) {
    acc = affine_add(acc, acc, cp);
    if (n.bit(bit)) acc = affine_add(acc, p, cp);
  }
  return acc;
}

}  // namespace fermatec
