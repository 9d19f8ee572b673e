#include "defstack/field.hpp"

namespace defstack {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NoUnit: return "NoUnit";
    case Errc::NotCommutative: return "NotCommutative";
    case Errc::NotAssociative: return "NotAssociative";
    case Errc::MaximalIdealNotNilpotent: return "MaximalIdealNotNilpotent";
    case Errc::InfiniteDimensional: return "InfiniteDimensional";
    case Errc::NotSurjective: return "NotSurjective";
    case Errc::NeitherMapSurjective: return "NeitherMapSurjective";
    case Errc::FirstMapNotSurjective: return "FirstMapNotSurjective";
    case Errc::LegNotSurjective: return "LegNotSurjective";
    case Errc::EnumerationBudgetExceeded: return "EnumerationBudgetExceeded";
    case Errc::NotADeformationFunctor: return "NotADeformationFunctor";
    case Errc::GluingUnavailable: return "GluingUnavailable";
    case Errc::TruncationTooShallow: return "TruncationTooShallow";
    case Errc::FunctorialityViolation: return "FunctorialityViolation";
    case Errc::RestrictionMismatch: return "RestrictionMismatch";
    case Errc::InvalidModule: return "InvalidModule";
    case Errc::InvalidQuotient: return "InvalidQuotient";
    case Errc::NotARefinement: return "NotARefinement";
    case Errc::UnsupportedField: return "UnsupportedField";
    case Errc::BadInput: return "BadInput";
  }
  return "UnknownError";
}

namespace {
bool is_prime(long p) {
  if (p < 2) return false;
  for (long d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}
}  // namespace

Field Field::prime(long p) {
  if (!is_prime(p))
    throw DefstackError(Errc::BadInput,
                        "characteristic must be prime, got " + std::to_string(p));
  return Field(Kind::prime, p);
}

Rat Field::from_int(long v) const { return reduce(Rat(v)); }

Rat Field::reduce(const Rat& v) const {
  if (kind_ == Kind::rationals) return v;
  Int num = numerator(v);
  Int den = denominator(v);
  Int p(p_);
  Int dmod = den % p;
  if (dmod == 0)
    throw DefstackError(Errc::BadInput,
                        "denominator divisible by characteristic");
  // num/den mod p: multiply num by den^{-1} mod p.
  Int nmod = num % p;
  if (nmod < 0) nmod += p;
  if (dmod < 0) dmod += p;
  // extended gcd inverse of dmod
  long a = static_cast<long>(dmod), m = p_;
  long x0 = 0, x1 = 1, a0 = m, a1 = a;
  while (a1 != 0) {
    long q = a0 / a1;
    long t = a0 - q * a1; a0 = a1; a1 = t;
    t = x0 - q * x1; x0 = x1; x1 = t;
  }
  long invd = ((x0 % m) + m) % m;
  Int r = (nmod * invd) % p;
  if (r < 0) r += p;
  return Rat(r);
}

Rat Field::inv(const Rat& a) const {
  if (a.is_zero()) throw DefstackError(Errc::BadInput, "inverse of zero");
  if (kind_ == Kind::rationals) return Rat(1) / a;
  return reduce(Rat(Int(1), numerator(reduce(a))));
}

std::vector<Rat> Field::elements() const {
  if (kind_ != Kind::prime)
    throw DefstackError(Errc::UnsupportedField,
                        "element enumeration requires a finite field");
  std::vector<Rat> out;
  out.reserve(static_cast<size_t>(p_));
  for (long i = 0; i < p_; ++i) out.emplace_back(i);
  return out;
}

std::optional<long> Field::size() const {
  if (kind_ == Kind::prime) return p_;
  return std::nullopt;
}

std::string Field::describe() const {
  if (kind_ == Kind::rationals) return "Q";
  return "F" + std::to_string(p_);
}

}  // namespace defstack
