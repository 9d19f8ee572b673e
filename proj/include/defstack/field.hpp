#ifndef DEFSTACK_FIELD_HPP
#define DEFSTACK_FIELD_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace defstack {

// Exact scalars. Prime-field elements are kept as canonical integer
// representatives in [0, p).
using Rat = boost::multiprecision::cpp_rational;
using Int = boost::multiprecision::cpp_int;

enum class Errc {
  NoUnit,
  NotCommutative,
  NotAssociative,
  MaximalIdealNotNilpotent,
  InfiniteDimensional,
  NotSurjective,
  NeitherMapSurjective,
  FirstMapNotSurjective,
  LegNotSurjective,
  EnumerationBudgetExceeded,
  NotADeformationFunctor,
  GluingUnavailable,
  TruncationTooShallow,
  FunctorialityViolation,
  RestrictionMismatch,
  InvalidModule,
  InvalidQuotient,
  NotARefinement,
  UnsupportedField,
  BadInput,
};

const char* errc_name(Errc c);

class DefstackError : public std::runtime_error {
 public:
  DefstackError(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

struct Budget {
  long max_objects = 4096;
  int max_dim = 6;
};

class Field {
 public:
  enum class Kind { rationals, prime };

  static Field rationals() { return Field(Kind::rationals, 0); }
  static Field prime(long p);

  Kind kind() const { return kind_; }
  long characteristic() const { return kind_ == Kind::prime ? p_ : 0; }
  bool is_finite() const { return kind_ == Kind::prime; }

  Rat zero() const { return Rat(0); }
  Rat one() const { return Rat(1); }
  Rat from_int(long v) const;
  // Canonical form of an arbitrary rational in this field (reduces mod p;
  // rejects denominators divisible by p).
  Rat reduce(const Rat& v) const;

  Rat add(const Rat& a, const Rat& b) const { return reduce(a + b); }
  Rat sub(const Rat& a, const Rat& b) const { return reduce(a - b); }
  Rat mul(const Rat& a, const Rat& b) const { return reduce(a * b); }
  Rat neg(const Rat& a) const { return reduce(-a); }
  Rat inv(const Rat& a) const;
  Rat div(const Rat& a, const Rat& b) const { return mul(a, inv(b)); }
  bool is_zero(const Rat& a) const { return a.is_zero(); }

  // All field elements; only available over F_p.
  std::vector<Rat> elements() const;
  std::optional<long> size() const;

  bool operator==(const Field& o) const {
    return kind_ == o.kind_ && p_ == o.p_;
  }
  bool operator!=(const Field& o) const { return !(*this == o); }

  std::string describe() const;

 private:
  Field(Kind k, long p) : kind_(k), p_(p) {}
  Kind kind_;
  long p_;
};

}  // namespace defstack

#endif
