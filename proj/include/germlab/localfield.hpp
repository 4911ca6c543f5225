#pragma once

#include <climits>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "germlab/rational.hpp"

namespace germlab {

/// Mixed characteristic is Q_p (uniformizer p), equal characteristic is
/// F_p((t)) (uniformizer t).
enum class FieldKind { Mixed, Equal };

class FieldSpec {
 public:
  FieldSpec(FieldKind kind, int p, int precision);

  static FieldSpec mixed(int p, int precision = 16) { return {FieldKind::Mixed, p, precision}; }
  static FieldSpec equal(int p, int precision = 16) { return {FieldKind::Equal, p, precision}; }

  FieldKind kind() const { return kind_; }
  int p() const { return p_; }
  /// Digit budget N: every element stores at most N digits after its leading one.
  int precision() const { return precision_; }

  /// "Q_5" or "F_5((t))".
  std::string name() const;
  /// "5" or "t", as used in element literals.
  std::string uniformizer_symbol() const;

  FieldSpec with_precision(int precision) const { return {kind_, p_, precision}; }

  friend bool operator==(const FieldSpec&, const FieldSpec&) = default;

 private:
  FieldKind kind_;
  int p_;
  int precision_;
};

/// A comparison, ord or ac was requested that the stored digits cannot decide.
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Domain errors: spec mismatch, inverse of zero, square root of a non-square.
class ArithmeticError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// F^x / (F^x)^2 for odd p, in label order 1, u, pi, u*pi where u is the
/// smallest positive nonresidue mod p.
enum class SquareClass { One = 0, NonsquareUnit = 1, Uniformizer = 2, NonsquareUniformizer = 3 };

std::string to_string(SquareClass c);
inline constexpr SquareClass kAllSquareClasses[4] = {SquareClass::One, SquareClass::NonsquareUnit,
                                                     SquareClass::Uniformizer,
                                                     SquareClass::NonsquareUniformizer};

int legendre_symbol(long a, int p);
/// Smallest positive integer that is a quadratic nonresidue mod p.
int smallest_nonresidue(int p);
bool is_prime(long n);

/// Element of Q_p or F_p((t)) known modulo pi^absolute_precision().
///
/// Three shapes exist: the exact zero (valuation +inf), a "fuzzy zero" whose
/// known digits all vanish (value in pi^k O, nothing more is known), and a
/// nonzero element pi^v (d_0 + d_1 pi + ...) with d_0 != 0 and at most N
/// relative digits. ord/ac/inverse of a fuzzy zero throw PrecisionError.
class LocalElement {
 public:
  explicit LocalElement(const FieldSpec& spec);  // exact zero

  static LocalElement zero(const FieldSpec& spec) { return LocalElement(spec); }
  static LocalElement one(const FieldSpec& spec) { return from_int(spec, 1); }
  static LocalElement from_int(const FieldSpec& spec, long n);
  static LocalElement from_integer(const FieldSpec& spec, const Integer& n);
  /// Rationals with denominator prime to p in equal characteristic.
  static LocalElement from_rational(const FieldSpec& spec, const Rational& q);
  static LocalElement uniformizer(const FieldSpec& spec);
  static LocalElement uniformizer_power(const FieldSpec& spec, int e);
  /// pi^valuation * (digits[0] + digits[1] pi + ...). Leading zero digits are
  /// absorbed into the valuation. Missing digits up to the budget are zero.
  static LocalElement from_digits(const FieldSpec& spec, int valuation, std::span<const int> digits);
  /// Element known only modulo pi^absolute_precision (a coset representative).
  static LocalElement from_digits(const FieldSpec& spec, int valuation, std::span<const int> digits,
                                  int absolute_precision);
  static LocalElement fuzzy_zero(const FieldSpec& spec, int absolute_precision);
  /// Smallest positive integer nonresidue, as a unit.
  static LocalElement nonsquare_unit(const FieldSpec& spec);
  static LocalElement square_class_representative(const FieldSpec& spec, SquareClass c);

  const FieldSpec& spec() const { return spec_; }

  bool is_zero() const { return kind_ == Shape::ExactZero; }
  bool is_fuzzy_zero() const { return kind_ == Shape::FuzzyZero; }
  bool is_nonzero() const { return kind_ == Shape::Nonzero; }

  /// nullopt encodes +inf (exact zero). Throws PrecisionError on a fuzzy zero.
  std::optional<int> ord() const;
  /// Largest k with the value known to lie in pi^k O (INT_MAX for exact zero).
  int ord_lower_bound() const;
  /// Leading digit; 0 for the exact zero. Throws PrecisionError on a fuzzy zero.
  int ac() const;

  /// INT_MAX for the exact zero.
  int absolute_precision() const { return abs_prec_; }
  /// Number of known digits after (and including) the leading one; 0 for zeros.
  int relative_precision() const { return static_cast<int>(digits_.size()); }
  std::span<const int> digits() const { return digits_; }
  /// Digit at absolute position i (coefficient of pi^i); requires i < absolute_precision().
  int digit_at(int i) const;

  LocalElement operator-() const;
  LocalElement inverse() const;
  LocalElement pow(int e) const;
  /// Same value, known only modulo pi^k (k may not exceed the current precision).
  LocalElement truncated(int k) const;

  friend LocalElement operator+(const LocalElement& a, const LocalElement& b);
  friend LocalElement operator-(const LocalElement& a, const LocalElement& b);
  friend LocalElement operator*(const LocalElement& a, const LocalElement& b);
  friend LocalElement operator/(const LocalElement& a, const LocalElement& b);
  LocalElement& operator+=(const LocalElement& b) { return *this = *this + b; }
  LocalElement& operator-=(const LocalElement& b) { return *this = *this - b; }
  LocalElement& operator*=(const LocalElement& b) { return *this = *this * b; }

  /// Structural equality: same spec, shape, valuation, precision and digits.
  friend bool operator==(const LocalElement& a, const LocalElement& b);

  /// True iff a - b vanishes at the available precision.
  friend bool same_value(const LocalElement& a, const LocalElement& b);

  std::string to_string() const;

 private:
  enum class Shape { ExactZero, FuzzyZero, Nonzero };

  static LocalElement normalize(const FieldSpec& spec, int start, std::vector<int> window,
                                int absolute_precision);
  void require_same_field(const LocalElement& other) const;

  FieldSpec spec_;
  Shape kind_ = Shape::ExactZero;
  int val_ = INT_MAX;
  int abs_prec_ = INT_MAX;
  std::vector<int> digits_;
};

std::ostream& operator<<(std::ostream& os, const LocalElement& a);

/// Parses the printed form: "0", "5^2*(3 + 1*5)", "t^-1*(2 + 1*t)",
/// "3 + 4*5 + O(5^3)", "O(t^4)".
LocalElement parse_local_element(const FieldSpec& spec, std::string_view text);

/// Requires a nonzero, determined element.
SquareClass square_class(const LocalElement& a);

struct CertifiedSquareClass {
  SquareClass cls;
  LocalElement root;  ///< root^2 == a / representative at the stated precision
};
SquareClass square_class_of(int valuation, int leading_digit, int p);
CertifiedSquareClass certified_square_class(const LocalElement& a);

/// Hensel square root; the branch with ac in {1..(p-1)/2}.
LocalElement sqrt(const LocalElement& a);

/// Tame formula for odd p.
int hilbert_symbol(const LocalElement& a, const LocalElement& b);
int hilbert_symbol(SquareClass a, SquareClass b, int p);

}  // namespace germlab
