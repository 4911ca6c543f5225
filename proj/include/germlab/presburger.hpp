#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "germlab/rational.hpp"

namespace germlab {

/// t -> sum c * t^k * q^(l*t), with (k, l) pairs distinct and c != 0.
class ExpPoly {
 public:
  struct Term {
    Rational c;
    int k;
    int l;
  };

  ExpPoly() = default;
  static ExpPoly constant(const Rational& c);
  static ExpPoly monomial(const Rational& c, int k, int l);
  /// Canonicalizes: merges equal (k, l) keys and drops zero coefficients.
  static ExpPoly from_terms(const std::vector<Term>& terms);

  bool is_zero() const { return terms_.empty(); }
  /// Descending in (l, k): the first term dominates for large t.
  std::vector<Term> terms() const;
  std::size_t size() const { return terms_.size(); }

  Rational specialize(long q, long t) const;

  ExpPoly operator-() const;
  friend ExpPoly operator+(const ExpPoly& a, const ExpPoly& b);
  friend ExpPoly operator-(const ExpPoly& a, const ExpPoly& b);
  friend ExpPoly operator*(const ExpPoly& a, const ExpPoly& b);
  friend bool operator==(const ExpPoly& a, const ExpPoly& b) { return a.terms_ == b.terms_; }

  /// "3*t^2*q^(-1*t) + 1/2*q^(2*t)"; "0" for the zero function.
  std::string to_string() const;

 private:
  std::map<std::pair<int, int>, Rational> terms_;  // key (l, k)
};

/// Parses sums and products of rationals, t, t^k, q^(l*t) and parenthesized
/// subexpressions, e.g. "(t-3)*(t-5)" or "2^(-1)*q^t - t".
ExpPoly parse_exppoly(std::string_view text);

/// {t in [lo, hi] : t = residue mod modulus}, hi absent for a right ray.
struct PresburgerPiece {
  long lo = 0;
  std::optional<long> hi;
  long modulus = 1;
  long residue = 0;

  static PresburgerPiece ray(long lo, long modulus = 1);
  static PresburgerPiece interval(long lo, long hi, long modulus = 1);

  bool bounded() const { return hi.has_value(); }
  bool empty() const { return hi && lo > *hi; }
  bool contains(long t) const;
  /// Empty result when the two pieces are disjoint.
  std::optional<PresburgerPiece> intersect(const PresburgerPiece& other) const;
  /// "[a..b] mod n" or "[a..) mod n", a being the first element.
  std::string to_string() const;
  friend bool operator==(const PresburgerPiece&, const PresburgerPiece&) = default;
};

/// "[a..b] mod n": the t in [a, b] congruent to a mod n.
PresburgerPiece parse_piece(std::string_view text);

class PiecewiseExpPoly {
 public:
  PiecewiseExpPoly() = default;
  /// Pieces must be pairwise disjoint.
  explicit PiecewiseExpPoly(std::vector<std::pair<PresburgerPiece, ExpPoly>> pieces);
  static PiecewiseExpPoly on(const PresburgerPiece& piece, const ExpPoly& f);

  const std::vector<std::pair<PresburgerPiece, ExpPoly>>& pieces() const { return pieces_; }
  /// nullopt off the domain.
  std::optional<Rational> evaluate(long q, long t) const;

  /// Sum and product live on the common refinement of the two domains.
  friend PiecewiseExpPoly operator+(const PiecewiseExpPoly& a, const PiecewiseExpPoly& b);
  friend PiecewiseExpPoly operator*(const PiecewiseExpPoly& a, const PiecewiseExpPoly& b);

  std::string to_string() const;

 private:
  std::vector<std::pair<PresburgerPiece, ExpPoly>> pieces_;
};

/// True iff the canonical form on every unbounded piece is empty. Throws
/// std::invalid_argument if no piece is unbounded.
bool is_eventually_zero(const PiecewiseExpPoly& f);

/// All t in [a, b] with f(t) = 0, by exact evaluation.
std::vector<long> zero_set_bounded(const ExpPoly& f, long q, long a, long b);

/// a0 such that for every t >= a0 the dominant term strictly exceeds the sum
/// of the magnitudes of the others, so f has no zero there. Not minimal.
long uniform_tail_bound(const ExpPoly& f, long q);

}  // namespace germlab
