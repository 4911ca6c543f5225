#include "germlab/localfield.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>
#include <sstream>

namespace germlab {

namespace {

// Digit-window arithmetic on O/pi^L. Windows are little-endian digit vectors.
struct Digits {
  FieldKind kind;
  int p;

  std::vector<int> add(const std::vector<int>& x, const std::vector<int>& y, std::size_t len) const {
    std::vector<int> out(len, 0);
    int carry = 0;
    for (std::size_t i = 0; i < len; ++i) {
      int s = (i < x.size() ? x[i] : 0) + (i < y.size() ? y[i] : 0);
      if (kind == FieldKind::Mixed) {
        s += carry;
        carry = s >= p ? 1 : 0;
        out[i] = s - carry * p;
      } else {
        out[i] = s % p;
      }
    }
    return out;
  }

  std::vector<int> neg(const std::vector<int>& x, std::size_t len) const {
    std::vector<int> out(len, 0);
    if (kind == FieldKind::Equal) {
      for (std::size_t i = 0; i < len && i < x.size(); ++i) out[i] = (p - x[i]) % p;
      return out;
    }
    std::size_t i = 0;
    while (i < len && (i >= x.size() || x[i] == 0)) ++i;
    if (i == len) return out;
    out[i] = p - x[i];
    for (std::size_t j = i + 1; j < len; ++j) out[j] = p - 1 - (j < x.size() ? x[j] : 0);
    return out;
  }

  std::vector<int> mul(const std::vector<int>& x, const std::vector<int>& y, std::size_t len) const {
    std::vector<long long> acc(len, 0);
    for (std::size_t i = 0; i < x.size() && i < len; ++i) {
      if (x[i] == 0) continue;
      for (std::size_t j = 0; j < y.size() && i + j < len; ++j) acc[i + j] += static_cast<long long>(x[i]) * y[j];
    }
    std::vector<int> out(len, 0);
    if (kind == FieldKind::Equal) {
      for (std::size_t i = 0; i < len; ++i) out[i] = static_cast<int>(acc[i] % p);
      return out;
    }
    long long carry = 0;
    for (std::size_t i = 0; i < len; ++i) {
      long long s = acc[i] + carry;
      out[i] = static_cast<int>(s % p);
      carry = s / p;
    }
    return out;
  }

  int inv_mod_p(int a) const {
    long long r = 1, b = a % p, e = p - 2;
    while (e > 0) {
      if (e & 1) r = r * b % p;
      b = b * b % p;
      e >>= 1;
    }
    return static_cast<int>(r);
  }

  // Newton iteration w <- w (2 - u w) on a unit window.
  std::vector<int> inv_unit(const std::vector<int>& u, std::size_t len) const {
    std::vector<int> w{inv_mod_p(u[0])};
    std::vector<int> two = constant(2);
    std::size_t have = 1;
    while (have < len) {
      have = std::min(len, 2 * have);
      std::vector<int> uw = mul(u, w, have);
      w = mul(w, add(two, neg(uw, have), have), have);
    }
    w.resize(len, 0);
    return w;
  }

  // Newton iteration w <- (w + u / w) / 2, seeded with the small branch.
  std::vector<int> sqrt_unit(const std::vector<int>& u, int seed, std::size_t len) const {
    std::vector<int> w{seed};
    std::vector<int> half = inv_unit(constant(2), len);
    std::size_t have = 1;
    while (have < len) {
      have = std::min(len, 2 * have);
      std::vector<int> q = mul(u, inv_unit(w, have), have);
      w = mul(add(w, q, have), half, have);
    }
    w.resize(len, 0);
    return w;
  }

  std::vector<int> constant(int c) const {
    // c is a small positive integer; expand in base p for Q_p, reduce for F_p((t)).
    std::vector<int> out;
    if (kind == FieldKind::Equal) {
      out.push_back(((c % p) + p) % p);
      return out;
    }
    while (c > 0) {
      out.push_back(c % p);
      c /= p;
    }
    if (out.empty()) out.push_back(0);
    return out;
  }
};

Digits ops(const FieldSpec& s) { return Digits{s.kind(), s.p()}; }

}  // namespace

// ---------------------------------------------------------------------------

bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

int legendre_symbol(long a, int p) {
  long r = ((a % p) + p) % p;
  if (r == 0) return 0;
  long acc = 1, b = r, e = (p - 1) / 2;
  while (e > 0) {
    if (e & 1) acc = acc * b % p;
    b = b * b % p;
    e >>= 1;
  }
  return acc == 1 ? 1 : -1;
}

int smallest_nonresidue(int p) {
  for (int u = 2; u < p; ++u)
    if (legendre_symbol(u, p) == -1) return u;
  throw ArithmeticError("no nonresidue mod " + std::to_string(p));
}

std::string to_string(SquareClass c) {
  switch (c) {
    case SquareClass::One: return "1";
    case SquareClass::NonsquareUnit: return "u";
    case SquareClass::Uniformizer: return "pi";
    case SquareClass::NonsquareUniformizer: return "u*pi";
  }
  return "?";
}

FieldSpec::FieldSpec(FieldKind kind, int p, int precision) : kind_(kind), p_(p), precision_(precision) {
  if (!is_prime(p)) throw std::invalid_argument("field characteristic " + std::to_string(p) + " is not prime");
  if (p == 2) throw std::invalid_argument("p = 2 is not supported");
  if (precision < 2) throw std::invalid_argument("precision must be at least 2");
}

std::string FieldSpec::name() const {
  if (kind_ == FieldKind::Mixed) return "Q_" + std::to_string(p_);
  return "F_" + std::to_string(p_) + "((t))";
}

std::string FieldSpec::uniformizer_symbol() const {
  return kind_ == FieldKind::Mixed ? std::to_string(p_) : std::string("t");
}

// ---------------------------------------------------------------------------

LocalElement::LocalElement(const FieldSpec& spec) : spec_(spec) {}

LocalElement LocalElement::normalize(const FieldSpec& spec, int start, std::vector<int> window,
                                     int absolute_precision) {
  LocalElement r(spec);
  std::size_t i = 0;
  while (i < window.size() && window[i] == 0) ++i;
  if (i == window.size()) {
    r.kind_ = Shape::FuzzyZero;
    r.val_ = absolute_precision;
    r.abs_prec_ = absolute_precision;
    return r;
  }
  r.kind_ = Shape::Nonzero;
  r.val_ = start + static_cast<int>(i);
  std::size_t rel = std::min<std::size_t>(window.size() - i, static_cast<std::size_t>(spec.precision()));
  r.digits_.assign(window.begin() + static_cast<long>(i), window.begin() + static_cast<long>(i + rel));
  r.abs_prec_ = r.val_ + static_cast<int>(rel);
  return r;
}

LocalElement LocalElement::from_integer(const FieldSpec& spec, const Integer& n) {
  if (n == 0) return LocalElement(spec);
  const int p = spec.p();
  if (spec.kind() == FieldKind::Equal) {
    Integer r = n % p;
    if (r < 0) r += p;
    if (r == 0) return LocalElement(spec);
    std::vector<int> d{static_cast<int>(r.get_si())};
    return from_digits(spec, 0, d);
  }
  Integer m = n;
  int v = 0;
  while (m % p == 0) {
    m /= p;
    ++v;
  }
  Integer modulus;
  mpz_ui_pow_ui(modulus.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(spec.precision()));
  Integer r = m % modulus;
  if (r < 0) r += modulus;
  std::vector<int> d;
  for (int i = 0; i < spec.precision(); ++i) {
    Integer q = r % p;
    d.push_back(static_cast<int>(q.get_si()));
    r /= p;
  }
  return from_digits(spec, v, d);
}

LocalElement LocalElement::from_int(const FieldSpec& spec, long n) { return from_integer(spec, Integer(n)); }

LocalElement LocalElement::from_rational(const FieldSpec& spec, const Rational& q) {
  LocalElement num = from_integer(spec, q.get_num());
  LocalElement den = from_integer(spec, q.get_den());
  if (den.is_zero()) throw ArithmeticError("denominator vanishes in " + spec.name());
  return num / den;
}

LocalElement LocalElement::uniformizer(const FieldSpec& spec) {
  std::vector<int> d{1};
  return from_digits(spec, 1, d);
}

LocalElement LocalElement::uniformizer_power(const FieldSpec& spec, int e) {
  std::vector<int> d{1};
  return from_digits(spec, e, d);
}

LocalElement LocalElement::from_digits(const FieldSpec& spec, int valuation, std::span<const int> digits) {
  std::size_t lead = 0;
  while (lead < digits.size() && digits[lead] == 0) ++lead;
  if (lead == digits.size()) return LocalElement(spec);
  return from_digits(spec, valuation, digits, valuation + static_cast<int>(lead) + spec.precision());
}

LocalElement LocalElement::from_digits(const FieldSpec& spec, int valuation, std::span<const int> digits,
                                       int absolute_precision) {
  const int p = spec.p();
  if (absolute_precision < valuation) absolute_precision = valuation;
  std::vector<int> window(static_cast<std::size_t>(absolute_precision - valuation), 0);
  for (std::size_t i = 0; i < digits.size() && i < window.size(); ++i) {
    if (digits[i] < 0 || digits[i] >= p)
      throw std::invalid_argument("digit " + std::to_string(digits[i]) + " out of range for p = " +
                                  std::to_string(p));
    window[i] = digits[i];
  }
  return normalize(spec, valuation, std::move(window), absolute_precision);
}

LocalElement LocalElement::fuzzy_zero(const FieldSpec& spec, int absolute_precision) {
  return normalize(spec, absolute_precision, {}, absolute_precision);
}

LocalElement LocalElement::nonsquare_unit(const FieldSpec& spec) {
  return from_int(spec, smallest_nonresidue(spec.p()));
}

LocalElement LocalElement::square_class_representative(const FieldSpec& spec, SquareClass c) {
  switch (c) {
    case SquareClass::One: return one(spec);
    case SquareClass::NonsquareUnit: return nonsquare_unit(spec);
    case SquareClass::Uniformizer: return uniformizer(spec);
    case SquareClass::NonsquareUniformizer: return nonsquare_unit(spec) * uniformizer(spec);
  }
  throw std::logic_error("bad square class");
}

std::optional<int> LocalElement::ord() const {
  if (kind_ == Shape::ExactZero) return std::nullopt;
  if (kind_ == Shape::FuzzyZero)
    throw PrecisionError("ord of an element indistinguishable from zero modulo pi^" + std::to_string(abs_prec_));
  return val_;
}

int LocalElement::ord_lower_bound() const { return val_; }

int LocalElement::ac() const {
  if (kind_ == Shape::ExactZero) return 0;
  if (kind_ == Shape::FuzzyZero)
    throw PrecisionError("ac of an element indistinguishable from zero modulo pi^" + std::to_string(abs_prec_));
  return digits_[0];
}

int LocalElement::digit_at(int i) const {
  if (i >= abs_prec_) throw PrecisionError("digit beyond known precision");
  if (kind_ != Shape::Nonzero || i < val_) return 0;
  return digits_[static_cast<std::size_t>(i - val_)];
}

void LocalElement::require_same_field(const LocalElement& other) const {
  if (!(spec_.kind() == other.spec_.kind() && spec_.p() == other.spec_.p()))
    throw ArithmeticError("field mismatch: " + spec_.name() + " vs " + other.spec_.name());
}

LocalElement LocalElement::operator-() const {
  if (kind_ != Shape::Nonzero) return *this;
  std::vector<int> w = ops(spec_).neg(digits_, digits_.size());
  return normalize(spec_, val_, std::move(w), abs_prec_);
}

LocalElement operator+(const LocalElement& a, const LocalElement& b) {
  a.require_same_field(b);
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const int start = std::min(a.val_, b.val_);
  const int stop = std::min(a.abs_prec_, b.abs_prec_);
  if (stop <= start) return LocalElement::fuzzy_zero(a.spec_, stop);
  const std::size_t len = static_cast<std::size_t>(stop - start);
  auto place = [&](const LocalElement& x) {
    std::vector<int> w(len, 0);
    if (x.is_nonzero())
      for (std::size_t i = 0; i < x.digits_.size(); ++i) {
        long pos = static_cast<long>(x.val_ - start) + static_cast<long>(i);
        if (pos >= 0 && pos < static_cast<long>(len)) w[static_cast<std::size_t>(pos)] = x.digits_[i];
      }
    return w;
  };
  std::vector<int> sum = ops(a.spec_).add(place(a), place(b), len);
  return LocalElement::normalize(a.spec_, start, std::move(sum), stop);
}

LocalElement operator-(const LocalElement& a, const LocalElement& b) { return a + (-b); }

LocalElement operator*(const LocalElement& a, const LocalElement& b) {
  a.require_same_field(b);
  if (a.is_zero() || b.is_zero()) return LocalElement(a.spec_);
  if (a.is_fuzzy_zero() || b.is_fuzzy_zero()) {
    // Known digits of the product stop at min(abs_a + val_b, abs_b + val_a).
    long bound = std::min(static_cast<long>(a.abs_prec_) + b.val_, static_cast<long>(b.abs_prec_) + a.val_);
    return LocalElement::fuzzy_zero(a.spec_, static_cast<int>(bound));
  }
  const std::size_t len = std::min(a.digits_.size(), b.digits_.size());
  std::vector<int> prod = ops(a.spec_).mul(a.digits_, b.digits_, len);
  const int v = a.val_ + b.val_;
  return LocalElement::normalize(a.spec_, v, std::move(prod), v + static_cast<int>(len));
}

LocalElement LocalElement::inverse() const {
  if (kind_ == Shape::ExactZero) throw ArithmeticError("inverse of zero");
  if (kind_ == Shape::FuzzyZero) throw PrecisionError("inverse of an element indistinguishable from zero");
  std::vector<int> w = ops(spec_).inv_unit(digits_, digits_.size());
  return normalize(spec_, -val_, std::move(w), -val_ + static_cast<int>(digits_.size()));
}

LocalElement operator/(const LocalElement& a, const LocalElement& b) { return a * b.inverse(); }

LocalElement LocalElement::pow(int e) const {
  if (e < 0) return inverse().pow(-e);
  LocalElement result = one(spec_);
  LocalElement base = *this;
  while (e > 0) {
    if (e & 1) result = result * base;
    base = base * base;
    e >>= 1;
  }
  return result;
}

LocalElement LocalElement::truncated(int k) const {
  if (k >= abs_prec_) return *this;
  if (kind_ != Shape::Nonzero || k <= val_) return fuzzy_zero(spec_, k);
  std::vector<int> w(digits_.begin(), digits_.begin() + (k - val_));
  return normalize(spec_, val_, std::move(w), k);
}

bool operator==(const LocalElement& a, const LocalElement& b) {
  return a.spec_.kind() == b.spec_.kind() && a.spec_.p() == b.spec_.p() && a.kind_ == b.kind_ &&
         a.val_ == b.val_ && a.abs_prec_ == b.abs_prec_ && a.digits_ == b.digits_;
}

bool same_value(const LocalElement& a, const LocalElement& b) {
  LocalElement d = a - b;
  return !d.is_nonzero();
}

// ---------------------------------------------------------------------------
// Text form.

std::string LocalElement::to_string() const {
  const std::string base = spec_.uniformizer_symbol();
  auto power = [&](int e) {
    if (e == 1) return base;
    return base + "^" + std::to_string(e);
  };
  if (kind_ == Shape::ExactZero) return "0";
  if (kind_ == Shape::FuzzyZero) return "O(" + power(abs_prec_) + ")";
  std::vector<std::string> terms;
  for (std::size_t i = 0; i < digits_.size(); ++i) {
    if (digits_[i] == 0) continue;
    std::string t = std::to_string(digits_[i]);
    if (i > 0) t += "*" + power(static_cast<int>(i));
    terms.push_back(t);
  }
  const int rel = static_cast<int>(digits_.size());
  if (rel < spec_.precision()) terms.push_back("O(" + power(rel) + ")");
  std::string sum;
  for (std::size_t i = 0; i < terms.size(); ++i) sum += (i ? " + " : "") + terms[i];
  if (val_ == 0) return sum;
  return power(val_) + "*(" + sum + ")";
}

std::ostream& operator<<(std::ostream& os, const LocalElement& a) { return os << a.to_string(); }

namespace {

class LiteralParser {
 public:
  LiteralParser(const FieldSpec& spec, std::string_view text) : spec_(spec), text_(text) {}

  LocalElement parse() {
    skip();
    LocalElement result(spec_);
    if (peek_word("0") && rest_is_empty_after(1)) return result;
    int prefix = 0;
    bool has_prefix = false;
    std::size_t save = pos_;
    if (at_base()) {
      // Either "b^k*(...)" or a bare term of the sum.
      int e = read_base_power();
      skip();
      if (consume('*')) {
        skip();
        if (consume('(')) {
          has_prefix = true;
          prefix = e;
        }
      }
      if (!has_prefix) pos_ = save;
    }
    Sum s = parse_sum();
    if (has_prefix) {
      skip();
      expect(')');
    }
    skip();
    if (pos_ != text_.size()) fail("trailing input");
    int abs_prec = s.big_o ? prefix + s.big_o_exp : INT_MAX;
    if (s.digits.empty() && s.big_o) return LocalElement::fuzzy_zero(spec_, abs_prec);
    int max_e = s.digits.empty() ? 0 : s.digits.rbegin()->first;
    std::vector<int> d(static_cast<std::size_t>(max_e + 1), 0);
    for (auto [e, c] : s.digits) d[static_cast<std::size_t>(e)] = c;
    if (s.big_o) return LocalElement::from_digits(spec_, prefix, d, abs_prec);
    return LocalElement::from_digits(spec_, prefix, d);
  }

 private:
  struct Sum {
    std::vector<std::pair<int, int>> digits;  // (exponent, digit), sorted
    bool big_o = false;
    int big_o_exp = 0;
  };

  Sum parse_sum() {
    Sum s;
    std::vector<bool> seen;
    for (;;) {
      skip();
      if (peek_word("O(")) {
        pos_ += 2;
        skip();
        if (!at_base()) fail("expected uniformizer inside O(...)");
        s.big_o = true;
        s.big_o_exp = read_base_power();
        skip();
        expect(')');
      } else {
        if (s.big_o) fail("O(...) must be the last term");
        int coeff = 1;
        int e = 0;
        if (at_base()) {
          e = read_base_power();
        } else {
          coeff = read_int();
          skip();
          if (consume('*')) {
            skip();
            if (!at_base()) fail("expected uniformizer after '*'");
            e = read_base_power();
          }
        }
        if (coeff < 0 || coeff >= spec_.p()) fail("digit out of range");
        if (e < 0) fail("negative exponent inside digit sum");
        if (static_cast<std::size_t>(e) >= seen.size()) seen.resize(static_cast<std::size_t>(e) + 1, false);
        if (seen[static_cast<std::size_t>(e)]) fail("repeated exponent");
        seen[static_cast<std::size_t>(e)] = true;
        if (coeff != 0) s.digits.emplace_back(e, coeff);
      }
      skip();
      if (!consume('+')) break;
    }
    std::sort(s.digits.begin(), s.digits.end());
    if (s.big_o)
      for (auto [e, c] : s.digits)
        if (e >= s.big_o_exp) fail("digit beyond the O(...) term");
    return s;
  }

  bool at_base() const {
    const std::string b = spec_.uniformizer_symbol();
    if (text_.compare(pos_, b.size(), b) != 0) return false;
    std::size_t after = pos_ + b.size();
    // In Q_p a longer integer such as "53" is a digit, not the base.
    if (spec_.kind() == FieldKind::Mixed && after < text_.size() && std::isdigit(static_cast<unsigned char>(text_[after])))
      return false;
    return true;
  }

  int read_base_power() {
    pos_ += spec_.uniformizer_symbol().size();
    skip();
    if (!consume('^')) return 1;
    skip();
    if (consume('(')) {
      skip();
      int e = read_int();
      skip();
      expect(')');
      return e;
    }
    return read_int();
  }

  int read_int() {
    bool neg = false;
    if (consume('-')) neg = true;
    else if (text_.compare(pos_, 3, "\xE2\x88\x92") == 0) {
      neg = true;
      pos_ += 3;
    }
    std::size_t start = pos_;
    long v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + (text_[pos_] - '0');
      if (v > 1000000) fail("integer too large");
      ++pos_;
    }
    if (pos_ == start) fail("expected integer");
    return static_cast<int>(neg ? -v : v);
  }

  bool peek_word(std::string_view w) const { return text_.compare(pos_, w.size(), w) == 0; }
  bool rest_is_empty_after(std::size_t n) const {
    std::size_t q = pos_ + n;
    while (q < text_.size() && text_[q] == ' ') ++q;
    return q == text_.size();
  }
  bool consume(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!consume(c)) fail(std::string("expected '") + c + "'");
  }
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("element literal: " + what + " at position " + std::to_string(pos_) + " in \"" +
                                std::string(text_) + "\"");
  }

  const FieldSpec& spec_;
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

LocalElement parse_local_element(const FieldSpec& spec, std::string_view text) {
  return LiteralParser(spec, text).parse();
}

// ---------------------------------------------------------------------------
// Square classes, roots, Hilbert symbol.

SquareClass square_class_of(int valuation, int leading_digit, int p) {
  const bool odd = (valuation % 2) != 0;
  const bool square_unit = legendre_symbol(leading_digit, p) == 1;
  if (!odd) return square_unit ? SquareClass::One : SquareClass::NonsquareUnit;
  return square_unit ? SquareClass::Uniformizer : SquareClass::NonsquareUniformizer;
}

SquareClass square_class(const LocalElement& a) {
  if (a.is_zero()) throw ArithmeticError("square class of zero");
  // pi = p in Q_p and pi = t in F_p((t)); both have unit part 1.
  return square_class_of(*a.ord(), a.ac(), a.spec().p());
}

CertifiedSquareClass certified_square_class(const LocalElement& a) {
  SquareClass c = square_class(a);
  LocalElement rep = LocalElement::square_class_representative(a.spec(), c);
  LocalElement quotient = a / rep;
  LocalElement root = sqrt(quotient);
  if (root.relative_precision() < std::min(a.spec().precision() - 1, quotient.relative_precision()))
    throw PrecisionError("square root certificate below precision N-1");
  if (!same_value(root * root, quotient)) throw PrecisionError("square root certificate failed");
  return {c, root};
}

LocalElement sqrt(const LocalElement& a) {
  if (a.is_zero()) return a;
  int v = *a.ord();
  if (v % 2 != 0) throw ArithmeticError("square root of an element of odd valuation");
  const int p = a.spec().p();
  int lead = a.ac();
  if (legendre_symbol(lead, p) != 1) throw ArithmeticError("square root: leading digit is a nonresidue");
  int seed = 0;
  for (int r = 1; r <= (p - 1) / 2; ++r)
    if (r * r % p == lead) {
      seed = r;
      break;
    }
  std::vector<int> unit(a.digits().begin(), a.digits().end());
  const std::size_t len = unit.size();
  Digits d{a.spec().kind(), p};
  std::vector<int> w = d.sqrt_unit(unit, seed, len);
  return LocalElement::from_digits(a.spec(), v / 2, w, v / 2 + static_cast<int>(len));
}

int hilbert_symbol(SquareClass a, SquareClass b, int p) {
  auto split = [](SquareClass c, int& alpha, int& unit_sign) {
    alpha = (c == SquareClass::Uniformizer || c == SquareClass::NonsquareUniformizer) ? 1 : 0;
    unit_sign = (c == SquareClass::One || c == SquareClass::Uniformizer) ? 1 : -1;
  };
  int alpha, u, beta, v;
  split(a, alpha, u);
  split(b, beta, v);
  int sign = (alpha * beta * ((p - 1) / 2)) % 2 ? -1 : 1;
  if (beta) sign *= u;
  if (alpha) sign *= v;
  return sign;
}

int hilbert_symbol(const LocalElement& a, const LocalElement& b) {
  if (a.spec().kind() != b.spec().kind() || a.spec().p() != b.spec().p())
    throw ArithmeticError("hilbert symbol across different fields");
  if (a.is_zero() || b.is_zero()) throw ArithmeticError("hilbert symbol of zero");
  return hilbert_symbol(square_class(a), square_class(b), a.spec().p());
}

}  // namespace germlab
