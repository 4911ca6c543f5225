#include "germlab/presburger.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <stdexcept>

namespace germlab {

ExpPoly ExpPoly::constant(const Rational& c) { return monomial(c, 0, 0); }

ExpPoly ExpPoly::monomial(const Rational& c, int k, int l) {
  if (k < 0) throw std::invalid_argument("negative power of t");
  ExpPoly f;
  Rational r = c;
  r.canonicalize();
  if (r != 0) f.terms_[{l, k}] = r;
  return f;
}

ExpPoly ExpPoly::from_terms(const std::vector<Term>& terms) {
  ExpPoly f;
  for (const Term& t : terms) f = f + monomial(t.c, t.k, t.l);
  return f;
}

std::vector<ExpPoly::Term> ExpPoly::terms() const {
  std::vector<Term> out;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) out.push_back({it->second, it->first.second, it->first.first});
  return out;
}

Rational ExpPoly::specialize(long q, long t) const {
  if (q < 2) throw std::invalid_argument("q must be at least 2");
  Rational sum = 0;
  for (const auto& [key, c] : terms_) {
    const auto [l, k] = key;
    Rational v = c * rational_pow(q, static_cast<long>(l) * t);
    if (k > 0) {
      Integer tk;
      mpz_pow_ui(tk.get_mpz_t(), Integer(t).get_mpz_t(), static_cast<unsigned long>(k));
      v *= tk;
    }
    sum += v;
  }
  return sum;
}

ExpPoly ExpPoly::operator-() const {
  ExpPoly f = *this;
  for (auto& [key, c] : f.terms_) c = -c;
  return f;
}

ExpPoly operator+(const ExpPoly& a, const ExpPoly& b) {
  ExpPoly f = a;
  for (const auto& [key, c] : b.terms_) {
    Rational& slot = f.terms_[key];
    slot += c;
    if (slot == 0) f.terms_.erase(key);
  }
  return f;
}

ExpPoly operator-(const ExpPoly& a, const ExpPoly& b) { return a + (-b); }

ExpPoly operator*(const ExpPoly& a, const ExpPoly& b) {
  ExpPoly f;
  for (const auto& [ka, ca] : a.terms_)
    for (const auto& [kb, cb] : b.terms_) f = f + ExpPoly::monomial(ca * cb, ka.second + kb.second, ka.first + kb.first);
  return f;
}

std::string ExpPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const Term& t : terms()) {
    Rational mag = abs(t.c);
    if (first) {
      if (t.c < 0) out += "-";
    } else {
      out += t.c < 0 ? " - " : " + ";
    }
    first = false;
    std::vector<std::string> factors;
    if (mag != 1 || (t.k == 0 && t.l == 0)) factors.push_back(mag.get_str());
    if (t.k == 1) factors.push_back("t");
    if (t.k > 1) factors.push_back("t^" + std::to_string(t.k));
    if (t.l == 1) factors.push_back("q^t");
    if (t.l != 0 && t.l != 1) factors.push_back("q^(" + std::to_string(t.l) + "*t)");
    for (std::size_t i = 0; i < factors.size(); ++i) out += (i ? "*" : "") + factors[i];
  }
  return out;
}

namespace {

class ExpPolyParser {
 public:
  explicit ExpPolyParser(std::string_view text) {
    // Normalize U+2212 to '-'.
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text.compare(i, 3, "\xE2\x88\x92") == 0) {
        text_ += '-';
        i += 2;
      } else {
        text_ += text[i];
      }
    }
  }

  ExpPoly parse() {
    ExpPoly f = sum();
    skip();
    if (pos_ != text_.size()) fail("trailing input");
    return f;
  }

 private:
  ExpPoly sum() {
    skip();
    ExpPoly f;
    bool neg = false;
    if (consume('-')) neg = true;
    else consume('+');
    f = product();
    if (neg) f = -f;
    for (;;) {
      skip();
      if (consume('+')) f = f + product();
      else if (consume('-')) f = f - product();
      else return f;
    }
  }

  ExpPoly product() {
    ExpPoly f = power();
    for (;;) {
      skip();
      if (consume('*')) {
        f = f * power();
      } else if (consume('/')) {
        skip();
        Rational d = number();
        if (d == 0) fail("division by zero");
        f = f * ExpPoly::constant(1 / d);
      } else {
        return f;
      }
    }
  }

  ExpPoly power() {
    skip();
    if (peek() == 'q') {
      ++pos_;
      skip();
      expect('^');
      return ExpPoly::monomial(1, 0, q_exponent());
    }
    ExpPoly base = atom();
    skip();
    if (consume('^')) {
      skip();
      long e = signed_integer();
      if (e < 0) {
        // Only constants can be inverted.
        auto terms = base.terms();
        if (terms.size() != 1 || terms[0].k != 0 || terms[0].l != 0) fail("negative power of a non-constant");
        return ExpPoly::constant(1 / rational_pow_q(terms[0].c, -e));
      }
      ExpPoly r = ExpPoly::constant(1);
      for (long i = 0; i < e; ++i) r = r * base;
      return r;
    }
    return base;
  }

  static Rational rational_pow_q(const Rational& c, long e) {
    Rational r = 1;
    for (long i = 0; i < e; ++i) r *= c;
    return r;
  }

  int q_exponent() {
    skip();
    if (consume('t')) return 1;
    expect('(');
    skip();
    int sign = 1;
    if (consume('-')) sign = -1;
    skip();
    int l = 1;
    if (std::isdigit(static_cast<unsigned char>(peek()))) {
      l = static_cast<int>(integer());
      skip();
      if (consume('*')) {
        skip();
        expect('t');
      } else {
        fail("expected '*t' in q exponent");
      }
    } else {
      expect('t');
    }
    skip();
    expect(')');
    return sign * l;
  }

  ExpPoly atom() {
    skip();
    if (consume('(')) {
      ExpPoly f = sum();
      skip();
      expect(')');
      return f;
    }
    if (consume('t')) return ExpPoly::monomial(1, 1, 0);
    if (std::isdigit(static_cast<unsigned char>(peek()))) return ExpPoly::constant(number());
    fail("unexpected character");
  }

  Rational number() {
    Integer n = integer();
    if (peek() == '/' && pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
      ++pos_;
      Integer d = integer();
      if (d == 0) fail("zero denominator");
      Rational r(n, d);
      r.canonicalize();
      return r;
    }
    return Rational(n);
  }

  long signed_integer() {
    bool neg = false;
    if (consume('(')) {
      skip();
      neg = consume('-');
      long v = static_cast<long>(integer());
      skip();
      expect(')');
      return neg ? -v : v;
    }
    neg = consume('-');
    long v = static_cast<long>(integer());
    return neg ? -v : v;
  }

  long integer() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected integer");
    return std::stol(text_.substr(start, pos_ - start));
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  bool consume(char c) {
    if (peek() == c) {
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
    throw std::invalid_argument("exppoly: " + what + " at position " + std::to_string(pos_));
  }

  std::string text_;
  std::size_t pos_ = 0;
};

long floor_mod(long a, long n) { return ((a % n) + n) % n; }

// Smallest t >= lo with t = r mod n.
long first_at_least(long lo, long r, long n) { return lo + floor_mod(r - lo, n); }

}  // namespace

ExpPoly parse_exppoly(std::string_view text) { return ExpPolyParser(text).parse(); }

// ---------------------------------------------------------------------------

PresburgerPiece PresburgerPiece::ray(long lo, long modulus) {
  if (modulus < 1) throw std::invalid_argument("modulus must be positive");
  return {lo, std::nullopt, modulus, floor_mod(lo, modulus)};
}

PresburgerPiece PresburgerPiece::interval(long lo, long hi, long modulus) {
  if (modulus < 1) throw std::invalid_argument("modulus must be positive");
  return {lo, hi, modulus, floor_mod(lo, modulus)};
}

bool PresburgerPiece::contains(long t) const {
  return t >= lo && (!hi || t <= *hi) && floor_mod(t - residue, modulus) == 0;
}

std::optional<PresburgerPiece> PresburgerPiece::intersect(const PresburgerPiece& o) const {
  // CRT for t = r1 mod n1, t = r2 mod n2.
  const long g = std::gcd(modulus, o.modulus);
  if (floor_mod(residue - o.residue, g) != 0) return std::nullopt;
  const long lcm = modulus / g * o.modulus;
  long r = residue;
  while (floor_mod(r - o.residue, o.modulus) != 0) r += modulus;  // at most o.modulus/g steps
  PresburgerPiece out;
  out.modulus = lcm;
  out.residue = floor_mod(r, lcm);
  out.lo = first_at_least(std::max(lo, o.lo), out.residue, lcm);
  if (hi && o.hi) out.hi = std::min(*hi, *o.hi);
  else if (hi) out.hi = hi;
  else if (o.hi) out.hi = o.hi;
  if (out.empty()) return std::nullopt;
  return out;
}

std::string PresburgerPiece::to_string() const {
  std::string s = "[" + std::to_string(first_at_least(lo, residue, modulus)) + "..";
  if (hi) s += std::to_string(*hi) + "]";
  else s += ")";
  return s + " mod " + std::to_string(modulus);
}

PresburgerPiece parse_piece(std::string_view text) {
  std::string s(text);
  auto fail = [&] { throw std::invalid_argument("piece: cannot parse \"" + s + "\""); };
  std::size_t open = s.find('['), dots = s.find(".."), close = s.find_first_of("])", dots == std::string::npos ? 0 : dots);
  if (open == std::string::npos || dots == std::string::npos || close == std::string::npos) fail();
  long lo = 0;
  try {
    lo = std::stol(s.substr(open + 1, dots - open - 1));
  } catch (...) {
    fail();
  }
  std::string hi_text = s.substr(dots + 2, close - dots - 2);
  long modulus = 1;
  std::size_t mod = s.find("mod", close);
  if (mod != std::string::npos) {
    try {
      modulus = std::stol(s.substr(mod + 3));
    } catch (...) {
      fail();
    }
  }
  bool ray = s[close] == ')';
  hi_text.erase(std::remove_if(hi_text.begin(), hi_text.end(), ::isspace), hi_text.end());
  if (ray != hi_text.empty()) fail();
  if (ray) return PresburgerPiece::ray(lo, modulus);
  return PresburgerPiece::interval(lo, std::stol(hi_text), modulus);
}

// ---------------------------------------------------------------------------

PiecewiseExpPoly::PiecewiseExpPoly(std::vector<std::pair<PresburgerPiece, ExpPoly>> pieces)
    : pieces_(std::move(pieces)) {
  for (std::size_t i = 0; i < pieces_.size(); ++i)
    for (std::size_t j = i + 1; j < pieces_.size(); ++j)
      if (pieces_[i].first.intersect(pieces_[j].first))
        throw std::invalid_argument("pieces " + pieces_[i].first.to_string() + " and " + pieces_[j].first.to_string() +
                                    " overlap");
}

PiecewiseExpPoly PiecewiseExpPoly::on(const PresburgerPiece& piece, const ExpPoly& f) {
  return PiecewiseExpPoly({{piece, f}});
}

std::optional<Rational> PiecewiseExpPoly::evaluate(long q, long t) const {
  for (const auto& [piece, f] : pieces_)
    if (piece.contains(t)) return f.specialize(q, t);
  return std::nullopt;
}

namespace {

template <typename Op>
PiecewiseExpPoly combine(const PiecewiseExpPoly& a, const PiecewiseExpPoly& b, Op op) {
  std::vector<std::pair<PresburgerPiece, ExpPoly>> out;
  for (const auto& [pa, fa] : a.pieces())
    for (const auto& [pb, fb] : b.pieces())
      if (auto both = pa.intersect(pb)) out.emplace_back(*both, op(fa, fb));
  return PiecewiseExpPoly(std::move(out));
}

}  // namespace

PiecewiseExpPoly operator+(const PiecewiseExpPoly& a, const PiecewiseExpPoly& b) {
  return combine(a, b, [](const ExpPoly& x, const ExpPoly& y) { return x + y; });
}

PiecewiseExpPoly operator*(const PiecewiseExpPoly& a, const PiecewiseExpPoly& b) {
  return combine(a, b, [](const ExpPoly& x, const ExpPoly& y) { return x * y; });
}

std::string PiecewiseExpPoly::to_string() const {
  std::string out;
  for (const auto& [piece, f] : pieces_) out += piece.to_string() + ": " + f.to_string() + "\n";
  return out;
}

bool is_eventually_zero(const PiecewiseExpPoly& f) {
  bool any_ray = false;
  for (const auto& [piece, g] : f.pieces()) {
    if (piece.bounded()) continue;
    any_ray = true;
    if (!g.is_zero()) return false;
  }
  if (!any_ray) throw std::invalid_argument("is_eventually_zero needs an unbounded piece");
  return true;
}

std::vector<long> zero_set_bounded(const ExpPoly& f, long q, long a, long b) {
  std::vector<long> zeros;
  for (long t = a; t <= b; ++t)
    if (f.specialize(q, t) == 0) zeros.push_back(t);
  return zeros;
}

namespace {

Rational int_pow(long base, long e) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), Integer(base).get_mpz_t(), static_cast<unsigned long>(e));
  return Rational(r);
}

// Ratio term g(t) = t^dk q^(-dl t) for a non-dominant term; dl >= 0.
struct Ratio {
  Rational weight;  // |c_i / c_0|
  long dk;          // k_i - k_0
  long dl;          // l_0 - l_i
};

// g non-increasing on [t, inf): ((t+1)/t)^dk <= q^dl, checked at t since the left side decreases.
bool monotone_from(const Ratio& r, long q, long t) {
  if (r.dk <= 0) return true;
  return int_pow(t + 1, r.dk) <= int_pow(q, r.dl) * int_pow(t, r.dk);
}

Rational ratio_at(const Ratio& r, long q, long t) {
  Rational g = r.weight * rational_pow(q, -r.dl * t);
  if (r.dk >= 0) g *= int_pow(t, r.dk);
  else g /= int_pow(t, -r.dk);
  return g;
}

bool dominant_from(const std::vector<Ratio>& rs, long q, long t) {
  Rational sum = 0;
  for (const Ratio& r : rs) {
    if (!monotone_from(r, q, t)) return false;
    sum += ratio_at(r, q, t);
  }
  return sum < 1;
}

}  // namespace

long uniform_tail_bound(const ExpPoly& f, long q) {
  if (f.is_zero()) throw std::invalid_argument("uniform_tail_bound of the zero function");
  if (q < 2) throw std::invalid_argument("q must be at least 2");
  const auto terms = f.terms();
  const ExpPoly::Term& lead = terms.front();
  if (terms.size() == 1) return lead.k == 0 ? 0 : 1;
  std::vector<Ratio> rs;
  for (std::size_t i = 1; i < terms.size(); ++i)
    rs.push_back({abs(terms[i].c / lead.c), static_cast<long>(terms[i].k) - lead.k,
                  static_cast<long>(lead.l) - terms[i].l});
  // Both conditions persist once they hold, so a doubling search then bisection finds the first t.
  long hi = 1;
  while (!dominant_from(rs, q, hi)) {
    if (hi > (1L << 40)) throw std::runtime_error("uniform_tail_bound: no bound found");
    hi *= 2;
  }
  long lo = hi / 2;  // fails (or is 0)
  if (hi == 1) return 1;
  while (hi - lo > 1) {
    long mid = lo + (hi - lo) / 2;
    if (dominant_from(rs, q, mid)) hi = mid;
    else lo = mid;
  }
  return hi;
}

}  // namespace germlab
