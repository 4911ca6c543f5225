#include "germlab/rational.hpp"

#include <stdexcept>

namespace germlab {

std::string to_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational parse_rational(std::string_view text) {
  std::string s;
  for (std::size_t i = 0; i < text.size(); ++i) {
    // U+2212 MINUS SIGN is E2 88 92 in UTF-8.
    if (i + 2 < text.size() + 0 && static_cast<unsigned char>(text[i]) == 0xE2 &&
        static_cast<unsigned char>(text[i + 1]) == 0x88 &&
        static_cast<unsigned char>(text[i + 2]) == 0x92) {
      s.push_back('-');
      i += 2;
    } else if (text[i] != ' ') {
      s.push_back(text[i]);
    }
  }
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  Rational q;
  if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
  q.canonicalize();
  return q;
}

Rational rational_pow(long p, long e) {
  Integer base = p;
  Integer power;
  mpz_pow_ui(power.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(e < 0 ? -e : e));
  if (e >= 0) return Rational(power);
  return Rational(Integer(1), power);
}

}  // namespace germlab
