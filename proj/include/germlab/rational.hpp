#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace germlab {

using Rational = mpq_class;
using Integer = mpz_class;

/// Always "num/den", also for integers ("3/1"), so tables never mix formats.
std::string to_string(const Rational& q);

/// Accepts "n", "n/d" and a leading '-' (ASCII or U+2212).
Rational parse_rational(std::string_view text);

/// p^e as an exact rational; e may be negative.
Rational rational_pow(long p, long e);

}  // namespace germlab
