#include <gtest/gtest.h>

#include "germlab/integrate.hpp"

using namespace germlab;

namespace {

const FieldSpec Q5 = FieldSpec::mixed(5);
const FieldSpec F5t = FieldSpec::equal(5);

Rational Q(long a, long b = 1) {
  Rational r(a, b);
  r.canonicalize();
  return r;
}

Rational measure_of(const char* text, const FieldSpec& f, int depth = 3) {
  Formula s = parse_formula(text);
  IntegralResult r = measure(s, unit_box(s.vf_variables(), f), depth, f);
  EXPECT_TRUE(r.stable) << text << " over " << f.name();
  return r.value;
}

// Solutions of a^2 + b*c = n mod p^m over (Z/p^m)^3, by plain loops.
long brute_quadric(long p, int m, long n) {
  long q = 1;
  for (int i = 0; i < m; ++i) q *= p;
  long target = ((n % q) + q) % q;
  long count = 0;
  for (long a = 0; a < q; ++a)
    for (long b = 0; b < q; ++b)
      for (long c = 0; c < q; ++c)
        if ((a * a + b * c) % q == target) ++count;
  return count;
}

}  // namespace

TEST(Polynomial, Expansion) {
  std::vector<std::string> v{"a", "b", "c"};
  Polynomial f = Polynomial::parse("-a^2 - b*c", v);
  EXPECT_EQ(f.to_string(), "-a^2 - b*c");
  EXPECT_EQ(f.degree_in(2), 1);
  EXPECT_EQ(f.total_degree(), 2);
  auto [lead, rest] = f.split_linear(2);
  EXPECT_EQ(lead.to_string(), "-b");
  EXPECT_EQ(rest.to_string(), "-a^2");
  EXPECT_EQ(Polynomial::parse("(a + b)^2 - a^2 - 2*a*b", v).to_string(), "b^2");
  EXPECT_THROW(Polynomial::parse("z", v), std::invalid_argument);
}

TEST(ResidueRing, AgreesWithLocalArithmetic) {
  for (const FieldSpec& f : {Q5, F5t, FieldSpec::mixed(7), FieldSpec::equal(7)}) {
    ResidueRing ring(f, 3);
    for (ResidueRing::Code a = 0; a < ring.size(); a += 7)
      for (ResidueRing::Code b = 0; b < ring.size(); b += 11) {
        LocalElement x = ring.to_element(a), y = ring.to_element(b);
        EXPECT_EQ(ring.mul(a, b), ring.from_element((x * y).truncated(3)));
        EXPECT_EQ(ring.add(a, b), ring.from_element((x + y).truncated(3)));
        EXPECT_EQ(ring.sub(a, b), ring.from_element((x - y).truncated(3)));
      }
    EXPECT_EQ(ring.ord(0), 3);
    EXPECT_EQ(ring.ord(ring.uniformizer_power(2)), 2);
  }
}

TEST(Measure, Examples) {
  EXPECT_EQ(measure_of("ord(x) >= 0", Q5), 1);
  EXPECT_EQ(measure_of("ord(x) >= 2", Q5), Q(1, 25));
  // Oracle: sum over shells of p^-(j+1), a geometric series 1/(p - 1).
  EXPECT_EQ(measure_of("ac(x) = 1", Q5), Q(1, 4));
  EXPECT_EQ(measure_of("ac(x) = 1", FieldSpec::mixed(7)), Q(1, 6));
  EXPECT_EQ(measure_of("x = 0", Q5), 0);
}

TEST(Measure, AdditivityAndInvariance) {
  for (const FieldSpec& f : {Q5, F5t}) {
    Rational whole = measure_of("ord(x) <= 1", f);
    Rational parts = measure_of("ord(x) = 0", f) + measure_of("ord(x) = 1", f);
    EXPECT_EQ(whole, parts);
    EXPECT_EQ(measure_of("ac(x) = 1 || ac(x) = 2", f), measure_of("ac(x) = 1", f) + measure_of("ac(x) = 2", f));
    // Translation x -> x + 3.
    EXPECT_EQ(measure_of("ord(x - 3) >= 2", f), measure_of("ord(x) >= 2", f));
    // Scaling by 5: {5y : ac y = 2} has measure 5^-1 * 1/4.
    EXPECT_EQ(measure_of("ord(x) >= 1 && ac(x) = 2", f), Q(1, 20));
  }
}

TEST(Measure, UnstableIsFlagged) {
  // A set of positive measure that coset mode never decides: equality of VF terms.
  Formula s = parse_formula("x*x = x*x + 0");
  IntegralResult r = measure(s, unit_box({"x"}, Q5), 1, Q5);
  EXPECT_FALSE(r.stable);
}

TEST(Integrate, ShellIntegral) {
  Formula s = parse_formula("ord(x) >= 1 && ord(x) <= 2");
  Integrand f;
  f.terms.push_back({1, 1, parse_term("x", s.signature()), std::nullopt});
  for (const FieldSpec& fld : {Q5, F5t}) {
    IntegralResult r = integrate(f, s, unit_box({"x"}, fld), 3, fld);
    EXPECT_TRUE(r.stable);
    // Oracle: shells 1 and 2 carry 4/25 * 5 and 4/125 * 25.
    EXPECT_EQ(r.value, Q(4, 25) * 5 + Q(4, 125) * 25);
    EXPECT_EQ(r.value, Q(8, 5));
  }
  IntegralResult one = integrate(Integrand::one(), s, unit_box({"x"}, Q5), 3, Q5);
  EXPECT_EQ(one.value, measure(s, unit_box({"x"}, Q5), 3, Q5).value);
  // Support off the box.
  Integrand off;
  off.terms.push_back({1, 0, nullptr, parse_formula("ord(x) < 0")});
  EXPECT_EQ(integrate(off, parse_formula("ord(x) >= 0"), unit_box({"x"}, Q5), 2, Q5).value, 0);
}

TEST(Integrate, ConvergentAndDivergentWeights) {
  Formula s = parse_formula("ord(x) >= 0");
  Integrand f;
  f.terms.push_back({1, -1, parse_term("x", s.signature()), std::nullopt});
  // Oracle: sum_j (p-1) p^-(j+1) p^-j = (p-1)/p / (1 - p^-2) = p/(p+1).
  IntegralResult r = integrate(f, s, unit_box({"x"}, Q5), 2, Q5);
  EXPECT_TRUE(r.stable);
  EXPECT_EQ(r.value, Q(5, 6));
  Integrand g;
  g.terms.push_back({1, 1, parse_term("x", s.signature()), std::nullopt});
  EXPECT_THROW(integrate(g, s, unit_box({"x"}, Q5), 2, Q5), PrecisionError);
}

TEST(Leray, CoordinateProjection) {
  std::vector<std::string> v{"a", "b", "x"};
  LerayFiberSpec spec{Polynomial::parse("x", v), LocalElement::zero(Q5), unit_box(v, Q5), std::nullopt};
  LerayResult r = leray_fiber_measure(spec, nullptr, 2, Q5);
  EXPECT_EQ(r.result.value, 1);
  EXPECT_TRUE(r.result.stable);
  // Target outside the image of the box.
  spec.target = LocalElement::uniformizer_power(Q5, -1);
  EXPECT_EQ(leray_fiber_measure(spec, nullptr, 2, Q5).result.value, 0);
}

TEST(Leray, QuadricFiberFrozen) {
  std::vector<std::string> v{"a", "b", "c"};
  LerayFiberSpec spec{Polynomial::parse("-a^2 - b*c", v), LocalElement::from_int(Q5, 5), unit_box(v, Q5),
                      std::nullopt};
  // Oracle counts with a^2 + bc = -5.
  for (int m : {2, 3}) {
    EXPECT_EQ(leray_count(spec, nullptr, m, Q5), brute_quadric(5, m, -5)) << m;
  }
  Rational v2 = leray_fiber_measure(spec, nullptr, 2, Q5).result.value;
  Rational v3 = leray_fiber_measure(spec, nullptr, 3, Q5).result.value;
  Rational v4 = leray_fiber_measure(spec, nullptr, 4, Q5).result.value;
  EXPECT_EQ(v2, v3);
  EXPECT_EQ(v3, v4);
  EXPECT_EQ(v2, Rational(brute_quadric(5, 2, -5)) / 625);
  // Oracle by hand: unit b gives 4/5; b = 5b' forces a in 5O and b' a unit, giving 4/25.
  EXPECT_EQ(v2, Q(24, 25));
  // Same count in equal characteristic with t in place of 5.
  LerayFiberSpec eq{Polynomial::parse("-a^2 - b*c", v), LocalElement::uniformizer(F5t), unit_box(v, F5t),
                    std::nullopt};
  EXPECT_EQ(leray_fiber_measure(eq, nullptr, 3, F5t).result.value, v2);
}

TEST(Leray, RestrictionAndPartition) {
  std::vector<std::string> v{"a", "b", "c"};
  LerayFiberSpec spec{Polynomial::parse("-a^2 - b*c", v), LocalElement::from_int(Q5, 5), unit_box(v, Q5),
                      std::nullopt};
  Formula unit_b = parse_formula("vf a, b, c; ord(b) = 0");
  Formula nonunit_b = parse_formula("vf a, b, c; ord(b) >= 1");
  Rational total = leray_fiber_measure(spec, nullptr, 2, Q5).result.value;
  Rational p1 = leray_fiber_measure(spec, &unit_b, 2, Q5).result.value;
  Rational p2 = leray_fiber_measure(spec, &nonunit_b, 2, Q5).result.value;
  EXPECT_EQ(total, p1 + p2);
  // Unit b: c is determined, so the piece is vol(O) * vol(O^x).
  EXPECT_EQ(p1, Q(4, 5));
}

TEST(Leray, NilpotentConeTail) {
  std::vector<std::string> v{"a", "b", "c"};
  // Exclusion radius 0 leaves the shells min ord = 0, 1 in the values at 1, 2.
  LerayFiberSpec spec{Polynomial::parse("-a^2 - b*c", v), LocalElement::zero(Q5), unit_box(v, Q5), 0};
  LerayResult r = leray_fiber_measure(spec, nullptr, 3, Q5);
  ASSERT_EQ(r.exclusion_values.size(), 3u);
  // Oracle: shell j carries (p^2 - 1) p^(-2-j), a smooth cone scaled by p^-j.
  EXPECT_EQ(r.exclusion_values[1], Q(24, 25));
  EXPECT_EQ(r.exclusion_values[2], Q(24, 25) + Q(24, 125));
  EXPECT_TRUE(r.tail_geometric);
  EXPECT_EQ(*r.tail_ratio, Q(1, 5));
  EXPECT_EQ(*r.extrapolated, Q(6, 5));
  EXPECT_TRUE(r.result.stable);
}

TEST(Transfer, Compare) {
  Formula s = parse_formula("ord(x) >= 1");
  TransferReport rep = transfer_compare(Integrand::one(), s, 5, 2);
  EXPECT_TRUE(rep.agree);
  EXPECT_EQ(rep.value_mixed, Q(1, 5));
  EXPECT_EQ(rep.value_equal, Q(1, 5));
  EXPECT_THROW(transfer_compare(Integrand::one(), s, 2, 2), std::invalid_argument);
  EXPECT_EQ(rep.to_json()["value_mixed"], "1/5");
}

TEST(Vanishing, IndicatorFamily) {
  Formula s = parse_formula("vg a; ord(x) = 3 && ord(x) >= a");
  VanishingReport rep =
      asymptotic_vanishing_check(Integrand::one(), s, "a", 0, 7, unit_box({"x"}, Q5), 2, Q5);
  ASSERT_TRUE(rep.first_nonzero);
  EXPECT_EQ(*rep.first_nonzero, 0);
  ASSERT_TRUE(rep.vanishes_from);
  EXPECT_EQ(*rep.vanishes_from, 4);
  EXPECT_EQ(rep.values[3].second, Q(4, 625));
  Formula z = parse_formula("vg a; ord(x) >= a && false");
  EXPECT_TRUE(asymptotic_vanishing_check(Integrand::one(), z, "a", 0, 3, unit_box({"x"}, Q5), 2, Q5)
                  .vanishes_on_range);
}
