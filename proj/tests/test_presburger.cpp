#include <gtest/gtest.h>

#include <random>

#include "germlab/presburger.hpp"

using namespace germlab;

namespace {

ExpPoly P(const char* s) { return parse_exppoly(s); }

}  // namespace

TEST(ExpPoly, Cancellation) {
  EXPECT_TRUE((P("2*q^t") + P("-2*q^t")).is_zero());
  EXPECT_EQ((P("2*q^t") + P("-2*q^t")).to_string(), "0");
}

TEST(ExpPoly, Products) {
  EXPECT_EQ((P("t") * P("q^t")).to_string(), "t*q^t");
  EXPECT_EQ((P("t") * P("q^t")).size(), 1u);
  EXPECT_EQ((P("t-3") * P("t-5")), P("t^2 - 8*t + 15"));
  EXPECT_EQ(P("(t-3)*(t-5)").to_string(), "t^2 - 8*t + 15");
}

TEST(ExpPoly, TextForm) {
  ExpPoly f = P("3*t^2*q^(\xE2\x88\x92" "1*t) + 1/2*q^(2*t)");
  EXPECT_EQ(f.to_string(), "1/2*q^(2*t) + 3*t^2*q^(-1*t)");
  EXPECT_EQ(P(f.to_string().c_str()), f);
  EXPECT_THROW(P("t^-1"), std::invalid_argument);
  EXPECT_THROW(P("3 +"), std::invalid_argument);
}

TEST(ExpPoly, Specialize) {
  EXPECT_EQ(P("t*q^t").specialize(3, 2), 18);
  EXPECT_EQ(ExpPoly().specialize(7, 11), 0);
  EXPECT_EQ(P("q^t - t").specialize(2, 4), 12);
  EXPECT_EQ(P("q^(-1*t)").specialize(2, 3), Rational(1, 8));
  EXPECT_EQ(P("t^3").specialize(5, -2), -8);
}

TEST(Presburger, Pieces) {
  PresburgerPiece a = parse_piece("[0..) mod 2");
  PresburgerPiece b = parse_piece("[1..20] mod 3");
  auto both = a.intersect(b);
  ASSERT_TRUE(both);
  EXPECT_EQ(both->to_string(), "[4..20] mod 6");
  for (long t = -10; t < 40; ++t) EXPECT_EQ(both->contains(t), a.contains(t) && b.contains(t)) << t;
  EXPECT_FALSE(parse_piece("[0..) mod 2").intersect(parse_piece("[1..) mod 2")));
  EXPECT_EQ(parse_piece("[-3..7] mod 5").to_string(), "[-3..7] mod 5");
  EXPECT_THROW(parse_piece("[1..2"), std::invalid_argument);
}

TEST(Presburger, EventuallyZero) {
  EXPECT_TRUE(is_eventually_zero(PiecewiseExpPoly::on(PresburgerPiece::ray(0), ExpPoly())));
  EXPECT_TRUE(is_eventually_zero(PiecewiseExpPoly::on(PresburgerPiece::ray(0), P("q^t - q^t"))));
  PiecewiseExpPoly g = PiecewiseExpPoly::on(PresburgerPiece::ray(0), P("t^2 - 8*t + 15"));
  EXPECT_FALSE(is_eventually_zero(g));
  EXPECT_EQ(zero_set_bounded(P("t^2 - 8*t + 15"), 2, 0, 500), (std::vector<long>{3, 5}));
  EXPECT_THROW(is_eventually_zero(PiecewiseExpPoly::on(PresburgerPiece::interval(0, 5), ExpPoly())),
               std::invalid_argument);
  // Nonzero on a finite piece, zero on the ray.
  PiecewiseExpPoly h({{PresburgerPiece::interval(0, 9), P("t")}, {PresburgerPiece::ray(10), ExpPoly()}});
  EXPECT_TRUE(is_eventually_zero(h));
}

TEST(Presburger, ZeroSets) {
  EXPECT_EQ(zero_set_bounded(P("t - 3"), 2, 0, 10), (std::vector<long>{3}));
  EXPECT_EQ(zero_set_bounded(P("q^t - 1"), 2, 0, 10), (std::vector<long>{0}));
}

TEST(Presburger, TailBounds) {
  EXPECT_EQ(uniform_tail_bound(P("q^t - t"), 2), 1);
  EXPECT_EQ(uniform_tail_bound(P("1"), 5), 0);
  long a0 = uniform_tail_bound(P("t^2 - 8*t + 15"), 3);
  EXPECT_GE(a0, 6);
  EXPECT_TRUE(zero_set_bounded(P("t^2 - 8*t + 15"), 3, a0, a0 + 500).empty());
  EXPECT_TRUE(zero_set_bounded(P("q^t - t"), 2, 1, 100).empty());
  EXPECT_THROW(uniform_tail_bound(ExpPoly(), 2), std::invalid_argument);
  long big = uniform_tail_bound(P("t - 1000000"), 2);
  EXPECT_GT(big, 1000000);
}

TEST(PresburgerProperty, RingOperationsAgreeWithSpecialization) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> coef(-5, 5), k(0, 3), l(-2, 2), n(1, 3);
  auto random_poly = [&] {
    std::vector<ExpPoly::Term> terms;
    int count = n(rng);
    for (int i = 0; i < count; ++i) terms.push_back({Rational(coef(rng), 1 + std::abs(coef(rng))), k(rng), l(rng)});
    return ExpPoly::from_terms(terms);
  };
  for (int it = 0; it < 40; ++it) {
    ExpPoly f = random_poly(), g = random_poly();
    PiecewiseExpPoly pf({{PresburgerPiece::interval(-50, 60, 2), f}, {PresburgerPiece::ray(61), g}});
    PiecewiseExpPoly pg = PiecewiseExpPoly::on(PresburgerPiece::ray(-50, 3), g);
    for (long q : {2L, 5L, 17L})
      for (long t = -50; t <= 200; t += 7) {
        EXPECT_EQ((f + g).specialize(q, t), f.specialize(q, t) + g.specialize(q, t));
        EXPECT_EQ((f * g).specialize(q, t), f.specialize(q, t) * g.specialize(q, t));
        auto a = pf.evaluate(q, t), b = pg.evaluate(q, t), s = (pf + pg).evaluate(q, t), m = (pf * pg).evaluate(q, t);
        ASSERT_EQ(s.has_value(), a && b);
        if (s) {
          EXPECT_EQ(*s, *a + *b);
          EXPECT_EQ(*m, *a * *b);
        }
      }
  }
}
