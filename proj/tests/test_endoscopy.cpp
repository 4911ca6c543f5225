#include <gtest/gtest.h>

#include "germlab/endoscopy.hpp"

using namespace germlab;

namespace {

const FieldSpec Q5 = FieldSpec::mixed(5, 40);
const FieldSpec F5t = FieldSpec::equal(5, 40);

Rational Q(long a, long b = 1) {
  Rational r(a, b);
  r.canonicalize();
  return r;
}

TorusElement T(const FieldSpec& f, int n, std::vector<int> digits) {
  return {LocalElement::from_digits(f, n, digits)};
}

}  // namespace

TEST(Endoscopy, DatumConstruction) {
  EXPECT_THROW(EndoscopicDatum::elliptic(SquareClass::One), std::invalid_argument);
  EXPECT_TRUE(EndoscopicDatum::split().kappa_trivial());
  EXPECT_FALSE(EndoscopicDatum::elliptic(SquareClass::NonsquareUnit).kappa_trivial());
  auto d = char_point(T(Q5, 1, {2}), EndoscopicDatum::elliptic(SquareClass::NonsquareUnit));
  EXPECT_EQ(*d.D.ord(), 2);
}

TEST(Endoscopy, SplitDatumReproducesStableIntegral) {
  auto datum = EndoscopicDatum::split();
  BarbaschMoyTuple t = barbasch_moy_tuple(5, Q5, 3);
  BasePoint base = default_base_point(datum, Q5, 1);
  for (int n = 1; n <= 3; ++n)
    for (int u = 1; u < 5; ++u) {
      TorusElement x = T(Q5, n, {u, 3});
      CharPoint d = char_point(x, datum);
      ASSERT_EQ(rational_classes(d).size(), 1u);
      for (const auto& f : t.pairs) {
        Rational stable = orbital_integral(d, 1, f, 3).value;
        EXPECT_EQ(kappa_orbital_integral(x, f, base, datum, 3), rational_pow(5, -(n - 1)) * stable);
      }
    }
}

TEST(Endoscopy, TransferFactorTransitivity) {
  auto datum = EndoscopicDatum::elliptic(SquareClass::NonsquareUnit);
  BasePoint b1 = default_base_point(datum, Q5, 1);
  TorusElement x2 = T(Q5, 2, {3, 1});
  BasePoint b2{x2, semisimple_representative(char_point(x2, datum), -1)};
  for (int n = 1; n <= 4; ++n) {
    TorusElement x = T(Q5, n, {2, 4});
    CharPoint d = char_point(x, datum);
    for (int sign : rational_classes(d)) {
      Sl2Element y = semisimple_representative(d, sign);
      EXPECT_EQ(transfer_factor(x, y, b1, datum), transfer_factor(x, y, b2, datum) * transfer_factor(b2.xh, b2.xg, b1, datum));
    }
  }
}

TEST(Endoscopy, TransferFactorVanishesOffCorrespondence) {
  auto datum = EndoscopicDatum::elliptic(SquareClass::NonsquareUnit);
  BasePoint base = default_base_point(datum, Q5, 0);
  TorusElement x = T(Q5, 1, {1});
  Sl2Element other = semisimple_representative(char_point(T(Q5, 1, {2}), datum), 1);
  EXPECT_EQ(transfer_factor(x, other, base, datum), 0);
  EXPECT_THROW(transfer_factor(x, other, {x, other}, datum), std::invalid_argument);
}

TEST(Endoscopy, BasePointCovariance) {
  auto datum = EndoscopicDatum::elliptic(SquareClass::NonsquareUnit);
  BasePoint plus = default_base_point(datum, Q5, 0);
  BasePoint minus{plus.xh, semisimple_representative(char_point(plus.xh, datum), -1)};
  for (int n = 0; n <= 3; ++n) {
    TorusElement x = T(Q5, n, {4, 2});
    CharPoint d = char_point(x, datum);
    for (int sign : rational_classes(d)) {
      Sl2Element y = semisimple_representative(d, sign);
      EXPECT_EQ(transfer_factor(x, y, minus, datum), -transfer_factor(x, y, plus, datum));
    }
  }
}

TEST(Endoscopy, TransferFactorIsClassFunction) {
  auto datum = EndoscopicDatum::elliptic(SquareClass::NonsquareUnit);
  BasePoint base = default_base_point(datum, Q5, 0);
  std::mt19937_64 rng(7);
  TorusElement x = T(Q5, 1, {3, 2});
  CharPoint d = char_point(x, datum);
  for (int sign : rational_classes(d)) {
    Sl2Element y = semisimple_representative(d, sign);
    Rational ref = transfer_factor(x, y, base, datum);
    for (int i = 0; i < 10; ++i) {
      Sl2Element z = conjugate(random_sl2_integral(Q5, 4, rng), y);
      EXPECT_EQ(transfer_factor(x, z, base, datum), ref);
    }
  }
}

TEST(Endoscopy, AnnulusStep) {
  AnnulusStep f{1, {Q(1), Q(2)}, Q(3)};
  EXPECT_EQ(f(LocalElement::from_int(Q5, 5)), 1);
  EXPECT_EQ(f(LocalElement::from_int(Q5, 50)), 2);
  EXPECT_EQ(f(LocalElement::from_int(Q5, 125)), 3);
  EXPECT_EQ(f(LocalElement::zero(Q5)), 3);
  EXPECT_THROW(f(LocalElement::from_int(Q5, 1)), std::out_of_range);
  EXPECT_EQ((f + f)(LocalElement::from_int(Q5, 50)), 4);
}

TEST(Endoscopy, EllipticMatchingSucceeds) {
  auto datum = EndoscopicDatum::elliptic(SquareClass::NonsquareUnit);
  for (const auto& field : {Q5, F5t}) {
    BarbaschMoyTuple t = barbasch_moy_tuple(5, field, 3);
    MatchingReport rep = local_matching_check({t.pairs[0]}, datum, field, 2, 3, 3);
    ASSERT_EQ(rep.results.size(), 1u);
    EXPECT_TRUE(rep.results[0].solved);
    EXPECT_TRUE(rep.success) << rep.to_json().dump();
    // Re-verified on the shifted range.
    MatchingReport shifted = local_matching_check({t.pairs[0]}, datum, field, 3, 3, 3);
    EXPECT_TRUE(shifted.success);
  }
}

TEST(Endoscopy, AllTestFunctionsMatch) {
  auto datum = EndoscopicDatum::elliptic(SquareClass::NonsquareUnit);
  BarbaschMoyTuple t = barbasch_moy_tuple(5, Q5, 3);
  MatchingReport rep = local_matching_check(t.pairs, datum, Q5, 2, 3, 3);
  EXPECT_TRUE(rep.success) << rep.to_json().dump();
}

TEST(Endoscopy, NegativeControlFails) {
  auto datum = EndoscopicDatum::elliptic(SquareClass::NonsquareUnit);
  BarbaschMoyTuple t = barbasch_moy_tuple(5, Q5, 3);
  MatchingOptions opts;
  opts.delta.wrong_sign = true;
  MatchingReport rep = local_matching_check({t.pairs[0]}, datum, Q5, 2, 3, 3, opts);
  EXPECT_FALSE(rep.success);
  EXPECT_FALSE(rep.results[0].solved);
  EXPECT_FALSE(rep.results[0].obstruction.empty());
}

TEST(Endoscopy, KappaGerms) {
  auto datum = EndoscopicDatum::elliptic(SquareClass::NonsquareUnit);
  BarbaschMoyTuple t = barbasch_moy_tuple(5, Q5, 3);
  ThetaMatrix th = theta_matrix(t, 3);
  BasePoint base = default_base_point(datum, Q5, 1);
  for (int n = 1; n <= 2; ++n) {
    TorusElement x = T(Q5, n, {1, 2});
    RationalVector g = kappa_germ_table(x, t, th, base, datum, 3);
    Rational delta = rational_pow(5, -(n - 1));
    // The zero orbit cancels between the two classes.
    EXPECT_EQ(g, (RationalVector{0, delta, delta, -delta, -delta}));
  }
}
