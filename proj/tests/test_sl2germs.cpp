#include <gtest/gtest.h>

#include <random>

#include "germlab/integrate.hpp"
#include "germlab/rootdata.hpp"
#include "germlab/sl2germs.hpp"

using namespace germlab;

namespace {

const FieldSpec Q5 = FieldSpec::mixed(5, 40);
const FieldSpec F5t = FieldSpec::equal(5, 40);

Rational Q(long a, long b = 1) {
  Rational r(a, b);
  r.canonicalize();
  return r;
}

LocalElement L(const FieldSpec& f, long n) { return LocalElement::from_int(f, n); }

long ipow(long p, int e) {
  long r = 1;
  for (int i = 0; i < e; ++i) r *= p;
  return r;
}

int legendre(long a, long p) {
  a %= p;
  if (a < 0) a += p;
  long r = 1;
  for (long e = (p - 1) / 2, b = a; e; e >>= 1, b = b * b % p)
    if (e & 1) r = r * b % p;
  return r == 1 ? 1 : -1;
}

// Tame Hilbert symbol on nonzero integers, written out for the oracle.
int hilbert_int(long x, long y, long p) {
  int vx = 0, vy = 0;
  while (x % p == 0) x /= p, ++vx;
  while (y % p == 0) y /= p, ++vy;
  int s = (vx * vy * ((p - 1) / 2)) % 2 ? -1 : 1;
  if (vy % 2) s *= legendre(x, p);
  if (vx % 2) s *= legendre(y, p);
  return s;
}

// Leray measure of {a^2 + bc = t, (b, t) = sign} over pO x (n_b + pO) x pO by
// plain loops modulo p^m. Exact once the fiber has no points with b = 0 mod p^m.
Rational brute_orbital(long p, int m, long t, int sign, long nb) {
  long q = ipow(p, m);
  long tt = ((t % q) + q) % q;
  long count = 0;
  for (long a = 0; a < q; a += p)
    for (long b = nb % p; b < q; b += p)
      for (long c = 0; c < q; c += p) {
        if ((a * a + b * c) % q != tt) continue;
        EXPECT_NE(b, 0) << "point with b = 0 mod p^m";
        if (b != 0 && hilbert_int(b, t, p) == sign) ++count;
      }
  return Rational(count) / Rational(ipow(p, 2 * m));
}

BarbaschMoyPair zero_pair(const FieldSpec& f) { return {Sl2Element::zero(f), Parahoric::V0, "0", true, 3, 0}; }

}  // namespace

TEST(Sl2, CharPointAndNilpotence) {
  const FieldSpec f = FieldSpec::mixed(5);
  Sl2Element e = Sl2Element::E(L(f, 1));
  EXPECT_TRUE(is_nilpotent(e));
  EXPECT_TRUE(char_point(e).D.is_zero());
  Sl2Element d{L(f, 3), L(f, 0), L(f, 0)};
  EXPECT_FALSE(is_nilpotent(d));
  EXPECT_TRUE(same_value(char_point(d).D, L(f, -9)));
  Sl2Element r{L(f, 1), L(f, 1), L(f, -1)};
  EXPECT_TRUE(is_nilpotent(r));
  // ord(D) at the budget is rejected.
  Sl2Element deep{LocalElement::zero(f), LocalElement::uniformizer_power(f, 16), L(f, 1)};
  EXPECT_THROW(is_nilpotent(deep), PrecisionError);
}

TEST(Sl2, NilpotentOrbitReps) {
  auto reps = nilpotent_orbit_reps(FieldSpec::mixed(5));
  ASSERT_EQ(reps.size(), 5u);
  EXPECT_TRUE(reps[0].rep.is_zero());
  std::vector<long> b;
  for (std::size_t i = 1; i < 5; ++i) b.push_back(*reps[i].rep.b.ord() == 0 ? reps[i].rep.b.ac() : 5 * reps[i].rep.b.ac());
  EXPECT_EQ(b, (std::vector<long>{1, 2, 5, 10}));
  EXPECT_EQ(static_cast<long>(reps.size()), nilpotent_class_bound(root_datum("A1"), 5));
  // Pairwise distinct invariants.
  for (std::size_t i = 1; i < 5; ++i)
    for (std::size_t j = i + 1; j < 5; ++j)
      EXPECT_NE(class_invariant(reps[i].rep), class_invariant(reps[j].rep));
  // diag(l, 1/l) E(1) diag(1/l, l) = E(l^2).
  LocalElement l = L(Q5, 3);
  Sl2Element c = conjugate(Sl2Group::torus(l), Sl2Element::E(L(Q5, 1)));
  EXPECT_TRUE(same_value(c.b, L(Q5, 9)));
  EXPECT_EQ(class_invariant(c).label(), "1");
  EXPECT_THROW(nilpotent_orbit_reps(FieldSpec::mixed(3)), std::invalid_argument);
}

TEST(Sl2, ConjugationSearchFindsFiveClasses) {
  for (int p : {5, 7}) {
    ConjugationSearch s = nilpotent_conjugation_search(FieldSpec::mixed(p), 3, 11);
    EXPECT_EQ(s.classes, 5u) << p;
    EXPECT_EQ(static_cast<long>(s.classes), nilpotent_class_bound(root_datum("A1"), p));
  }
  EXPECT_EQ(nilpotent_conjugation_search(FieldSpec::equal(5), 3, 11).classes, 5u);
}

TEST(Sl2, ClassInvariantConjugationSweep) {
  std::mt19937_64 rng(7);
  auto xs = sample_regular_semisimple(Q5, 2, 3, 2, 3);
  for (const auto& r : nilpotent_orbit_reps(Q5))
    if (!r.rep.is_zero()) xs.push_back(r.rep);
  int checked = 0;
  for (int n = 0; n < 200; ++n) {
    const Sl2Element& x = xs[static_cast<std::size_t>(n) % xs.size()];
    Sl2Group g = random_sl2_integral(Q5, 3, rng);
    Sl2Element y = conjugate(g, x);
    EXPECT_EQ(class_invariant(y), class_invariant(x)) << x.to_string();
    EXPECT_TRUE(same_value(char_point(y).D, char_point(x).D));
    ++checked;
  }
  EXPECT_EQ(checked, 200);
  EXPECT_THROW(class_invariant(Sl2Element::zero(Q5)), std::invalid_argument);
}

TEST(Sl2, SplitVersusCompanion) {
  LocalElement a = L(Q5, 3);
  Sl2Element d{a, L(Q5, 0), L(Q5, 0)};
  Sl2Element c{L(Q5, 0), a * a, L(Q5, 1)};
  EXPECT_TRUE(same_value(char_point(d).D, char_point(c).D));
  EXPECT_EQ(class_invariant(d), class_invariant(c));
  // Explicit conjugator from the eigenvectors (a, 1) and (-a, 1).
  Sl2Group g{a, L(Q5, -1) / L(Q5, 2), L(Q5, 1), (L(Q5, 2) * a).inverse()};
  EXPECT_TRUE(same_value(conjugate(g, d), c));
  // Ramified elliptic: b = 1 and b = eps give the two rational classes.
  LocalElement pi = LocalElement::uniformizer(Q5), eps = LocalElement::nonsquare_unit(Q5);
  Sl2Element x1{L(Q5, 0), L(Q5, 1), pi}, x2{L(Q5, 0), eps, pi / eps};
  EXPECT_TRUE(same_value(char_point(x1).D, char_point(x2).D));
  EXPECT_NE(class_invariant(x1).sign, class_invariant(x2).sign);
  EXPECT_EQ(class_invariant(x1).kind, OrbitKind::Elliptic);
}

TEST(Sl2, MoyPrasadLattices) {
  auto v00 = moy_prasad_lattice(Parahoric::V0, 0);
  auto v0p = moy_prasad_lattice_plus(Parahoric::V0, 0);
  EXPECT_EQ(v0p, moy_prasad_lattice(Parahoric::V0, 1));
  EXPECT_EQ(v00.index_exponent(v0p), 3);
  auto v1 = moy_prasad_lattice(Parahoric::V1, 0);
  EXPECT_EQ((std::vector<int>{v1.alpha, v1.beta, v1.gamma}), (std::vector<int>{0, -1, 1}));
  auto iw = moy_prasad_lattice_plus(Parahoric::Iwahori, 0);
  EXPECT_EQ((std::vector<int>{iw.alpha, iw.beta, iw.gamma}), (std::vector<int>{1, 0, 1}));
  EXPECT_EQ(iw.r, Q(1, 2));
  EXPECT_THROW(moy_prasad_lattice(Parahoric::V0, Q(1, 2)), std::invalid_argument);
  EXPECT_THROW(moy_prasad_lattice(Parahoric::Iwahori, Q(1, 3)), std::invalid_argument);
  // Bracket sweep: [g_{f,0}, g_{f,0+}] inside g_{f,0+}.
  for (Parahoric f : kAllParahorics) {
    auto g0 = moy_prasad_lattice(f, 0).generators(Q5);
    auto gp = moy_prasad_lattice_plus(f, 0);
    for (const auto& x : g0)
      for (const auto& y : gp.generators(Q5)) EXPECT_TRUE(gp.contains(bracket(x, y))) << to_string(f);
    EXPECT_FALSE(gp == moy_prasad_lattice(f, 0));
  }
}

TEST(Sl2, BarbaschMoyTuple) {
  BarbaschMoyTuple t = barbasch_moy_tuple(5, Q5, 3);
  ASSERT_EQ(t.size(), 5u);
  EXPECT_TRUE(t.pairs[0].N.is_zero());
  EXPECT_EQ(t.pairs[0].f, Parahoric::V0);
  std::vector<Parahoric> fs;
  for (const auto& pr : t.pairs) {
    EXPECT_TRUE(pr.dominance_verified) << pr.orbit_label;
    EXPECT_TRUE(moy_prasad_lattice(pr.f, 0).contains(pr.N));
    fs.push_back(pr.f);
  }
  EXPECT_EQ(fs, (std::vector<Parahoric>{Parahoric::V0, Parahoric::V0, Parahoric::V0, Parahoric::V1, Parahoric::V1}));
  EXPECT_GT(t.pairs[1].nilpotents_checked, 0u);
  EXPECT_TRUE(barbasch_moy_tuple(6, Q5, 3).empty());
  EXPECT_EQ(barbasch_moy_tuple(2, Q5, 3).size(), 2u);
}

TEST(Sl2, AdjugateExamples) {
  EXPECT_EQ(adjugate({{1, 2}, {3, 4}}), (RationalMatrix{{4, -2}, {-3, 1}}));
  EXPECT_EQ(adjugate(identity_matrix(4)), identity_matrix(4));
  RationalMatrix m{{2, 1, 0}, {Q(1, 3), 5, 7}, {0, -1, 4}};
  RationalMatrix lhs = multiply(adjugate(m), m);
  RationalMatrix rhs = identity_matrix(3);
  for (auto& row : rhs)
    for (auto& x : row) x *= determinant(m);
  EXPECT_EQ(lhs, rhs);
}

TEST(Sl2, ThetaMatrixExact) {
  for (const FieldSpec& f : {Q5, F5t}) {
    BarbaschMoyTuple t = barbasch_moy_tuple(5, f, 3);
    ThetaMatrix th = theta_matrix(t, 3);
    EXPECT_TRUE(th.stable);
    EXPECT_TRUE(th.upper_triangular);
    // Oracle by shells: the cone in pi sl2(O) meets class 1 in even shells s >= 2
    // and class pi in odd shells, each of mass (p-1)/(2p) p^-ceil((s+1)/2).
    RationalMatrix expect(5, RationalVector(5, 0));
    expect[0] = {1, Q(1, 50), Q(1, 50), Q(1, 10), Q(1, 10)};
    for (int i = 1; i < 5; ++i) expect[i][i] = Q(1, 25);
    EXPECT_EQ(th.entries, expect) << f.name();
    EXPECT_EQ(th.det, rational_pow(5, -8));
    EXPECT_EQ(multiply(th.adjugate, th.entries), multiply(th.entries, th.adjugate));
  }
  EXPECT_EQ(nilpotent_orbital_integral(Sl2Element::zero(Q5), zero_pair(Q5), 3).value, 1);
}

TEST(Sl2, OrbitalIntegralAgainstBruteForce) {
  BarbaschMoyTuple t = barbasch_moy_tuple(3, Q5, 3);
  // Elliptic targets, so the fibers avoid b = 0 mod 5^4.
  for (long target : {5L, 10L, 50L, 250L}) {
    const int m = 4;
    for (int sign : {1, -1}) {
      CharPoint d{L(Q5, -target)};
      for (std::size_t j = 0; j < 3; ++j) {
        long nb = j == 0 ? 0 : (j == 1 ? 1 : 2);
        Rational brute = brute_orbital(5, m, target, sign, nb);
        OrbitalIntegral o = orbital_integral(d, sign, t.pairs[j], 3);
        EXPECT_TRUE(o.stable);
        EXPECT_EQ(o.value, brute) << "target " << target << " sign " << sign << " pair " << j;
      }
    }
  }
}

TEST(Sl2, SplitOrbitalIntegralMatchesLeray) {
  // diag(5, -5) against 1 on pi sl2(O): fiber a^2 + bc = 25 over (5O)^3.
  Sl2Element x{L(Q5, 5), L(Q5, 0), L(Q5, 0)};
  OrbitalIntegral o = orbital_integral(x, zero_pair(Q5), 3);
  EXPECT_TRUE(o.stable);
  std::vector<std::string> v{"a", "b", "c"};
  Box box;
  for (const auto& n : v) box.emplace(n, Ball{LocalElement::zero(Q5), 1});
  LerayFiberSpec spec{Polynomial::parse("-a^2 - b*c", v), L(Q5, -25), box, std::nullopt};
  for (int m : {3, 4, 5}) EXPECT_EQ(leray_fiber_measure(spec, nullptr, m, Q5).result.value, o.value) << m;
  // Oracle: rescaling to a^2 + bc = 1 over O^3, with (p^2 + p) points mod p.
  EXPECT_EQ(o.value, Q(6, 25));
  // Valuation-incompatible support: ord D = -1.
  Sl2Element far{LocalElement::uniformizer_power(Q5, -1), L(Q5, 0), L(Q5, 0)};
  EXPECT_EQ(orbital_integral(far, zero_pair(Q5), 3).value, 0);
}

TEST(Sl2, OrbitalIntegralInvariance) {
  BarbaschMoyTuple t = barbasch_moy_tuple(5, Q5, 3);
  std::mt19937_64 rng(5);
  auto xs = sample_regular_semisimple(Q5, 2, 2, 1, 9);
  for (const auto& x : xs) {
    Sl2Element y = conjugate(random_sl2_integral(Q5, 3, rng), x);
    for (const auto& pr : t.pairs) EXPECT_EQ(orbital_integral(x, pr, 3).value, orbital_integral(y, pr, 3).value);
  }
}

TEST(Sl2, GermsNearZero) {
  for (const FieldSpec& f : {Q5, F5t}) {
    BarbaschMoyTuple t = barbasch_moy_tuple(5, f, 3);
    ThetaMatrix th = theta_matrix(t, 3);
    LocalElement eps = LocalElement::nonsquare_unit(f);
    for (int r : {2, 4}) {
      // -D = eps pi^r: unramified elliptic.
      CharPoint d{-(eps * LocalElement::uniformizer_power(f, r))};
      for (int sign : {1, -1}) {
        GermRow row = shalika_germs(d, sign, t, th, 3);
        EXPECT_TRUE(row.identity_holds);
        EXPECT_TRUE(row.stable);
        RationalVector g = row.normalized(th.det);
        // Oracle: g_i = p^2 O(X, 1_{Upsilon_i}) for regular i, and the zero
        // row gives g_0 = O_0 - (g_1 + g_2)/(2p^2) - (g_3 + g_4)/(2p).
        RationalVector regular = sign > 0 ? RationalVector{1, 1, 0, 0} : RationalVector{0, 0, 1, 1};
        EXPECT_EQ(RationalVector(g.begin() + 1, g.end()), regular) << f.name() << r << sign;
        EXPECT_EQ(g[0], -rational_pow(5, -(r / 2 + 1))) << f.name() << r << sign;
      }
      RationalVector st = stable_germs(d, t, th, 3);
      for (std::size_t i = 1; i < 5; ++i) EXPECT_EQ(st[i], 1);
    }
    // Split: regular germs all 1 and no zero-orbit germ.
    CharPoint split{-LocalElement::uniformizer_power(f, 4)};
    RationalVector g = shalika_germs(split, 1, t, th, 3).normalized(th.det);
    EXPECT_EQ(g, (RationalVector{0, 1, 1, 1, 1}));
  }
}

TEST(Sl2, GermScaling) {
  BarbaschMoyTuple t = barbasch_moy_tuple(5, Q5, 3);
  ThetaMatrix th = theta_matrix(t, 3);
  LocalElement pi2 = LocalElement::uniformizer_power(Q5, 2);
  std::vector<std::optional<Rational>> ratio(5);
  for (const auto& x : sample_regular_semisimple(Q5, 2, 3, 3, 21)) {
    RationalVector g1 = shalika_germs(x, t, th, 3).gamma;
    RationalVector g2 = shalika_germs(scale(pi2, x), t, th, 3).gamma;
    for (std::size_t i = 0; i < 5; ++i) {
      if (g1[i] == 0) {
        EXPECT_EQ(g2[i], 0);
        continue;
      }
      Rational r = g2[i] / g1[i];
      if (ratio[i]) EXPECT_EQ(*ratio[i], r) << i;
      ratio[i] = r;
    }
  }
  ASSERT_TRUE(ratio[0]);
  EXPECT_EQ(*ratio[0], Q(1, 25));
  for (std::size_t i = 1; i < 5; ++i) EXPECT_EQ(*ratio[i], 1);
}

TEST(Sl2, TruncationFamily) {
  const FieldSpec f = FieldSpec::mixed(5);
  Formula s0 = truncation_family(0), s1 = truncation_family(1), s2 = truncation_family(2);
  Environment env{{"a", L(f, 1)}, {"b", L(f, 5)}, {"c", L(f, 1)}};
  EXPECT_TRUE(evaluate(s0, env, f).value);
  EXPECT_FALSE(evaluate(s1, env, f).value);
  // Oracle: points of (Z/p^n)^3 with a^2 + bc = 0 mod p^n, over p^(3n).
  auto brute = [](int n) -> Rational {
    long q = ipow(5, n), count = 0;
    for (long a = 0; a < q; ++a)
      for (long b = 0; b < q; ++b)
        for (long c = 0; c < q; ++c)
          if ((a * a + b * c) % q == 0) ++count;
    return Rational(count) / Rational(q * q * q);
  };
  Rational m1 = measure(s1, unit_box(s1.vf_variables(), f), 1, f).value;
  Rational m2 = measure(s2, unit_box(s2.vf_variables(), f), 2, f).value;
  EXPECT_EQ(m1, brute(1));
  EXPECT_EQ(m2, brute(2));
  EXPECT_EQ(m1, Q(1, 5));
  EXPECT_LT(m2, m1);
}

TEST(Sl2, DependenceCheck) {
  RationalMatrix dup{{1, 1}, {2, 2}, {Q(1, 3), Q(1, 3)}};
  DependenceReport r = asymptotic_dependence_check({dup, dup});
  EXPECT_TRUE(r.dependent);
  ASSERT_EQ(r.kernel.size(), 1u);
  EXPECT_EQ(r.kernel[0], (RationalVector{-1, 1}));
  RationalMatrix ind{{1, 0}, {1, 1}};
  EXPECT_FALSE(asymptotic_dependence_check({ind}).dependent);
  EXPECT_TRUE(asymptotic_dependence_check({RationalMatrix{{1, 2, 3}}}).inconclusive);
}
