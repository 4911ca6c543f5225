// Acceptance run: one line per criterion, exit status 0 iff all pass.
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "germlab/endoscopy.hpp"
#include "germlab/experiments.hpp"
#include "germlab/integrate.hpp"
#include "germlab/presburger.hpp"
#include "germlab/rootdata.hpp"
#include "germlab/sl2germs.hpp"

using namespace germlab;

namespace {

// Every comparison below is exact rational equality; only wall time has a budget.
constexpr int kDepth = 3;
constexpr int kPrecision = 40;
constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool pass = true;
  std::string detail;
};

void require(Outcome& o, bool cond, const std::string& what) {
  if (!cond && o.pass) o.detail = "failed: " + what;
  o.pass = o.pass && cond;
}

FieldSpec Qp(int p) { return FieldSpec::mixed(p, kPrecision); }

Rational Q(long a, long b = 1) {
  Rational r(a, b);
  r.canonicalize();
  return r;
}

Outcome germ_expansion() {
  Outcome o;
  std::size_t rows = 0;
  for (int p : {5, 7}) {
    FieldSpec f = Qp(p);
    BarbaschMoyTuple t = barbasch_moy_tuple(5, f, kDepth);
    ThetaMatrix th = theta_matrix(t, kDepth);
    auto xs = sample_regular_semisimple(f, 2, 3, 20, kSeed);
    std::map<SquareClass, int> per_class;
    for (const auto& x : xs) {
      int a = *char_point(x).D.ord();
      require(o, a >= 2 && a <= 5, "ord D outside [2, 5]");
      ++per_class[square_class(-char_point(x).D)];
      GermRow g = shalika_germs(x, t, th, kDepth);
      require(o, g.stable, "unstable orbital integral");
      require(o, g.identity_holds, "d_5 O != Theta Gamma at p = " + std::to_string(p));
      ++rows;
    }
    for (SquareClass c : kAllSquareClasses) require(o, per_class[c] >= 20, "fewer than 20 samples in a class");
  }
  if (o.pass) o.detail = std::to_string(rows) + " rows exact";
  return o;
}

Outcome theta_triangular() {
  Outcome o;
  std::string dets;
  for (int p : {5, 7, 11}) {
    ThetaMatrix th = theta_matrix(barbasch_moy_tuple(5, Qp(p), kDepth), kDepth);
    require(o, th.stable, "Theta unstable");
    require(o, th.upper_triangular, "Theta not triangular at p = " + std::to_string(p));
    for (std::size_t i = 0; i < th.entries.size(); ++i) require(o, th.entries[i][i] != 0, "zero diagonal");
    require(o, th.det != 0, "d_5 = 0");
    dets += (dets.empty() ? "" : ", ") + to_string(th.det);
  }
  if (o.pass) o.detail = "d_5 = " + dets;
  return o;
}

Outcome nilpotent_classes() {
  Outcome o;
  for (int p : {5, 7}) {
    ConjugationSearch s = nilpotent_conjugation_search(Qp(p), kDepth, kSeed);
    long bound = nilpotent_class_bound(root_datum("A1"), p);
    require(o, bound == 5, "class bound != 5");
    require(o, static_cast<long>(s.classes) == bound,
            std::to_string(s.classes) + " classes found at p = " + std::to_string(p));
  }
  if (o.pass) o.detail = "5 classes over Q_5 and Q_7";
  return o;
}

Outcome ax_kochen() {
  Outcome o;
  for (int p : {5, 7, 11}) {
    AkReport r = ak_regression_family(p, kDepth);
    require(o, r.entries.size() == 10, "family size");
    for (const auto& e : r.entries) require(o, e.agree, e.name + " differs at p = " + std::to_string(p));
  }
  if (o.pass) o.detail = "10 expressions agree at p = 5, 7, 11";
  return o;
}

ExpPoly random_exppoly(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coef(-6, 6), k(0, 2), l(-1, 1), count(1, 4), kind(0, 3), root(0, 30);
  auto c = [&] {
    int a = coef(rng);
    return Q(a == 0 ? 1 : a, 1 + std::abs(coef(rng)));
  };
  auto terms = [&](int n) {
    std::vector<ExpPoly::Term> ts;
    for (int i = 0; i < n; ++i) ts.push_back({c(), k(rng), l(rng)});
    return ExpPoly::from_terms(ts);
  };
  switch (kind(rng)) {
    case 0: {
      // (t - r)(b + d q^(l t)): a planted zero at t = r.
      ExpPoly lin = ExpPoly::from_terms({{1, 1, 0}, {Q(-root(rng)), 0, 0}});
      return lin * ExpPoly::from_terms({{c(), 0, 0}, {c(), 0, 1 + (l(rng) + 1) % 2}});
    }
    case 1: {
      ExpPoly f = terms(2), g = terms(2);
      return f * g - g * f;
    }
    default:
      return terms(count(rng));
  }
}

Outcome presburger_tails() {
  Outcome o;
  std::mt19937_64 rng(kSeed);
  std::uniform_int_distribution<long> qd(2, 17);
  int zero = 0, nonzero = 0;
  for (int it = 0; it < 200; ++it) {
    ExpPoly f = random_exppoly(rng);
    require(o, f.size() <= 4, "more than 4 terms");
    long q = qd(rng);
    // A bounded junk piece in front of the ray.
    PiecewiseExpPoly pw({{PresburgerPiece::interval(0, 9), ExpPoly::constant(1)}, {PresburgerPiece::ray(10), f}});
    bool claimed = is_eventually_zero(pw);
    bool scanned = true;
    for (long t = 0; t <= 500; ++t) {
      auto v = pw.evaluate(q, t);
      require(o, v.has_value(), "evaluation off the domain");
      if (t >= 10 && *v != 0) scanned = false;
    }
    require(o, claimed == scanned, "is_eventually_zero disagrees on " + f.to_string());
    if (!f.is_zero()) {
      long a0 = uniform_tail_bound(f, q);
      require(o, zero_set_bounded(f, q, a0, a0 + 500).empty(), "zero beyond tail bound for " + f.to_string());
      ++nonzero;
    } else {
      ++zero;
    }
  }
  if (o.pass) o.detail = std::to_string(nonzero) + " nonzero, " + std::to_string(zero) + " zero";
  return o;
}

Outcome local_matching() {
  Outcome o;
  auto datum = EndoscopicDatum::elliptic(SquareClass::NonsquareUnit);
  const long a0 = 2;
  for (int p : {5, 7}) {
    FieldSpec f = Qp(p);
    BarbaschMoyTuple t = barbasch_moy_tuple(5, f, kDepth);
    MatchingOptions opts;
    opts.seed = kSeed;
    MatchingReport rep = local_matching_check(t.pairs, datum, f, a0, 3, kDepth, opts);
    require(o, rep.results.size() == 5, "not every indicator tested");
    for (const auto& r : rep.results) require(o, r.success, r.test_function + " unmatched at p = " + std::to_string(p));
    MatchingReport shifted = local_matching_check(t.pairs, datum, f, a0 + 1, 3, kDepth, opts);
    require(o, shifted.success, "no re-verification on the shifted range");
    opts.delta.wrong_sign = true;
    MatchingReport control = local_matching_check(t.pairs, datum, f, a0, 3, kDepth, opts);
    require(o, !control.success, "negative control matched at p = " + std::to_string(p));
  }
  if (o.pass) o.detail = "5 indicators matched at p = 5, 7; control fails";
  return o;
}

Outcome stable_regular_germ() {
  Outcome o;
  std::size_t n = 0;
  for (int p : {5, 7}) {
    FieldSpec f = Qp(p);
    BarbaschMoyTuple t = barbasch_moy_tuple(5, f, kDepth);
    ThetaMatrix th = theta_matrix(t, kDepth);
    for (const auto& x : sample_regular_semisimple(f, 2, 3, 5, kSeed)) {
      RationalVector s = stable_germs(char_point(x), t, th, kDepth);
      for (std::size_t i = 1; i < s.size(); ++i) require(o, s[i] == 1, "stable regular germ != 1");
      ++n;
    }
  }
  if (o.pass) o.detail = "each regular orbit has stable germ 1 at " + std::to_string(n) + " points";
  return o;
}

Outcome invariants() {
  Outcome o;
  auto m = [](const std::string& text, const FieldSpec& f, int depth) {
    Formula s = parse_formula(text);
    return measure(s, unit_box(s.vf_variables(), f), depth, f).value;
  };
  for (int p : {5, 7, 11}) {
    FieldSpec f = Qp(p);
    require(o, m("ord(x) <= 1", f, 2) == m("ord(x) = 0", f, 2) + m("ord(x) = 1", f, 2), "additivity");
    require(o, m("ac(x) = 1 || ac(x) = 2", f, 2) == m("ac(x) = 1", f, 2) + m("ac(x) = 2", f, 2), "additivity of ac");
    require(o, m("ord(x) >= 1", f, 2) == m("ord(x) >= 1", f, 3), "refinement stability");
    require(o, m("ord(x - 3) >= 2", f, 3) == m("ord(x) >= 2", f, 3), "translation invariance");
    FieldSpec s = FieldSpec::mixed(p, 8);
    for (SquareClass a : kAllSquareClasses)
      for (SquareClass b : kAllSquareClasses) {
        LocalElement ea = LocalElement::square_class_representative(s, a);
        LocalElement eb = LocalElement::square_class_representative(s, b);
        require(o, hilbert_symbol(ea, eb) == hilbert_symbol(eb, ea), "Hilbert symmetry");
        require(o, hilbert_symbol(ea, eb) == hilbert_symbol(a, b, p), "Hilbert element/class forms");
        for (SquareClass c : kAllSquareClasses) {
          LocalElement bc = eb * LocalElement::square_class_representative(s, c);
          require(o, hilbert_symbol(ea, bc) == hilbert_symbol(ea, eb) * hilbert_symbol(a, c, p),
                  "Hilbert bimultiplicativity");
        }
      }
    require(o, hilbert_symbol(SquareClass::NonsquareUnit, SquareClass::Uniformizer, p) == -1, "(u, pi) = -1");
  }
  if (o.pass) o.detail = "p = 5, 7, 11";
  return o;
}

Outcome parahorics() {
  Outcome o;
  ParahoricIndexSet s = parahoric_index_set(split_fixed_choices({"A1"}));
  require(o, s.f.size() == 3, "|F| = " + std::to_string(s.f.size()));
  require(o, std::size(kAllParahorics) == 3, "three lattice families");
  // Singletons are the vertices, the pair is the Iwahori point between them.
  MoyPrasadLattice v0 = moy_prasad_lattice(Parahoric::V0, 0), v1 = moy_prasad_lattice(Parahoric::V1, 0);
  MoyPrasadLattice iw = moy_prasad_lattice(Parahoric::Iwahori, 0);
  require(o, iw.alpha == std::max(v0.alpha, v1.alpha) && iw.beta == std::max(v0.beta, v1.beta) &&
                 iw.gamma == std::max(v0.gamma, v1.gamma),
          "Iwahori lattice is not the vertex intersection");
  std::size_t singletons = 0, pairs = 0;
  for (const auto& e : s.f) (e.size() == 1 ? singletons : pairs) += 1;
  require(o, singletons == 2 && pairs == 1, "shape of F");
  if (o.pass) o.detail = "|F| = 3: v0, v1, iwahori";
  return o;
}

Outcome germ_scaling() {
  Outcome o;
  FieldSpec f = Qp(5);
  BarbaschMoyTuple t = barbasch_moy_tuple(5, f, kDepth);
  ThetaMatrix th = theta_matrix(t, kDepth);
  LocalElement lambda2 = LocalElement::uniformizer_power(f, 2);
  std::vector<std::optional<Rational>> ratio(5);
  std::vector<int> support(5, 0);
  for (const auto& x : sample_regular_semisimple(f, 2, 3, 4, kSeed)) {
    RationalVector g = shalika_germs(x, t, th, kDepth).gamma;
    RationalVector h = shalika_germs(scale(lambda2, x), t, th, kDepth).gamma;
    for (std::size_t i = 0; i < 5; ++i) {
      require(o, (g[i] == 0) == (h[i] == 0), "germ support changes under scaling");
      if (g[i] == 0) continue;
      Rational r = h[i] / g[i];
      if (!ratio[i]) ratio[i] = r;
      require(o, *ratio[i] == r, "ratio not constant for orbit " + std::to_string(i));
      ++support[i];
    }
  }
  std::string exps;
  for (std::size_t i = 0; i < 5; ++i) {
    require(o, support[i] >= 10, "fewer than 10 samples for orbit " + std::to_string(i));
    if (!ratio[i]) continue;
    // ratio = p^e
    Rational r = *ratio[i];
    int e = 0;
    while (r > 1 && e < 64) r /= 5, ++e;
    while (r < 1 && e > -64) r *= 5, --e;
    require(o, r == 1, "ratio is not a power of p");
    exps += (exps.empty() ? "" : ", ") + t.pairs[i].orbit_label + ": p^" + std::to_string(e);
  }
  if (o.pass) o.detail = "ratios " + exps;
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"C1 germ expansion identity", 300, germ_expansion},
      {"C2 Theta triangularity", 120, theta_triangular},
      {"C3 nilpotent class count", 120, nilpotent_classes},
      {"C4 Ax-Kochen comparator", 180, ax_kochen},
      {"C5 Presburger tail logic", 60, presburger_tails},
      {"C6 rank-1 local matching", 600, local_matching},
      {"C7 stable regular germ", 120, stable_regular_germ},
      {"C8 measure and Hilbert invariants", 60, invariants},
      {"C9 parahoric combinatorics", 10, parahorics},
      {"C10 germ scaling", 180, germ_scaling},
  };
  bool all = true;
  for (const auto& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (s > c.budget_s) {
      o.pass = false;
      o.detail += " (over the time budget)";
    }
    all = all && o.pass;
    std::printf("%s %s: %s [%.1fs / %.0fs]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), s, c.budget_s);
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
