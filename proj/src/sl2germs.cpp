#include "germlab/sl2germs.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "germlab/parallel.hpp"
#include "germlab/polynomial.hpp"

namespace germlab {

namespace {

// Exact zero, or a zero known to the full digit budget.
bool zero_at_working_precision(const LocalElement& x) {
  if (x.is_zero()) return true;
  if (x.is_fuzzy_zero()) {
    if (x.absolute_precision() >= x.spec().precision()) return true;
    throw PrecisionError("zero test undecided modulo pi^" + std::to_string(x.absolute_precision()));
  }
  return false;
}

// x in pi^k O; throws if the known digits cannot tell.
bool in_ideal(const LocalElement& x, int k) {
  if (x.is_zero()) return true;
  if (x.is_nonzero()) return *x.ord() >= k;
  if (x.absolute_precision() >= k) return true;
  throw PrecisionError("membership in pi^" + std::to_string(k) + " O undecided");
}

long ceil_div(const Rational& q) {
  Integer c;
  mpz_cdiv_q(c.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return c.get_si();
}

long floor_div(const Rational& q) {
  Integer c;
  mpz_fdiv_q(c.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return c.get_si();
}

LocalElement random_digits(const FieldSpec& field, int valuation, int leading, int digits, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> digit(0, field.p() - 1);
  std::vector<int> d{leading};
  for (int i = 1; i < digits; ++i) d.push_back(digit(rng));
  return LocalElement::from_digits(field, valuation, d);
}

LocalElement random_integral(const FieldSpec& field, int digits, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> digit(0, field.p() - 1);
  std::vector<int> d;
  for (int i = 0; i < digits; ++i) d.push_back(digit(rng));
  return LocalElement::from_digits(field, 0, d);
}

// Unit with leading digit drawn among residues (want = +1) or nonresidues (want = -1).
LocalElement random_unit(const FieldSpec& field, int want, int digits, std::mt19937_64& rng) {
  const int p = field.p();
  std::vector<int> leads;
  for (int r = 1; r < p; ++r)
    if (want == 0 || legendre_symbol(r, p) == want) leads.push_back(r);
  std::uniform_int_distribution<std::size_t> pick(0, leads.size() - 1);
  return random_digits(field, 0, leads[pick(rng)], digits, rng);
}

// meas{a in pi^alpha O : ord(target - a^2) >= k}.
class SliceCounter {
 public:
  using Code = ResidueRing::Code;

  SliceCounter(const ResidueRing& ring, Code target) : ring_(ring), t_(target), k_(ring.depth()) {}

  // Completions of the class x mod pi^j (v = ord x, -1 for x = 0).
  Code count(int j, Code x, int v) const {
    Code diff = ring_.sub(ring_.mul(x, x), t_);
    int need = v < 0 ? std::min(2 * j, k_) : std::min(j + v, k_);
    if (ring_.ord(diff) < need) return 0;
    if (j >= k_) return 1;
    // All completions share the square modulo pi^k.
    if (v < 0 ? 2 * j >= k_ : j + v >= k_) return ring_.ord(diff) >= k_ ? power(k_ - j) : 0;
    Code total = 0;
    const Code step = ring_.uniformizer_power(j);
    for (int d = 0; d < ring_.field().p(); ++d) {
      int w = v >= 0 ? v : (d == 0 ? -1 : j);
      total += count(j + 1, x + static_cast<Code>(d) * step, w);
    }
    return total;
  }

 private:
  Code power(int e) const {
    Code r = 1;
    for (int i = 0; i < e; ++i) r *= static_cast<Code>(ring_.field().p());
    return r;
  }

  const ResidueRing& ring_;
  Code t_;
  int k_;
};

Rational slice_measure(const FieldSpec& field, const LocalElement& target, int alpha, int k) {
  const int p = field.p();
  if (alpha < 0) throw std::invalid_argument("lattice with non-integral diagonal");
  if (k <= 0) return rational_pow(p, -alpha);
  if (target.is_fuzzy_zero() && target.absolute_precision() < k)
    throw PrecisionError("characteristic point not known modulo pi^" + std::to_string(k));
  if (target.is_nonzero() && *target.ord() < 0) return 0;
  if (alpha >= k) return in_ideal(target, k) ? rational_pow(p, -alpha) : Rational(0);
  std::optional<ResidueRing> ring;
  try {
    ring.emplace(field, k);
  } catch (const std::invalid_argument&) {
    throw PrecisionError("fiber depth " + std::to_string(k) + " exceeds the residue ring capacity");
  }
  ResidueRing::Code t = target.is_nonzero() ? ring->from_element(target) : 0;
  SliceCounter counter(*ring, t);
  return Rational(Integer(std::to_string(counter.count(alpha, 0, -1)))) * rational_pow(p, -k);
}

bool class_condition(const ClassInvariant& inv, const LocalElement& target, const LocalElement& b) {
  if (inv.kind == OrbitKind::RegularNilpotent) return square_class(b) == inv.nilpotent_class;
  return hilbert_symbol(b, target) == inv.sign;
}

struct TailSum {
  Rational value;
  bool certified = false;
};

// Terms T(s) = sum over the two unit square classes of mass(s) p^s A(s).
class ShellSeries {
 public:
  ShellSeries(const LocalElement& target, const ClassInvariant& inv, const MoyPrasadLattice& lat)
      : target_(target), inv_(inv), lat_(lat), field_(target.spec()) {}

  Rational term(int s) {
    while (beta() + static_cast<int>(terms_.size()) <= s) {
      int t = beta() + static_cast<int>(terms_.size());
      terms_.push_back(compute(t));
    }
    return terms_[static_cast<std::size_t>(s - beta())];
  }

  TailSum sum(int last) {
    TailSum out;
    for (int s = beta(); s <= last + 2; ++s) out.value += term(s);
    // Period two in s: each parity decays by the same ratio.
    std::optional<Rational> ratio;
    bool ok = true;
    for (int q : {last - 1, last}) {
      const Rational a = term(q), b = term(q + 2);
      if (a == 0) {
        ok = ok && b == 0;
        continue;
      }
      Rational r = b / a;
      if (ratio && *ratio != r) ok = false;
      ratio = r;
    }
    if (ok && ratio) ok = *ratio > 0 && *ratio < 1;
    out.certified = ok;
    if (ok && ratio) out.value += (term(last + 1) + term(last + 2)) * *ratio / (1 - *ratio);
    return out;
  }

  int beta() const { return lat_.beta; }

 private:
  Rational compute(int s) {
    const int p = field_.p();
    Rational a = slice_measure(field_, target_, lat_.alpha, lat_.gamma + s);
    if (a == 0) return 0;
    int ok = 0;
    for (SquareClass c : {SquareClass::One, SquareClass::NonsquareUnit}) {
      LocalElement b = LocalElement::square_class_representative(field_, c) * LocalElement::uniformizer_power(field_, s);
      if (class_condition(inv_, target_, b)) ++ok;
    }
    // mass(s, sigma) = (p-1)/2 p^(-s-1), times the Leray density p^s.
    Rational mass(ok * (p - 1), 2 * p);
    mass.canonicalize();
    return mass * a;
  }

  LocalElement target_;
  ClassInvariant inv_;
  MoyPrasadLattice lat_;
  FieldSpec field_;
  std::vector<Rational> terms_;
};

// Conjugator g = torus(lambda) * lower(a/b) taking nilpotent y (b != 0) to E(n_b).
std::optional<Sl2Group> normalizing_conjugator(const Sl2Element& y, const LocalElement& nb) {
  if (!y.b.is_nonzero()) return std::nullopt;
  Sl2Group g = Sl2Group::lower(y.a / y.b);
  LocalElement ratio = nb / y.b;
  try {
    return Sl2Group::torus(sqrt(ratio)) * g;
  } catch (const ArithmeticError&) {
    return std::nullopt;
  }
}

}  // namespace

// ---------------------------------------------------------------------------

Sl2Element Sl2Element::zero(const FieldSpec& field) {
  return {LocalElement::zero(field), LocalElement::zero(field), LocalElement::zero(field)};
}

Sl2Element Sl2Element::E(const LocalElement& u) {
  return {LocalElement::zero(u.spec()), u, LocalElement::zero(u.spec())};
}

bool Sl2Element::is_zero() const { return !a.is_nonzero() && !b.is_nonzero() && !c.is_nonzero(); }

std::string Sl2Element::to_string() const {
  return "[[" + a.to_string() + ", " + b.to_string() + "], [" + c.to_string() + ", " + (-a).to_string() + "]]";
}

Sl2Element operator+(const Sl2Element& x, const Sl2Element& y) { return {x.a + y.a, x.b + y.b, x.c + y.c}; }

Sl2Element scale(const LocalElement& lambda, const Sl2Element& x) {
  return {lambda * x.a, lambda * x.b, lambda * x.c};
}

Sl2Element bracket(const Sl2Element& x, const Sl2Element& y) {
  LocalElement two = LocalElement::from_int(x.field(), 2);
  return {x.b * y.c - y.b * x.c, two * (x.a * y.b - y.a * x.b), two * (x.c * y.a - x.a * y.c)};
}

bool same_value(const Sl2Element& x, const Sl2Element& y) {
  return same_value(x.a, y.a) && same_value(x.b, y.b) && same_value(x.c, y.c);
}

Sl2Group Sl2Group::identity(const FieldSpec& field) {
  return {LocalElement::one(field), LocalElement::zero(field), LocalElement::zero(field), LocalElement::one(field)};
}

Sl2Group Sl2Group::upper(const LocalElement& t) {
  const FieldSpec& f = t.spec();
  return {LocalElement::one(f), t, LocalElement::zero(f), LocalElement::one(f)};
}

Sl2Group Sl2Group::lower(const LocalElement& t) {
  const FieldSpec& f = t.spec();
  return {LocalElement::one(f), LocalElement::zero(f), t, LocalElement::one(f)};
}

Sl2Group Sl2Group::torus(const LocalElement& lambda) {
  const FieldSpec& f = lambda.spec();
  return {lambda, LocalElement::zero(f), LocalElement::zero(f), lambda.inverse()};
}

Sl2Group Sl2Group::inverse() const { return {d, -b, -c, a}; }

Sl2Group operator*(const Sl2Group& g, const Sl2Group& h) {
  return {g.a * h.a + g.b * h.c, g.a * h.b + g.b * h.d, g.c * h.a + g.d * h.c, g.c * h.b + g.d * h.d};
}

Sl2Element conjugate(const Sl2Group& g, const Sl2Element& x) {
  // (g X) g^-1 with X = [[a, b], [c, -a]].
  LocalElement m11 = g.a * x.a + g.b * x.c, m12 = g.a * x.b - g.b * x.a;
  LocalElement m21 = g.c * x.a + g.d * x.c, m22 = g.c * x.b - g.d * x.a;
  Sl2Group inv = g.inverse();
  return {m11 * inv.a + m12 * inv.c, m11 * inv.b + m12 * inv.d, m21 * inv.a + m22 * inv.c};
}

CharPoint char_point(const Sl2Element& x) { return {-(x.a * x.a) - x.b * x.c}; }

bool is_nilpotent(const Sl2Element& x) {
  LocalElement d = char_point(x).D;
  if (zero_at_working_precision(d)) return true;
  if (*d.ord() >= x.field().precision())
    throw PrecisionError("ord(D) at or beyond the digit budget: indistinguishable from nilpotent at this precision");
  return false;
}

std::string ClassInvariant::label() const {
  if (kind == OrbitKind::RegularNilpotent) return germlab::to_string(nilpotent_class);
  return sign > 0 ? "+" : "-";
}

ClassInvariant class_invariant(const Sl2Element& x) {
  ClassInvariant inv;
  if (is_nilpotent(x)) {
    inv.kind = OrbitKind::RegularNilpotent;
    if (x.b.is_nonzero()) inv.nilpotent_class = square_class(x.b);
    else if (x.c.is_nonzero()) inv.nilpotent_class = square_class(-x.c);
    else throw std::invalid_argument("class invariant of a non-regular element");
    return inv;
  }
  LocalElement target = -char_point(x).D;
  inv.kind = square_class(target) == SquareClass::One ? OrbitKind::Split : OrbitKind::Elliptic;
  if (x.b.is_nonzero()) inv.sign = hilbert_symbol(x.b, target);
  else if (x.c.is_nonzero()) inv.sign = hilbert_symbol(-x.c, target);
  else inv.sign = 1;
  return inv;
}

std::vector<NilpotentOrbit> nilpotent_orbit_reps(const FieldSpec& field) {
  if (field.p() < 5 || !is_prime(field.p())) throw std::invalid_argument("sl2 germs need a prime p >= 5");
  std::vector<NilpotentOrbit> out;
  out.push_back({"0", Sl2Element::zero(field), std::nullopt});
  for (SquareClass c : kAllSquareClasses)
    out.push_back({to_string(c), Sl2Element::E(LocalElement::square_class_representative(field, c)), c});
  return out;
}

std::string to_string(Parahoric f) {
  switch (f) {
    case Parahoric::V0: return "v0";
    case Parahoric::V1: return "v1";
    case Parahoric::Iwahori: return "iwahori";
  }
  return "?";
}

Parahoric parse_parahoric(const std::string& name) {
  for (Parahoric f : kAllParahorics)
    if (to_string(f) == name) return f;
  throw std::invalid_argument("unknown parahoric '" + name + "'");
}

bool MoyPrasadLattice::contains(const Sl2Element& x) const {
  return in_ideal(x.a, alpha) && in_ideal(x.b, beta) && in_ideal(x.c, gamma);
}

std::vector<Sl2Element> MoyPrasadLattice::generators(const FieldSpec& field) const {
  LocalElement z = LocalElement::zero(field);
  return {{LocalElement::uniformizer_power(field, alpha), z, z},
          {z, LocalElement::uniformizer_power(field, beta), z},
          {z, z, LocalElement::uniformizer_power(field, gamma)}};
}

long MoyPrasadLattice::index_exponent(const MoyPrasadLattice& sub) const {
  if (sub.alpha < alpha || sub.beta < beta || sub.gamma < gamma)
    throw std::invalid_argument("lattice is not a sublattice");
  return (sub.alpha - alpha) + (sub.beta - beta) + (sub.gamma - gamma);
}

MoyPrasadLattice moy_prasad_lattice(Parahoric f, const Rational& r) {
  MoyPrasadLattice L;
  L.f = f;
  L.r = r;
  if (f == Parahoric::Iwahori) {
    Rational twice = 2 * r;
    if (twice.get_den() != 1) throw std::invalid_argument("Iwahori depth must lie in (1/2)Z");
    L.alpha = static_cast<int>(ceil_div(r));
    L.beta = static_cast<int>(ceil_div(r - Rational(1, 2)));
    L.gamma = static_cast<int>(ceil_div(r + Rational(1, 2)));
    return L;
  }
  if (r.get_den() != 1) throw std::invalid_argument("vertex depth must be an integer");
  int n = static_cast<int>(r.get_num().get_si());
  L.alpha = n;
  L.beta = f == Parahoric::V0 ? n : n - 1;
  L.gamma = f == Parahoric::V0 ? n : n + 1;
  return L;
}

MoyPrasadLattice moy_prasad_lattice_plus(Parahoric f, const Rational& r) {
  if (f == Parahoric::Iwahori) {
    Rational next(floor_div(2 * r) + 1, 2);
    next.canonicalize();
    return moy_prasad_lattice(f, next);
  }
  return moy_prasad_lattice(f, Rational(floor_div(r) + 1));
}

nlohmann::json BarbaschMoyTuple::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& pr : pairs)
    out.push_back({{"orbit", pr.orbit_label},
                   {"N", pr.N.to_string()},
                   {"f", to_string(pr.f)},
                   {"dominance_verified", pr.dominance_verified},
                   {"verified_depth", pr.verified_depth},
                   {"nilpotents_checked", pr.nilpotents_checked}});
  return out;
}

namespace {

// Nilpotents N' in N + g_{f,0+} at the given depth; the lower entry is solved.
struct DominanceCheck {
  bool ok = true;
  std::size_t checked = 0;
};

DominanceCheck check_dominance(const Sl2Element& n, const MoyPrasadLattice& plus, int depth) {
  const FieldSpec& field = n.field();
  DominanceCheck out;
  LocalElement z = LocalElement::zero(field);
  auto xs = coset_representatives({z, plus.alpha}, std::max(depth, plus.alpha));
  auto ys = coset_representatives({z, plus.beta}, std::max(depth, plus.beta));
  const std::size_t total = xs.size() * ys.size();
  const std::size_t limit = 400;
  const std::size_t stride = total > limit ? total / limit : 1;
  for (std::size_t idx = 0; idx < total; idx += stride) {
    const LocalElement& x = xs[idx / ys.size()];
    LocalElement b = n.b + ys[idx % ys.size()];
    if (!b.is_nonzero()) {
      // Lower-triangular nilpotents [[0, 0], [z, 0]] include 0 here.
      out.ok = false;
      return out;
    }
    Sl2Element y{x, b, -(x * x) / b};
    if (!plus.contains({z, z, y.c})) continue;
    ++out.checked;
    auto g = normalizing_conjugator(y, n.b);
    if (!g || !same_value(conjugate(*g, y), n)) {
      out.ok = false;
      return out;
    }
  }
  return out;
}

}  // namespace

BarbaschMoyTuple barbasch_moy_tuple(int k, const FieldSpec& field, int search_depth) {
  BarbaschMoyTuple tuple;
  auto orbits = nilpotent_orbit_reps(field);
  if (k < 1 || k > static_cast<int>(orbits.size())) return tuple;
  for (int i = 0; i < k; ++i) {
    const NilpotentOrbit& orbit = orbits[static_cast<std::size_t>(i)];
    if (!orbit.cls) {
      // 0 lies in every orbit closure.
      tuple.pairs.push_back({orbit.rep, Parahoric::V0, orbit.label, true, search_depth, 0});
      continue;
    }
    std::optional<BarbaschMoyPair> found, fallback;
    for (int j : {0, -1, 1}) {
      if (found) break;
      Sl2Element n = Sl2Element::E(orbit.rep.b * LocalElement::uniformizer_power(field, 2 * j));
      for (Parahoric f : kAllParahorics) {
        if (!moy_prasad_lattice(f, 0).contains(n) || moy_prasad_lattice_plus(f, 0).contains(n)) continue;
        DominanceCheck dc = check_dominance(n, moy_prasad_lattice_plus(f, 0), search_depth);
        BarbaschMoyPair pr{n, f, orbit.label, dc.ok, search_depth, dc.checked};
        if (dc.ok) {
          found = pr;
          break;
        }
        if (!fallback) fallback = pr;
      }
    }
    if (found) tuple.pairs.push_back(*found);
    else if (fallback) tuple.pairs.push_back(*fallback);
    else throw std::runtime_error("no parahoric contains a representative of orbit " + orbit.label);
  }
  return tuple;
}

OrbitalIntegral fiber_orbital_integral(const LocalElement& target, const ClassInvariant& inv,
                                       const BarbaschMoyPair& upsilon, int depth) {
  const FieldSpec& field = target.spec();
  const int p = field.p();
  const Sl2Element& n = upsilon.N;
  if (n.a.is_nonzero() || n.c.is_nonzero()) throw std::invalid_argument("test functions are built on E(u)");
  MoyPrasadLattice lat = upsilon.support();
  OrbitalIntegral out;
  out.depth = depth;
  if (n.b.is_nonzero() && *n.b.ord() < lat.beta) {
    // b runs over n_b + pi^beta O: a single shell and square class.
    int s = *n.b.ord();
    out.stable = true;
    if (class_condition(inv, target, n.b))
      out.value = rational_pow(p, s - lat.beta) * slice_measure(field, target, lat.alpha, lat.gamma + s);
    return out;
  }
  ShellSeries series(target, inv, lat);
  int base = std::max(lat.beta + 1, 2 * lat.alpha - lat.gamma + 1);
  if (target.is_nonzero()) base = std::max(base, *target.ord() - lat.gamma + 1);
  TailSum first = series.sum(base + depth);
  TailSum second = series.sum(base + depth + 1);
  if (!first.certified && !second.certified)
    throw PrecisionError("orbital integral tail is not geometric at depth " + std::to_string(depth));
  out.value = first.certified ? first.value : second.value;
  out.stable = first.certified && second.certified && first.value == second.value;
  return out;
}

OrbitalIntegral orbital_integral(const CharPoint& d, int sign, const BarbaschMoyPair& upsilon, int depth) {
  if (zero_at_working_precision(d.D)) throw std::invalid_argument("orbital integral of a nilpotent element");
  if (*d.D.ord() >= d.D.spec().precision())
    throw PrecisionError("ord(D) at or beyond the digit budget: indistinguishable from nilpotent at this precision");
  ClassInvariant inv;
  LocalElement target = -d.D;
  inv.kind = square_class(target) == SquareClass::One ? OrbitKind::Split : OrbitKind::Elliptic;
  inv.sign = sign;
  return fiber_orbital_integral(target, inv, upsilon, depth);
}

OrbitalIntegral orbital_integral(const Sl2Element& x, const BarbaschMoyPair& upsilon, int depth) {
  if (is_nilpotent(x)) throw std::invalid_argument("orbital integral of a nilpotent element");
  return orbital_integral(char_point(x), class_invariant(x).sign, upsilon, depth);
}

OrbitalIntegral nilpotent_orbital_integral(const Sl2Element& n, const BarbaschMoyPair& upsilon, int depth) {
  if (!is_nilpotent(n)) throw std::invalid_argument("element is not nilpotent");
  if (n.is_zero()) {
    OrbitalIntegral out;
    out.depth = depth;
    out.stable = true;
    out.value = upsilon.support().contains(upsilon.N) ? 1 : 0;
    return out;
  }
  return fiber_orbital_integral(LocalElement::zero(n.field()), class_invariant(n), upsilon, depth);
}

std::string ThetaMatrix::to_csv() const {
  std::string out = "test_function";
  for (const auto& l : orbit_labels) out += ",O_" + l;
  out += "\n";
  for (std::size_t j = 0; j < entries.size(); ++j) {
    out += orbit_labels[j];
    for (const auto& x : entries[j]) out += "," + germlab::to_string(x);
    out += "\n";
  }
  return out;
}

nlohmann::json ThetaMatrix::to_json() const {
  auto matrix = [](const RationalMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : m) {
      nlohmann::json r = nlohmann::json::array();
      for (const auto& x : row) r.push_back(germlab::to_string(x));
      rows.push_back(r);
    }
    return rows;
  };
  return {{"orbits", orbit_labels},
          {"theta", matrix(entries)},
          {"adjugate", matrix(adjugate)},
          {"det", germlab::to_string(det)},
          {"stable", stable},
          {"upper_triangular", upper_triangular}};
}

ThetaMatrix theta_matrix(const BarbaschMoyTuple& upsilon, int depth) {
  const std::size_t k = upsilon.size();
  if (k == 0) throw std::invalid_argument("empty Barbasch-Moy tuple");
  ThetaMatrix theta;
  theta.entries.assign(k, RationalVector(k, 0));
  std::vector<char> stable(k * k, 0);
  parallel_for(k * k, [&](std::size_t idx) {
    std::size_t j = idx / k, i = idx % k;
    OrbitalIntegral o = nilpotent_orbital_integral(upsilon.pairs[i].N, upsilon.pairs[j], depth);
    theta.entries[j][i] = o.value;
    stable[idx] = o.stable;
  });
  for (const auto& pr : upsilon.pairs) theta.orbit_labels.push_back(pr.orbit_label);
  theta.stable = std::all_of(stable.begin(), stable.end(), [](char c) { return c != 0; });
  theta.det = determinant(theta.entries);
  if (theta.det == 0) throw std::domain_error("Theta is singular: the tuple is not a germ basis");
  theta.adjugate = adjugate(theta.entries);
  theta.upper_triangular = is_upper_triangular(theta.entries);
  return theta;
}

RationalVector GermRow::normalized(const Rational& det) const {
  RationalVector out;
  for (const auto& g : gamma) out.push_back(g / det);
  return out;
}

std::string GermTable::to_csv() const {
  std::string out = "a,D,class";
  std::size_t k = rows.empty() ? 0 : rows[0].gamma.size();
  for (std::size_t i = 0; i < k; ++i) out += ",Gamma_" + std::to_string(i);
  out += ",det\n";
  for (const auto& row : rows) {
    out += std::to_string(a) + "," + row.D.D.to_string() + "," + row.inv.label();
    for (const auto& g : row.gamma) out += "," + germlab::to_string(g);
    out += "," + germlab::to_string(det) + "\n";
  }
  return out;
}

GermRow shalika_germs(const CharPoint& d, int sign, const BarbaschMoyTuple& upsilon, const ThetaMatrix& theta,
                      int depth) {
  GermRow row{d, {}, {}, {}, false, false};
  row.inv.kind = square_class(-d.D) == SquareClass::One ? OrbitKind::Split : OrbitKind::Elliptic;
  row.inv.sign = sign;
  row.stable = true;
  for (const auto& pr : upsilon.pairs) {
    OrbitalIntegral o = orbital_integral(d, sign, pr, depth);
    row.orbital.push_back(o.value);
    row.stable = row.stable && o.stable;
  }
  row.gamma = multiply(theta.adjugate, row.orbital);
  RationalVector lhs = row.orbital;
  for (auto& x : lhs) x *= theta.det;
  row.identity_holds = lhs == multiply(theta.entries, row.gamma);
  return row;
}

GermRow shalika_germs(const Sl2Element& x, const BarbaschMoyTuple& upsilon, const ThetaMatrix& theta, int depth) {
  if (is_nilpotent(x)) throw std::invalid_argument("germs are evaluated at regular semisimple elements");
  return shalika_germs(char_point(x), class_invariant(x).sign, upsilon, theta, depth);
}

std::vector<int> rational_classes(const CharPoint& d) {
  if (square_class(-d.D) == SquareClass::One) return {1};
  return {1, -1};
}

Sl2Element semisimple_representative(const CharPoint& d, int sign) {
  LocalElement target = -d.D;
  for (SquareClass c : kAllSquareClasses) {
    LocalElement b = LocalElement::square_class_representative(d.D.spec(), c);
    if (hilbert_symbol(b, target) == sign) return {LocalElement::zero(d.D.spec()), b, target / b};
  }
  throw std::invalid_argument("no rational class with that sign");
}

RationalVector stable_germs(const CharPoint& d, const BarbaschMoyTuple& upsilon, const ThetaMatrix& theta,
                            int depth) {
  RationalVector sum(upsilon.size(), 0);
  for (int sign : rational_classes(d)) {
    RationalVector g = shalika_germs(d, sign, upsilon, theta, depth).normalized(theta.det);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += g[i];
  }
  return sum;
}

Sl2Group random_sl2_integral(const FieldSpec& field, int digits, std::mt19937_64& rng) {
  LocalElement x = random_integral(field, digits, rng);
  LocalElement y = random_integral(field, digits, rng);
  LocalElement u = random_unit(field, 0, digits, rng);
  return Sl2Group::upper(x) * Sl2Group::lower(y) * Sl2Group::torus(u);
}

std::vector<Sl2Element> sample_regular_semisimple(const FieldSpec& field, int a0, int span, int per_class,
                                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int digits = 4;
  std::vector<Sl2Element> out;
  for (SquareClass c : kAllSquareClasses) {
    const int parity = (c == SquareClass::Uniformizer || c == SquareClass::NonsquareUniformizer) ? 1 : 0;
    const int want = (c == SquareClass::One || c == SquareClass::Uniformizer) ? 1 : -1;
    std::vector<int> vals;
    for (int r = a0; r <= a0 + span; ++r)
      if (((r % 2) + 2) % 2 == parity) vals.push_back(r);
    if (vals.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick_val(0, vals.size() - 1);
    for (int n = 0; n < per_class; ++n) {
      LocalElement d = random_unit(field, want, digits, rng) * LocalElement::uniformizer_power(field, vals[pick_val(rng)]);
      LocalElement target = -d;
      bool elliptic = square_class(target) != SquareClass::One;
      int sign = elliptic && n % 2 ? -1 : 1;
      LocalElement b = LocalElement::zero(field);
      for (SquareClass s : kAllSquareClasses) {
        LocalElement rep = LocalElement::square_class_representative(field, s);
        if (hilbert_symbol(rep, target) == sign) {
          b = rep;
          break;
        }
      }
      LocalElement w = random_unit(field, 0, digits, rng);
      b = b * w * w;
      LocalElement a = random_integral(field, digits, rng);
      Sl2Element x{a, b, (target - a * a) / b};
      out.push_back(conjugate(random_sl2_integral(field, digits, rng), x));
    }
  }
  return out;
}

DefinableSet truncation_family(long a) {
  return parse_formula("vf a, b, c; ord(-a^2 - b*c) >= " + std::to_string(a));
}

nlohmann::json DependenceReport::to_json() const {
  nlohmann::json k = nlohmann::json::array();
  for (const auto& v : kernel) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& x : v) row.push_back(germlab::to_string(x));
    k.push_back(row);
  }
  return {{"dependent", dependent}, {"inconclusive", inconclusive}, {"kernel", k}, {"ranks", ranks}};
}

DependenceReport asymptotic_dependence_check(const std::vector<RationalMatrix>& samples) {
  DependenceReport rep;
  if (samples.empty()) throw std::invalid_argument("no sample matrices");
  std::optional<std::size_t> cols;
  RationalMatrix stacked;
  for (const auto& m : samples) {
    if (m.empty()) {
      rep.inconclusive = true;
      rep.ranks.push_back(0);
      continue;
    }
    if (cols && m[0].size() != *cols) throw std::invalid_argument("sample matrices disagree on the function count");
    cols = m[0].size();
    rep.ranks.push_back(rank(m));
    if (m.size() < *cols) rep.inconclusive = true;
    stacked.insert(stacked.end(), m.begin(), m.end());
  }
  if (!cols) {
    rep.inconclusive = true;
    return rep;
  }
  rep.kernel = kernel(stacked, *cols);
  rep.dependent = !rep.kernel.empty();
  return rep;
}

ConjugationSearch nilpotent_conjugation_search(const FieldSpec& field, int depth, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int p = field.p();
  ConjugationSearch out;
  std::vector<Sl2Element> elems{Sl2Element::zero(field)};
  for (int v = -1; v <= 2; ++v)
    for (int lead = 1; lead < p; ++lead) {
      LocalElement b = random_digits(field, v, lead, depth, rng);
      elems.push_back(conjugate(random_sl2_integral(field, depth, rng), Sl2Element::E(b)));
    }
  out.elements = elems.size();

  // Upper entry of a unipotent (and Weyl) normalization to E(b).
  auto normal_form = [&](const Sl2Element& y) -> LocalElement {
    Sl2Element z = y;
    if (!z.b.is_nonzero()) {
      Sl2Group w{LocalElement::zero(field), LocalElement::one(field), -LocalElement::one(field),
                 LocalElement::zero(field)};
      z = conjugate(w, z);
    }
    return conjugate(Sl2Group::lower(z.a / z.b), z).b;
  };
  std::vector<LocalElement> lambdas_sq;
  for (int j = -2; j <= 2; ++j) {
    auto units = coset_representatives({LocalElement::zero(field), 0}, depth);
    for (const auto& u : units) {
      if (!u.is_nonzero() || *u.ord() > 0) continue;
      LocalElement l = u * LocalElement::uniformizer_power(field, j);
      lambdas_sq.push_back(l * l);
    }
  }
  auto conjugate_pair = [&](const Sl2Element& x, const Sl2Element& y) {
    if (x.is_zero() || y.is_zero()) return x.is_zero() && y.is_zero();
    LocalElement q = normal_form(y) / normal_form(x);
    const int target = *q.ord() + depth;
    for (const auto& l2 : lambdas_sq) {
      LocalElement diff = l2 - q;
      if (diff.is_nonzero() ? *diff.ord() >= target : diff.absolute_precision() >= target) return true;
    }
    return false;
  };
  for (const auto& x : elems) {
    bool placed = false;
    for (const auto& r : out.representatives)
      if (conjugate_pair(x, r)) {
        placed = true;
        break;
      }
    if (!placed) out.representatives.push_back(x);
  }
  out.classes = out.representatives.size();
  return out;
}

}  // namespace germlab
