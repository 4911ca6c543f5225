#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "germlab/denefpas.hpp"
#include "germlab/linalg.hpp"
#include "germlab/localfield.hpp"

namespace germlab {

/// [[a, b], [c, -a]].
struct Sl2Element {
  LocalElement a, b, c;

  static Sl2Element zero(const FieldSpec& field);
  /// [[0, u], [0, 0]].
  static Sl2Element E(const LocalElement& u);
  const FieldSpec& field() const { return a.spec(); }
  bool is_zero() const;
  std::string to_string() const;
};

Sl2Element operator+(const Sl2Element& x, const Sl2Element& y);
Sl2Element scale(const LocalElement& lambda, const Sl2Element& x);
Sl2Element bracket(const Sl2Element& x, const Sl2Element& y);
/// Entrywise equality at the available precision.
bool same_value(const Sl2Element& x, const Sl2Element& y);

/// [[a, b], [c, d]] with ad - bc = 1.
struct Sl2Group {
  LocalElement a, b, c, d;

  static Sl2Group identity(const FieldSpec& field);
  static Sl2Group upper(const LocalElement& t);
  static Sl2Group lower(const LocalElement& t);
  static Sl2Group torus(const LocalElement& lambda);
  Sl2Group inverse() const;
};

Sl2Group operator*(const Sl2Group& g, const Sl2Group& h);
/// g X g^-1.
Sl2Element conjugate(const Sl2Group& g, const Sl2Element& x);

struct CharPoint {
  LocalElement D;
};

/// D = det X = -a^2 - bc.
CharPoint char_point(const Sl2Element& x);
/// D = 0 at working precision. Throws PrecisionError if D is a zero known
/// below the digit budget, or nonzero with ord(D) >= budget.
bool is_nilpotent(const Sl2Element& x);

enum class OrbitKind { RegularNilpotent, Split, Elliptic };

struct ClassInvariant {
  OrbitKind kind = OrbitKind::Split;
  /// Square class of the upper entry for regular nilpotents.
  SquareClass nilpotent_class = SquareClass::One;
  /// Hilbert symbol (b, -D) for semisimple elements.
  int sign = 1;
  /// "1", "u", "pi", "u*pi" for nilpotents; "+" / "-" for semisimple.
  std::string label() const;
  friend bool operator==(const ClassInvariant&, const ClassInvariant&) = default;
};

/// Throws std::invalid_argument for 0 and PrecisionError for ambiguous D.
ClassInvariant class_invariant(const Sl2Element& x);

struct NilpotentOrbit {
  std::string label;
  Sl2Element rep;
  /// nullopt for the zero orbit.
  std::optional<SquareClass> cls;
};

/// Zero first, then E(u) for u = 1, eps, pi, eps*pi (closure order with ties
/// broken by square-class label).
std::vector<NilpotentOrbit> nilpotent_orbit_reps(const FieldSpec& field);

enum class Parahoric { V0, V1, Iwahori };
std::string to_string(Parahoric f);
Parahoric parse_parahoric(const std::string& name);
inline constexpr Parahoric kAllParahorics[3] = {Parahoric::V0, Parahoric::V1, Parahoric::Iwahori};

/// {[[a, b], [c, -a]] : ord a >= alpha, ord b >= beta, ord c >= gamma}.
struct MoyPrasadLattice {
  Parahoric f = Parahoric::V0;
  Rational r = 0;
  int alpha = 0, beta = 0, gamma = 0;

  bool contains(const Sl2Element& x) const;
  /// O-module generators pi^alpha H, pi^beta E, pi^gamma F.
  std::vector<Sl2Element> generators(const FieldSpec& field) const;
  /// [this : sub] as a power of p; requires sub inside this.
  long index_exponent(const MoyPrasadLattice& sub) const;
  friend bool operator==(const MoyPrasadLattice& x, const MoyPrasadLattice& y) {
    return x.alpha == y.alpha && x.beta == y.beta && x.gamma == y.gamma;
  }
};

/// r in Z for the vertices, r in (1/2)Z for the Iwahori point.
MoyPrasadLattice moy_prasad_lattice(Parahoric f, const Rational& r);
/// The lattice at the next jump after r.
MoyPrasadLattice moy_prasad_lattice_plus(Parahoric f, const Rational& r);

struct BarbaschMoyPair {
  Sl2Element N;
  Parahoric f = Parahoric::V0;
  std::string orbit_label;
  bool dominance_verified = false;
  int verified_depth = 0;
  std::size_t nilpotents_checked = 0;

  /// N + g_{f,0+}.
  MoyPrasadLattice support() const { return moy_prasad_lattice_plus(f, 0); }
};

struct BarbaschMoyTuple {
  std::vector<BarbaschMoyPair> pairs;
  bool empty() const { return pairs.empty(); }
  std::size_t size() const { return pairs.size(); }
  nlohmann::json to_json() const;
};

/// First k orbits in closure order, each paired with a parahoric found by
/// search over f and torus conjugates of the representative. Empty for k > 5.
BarbaschMoyTuple barbasch_moy_tuple(int k, const FieldSpec& field, int search_depth);

struct OrbitalIntegral {
  Rational value;
  int depth = 0;
  /// Certified tail at depth and depth + 1 with equal values.
  bool stable = false;
};

/// Leray measure of {Y : -det Y = target, Y in N + L, class condition on the
/// upper entry}; target 0 is the nilpotent cone off the origin. The class
/// condition is the Hilbert sign (semisimple) or the square class (nilpotent).
OrbitalIntegral fiber_orbital_integral(const LocalElement& target, const ClassInvariant& inv,
                                       const BarbaschMoyPair& upsilon, int depth);

/// O(X, 1_Upsilon) for regular semisimple X.
OrbitalIntegral orbital_integral(const Sl2Element& x, const BarbaschMoyPair& upsilon, int depth);
/// The same through (D, Hilbert sign) only.
OrbitalIntegral orbital_integral(const CharPoint& d, int sign, const BarbaschMoyPair& upsilon, int depth);
/// Point mass at 0 for the zero orbit, the cone fiber for regular orbits.
OrbitalIntegral nilpotent_orbital_integral(const Sl2Element& n, const BarbaschMoyPair& upsilon, int depth);

struct ThetaMatrix {
  /// entries[j][i] = O(N_i, 1_{Upsilon_j}), zero orbit first.
  RationalMatrix entries;
  std::vector<std::string> orbit_labels;
  RationalMatrix adjugate;
  Rational det;
  bool stable = false;
  bool upper_triangular = false;
  std::string to_csv() const;
  nlohmann::json to_json() const;
};

/// Throws std::invalid_argument for an empty tuple and std::domain_error
/// if det = 0.
ThetaMatrix theta_matrix(const BarbaschMoyTuple& upsilon, int depth);

struct GermRow {
  CharPoint D;
  ClassInvariant inv;
  /// O(X, 1_{Upsilon_j}).
  RationalVector orbital;
  /// Gamma = adj(Theta) O; the normalized germs are Gamma / det.
  RationalVector gamma;
  bool identity_holds = false;
  bool stable = false;
  RationalVector normalized(const Rational& det) const;
};

struct GermTable {
  Rational det;
  long a = 0;
  std::vector<GermRow> rows;
  std::string to_csv() const;
};

GermRow shalika_germs(const Sl2Element& x, const BarbaschMoyTuple& upsilon, const ThetaMatrix& theta, int depth);
GermRow shalika_germs(const CharPoint& d, int sign, const BarbaschMoyTuple& upsilon, const ThetaMatrix& theta,
                      int depth);

/// Hilbert signs of the rational classes in the stable class of D: {+1}
/// when -D is a square, {+1, -1} otherwise.
std::vector<int> rational_classes(const CharPoint& d);
/// [[0, b], [-D/b, 0]] with b in a square class of Hilbert sign `sign` against -D.
Sl2Element semisimple_representative(const CharPoint& d, int sign);

/// Per orbit, the sum of Gamma_i / det over the rational classes of the
/// stable class of D.
RationalVector stable_germs(const CharPoint& d, const BarbaschMoyTuple& upsilon, const ThetaMatrix& theta,
                            int depth);

/// Regular semisimple samples: for each square class of D, `per_class`
/// elements with ord D in [a0, a0 + span] of matching parity, alternating
/// Hilbert signs when the torus is elliptic, then conjugated by a random
/// element of SL2(O). Reproducible from the seed.
std::vector<Sl2Element> sample_regular_semisimple(const FieldSpec& field, int a0, int span, int per_class,
                                                  std::uint64_t seed);
Sl2Group random_sl2_integral(const FieldSpec& field, int digits, std::mt19937_64& rng);

/// {X : ord(char_point(X)) >= a} over the variables a, b, c.
DefinableSet truncation_family(long a);

struct DependenceReport {
  bool dependent = false;
  bool inconclusive = false;
  /// Common kernel of all sample matrices.
  std::vector<RationalVector> kernel;
  std::vector<std::size_t> ranks;
  nlohmann::json to_json() const;
};

/// samples[a] has one row per sampled X and one column per function.
DependenceReport asymptotic_dependence_check(const std::vector<RationalMatrix>& samples);

struct ConjugationSearch {
  std::size_t classes = 0;
  std::size_t elements = 0;
  std::vector<Sl2Element> representatives;
};

/// Classifies sampled nilpotent elements by explicit conjugator search: a
/// unipotent normalization to E(b), then a torus element whose square
/// matches to `depth` relative digits (Hensel finishes the root).
ConjugationSearch nilpotent_conjugation_search(const FieldSpec& field, int depth, std::uint64_t seed);

}  // namespace germlab
